// Unit tests for string/number helpers and the seeded RNG streams.
#include <doctest.h>

#include <cstdint>
#include <set>
#include <string>

#include "fpp/rng.hpp"
#include "fpp/util.hpp"

using namespace fpp;

TEST_CASE("fmt_double round-trips exactly") {
  const double xs[] = {0.0,   1.0,        -1.0,       0.5,           1.0 / 3.0,
                       1e300, 1e-300,     123456.75,  -2.2250738585072014e-308,
                       3.141592653589793, 0.1,        2.0 / 7.0};
  for (double x : xs) {
    auto back = parse_double(fmt_double(x));
    REQUIRE(back.has_value());
    CHECK(*back == x);
  }
  CHECK(fmt_double(1.0) == "1");
  CHECK(fmt_double(0.5) == "0.5");
  CHECK(fmt_double(-3.0) == "-3");
}

TEST_CASE("strict numeric parsing") {
  CHECK(parse_int("42").value() == 42);
  CHECK(parse_int("-7").value() == -7);
  CHECK_FALSE(parse_int("4.2").has_value());
  CHECK_FALSE(parse_int("42x").has_value());
  CHECK_FALSE(parse_int("").has_value());
  CHECK(parse_int(" 42").value() == 42);  // surrounding whitespace is trimmed
  CHECK_FALSE(parse_int("4 2").has_value());
  CHECK(parse_double("2.5").value() == 2.5);
  CHECK(parse_double("-1e3").value() == -1000.0);
  CHECK_FALSE(parse_double("2.5pt").has_value());
  CHECK_FALSE(parse_double("nanx").has_value());
}

TEST_CASE("trim and split") {
  CHECK(trim("  a b  ") == "a b");
  CHECK(trim("") == "");
  CHECK(trim("\t x\r\n") == "x");
  const auto parts = split(" 1, 2 ,3 ", ',');
  REQUIRE(parts.size() == 3);
  CHECK(parts[0] == "1");
  CHECK(parts[1] == "2");
  CHECK(parts[2] == "3");
  CHECK(split("", ',').size() == 1);  // one empty token
}

TEST_CASE("fnv1a64 and hex16") {
  // reference vectors for 64-bit FNV-1a
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
  CHECK(hex16(0) == "0000000000000000");
  CHECK(hex16(0x1a2b3c4d5e6f7081ull) == "1a2b3c4d5e6f7081");
}

TEST_CASE("derive_seed separates ids and roots") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t root : {1ull, 2ull, 99ull})
    for (std::uint64_t a : {0ull, 1ull, 2ull})
      for (std::uint64_t b : {0ull, 7ull}) seen.insert(derive_seed(root, {a, b}));
  CHECK(seen.size() == 18);  // no collisions among distinct tuples
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) == derive_seed(1, {2}));
}

TEST_CASE("RngStream determinism and u01 range") {
  RngStream r1(42), r2(42), r3(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const double a = r1.u01(), b = r2.u01(), c = r3.u01();
    all_equal = all_equal && a == b;
    any_diff = any_diff || a != c;
    CHECK(a >= 0.0);
    CHECK(a < 1.0);
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("RngStream::below is unbiased over small ranges") {
  RngStream r(7);
  int counts[5] = {0, 0, 0, 0, 0};
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const auto k = r.below(5);
    REQUIRE(k < 5);
    ++counts[k];
  }
  for (int c : counts) CHECK(std::abs(c - n / 5) < 5 * 140);  // ~5 sigma
}

TEST_CASE("derived streams are independent of sibling order") {
  RngStream a = RngStream::derive(9, {1, 2});
  RngStream b = RngStream::derive(9, {1, 2});
  CHECK(a.next_u64() == b.next_u64());
}
