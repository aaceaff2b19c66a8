#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fpp {

// splitmix64 finalizer; also used as the stream-derivation hash.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t state, std::uint64_t id) {
  return splitmix64(state ^ (0x9e3779b97f4a7c15ULL + (id << 1)));
}

// Fold a list of stream ids into a root seed (same chain RngStream::derive
// uses); handy when an API wants a seed rather than a stream.
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> ids) {
  std::uint64_t s = splitmix64(root);
  for (std::uint64_t id : ids) s = mix_seed(s, id);
  return s;
}

// Deterministic random stream. Streams are derived from a root seed and a
// list of integer ids; the same (root, ids...) always yields the same stream,
// and distinct id paths give independent-looking streams. This is what makes
// replications independent of thread scheduling: each unit of work derives
// its stream from its logical index, never from a shared generator.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  static RngStream derive(std::uint64_t root, std::initializer_list<std::uint64_t> ids) {
    return RngStream(derive_seed(root, ids));
  }

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on [0,1) with 53 random bits; never returns 1.
  double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), unbiased (rejection).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do { x = eng_(); } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace fpp
