#include "fpp/influence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "fpp/passage.hpp"
#include "fpp/util.hpp"

namespace fpp {

namespace {
void check_probs_sum(std::span<const double> probs) {
  if (probs.size() < 2) throw DomainError("FunctionTable: need an alphabet of >= 2 symbols");
  double sum = 0;
  for (double p : probs) {
    if (!(p >= 0.0) || !(p <= 1.0)) throw DomainError("FunctionTable: probabilities must be in [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DomainError("FunctionTable: probabilities must sum to 1");
}
}  // namespace

FunctionTable::FunctionTable(int n, std::vector<double> probs, std::vector<double> values)
    : n_(n), probs_(std::move(probs)), values_(std::move(values)) {
  if (n_ < 1) throw DomainError("FunctionTable: n must be >= 1");
  check_probs_sum(probs_);
  const int q = static_cast<int>(probs_.size());
  double bits = static_cast<double>(n_) * std::log2(static_cast<double>(q));
  if (bits > 24.0) throw CapError("FunctionTable: q^n exceeds the table cap");
  Index sz = 1;
  pow_.assign(static_cast<std::size_t>(n_), 0);
  for (int i = n_ - 1; i >= 0; --i) {
    pow_[static_cast<std::size_t>(i)] = sz;
    sz *= q;
  }
  if (values_.size() != static_cast<std::size_t>(sz))
    throw DomainError("FunctionTable: values size must be q^n");
}

FunctionTable FunctionTable::build(int n, std::vector<double> probs,
                                   const std::function<double(std::span<const int>)>& fn) {
  const double bits = static_cast<double>(n) * std::log2(static_cast<double>(probs.size()));
  if (n < 1 || bits > 24.0) throw CapError("FunctionTable: q^n exceeds the table cap");
  std::size_t sz = 1;
  for (int i = 0; i < n; ++i) sz *= probs.size();
  FunctionTable t(n, probs, std::vector<double>(sz));
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  for (Index code = 0; code < t.size(); ++code) {
    for (int i = 0; i < n; ++i) digits[static_cast<std::size_t>(i)] = t.digit(code, i);
    t.values_[static_cast<std::size_t>(code)] = fn(digits);
  }
  return t;
}

double table_mean(const FunctionTable& f) {
  double m = 0;
  for (Index c = 0; c < f.size(); ++c) m += f.weight(c) * f.value(c);
  return m;
}

double table_variance(const FunctionTable& f) {
  const double m = table_mean(f);
  double v = 0;
  for (Index c = 0; c < f.size(); ++c) {
    const double d = f.value(c) - m;
    v += f.weight(c) * d * d;
  }
  return v;
}

FunctionTable delta(const FunctionTable& f, int i) {
  if (i < 0 || i >= f.n()) throw DomainError("delta: coordinate out of range");
  const int q = f.q();
  std::vector<double> vals(static_cast<std::size_t>(f.size()));
  for (Index c = 0; c < f.size(); ++c) {
    const Index base = f.with_digit(c, i, 0);
    double mean = 0;
    for (int s = 0; s < q; ++s)
      mean += f.probs()[static_cast<std::size_t>(s)] * f.value(f.with_digit(base, i, s));
    vals[static_cast<std::size_t>(c)] = f.value(c) - mean;
  }
  return FunctionTable(f.n(), std::vector<double>(f.probs().begin(), f.probs().end()), std::move(vals));
}

Norms table_norms(const FunctionTable& g) {
  Norms n;
  double s2 = 0;
  for (Index c = 0; c < g.size(); ++c) {
    const double w = g.weight(c), v = g.value(c);
    n.l1 += w * std::abs(v);
    s2 += w * v * v;
  }
  n.l2 = std::sqrt(s2);
  return n;
}

double prob_nonzero(const FunctionTable& g) {
  double p = 0;
  for (Index c = 0; c < g.size(); ++c)
    if (g.value(c) != 0.0) p += g.weight(c);
  return p;
}

SecondMomentVerdict second_moment_check(const FunctionTable& g, double tol) {
  const Norms n = table_norms(g);
  const double p = prob_nonzero(g);
  if (p == 0.0) return SecondMomentVerdict::vacuous;
  // l2^2 * p >= l1^2  (Cauchy-Schwarz on g * 1[g != 0])
  return n.l2 * n.l2 * p + tol >= n.l1 * n.l1 ? SecondMomentVerdict::holds : SecondMomentVerdict::fails;
}

TalagrandReport talagrand_functional(const FunctionTable& f) {
  TalagrandReport rep;
  rep.variance = table_variance(f);
  for (int i = 0; i < f.n(); ++i) {
    const FunctionTable d = delta(f, i);
    CoordinateInfluence ci;
    ci.i = i;
    const Norms n = table_norms(d);
    ci.l1 = n.l1;
    ci.l2 = n.l2;
    ci.p_nonzero = prob_nonzero(d);
    if (n.l2 > 0.0) {
      // l1 <= l2 always, so the log is >= 1
      ci.term = n.l2 * n.l2 / std::log(std::exp(1.0) * n.l2 / n.l1);
    }
    rep.sum_terms += ci.term;
    rep.coords.push_back(ci);
  }
  rep.ratio = rep.sum_terms > 0.0 ? rep.variance / rep.sum_terms : 0.0;
  return rep;
}

EfronSteinReport efron_stein_check(const FunctionTable& f, double tol) {
  EfronSteinReport rep;
  rep.variance = table_variance(f);
  for (int i = 0; i < f.n(); ++i) {
    const Norms n = table_norms(delta(f, i));
    rep.sum_sq += n.l2 * n.l2;
  }
  rep.holds = rep.variance <= rep.sum_sq + tol * std::max(1.0, std::abs(rep.variance));
  return rep;
}

int averaging_value(int m, std::span<const std::uint8_t> bits) {
  if (m < 1) throw DomainError("averaging_value: m must be >= 1");
  if (bits.size() != static_cast<std::size_t>(m) * static_cast<std::size_t>(m))
    throw DomainError("averaging_value: need exactly m^2 bits");
  std::int64_t sum = 0;
  for (std::uint8_t b : bits) {
    if (b > 1) throw DomainError("averaging_value: bits must be 0/1");
    sum += b;
  }
  const std::int64_t r = sum % (2 * m);
  return static_cast<int>(m - std::llabs(r - m));
}

std::vector<double> averaging_distribution(int m) {
  if (m < 1) throw DomainError("averaging_distribution: m must be >= 1");
  const int nbits = m * m;
  // Binomial(m^2, 1/2) pushed through the tent map.
  std::vector<double> binom(static_cast<std::size_t>(nbits) + 1, 0.0);
  if (nbits <= 53) {
    // Pascal row: C(nbits, k) <= C(53, 26) fits a double exactly, and the
    // power-of-two scaling is exact, so small laws are dyadic-exact.
    binom[0] = 1.0;
    for (int r = 1; r <= nbits; ++r)
      for (int k = r; k >= 1; --k)
        binom[static_cast<std::size_t>(k)] += binom[static_cast<std::size_t>(k - 1)];
    for (auto& b : binom) b = std::ldexp(b, -nbits);
  } else {
    // outward multiplicative recurrence from the mode keeps the relative
    // error at a few ulps per step; far tails underflow to zero harmlessly
    const int mode = nbits / 2;
    binom[static_cast<std::size_t>(mode)] =
        std::exp(std::lgamma(nbits + 1.0) - std::lgamma(mode + 1.0) - std::lgamma(nbits - mode + 1.0) -
                 nbits * std::log(2.0));
    for (int k = mode; k > 0; --k)
      binom[static_cast<std::size_t>(k - 1)] =
          binom[static_cast<std::size_t>(k)] * (static_cast<double>(k) / static_cast<double>(nbits - k + 1));
    for (int k = mode; k < nbits; ++k)
      binom[static_cast<std::size_t>(k + 1)] =
          binom[static_cast<std::size_t>(k)] * (static_cast<double>(nbits - k) / static_cast<double>(k + 1));
  }
  std::vector<double> law(static_cast<std::size_t>(m) + 1, 0.0);
  for (int k = 0; k <= nbits; ++k) {
    const int r = k % (2 * m);
    const int val = m - std::abs(r - m);
    law[static_cast<std::size_t>(val)] += binom[static_cast<std::size_t>(k)];
  }
  return law;
}

FunctionTable passage_function_table(const BoxSpec& box, const Vertex& src, const Vertex& dst,
                                     std::span<const double> values, std::span<const double> probs,
                                     Index cap) {
  if (box.mode() != Boundary::open) throw DomainError("passage_function_table: box must be open");
  box.require_inside(src, "passage_function_table");
  box.require_inside(dst, "passage_function_table");
  if (values.size() != probs.size() || values.size() < 2)
    throw DomainError("passage_function_table: need >= 2 (value, prob) pairs");
  for (double v : values)
    if (!(v > 0.0)) throw DomainError("passage_function_table: site weights must be positive");
  const int n = static_cast<int>(box.num_vertices());
  const double bits = static_cast<double>(n) * std::log2(static_cast<double>(values.size()));
  if (bits > std::log2(static_cast<double>(cap)))
    throw CapError("passage_function_table: q^n exceeds the cap");
  std::vector<double> vals(values.begin(), values.end());
  WeightField field(box, Indexing::site);
  return FunctionTable::build(
      n, std::vector<double>(probs.begin(), probs.end()), [&](std::span<const int> digits) {
        for (Index v = 0; v < box.num_vertices(); ++v)
          field.site(v) = vals[static_cast<std::size_t>(digits[static_cast<std::size_t>(v)])];
        return passage_time(field, src, dst).value;
      });
}

void write_function_table(std::ostream& os, const FunctionTable& f) {
  os << "fpplab-table v1\n";
  os << "n " << f.n() << "\n";
  os << "q " << f.q() << "\n";
  os << "probs";
  for (double p : f.probs()) os << ' ' << fmt_double(p);
  os << "\nvalues " << f.size() << "\n";
  std::string label(static_cast<std::size_t>(f.n()), '0');
  for (Index c = 0; c < f.size(); ++c) {
    for (int i = 0; i < f.n(); ++i)
      label[static_cast<std::size_t>(i)] = static_cast<char>('0' + f.digit(c, i));
    os << label << ' ' << fmt_double(f.value(c)) << "\n";
  }
}

void write_function_table_file(const std::string& path, const FunctionTable& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  write_function_table(os, f);
  os.flush();
  if (!os) throw ConfigError("write failed: " + path);
}

namespace {
std::string tbl_line(std::istream& is, const char* what) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError(std::string("table file truncated at ") + what);
  return std::string(trim(line));
}
}  // namespace

FunctionTable read_function_table(std::istream& is) {
  if (tbl_line(is, "header") != "fpplab-table v1")
    throw ConfigError("table file: bad magic (want 'fpplab-table v1')");
  auto parse_kv = [&](const char* key) {
    auto toks = split(tbl_line(is, key), ' ');
    std::erase_if(toks, [](const std::string& t) { return t.empty(); });
    if (toks.empty() || toks[0] != key) throw ConfigError(std::string("table file: expected '") + key + "'");
    return toks;
  };
  auto n = parse_int(parse_kv("n").at(1));
  auto q = parse_int(parse_kv("q").at(1));
  if (!n || !q) throw ConfigError("table file: bad n/q");
  auto ptoks = parse_kv("probs");
  std::vector<double> probs;
  for (std::size_t i = 1; i < ptoks.size(); ++i) {
    auto p = parse_double(ptoks[i]);
    if (!p) throw ConfigError("table file: bad probability");
    probs.push_back(*p);
  }
  if (static_cast<std::int64_t>(probs.size()) != *q) throw ConfigError("table file: probs arity != q");
  auto cnt = parse_int(parse_kv("values").at(1));
  if (!cnt) throw ConfigError("table file: bad values count");
  std::vector<double> vals(static_cast<std::size_t>(*cnt));
  FunctionTable probe(static_cast<int>(*n), probs, std::vector<double>(static_cast<std::size_t>(*cnt), 0.0));
  if (probe.size() != *cnt) throw ConfigError("table file: values count != q^n");
  for (Index c = 0; c < *cnt; ++c) {
    auto toks = split(tbl_line(is, "values"), ' ');
    std::erase_if(toks, [](const std::string& t) { return t.empty(); });
    if (toks.size() != 2) throw ConfigError("table file: want '<digits> <value>' rows");
    if (static_cast<int>(toks[0].size()) != *n) throw ConfigError("table file: label arity mismatch");
    Index code = 0;
    for (char ch : toks[0]) {
      const int dgt = ch - '0';
      if (dgt < 0 || dgt >= *q) throw ConfigError("table file: bad digit in label");
      code = code * *q + dgt;
    }
    if (code != c) throw ConfigError("table file: labels out of canonical order");
    auto v = parse_double(toks[1]);
    if (!v) throw ConfigError("table file: bad value");
    vals[static_cast<std::size_t>(c)] = *v;
  }
  return FunctionTable(static_cast<int>(*n), std::move(probs), std::move(vals));
}

FunctionTable read_function_table_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open table file: " + path);
  return read_function_table(is);
}

}  // namespace fpp
