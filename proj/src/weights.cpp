#include "fpp/weights.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "fpp/stats.hpp"
#include "fpp/util.hpp"

namespace fpp {

double ising_conditional(double beta, double h, int neighbor_sum) {
  return 1.0 / (1.0 + std::exp(-2.0 * beta * (h + static_cast<double>(neighbor_sum))));
}

namespace {
constexpr std::uint64_t kFieldTag = 0x4649454c44ULL;   // "FIELD"
constexpr std::uint64_t kCftpTag = 0x43465450ULL;      // "CFTP"
constexpr std::uint64_t kProbeTag = 0x50524f4245ULL;   // "PROBE"

std::vector<double> pplus_table(double beta, double h, int maxdeg) {
  std::vector<double> t(static_cast<std::size_t>(2 * maxdeg + 1));
  for (int s = -maxdeg; s <= maxdeg; ++s)
    t[static_cast<std::size_t>(s + maxdeg)] = ising_conditional(beta, h, s);
  return t;
}

void check_probs(std::span<const double> probs, const char* what) {
  double sum = 0;
  for (double p : probs) {
    if (!(p >= 0.0) || !(p <= 1.0)) throw DomainError(std::string(what) + ": probabilities must be in [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DomainError(std::string(what) + ": probabilities must sum to 1");
}

}  // namespace

LocalKernel::LocalKernel(int dim, int slots, std::vector<double> alphabet, std::vector<double> table)
    : dim_(dim), slots_(slots), alphabet_(std::move(alphabet)), table_(std::move(table)) {
  if (dim_ < 1 || dim_ > Vertex::kMaxDim) throw DomainError("LocalKernel: bad dimension");
  if (slots_ < 1) throw DomainError("LocalKernel: slots must be >= 1");
  const int q = static_cast<int>(alphabet_.size());
  if (q < 2) throw DomainError("LocalKernel: alphabet needs >= 2 values");
  if (q > 64) throw DomainError("LocalKernel: alphabet too large");
  double lr = static_cast<double>(slots_) * std::log2(static_cast<double>(q));
  if (lr > 26.0) throw CapError("LocalKernel: q^slots table too large");
  rows_ = 1;
  for (int s = 0; s < slots_; ++s) rows_ *= q;
  if (table_.size() != static_cast<std::size_t>(rows_) * static_cast<std::size_t>(q))
    throw DomainError("LocalKernel: table size must be q^slots * q");
  for (Index r = 0; r < rows_; ++r) {
    double sum = 0;
    for (int w = 0; w < q; ++w) {
      const double p = cond(r, w);
      if (!(p >= 0.0) || !(p <= 1.0)) throw DomainError("LocalKernel: entries must be probabilities");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw DomainError("LocalKernel: row " + std::to_string(r) + " does not sum to 1");
  }
}

namespace {
LocalKernel ising_kernel(int dim, int slots, double beta, double h) {
  const int q = 2;
  Index rows = 1;
  for (int s = 0; s < slots; ++s) rows *= q;
  std::vector<double> table(static_cast<std::size_t>(rows) * 2);
  for (Index r = 0; r < rows; ++r) {
    int sum = 0;
    Index code = r;
    for (int s = 0; s < slots; ++s) {
      sum += (code % 2 == 0) ? -1 : +1;
      code /= 2;
    }
    const double pp = ising_conditional(beta, h, sum);
    table[static_cast<std::size_t>(r) * 2 + 0] = 1.0 - pp;
    table[static_cast<std::size_t>(r) * 2 + 1] = pp;
  }
  return LocalKernel(dim, slots, {-1.0, +1.0}, std::move(table));
}
}  // namespace

LocalKernel LocalKernel::ising(int dim, double beta, double h) { return ising_kernel(dim, 2 * dim, beta, h); }

LocalKernel LocalKernel::ising_bond(int dim, double beta, double h) {
  return ising_kernel(dim, 4 * dim - 2, beta, h);
}

LocalKernel LocalKernel::with_alphabet(std::vector<double> alphabet) const {
  if (alphabet.size() != alphabet_.size())
    throw DomainError("with_alphabet: new alphabet must keep the symbol count");
  return LocalKernel(dim_, slots_, std::move(alphabet), table_);
}

LocalKernel LocalKernel::iid(int dim, int slots, std::vector<double> alphabet, std::vector<double> probs) {
  if (alphabet.size() != probs.size()) throw DomainError("LocalKernel::iid: alphabet/probs size mismatch");
  check_probs(probs, "LocalKernel::iid");
  const int q = static_cast<int>(alphabet.size());
  Index rows = 1;
  for (int s = 0; s < slots; ++s) rows *= q;
  std::vector<double> table;
  table.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(q));
  for (Index r = 0; r < rows; ++r) table.insert(table.end(), probs.begin(), probs.end());
  return LocalKernel(dim, slots, std::move(alphabet), std::move(table));
}

void write_kernel(std::ostream& os, const LocalKernel& k) {
  os << "fpplab-kernel v1\n";
  os << "dim " << k.dim() << "\n";
  os << "slots " << k.slots() << "\n";
  os << "alphabet";
  for (double a : k.alphabet()) os << ' ' << fmt_double(a);
  os << "\nrows " << k.rows() << "\n";
  for (Index r = 0; r < k.rows(); ++r) {
    for (int w = 0; w < k.q(); ++w) {
      if (w) os << ' ';
      os << fmt_double(k.cond(r, w));
    }
    os << "\n";
  }
}

namespace {
std::string kern_line(std::istream& is, const char* what) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError(std::string("kernel file truncated at ") + what);
  return std::string(trim(line));
}
}  // namespace

LocalKernel read_kernel(std::istream& is) {
  if (kern_line(is, "header") != "fpplab-kernel v1")
    throw ConfigError("kernel file: bad magic (want 'fpplab-kernel v1')");
  auto parse_kv = [&](const char* key) {
    auto toks = split(kern_line(is, key), ' ');
    std::erase_if(toks, [](const std::string& t) { return t.empty(); });
    if (toks.empty() || toks[0] != key) throw ConfigError(std::string("kernel file: expected '") + key + "' line");
    return toks;
  };
  auto dim = parse_int(parse_kv("dim").at(1));
  auto slots = parse_int(parse_kv("slots").at(1));
  if (!dim || !slots) throw ConfigError("kernel file: bad dim/slots");
  auto atoks = parse_kv("alphabet");
  std::vector<double> alphabet;
  for (std::size_t i = 1; i < atoks.size(); ++i) {
    auto v = parse_double(atoks[i]);
    if (!v) throw ConfigError("kernel file: bad alphabet value");
    alphabet.push_back(*v);
  }
  auto rows = parse_int(parse_kv("rows").at(1));
  if (!rows) throw ConfigError("kernel file: bad rows");
  std::vector<double> table;
  for (std::int64_t r = 0; r < *rows; ++r) {
    auto toks = split(kern_line(is, "rows"), ' ');
    std::erase_if(toks, [](const std::string& t) { return t.empty(); });
    if (toks.size() != alphabet.size()) throw ConfigError("kernel file: row arity mismatch");
    for (const auto& t : toks) {
      auto v = parse_double(t);
      if (!v) throw ConfigError("kernel file: bad probability");
      table.push_back(*v);
    }
  }
  LocalKernel k(static_cast<int>(*dim), static_cast<int>(*slots), std::move(alphabet), std::move(table));
  if (k.rows() != *rows) throw ConfigError("kernel file: rows does not equal q^slots");
  return k;
}

LocalKernel read_kernel_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open kernel file: " + path);
  return read_kernel(is);
}

HnReport hn_gamma(const LocalKernel& kernel, Indexing version) {
  const int m = version == Indexing::site ? 2 * kernel.dim() : 4 * kernel.dim() - 2;
  if (kernel.slots() != m)
    throw DomainError("hn_gamma: kernel has " + std::to_string(kernel.slots()) + " slots but the " +
                      to_string(version) + " version needs " + std::to_string(m));
  double gamma = 0;
  for (int w = 0; w < kernel.q(); ++w) {
    double mn = 1.0;
    for (Index r = 0; r < kernel.rows(); ++r) mn = std::min(mn, kernel.cond(r, w));
    gamma += mn;
  }
  HnReport rep;
  rep.gamma = gamma;
  rep.threshold = (static_cast<double>(m) - 1.0) / static_cast<double>(m);
  rep.satisfied = gamma > rep.threshold;
  return rep;
}

AdjacencyList AdjacencyList::box_sites(const BoxSpec& box) {
  AdjacencyList a;
  a.deg_ = 2 * box.dim();
  const Index n = box.num_vertices();
  a.off_.reserve(static_cast<std::size_t>(n) + 1);
  a.off_.push_back(0);
  a.flat_.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(a.deg_));
  for (Index v = 0; v < n; ++v) {
    for (int ax = 0; ax < box.dim(); ++ax)
      for (int dir : {+1, -1}) {
        const Index w = box.step(v, ax, dir);
        if (w >= 0) a.flat_.push_back(w);
      }
    a.off_.push_back(a.flat_.size());
  }
  return a;
}

AdjacencyList AdjacencyList::cover_graph(const BoxSpec& torus) {
  if (torus.mode() != Boundary::torus) throw DomainError("cover_graph expects a torus box");
  const int d = torus.dim();
  AdjacencyList a;
  a.deg_ = 4 * d - 2;
  const Index n = torus.num_vertices();
  a.off_.reserve(static_cast<std::size_t>(n * d) + 1);
  a.off_.push_back(0);
  a.flat_.reserve(static_cast<std::size_t>(n * d) * static_cast<std::size_t>(a.deg_));
  // slot id of bond (vertex index, axis) is v*d + axis
  for (Index v = 0; v < n; ++v)
    for (int ax = 0; ax < d; ++ax) {
      // incident at endpoint v: outgoing (v,b), b != ax, plus incoming (v - e_b, b) for every b
      for (int b = 0; b < d; ++b)
        if (b != ax) a.flat_.push_back(v * d + b);
      for (int b = 0; b < d; ++b) a.flat_.push_back(torus.step(v, b, -1) * d + b);
      // incident at endpoint w = v + e_ax: outgoing (w,b) for every b, incoming (w - e_b, b), b != ax
      const Index w = torus.step(v, ax, +1);
      for (int b = 0; b < d; ++b) a.flat_.push_back(w * d + b);
      for (int b = 0; b < d; ++b)
        if (b != ax) a.flat_.push_back(torus.step(w, b, -1) * d + b);
      a.off_.push_back(a.flat_.size());
    }
  return a;
}

std::string to_string(InitState s) {
  switch (s) {
    case InitState::all_minus: return "all-minus";
    case InitState::all_plus: return "all-plus";
    default: return "random";
  }
}

std::string to_string(SamplerKind s) { return s == SamplerKind::gibbs ? "gibbs" : "cftp"; }

namespace {
std::vector<std::int8_t> init_spins(Index n, InitState init, RngStream& rng) {
  std::vector<std::int8_t> s(static_cast<std::size_t>(n));
  switch (init) {
    case InitState::all_minus: std::fill(s.begin(), s.end(), static_cast<std::int8_t>(-1)); break;
    case InitState::all_plus: std::fill(s.begin(), s.end(), static_cast<std::int8_t>(+1)); break;
    case InitState::random:
      for (auto& x : s) x = rng.u01() < 0.5 ? static_cast<std::int8_t>(+1) : static_cast<std::int8_t>(-1);
      break;
  }
  return s;
}

inline int nbr_sum(const AdjacencyList& adj, const std::vector<std::int8_t>& s, Index v) {
  int sum = 0;
  for (Index w : adj.nbrs(v)) sum += s[static_cast<std::size_t>(w)];
  return sum;
}
}  // namespace

std::vector<std::int8_t> gibbs_ising_graph(const AdjacencyList& adj, double beta, double h, int sweeps,
                                           InitState init, RngStream& rng) {
  if (sweeps < 0) throw DomainError("gibbs: sweeps must be >= 0");
  const int deg = adj.degree();
  const auto p = pplus_table(beta, h, deg);
  auto s = init_spins(adj.size(), init, rng);
  for (int t = 0; t < sweeps; ++t)
    for (Index v = 0; v < adj.size(); ++v) {
      const double u = rng.u01();
      const int sum = nbr_sum(adj, s, v);
      s[static_cast<std::size_t>(v)] = u < p[static_cast<std::size_t>(sum + deg)] ? +1 : -1;
    }
  return s;
}

SpinField gibbs_ising(const BoxSpec& torus, double beta, double h, int sweeps, InitState init, RngStream& rng) {
  if (torus.mode() != Boundary::torus) throw DomainError("gibbs_ising expects a torus box");
  const auto adj = AdjacencyList::box_sites(torus);
  const auto s = gibbs_ising_graph(adj, beta, h, sweeps, init, rng);
  SpinField f(torus);
  for (Index v = 0; v < torus.num_vertices(); ++v) f.at(v) = s[static_cast<std::size_t>(v)];
  return f;
}

CftpGraphResult cftp_ising_graph(const AdjacencyList& adj, double beta, double h, std::uint64_t seed,
                                 int horizon_cap) {
  const int deg = adj.degree();
  const auto p = pplus_table(beta, h, deg);
  const Index n = adj.size();
  std::vector<std::int8_t> up, dn;
  for (int horizon = 1; horizon <= horizon_cap; horizon *= 2) {
    up.assign(static_cast<std::size_t>(n), +1);
    dn.assign(static_cast<std::size_t>(n), -1);
    // sweep `ago` happens at time -ago; randomness depends only on (seed, ago)
    for (int ago = horizon; ago >= 1; --ago) {
      RngStream sw = RngStream::derive(seed, {kCftpTag, static_cast<std::uint64_t>(ago)});
      for (Index v = 0; v < n; ++v) {
        const double u = sw.u01();
        const int su = nbr_sum(adj, up, v);
        up[static_cast<std::size_t>(v)] = u < p[static_cast<std::size_t>(su + deg)] ? +1 : -1;
        const int sd = nbr_sum(adj, dn, v);
        dn[static_cast<std::size_t>(v)] = u < p[static_cast<std::size_t>(sd + deg)] ? +1 : -1;
        assert(dn[static_cast<std::size_t>(v)] <= up[static_cast<std::size_t>(v)]);
      }
      for (Index v = 0; v < n; ++v)
        if (dn[static_cast<std::size_t>(v)] > up[static_cast<std::size_t>(v)])
          throw std::logic_error("cftp: monotone sandwich violated");
    }
    if (up == dn) return {std::move(up), horizon};
  }
  throw CoalescenceError("cftp did not coalesce within " + std::to_string(horizon_cap) + " sweeps");
}

CftpResult cftp_ising(const BoxSpec& torus, double beta, double h, std::uint64_t seed, int horizon_cap) {
  if (torus.mode() != Boundary::torus) throw DomainError("cftp_ising expects a torus box");
  const auto adj = AdjacencyList::box_sites(torus);
  auto g = cftp_ising_graph(adj, beta, h, seed, horizon_cap);
  SpinField f(torus);
  for (Index v = 0; v < torus.num_vertices(); ++v) f.at(v) = g.spins[static_cast<std::size_t>(v)];
  return {std::move(f), g.horizon};
}

WeightField spins_to_ab(const SpinField& spins, double a, double b) {
  if (!(0.0 < a && a < b)) throw DomainError("spins_to_ab: need 0 < a < b");
  WeightField f(spins.box(), Indexing::site);
  for (Index v = 0; v < spins.box().num_vertices(); ++v) f.site(v) = spins.at(v) > 0 ? b : a;
  return f;
}

WeightField sign_change_weights(const SpinField& spins) {
  const BoxSpec& box = spins.box();
  WeightField f(box, Indexing::bond);
  for (Index v = 0; v < box.num_vertices(); ++v)
    for (int ax = 0; ax < box.dim(); ++ax) {
      if (!f.bond_present(v, ax)) continue;
      const Index w = box.step(v, ax, +1);
      f.bond(v, ax) = spins.at(v) != spins.at(w) ? 1.0 : 0.0;
    }
  return f;
}

StateField::StateField(const BoxSpec& box, std::uint8_t fill) : box_(box) {
  s_.assign(static_cast<std::size_t>(box.num_vertices()), fill);
}

StateField mrf_gibbs(const LocalKernel& kernel, const BoxSpec& torus, int sweeps, InitState init, RngStream& rng) {
  if (torus.mode() != Boundary::torus) throw DomainError("mrf_gibbs expects a torus box");
  if (kernel.dim() != torus.dim()) throw DomainError("mrf_gibbs: kernel/box dimension mismatch");
  if (kernel.slots() != 2 * torus.dim())
    throw DomainError("mrf_gibbs: kernel must have 2d slots for the site lattice");
  if (sweeps < 0) throw DomainError("mrf_gibbs: sweeps must be >= 0");
  const int q = kernel.q();
  const NeighborTable nt(torus);
  StateField st(torus);
  switch (init) {
    case InitState::all_minus: break;  // symbol 0
    case InitState::all_plus:
      for (Index v = 0; v < torus.num_vertices(); ++v) st.at(v) = static_cast<std::uint8_t>(q - 1);
      break;
    case InitState::random:
      for (Index v = 0; v < torus.num_vertices(); ++v)
        st.at(v) = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(q)));
      break;
  }
  const int slots = kernel.slots();
  for (int t = 0; t < sweeps; ++t)
    for (Index v = 0; v < torus.num_vertices(); ++v) {
      Index code = 0;
      for (int k = 0; k < slots; ++k) code = code * q + st.at(nt.at(v, k));
      const double u = rng.u01();
      double cum = 0;
      int pick = q - 1;
      for (int w = 0; w < q; ++w) {
        cum += kernel.cond(code, w);
        if (u < cum) { pick = w; break; }
      }
      st.at(v) = static_cast<std::uint8_t>(pick);
    }
  return st;
}

WeightField states_to_weights(const StateField& state, const LocalKernel& kernel) {
  for (double a : kernel.alphabet())
    if (!(a > 0.0)) throw DomainError("states_to_weights: alphabet values must be positive site weights");
  WeightField f(state.box(), Indexing::site);
  for (Index v = 0; v < state.box().num_vertices(); ++v)
    f.site(v) = kernel.alphabet()[state.at(v)];
  return f;
}

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::iid: return "iid";
    case ModelKind::ising_site: return "ising-site";
    case ModelKind::ising_bond: return "ising-bond";
    case ModelKind::ising_signchange: return "ising-signchange";
    default: return "mrf";
  }
}

Indexing ModelSpec::indexing() const {
  switch (kind) {
    case ModelKind::iid: return iid_indexing;
    case ModelKind::ising_site: return Indexing::site;
    case ModelKind::ising_bond: return Indexing::bond;
    case ModelKind::ising_signchange: return Indexing::bond;
    default: return Indexing::site;
  }
}

void ModelSpec::validate() const {
  if (sweeps < 0) throw ConfigError("model: sweeps must be >= 0");
  switch (kind) {
    case ModelKind::iid: {
      if (values.empty() || values.size() != probs.size())
        throw ConfigError("model: iid values/probs must be non-empty and equally sized");
      check_probs(probs, "model");
      for (double v : values) {
        if (!std::isfinite(v)) throw ConfigError("model: iid values must be finite");
        if (iid_indexing == Indexing::site && !(v > 0.0))
          throw ConfigError("model: site weights must be positive");
        if (iid_indexing == Indexing::bond && v < 0.0)
          throw ConfigError("model: bond weights must be nonnegative");
      }
      break;
    }
    case ModelKind::ising_site:
    case ModelKind::ising_bond:
      if (!(0.0 < a && a < b)) throw ConfigError("model: need 0 < a < b");
      [[fallthrough]];
    case ModelKind::ising_signchange:
      if (!std::isfinite(beta) || beta < 0) throw ConfigError("model: beta must be finite and >= 0");
      if (!std::isfinite(h)) throw ConfigError("model: h must be finite");
      break;
    case ModelKind::mrf:
      if (!kernel) throw ConfigError("model: mrf needs a kernel");
      if (sampler == SamplerKind::cftp)
        throw ConfigError("model: cftp sampling is only available for the monotone ising kinds");
      break;
  }
}

WeightField gen_iid(const BoxSpec& box, Indexing ix, std::span<const double> values,
                    std::span<const double> probs, RngStream& rng) {
  if (values.empty() || values.size() != probs.size())
    throw DomainError("gen_iid: values/probs must be non-empty and equally sized");
  check_probs(probs, "gen_iid");
  std::vector<double> cum(probs.size());
  double c = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) { c += probs[i]; cum[i] = c; }
  auto draw = [&]() {
    const double u = rng.u01();
    for (std::size_t i = 0; i < cum.size(); ++i)
      if (u < cum[i]) return values[i];
    return values[values.size() - 1];
  };
  WeightField f(box, ix);
  if (ix == Indexing::site) {
    for (Index v = 0; v < box.num_vertices(); ++v) f.site(v) = draw();
  } else {
    for (Index v = 0; v < box.num_vertices(); ++v)
      for (int ax = 0; ax < box.dim(); ++ax)
        if (f.bond_present(v, ax)) f.bond(v, ax) = draw();
  }
  return f;
}

namespace {
BoxSpec torus_like(const BoxSpec& window) {
  std::vector<Coord> lo, hi;
  for (int a = 0; a < window.dim(); ++a) { lo.push_back(window.lo(a)); hi.push_back(window.hi(a)); }
  return BoxSpec(lo, hi, Boundary::torus);
}

std::vector<std::int8_t> sample_graph_spins(const AdjacencyList& adj, const ModelSpec& m, std::uint64_t seed,
                                            std::uint64_t rep) {
  if (m.sampler == SamplerKind::cftp) {
    const std::uint64_t s = derive_seed(seed, {kFieldTag, rep});
    return cftp_ising_graph(adj, m.beta, m.h, s).spins;
  }
  RngStream rng = RngStream::derive(seed, {kFieldTag, rep});
  return gibbs_ising_graph(adj, m.beta, m.h, m.sweeps, m.init, rng);
}
}  // namespace

SpinField sample_spin_field(const ModelSpec& model, const BoxSpec& torus, std::uint64_t seed, std::uint64_t rep) {
  model.validate();
  if (torus.mode() != Boundary::torus) throw DomainError("sample_spin_field expects a torus box");
  if (model.kind != ModelKind::ising_site && model.kind != ModelKind::ising_signchange)
    throw DomainError("sample_spin_field: model has no site spin representation");
  const auto adj = AdjacencyList::box_sites(torus);
  const auto s = sample_graph_spins(adj, model, seed, rep);
  SpinField f(torus);
  for (Index v = 0; v < torus.num_vertices(); ++v) f.at(v) = s[static_cast<std::size_t>(v)];
  return f;
}

WeightField sample_weight_field_torus(const ModelSpec& model, const BoxSpec& torus, std::uint64_t seed,
                                      std::uint64_t rep) {
  model.validate();
  if (torus.mode() != Boundary::torus) throw DomainError("sample_weight_field_torus expects a torus box");
  switch (model.kind) {
    case ModelKind::iid: {
      RngStream rng = RngStream::derive(seed, {kFieldTag, rep});
      return gen_iid(torus, model.iid_indexing, model.values, model.probs, rng);
    }
    case ModelKind::ising_site: {
      const SpinField spins = sample_spin_field(model, torus, seed, rep);
      return spins_to_ab(spins, model.a, model.b);
    }
    case ModelKind::ising_signchange: {
      const SpinField spins = sample_spin_field(model, torus, seed, rep);
      return sign_change_weights(spins);
    }
    case ModelKind::ising_bond: {
      const auto adj = AdjacencyList::cover_graph(torus);
      const auto s = sample_graph_spins(adj, model, seed, rep);
      WeightField f(torus, Indexing::bond);
      for (Index slot = 0; slot < torus.num_bond_slots(); ++slot)
        f.raw()[static_cast<std::size_t>(slot)] = s[static_cast<std::size_t>(slot)] > 0 ? model.b : model.a;
      return f;
    }
    case ModelKind::mrf: {
      RngStream rng = RngStream::derive(seed, {kFieldTag, rep});
      const StateField st = mrf_gibbs(*model.kernel, torus, model.sweeps, model.init, rng);
      return states_to_weights(st, *model.kernel);
    }
  }
  throw DomainError("sample_weight_field_torus: unknown model kind");
}

WeightField sample_weight_field(const ModelSpec& model, const BoxSpec& window, std::uint64_t seed,
                                std::uint64_t rep) {
  model.validate();
  if (window.mode() != Boundary::open)
    throw DomainError("sample_weight_field expects an open window box");
  if (model.kind == ModelKind::iid) {
    RngStream rng = RngStream::derive(seed, {kFieldTag, rep});
    return gen_iid(window, model.iid_indexing, model.values, model.probs, rng);
  }
  return open_window(sample_weight_field_torus(model, torus_like(window), seed, rep));
}

namespace {

// one replication of the coupled probe for monotone ising kinds; writes
// per-k undetermined flags (klist ascending) into `flags`
void probe_monotone_rep(const AdjacencyList& adj, double beta, double h, Index pv, std::span<const int> klist,
                        std::uint64_t seed, std::uint64_t rep, std::vector<char>& flags) {
  const int deg = adj.degree();
  const auto p = pplus_table(beta, h, deg);
  const Index n = adj.size();
  std::vector<std::int8_t> up(static_cast<std::size_t>(n), +1), dn(static_cast<std::size_t>(n), -1);
  std::size_t ki = 0;
  const int kmax = klist.empty() ? 0 : klist[klist.size() - 1];
  while (ki < klist.size() && klist[ki] == 0) {
    flags[ki] = up[static_cast<std::size_t>(pv)] != dn[static_cast<std::size_t>(pv)];
    ++ki;
  }
  for (int t = 1; t <= kmax; ++t) {
    RngStream sw = RngStream::derive(seed, {kProbeTag, rep, static_cast<std::uint64_t>(t)});
    for (Index v = 0; v < n; ++v) {
      const double u = sw.u01();
      const int su = nbr_sum(adj, up, v);
      up[static_cast<std::size_t>(v)] = u < p[static_cast<std::size_t>(su + deg)] ? +1 : -1;
      const int sd = nbr_sum(adj, dn, v);
      dn[static_cast<std::size_t>(v)] = u < p[static_cast<std::size_t>(sd + deg)] ? +1 : -1;
    }
    while (ki < klist.size() && klist[ki] == t) {
      flags[ki] = up[static_cast<std::size_t>(pv)] != dn[static_cast<std::size_t>(pv)];
      ++ki;
    }
  }
}

// exhaustive-start coupled probe for a general kernel on a tiny torus
void probe_exhaustive_rep(const LocalKernel& kernel, const BoxSpec& torus, const NeighborTable& nt, Index pv,
                          std::span<const int> klist, std::uint64_t seed, std::uint64_t rep,
                          std::vector<char>& flags) {
  const int q = kernel.q();
  const Index n = torus.num_vertices();
  const double states_log2 = static_cast<double>(n) * std::log2(static_cast<double>(q));
  if (states_log2 > 14.0)
    throw CapError("determination_probe: exhaustive coupling needs q^sites <= 16384");
  Index nstates = 1;
  for (Index v = 0; v < n; ++v) nstates *= q;
  std::vector<std::vector<std::uint8_t>> chains(static_cast<std::size_t>(nstates));
  for (Index s = 0; s < nstates; ++s) {
    auto& c = chains[static_cast<std::size_t>(s)];
    c.resize(static_cast<std::size_t>(n));
    Index code = s;
    for (Index v = 0; v < n; ++v) { c[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(code % q); code /= q; }
  }
  const int slots = kernel.slots();
  std::size_t ki = 0;
  const int kmax = klist.empty() ? 0 : klist[klist.size() - 1];
  auto agree_at = [&](Index v) {
    for (std::size_t c = 1; c < chains.size(); ++c)
      if (chains[c][static_cast<std::size_t>(v)] != chains[0][static_cast<std::size_t>(v)]) return false;
    return true;
  };
  while (ki < klist.size() && klist[ki] == 0) {
    flags[ki] = !agree_at(pv);
    ++ki;
  }
  for (int t = 1; t <= kmax; ++t) {
    RngStream sw = RngStream::derive(seed, {kProbeTag, rep, static_cast<std::uint64_t>(t)});
    for (Index v = 0; v < n; ++v) {
      const double u = sw.u01();
      for (auto& c : chains) {
        Index code = 0;
        for (int k = 0; k < slots; ++k) code = code * q + c[static_cast<std::size_t>(nt.at(v, k))];
        double cum = 0;
        int pick = q - 1;
        for (int w = 0; w < q; ++w) {
          cum += kernel.cond(code, w);
          if (u < cum) { pick = w; break; }
        }
        c[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(pick);
      }
    }
    while (ki < klist.size() && klist[ki] == t) {
      flags[ki] = !agree_at(pv);
      ++ki;
    }
  }
}

}  // namespace

std::vector<ProbeRow> determination_probe(const ModelSpec& model, const BoxSpec& torus, const Vertex& v,
                                          std::span<const int> klist, std::int64_t replications,
                                          std::uint64_t seed) {
  model.validate();
  if (torus.mode() != Boundary::torus) throw DomainError("determination_probe expects a torus box");
  torus.require_inside(v, "determination_probe");
  if (replications < 1) throw DomainError("determination_probe: replications must be >= 1");
  if (klist.empty()) throw DomainError("determination_probe: empty k list");
  for (std::size_t i = 0; i < klist.size(); ++i) {
    if (klist[i] < 0) throw DomainError("determination_probe: k must be >= 0");
    if (i && klist[i] <= klist[i - 1]) throw DomainError("determination_probe: k list must be strictly increasing");
  }
  std::vector<std::int64_t> undet(klist.size(), 0);
  std::vector<char> flags(klist.size(), 0);
  if (model.kind == ModelKind::mrf) {
    const NeighborTable nt(torus);
    for (std::int64_t r = 0; r < replications; ++r) {
      std::fill(flags.begin(), flags.end(), 0);
      probe_exhaustive_rep(*model.kernel, torus, nt, torus.index_of(v), klist, seed,
                           static_cast<std::uint64_t>(r), flags);
      for (std::size_t i = 0; i < flags.size(); ++i) undet[i] += flags[i];
    }
  } else if (model.kind == ModelKind::ising_site || model.kind == ModelKind::ising_signchange ||
             model.kind == ModelKind::ising_bond) {
    const bool bond = model.kind == ModelKind::ising_bond;
    const auto adj = bond ? AdjacencyList::cover_graph(torus) : AdjacencyList::box_sites(torus);
    const Index pv = bond ? torus.index_of(v) * torus.dim() : torus.index_of(v);
    for (std::int64_t r = 0; r < replications; ++r) {
      std::fill(flags.begin(), flags.end(), 0);
      probe_monotone_rep(adj, model.beta, model.h, pv, klist, seed, static_cast<std::uint64_t>(r), flags);
      for (std::size_t i = 0; i < flags.size(); ++i) undet[i] += flags[i];
    }
  } else {
    throw DomainError("determination_probe: iid fields are determined at k = 0; nothing to probe");
  }
  std::vector<ProbeRow> rows;
  rows.reserve(klist.size());
  for (std::size_t i = 0; i < klist.size(); ++i) {
    ProbeRow row;
    row.k = klist[i];
    row.replications = replications;
    row.undetermined = undet[i];
    row.estimate = static_cast<double>(undet[i]) / static_cast<double>(replications);
    const Interval ci = wilson_interval(undet[i], replications);
    row.ci_lo = ci.lo;
    row.ci_hi = ci.hi;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fpp
