#include "fpp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include "fpp/union_find.hpp"
#include "fpp/util.hpp"

namespace fpp {

namespace {
constexpr std::uint64_t kScanTag = 0x5343414eULL;   // "SCAN"
constexpr std::uint64_t kBootTag = 0x424f4f54ULL;   // "BOOT"
constexpr std::uint64_t kShiftTag = 0x53484654ULL;  // "SHFT"
constexpr std::uint64_t kConnTag = 0x434f4e4eULL;   // "CONN"
constexpr std::uint64_t kPathTag = 0x50415448ULL;   // "PATH"
}  // namespace

void parallel_for(Index n, int threads, const std::function<void(Index)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = static_cast<int>(std::min<Index>(threads, std::max<Index>(n, 1)));
  if (threads == 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::mutex err_mtx;
  std::exception_ptr err;
  auto worker = [&]() {
    for (;;) {
      const Index i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mtx);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

Vertex scan_target(const std::vector<Coord>& direction, std::int64_t v_norm) {
  if (direction.empty()) throw ConfigError("scan: empty direction");
  const Vertex dir{std::span<const Coord>(direction.data(), direction.size())};
  const std::int64_t dnorm = l1_norm(dir);
  if (dnorm == 0) throw ConfigError("scan: direction must be nonzero");
  if (v_norm < 1) throw ConfigError("scan: |v| must be >= 1");
  if (v_norm % dnorm != 0)
    throw ConfigError("scan: |v| = " + std::to_string(v_norm) + " is not a multiple of |direction| = " +
                      std::to_string(dnorm));
  const std::int64_t k = v_norm / dnorm;
  Vertex v = Vertex::zero(dir.dim());
  for (int a = 0; a < dir.dim(); ++a) v[a] = static_cast<Coord>(k * dir[a]);
  return v;
}

BoxSpec scan_window(const Vertex& v, double margin_factor, Coord pad) {
  if (!(margin_factor >= 1.0)) throw ConfigError("scan: margin_factor must be >= 1");
  const std::int64_t n = std::max<std::int64_t>(l1_norm(v), 1);
  std::vector<Coord> lo(static_cast<std::size_t>(v.dim())), hi(static_cast<std::size_t>(v.dim()));
  for (int a = 0; a < v.dim(); ++a) {
    const Coord clo = std::min<Coord>(0, v[a]);
    const Coord chi = std::max<Coord>(0, v[a]);
    const std::int64_t span = static_cast<std::int64_t>(chi) - clo;
    const std::int64_t margin = std::max<std::int64_t>(
        1, (static_cast<std::int64_t>(std::ceil(margin_factor * static_cast<double>(n))) - span + 1) / 2);
    lo[static_cast<std::size_t>(a)] = static_cast<Coord>(clo - margin);
    hi[static_cast<std::size_t>(a)] = static_cast<Coord>(chi + margin + pad);
  }
  return BoxSpec(lo, hi, Boundary::open);
}

void ScanSpec::validate() const {
  model.validate();
  if (v_norms.empty()) throw ConfigError("scan: empty |v| list");
  for (std::size_t i = 0; i < v_norms.size(); ++i) {
    if (v_norms[i] < 2) throw ConfigError("scan: |v| must be >= 2");
    if (i && v_norms[i] <= v_norms[i - 1]) throw ConfigError("scan: |v| list must be strictly increasing");
  }
  if (replications < 2) throw ConfigError("scan: replications must be >= 2");
  if (!(margin_factor >= 1.0)) throw ConfigError("scan: margin_factor must be >= 1");
  if (!(boundary_threshold >= 0.0 && boundary_threshold <= 1.0))
    throw ConfigError("scan: boundary_threshold must be in [0,1]");
  if (bootstrap_resamples < 1) throw ConfigError("scan: bootstrap resamples must be >= 1");
  if (path_c1 < 0) throw ConfigError("scan: path_c1 must be >= 0");
  scan_target(direction, v_norms[0]);
}

namespace {

// {a, b} bounds that make the geodesic length bound applicable, if any
std::optional<std::pair<double, double>> weight_bounds(const ModelSpec& m) {
  switch (m.kind) {
    case ModelKind::iid: {
      double lo = m.values[0], hi = m.values[0];
      for (double v : m.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (lo > 0.0) return std::make_pair(lo, hi);
      return std::nullopt;
    }
    case ModelKind::ising_site:
    case ModelKind::ising_bond:
      return std::make_pair(m.a, m.b);
    case ModelKind::mrf: {
      double lo = m.kernel->alphabet()[0], hi = lo;
      for (double v : m.kernel->alphabet()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      return std::make_pair(lo, hi);
    }
    default:
      return std::nullopt;  // sign-change weights include 0
  }
}

bool zero_cluster_connected(const WeightField& f, Index s, Index t) {
  const BoxSpec& box = f.box();
  UnionFind uf(box.num_vertices());
  for (Index v = 0; v < box.num_vertices(); ++v)
    for (int ax = 0; ax < box.dim(); ++ax) {
      if (!f.bond_present(v, ax)) continue;
      if (f.bond(v, ax) == 0.0) uf.unite(v, box.step(v, ax, +1));
    }
  return uf.connected(s, t);
}

}  // namespace

bool ScanResult::valid() const {
  for (const ScanRow& r : rows)
    if (!r.valid) return false;
  return true;
}

ScanResult variance_scan(const ScanSpec& spec) {
  spec.validate();
  const auto bounds = weight_bounds(spec.model);
  const bool signchange = spec.model.kind == ModelKind::ising_signchange;
  ScanResult out;
  for (const std::int64_t vn : spec.v_norms) {
    const Vertex v = scan_target(spec.direction, vn);
    const Vertex origin = Vertex::zero(v.dim());
    const BoxSpec window = scan_window(v, spec.margin_factor);
    const std::uint64_t size_seed = derive_seed(spec.seed, {kScanTag, static_cast<std::uint64_t>(vn)});
    const int R = spec.replications;
    std::vector<double> values(static_cast<std::size_t>(R));
    std::vector<char> touched(static_cast<std::size_t>(R), 0), violated(static_cast<std::size_t>(R), 0),
        agree(static_cast<std::size_t>(R), 0), exceeded(static_cast<std::size_t>(R), 0);
    std::vector<Index> edges(static_cast<std::size_t>(R), 0);
    parallel_for(R, spec.threads, [&](Index r) {
      const WeightField field = sample_weight_field(spec.model, window, size_seed,
                                                    static_cast<std::uint64_t>(r));
      const PassageResult res = passage_time(field, origin, v);
      values[static_cast<std::size_t>(r)] = res.value;
      touched[static_cast<std::size_t>(r)] = res.touched_boundary;
      edges[static_cast<std::size_t>(r)] = res.edge_count;
      if (bounds)
        violated[static_cast<std::size_t>(r)] = !geodesic_length_check(res, bounds->first, bounds->second);
      if (signchange) {
        const bool zero = res.value == 0.0;
        const bool conn = zero_cluster_connected(field, window.index_of(origin), window.index_of(v));
        agree[static_cast<std::size_t>(r)] = zero == conn;
      }
      if (spec.path_c1 > 0) {
        bool exceed;
        try {
          const PassageResult hop = passage_time_hop_constrained(field, origin, v, spec.path_c1);
          exceed = hop.value > res.value + 1e-9;
        } catch (const InfeasibleError&) {
          exceed = true;
        }
        exceeded[static_cast<std::size_t>(r)] = exceed;
      }
    });

    ScanRow row;
    row.v_norm = vn;
    row.replications = R;
    row.mean_t = mean(values);
    row.var_t = variance(values);
    RngStream boot = RngStream::derive(spec.seed, {kBootTag, static_cast<std::uint64_t>(vn)});
    const Interval ci = bootstrap_variance_ci(values, spec.bootstrap_resamples, boot);
    row.var_ci_lo = ci.lo;
    row.var_ci_hi = ci.hi;
    row.var_over_v = row.var_t / static_cast<double>(vn);
    row.var_logv_over_v = row.var_t * std::log(static_cast<double>(vn)) / static_cast<double>(vn);
    std::int64_t touch_count = 0;
    for (char t : touched) touch_count += t;
    row.boundary_fraction = static_cast<double>(touch_count) / static_cast<double>(R);
    row.valid = row.boundary_fraction <= spec.boundary_threshold;
    if (bounds) {
      row.geodesic_violations = 0;
      for (char x : violated) row.geodesic_violations += x;
    }
    if (signchange) {
      std::int64_t a = 0;
      for (char x : agree) a += x;
      row.connectivity_agreement = static_cast<double>(a) / static_cast<double>(R);
    }
    if (spec.path_c1 > 0) {
      std::int64_t e = 0;
      for (char x : exceeded) e += x;
      row.path_exceed_fraction = static_cast<double>(e) / static_cast<double>(R);
    }
    out.rows.push_back(row);
    if (spec.record_raw)
      for (int r = 0; r < R; ++r)
        out.raw.push_back({vn, r, values[static_cast<std::size_t>(r)], edges[static_cast<std::size_t>(r)],
                           touched[static_cast<std::size_t>(r)] != 0});
  }
  return out;
}

ShiftReport shift_invariance_test(const ModelSpec& model, const Vertex& v, int samples, double margin_factor,
                                  int bootstrap_resamples, std::uint64_t seed, int threads) {
  model.validate();
  if (samples < 2) throw ConfigError("shift test: samples must be >= 2");
  const std::int64_t vn = l1_norm(v);
  if (vn < 1) throw ConfigError("shift test: |v| must be >= 1");
  // the shift takes values in [0, m]^d
  RngStream probe = RngStream::derive(seed, {kShiftTag, 0});
  const int m = draw_shift(v.dim(), vn, probe).m;
  const Vertex origin = Vertex::zero(v.dim());
  const BoxSpec window = scan_window(v, margin_factor, static_cast<Coord>(m));
  const std::uint64_t plain_seed = derive_seed(seed, {kShiftTag, 1});
  const std::uint64_t shift_seed = derive_seed(seed, {kShiftTag, 2});

  std::vector<double> plain(static_cast<std::size_t>(samples)), shifted(static_cast<std::size_t>(samples));
  parallel_for(samples, threads, [&](Index i) {
    const WeightField f1 = sample_weight_field(model, window, plain_seed, static_cast<std::uint64_t>(i));
    plain[static_cast<std::size_t>(i)] = passage_time(f1, origin, v).value;
    const WeightField f2 = sample_weight_field(model, window, shift_seed, static_cast<std::uint64_t>(i));
    RngStream bit_rng = RngStream::derive(seed, {kShiftTag, 3, static_cast<std::uint64_t>(i)});
    const ShiftSpec z = draw_shift(v.dim(), vn, bit_rng);
    shifted[static_cast<std::size_t>(i)] = shifted_passage(f2, v, z).value;
  });

  ShiftReport rep;
  rep.v_norm = vn;
  rep.samples = samples;
  rep.m = m;
  const KsResult ks = ks_two_sample(plain, shifted);
  rep.ks_stat = ks.stat;
  rep.ks_p = ks.p_value;
  rep.var_plain = variance(plain);
  rep.var_shifted = variance(shifted);
  rep.var_diff = rep.var_plain - rep.var_shifted;
  RngStream boot = RngStream::derive(seed, {kShiftTag, 4});
  const Interval ci = bootstrap_variance_diff_ci(plain, shifted, bootstrap_resamples, boot);
  rep.diff_ci_lo = ci.lo;
  rep.diff_ci_hi = ci.hi;
  return rep;
}

ConnectivityReport signchange_connectivity_check(const ModelSpec& model, const Vertex& v, int samples,
                                                 double margin_factor, std::uint64_t seed, int threads) {
  model.validate();
  if (model.kind != ModelKind::ising_signchange)
    throw ConfigError("connectivity check: model must be ising-signchange");
  if (samples < 1) throw ConfigError("connectivity check: samples must be >= 1");
  const Vertex origin = Vertex::zero(v.dim());
  const BoxSpec window = scan_window(v, margin_factor);
  const std::uint64_t s2 = derive_seed(seed, {kConnTag, static_cast<std::uint64_t>(l1_norm(v))});
  std::vector<char> agree(static_cast<std::size_t>(samples), 0);
  parallel_for(samples, threads, [&](Index i) {
    const WeightField f = sample_weight_field(model, window, s2, static_cast<std::uint64_t>(i));
    const bool zero = passage_time(f, origin, v).value == 0.0;
    const bool conn = zero_cluster_connected(f, window.index_of(origin), window.index_of(v));
    agree[static_cast<std::size_t>(i)] = zero == conn;
  });
  ConnectivityReport rep;
  rep.v_norm = l1_norm(v);
  rep.samples = samples;
  for (char a : agree) rep.agreements += a;
  rep.fraction = static_cast<double>(rep.agreements) / static_cast<double>(samples);
  return rep;
}

PathLengthReport path_length_statistics(const ModelSpec& model, const Vertex& v, int samples, double c1,
                                        double margin_factor, std::uint64_t seed, int threads) {
  model.validate();
  if (samples < 1) throw ConfigError("path length statistics: samples must be >= 1");
  if (!(c1 > 0)) throw ConfigError("path length statistics: c1 must be > 0");
  const Vertex origin = Vertex::zero(v.dim());
  const BoxSpec window = scan_window(v, margin_factor);
  const std::uint64_t s2 = derive_seed(seed, {kPathTag, static_cast<std::uint64_t>(l1_norm(v))});
  std::vector<char> exceeded(static_cast<std::size_t>(samples), 0);
  parallel_for(samples, threads, [&](Index i) {
    const WeightField f = sample_weight_field(model, window, s2, static_cast<std::uint64_t>(i));
    const double free_val = passage_time(f, origin, v).value;
    bool exceed;
    try {
      exceed = passage_time_hop_constrained(f, origin, v, c1).value > free_val + 1e-9;
    } catch (const InfeasibleError&) {
      exceed = true;
    }
    exceeded[static_cast<std::size_t>(i)] = exceed;
  });
  PathLengthReport rep;
  rep.v_norm = l1_norm(v);
  rep.samples = samples;
  rep.c1 = c1;
  for (char e : exceeded) rep.exceeded += e;
  rep.fraction = static_cast<double>(rep.exceeded) / static_cast<double>(samples);
  const Interval ci = wilson_interval(rep.exceeded, samples);
  rep.ci_lo = ci.lo;
  rep.ci_hi = ci.hi;
  return rep;
}

void write_scan_csv(std::ostream& os, const ScanResult& res, std::uint64_t config_hash) {
  os << "# fpplab variance-scan config=" << hex16(config_hash) << "\n";
  os << "v,replications,mean_t,var_t,var_ci_lo,var_ci_hi,var_over_v,var_logv_over_v,"
        "boundary_fraction,geodesic_violations\n";
  for (const ScanRow& r : res.rows) {
    os << r.v_norm << ',' << r.replications << ',' << fmt_double(r.mean_t) << ',' << fmt_double(r.var_t)
       << ',' << fmt_double(r.var_ci_lo) << ',' << fmt_double(r.var_ci_hi) << ','
       << fmt_double(r.var_over_v) << ',' << fmt_double(r.var_logv_over_v) << ','
       << fmt_double(r.boundary_fraction) << ',' << r.geodesic_violations << "\n";
  }
}

void write_raw_jsonl(std::ostream& os, const ScanResult& res) {
  for (const RawRecord& r : res.raw)
    os << "{\"v\":" << r.v_norm << ",\"rep\":" << r.rep << ",\"value\":" << fmt_double(r.value)
       << ",\"edges\":" << r.edges << ",\"touched_boundary\":" << (r.touched ? "true" : "false")
       << "}\n";
}

}  // namespace fpp
