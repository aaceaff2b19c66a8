#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "fpp/passage.hpp"
#include "fpp/stats.hpp"
#include "fpp/weights.hpp"

namespace fpp {

// Run fn(i) for i in [0, n). Work units write only to their own index, and
// every random stream is derived from the unit index, so the output is a
// pure function of the inputs no matter the thread count.
void parallel_for(Index n, int threads, const std::function<void(Index)>& fn);

// Scan target k * direction with |target|_1 = v_norm (v_norm must be a
// multiple of |direction|_1).
Vertex scan_target(const std::vector<Coord>& direction, std::int64_t v_norm);

// Open window around 0 and v: every axis gets a margin that brings its
// extent up to about margin_factor * |v|_1 (at least 1), plus `pad` extra
// cells on the high side when shifted endpoints need room.
BoxSpec scan_window(const Vertex& v, double margin_factor, Coord pad = 0);

struct ScanSpec {
  ModelSpec model;
  std::vector<Coord> direction{1, 0};
  std::vector<std::int64_t> v_norms{16, 32, 64};
  int replications = 400;
  double margin_factor = 1.5;
  double boundary_threshold = 0.001;
  int bootstrap_resamples = 2000;
  std::uint64_t seed = 1;
  int threads = 1;
  double path_c1 = 0;  // > 0: also measure hop-budget exceedance
  bool record_raw = false;

  void validate() const;
};

struct ScanRow {
  std::int64_t v_norm = 0;
  int replications = 0;
  double mean_t = 0, var_t = 0;
  double var_ci_lo = 0, var_ci_hi = 0;
  double var_over_v = 0, var_logv_over_v = 0;
  double boundary_fraction = 0;
  std::int64_t geodesic_violations = -1;  // -1 = bound not applicable
  double connectivity_agreement = -1;     // sign-change models only
  double path_exceed_fraction = -1;       // only when path_c1 > 0
  bool valid = true;                      // boundary fraction within threshold
};

struct RawRecord {
  std::int64_t v_norm = 0;
  int rep = 0;
  double value = 0;
  Index edges = 0;
  bool touched = false;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::vector<RawRecord> raw;
  bool valid() const;
};

// Mean/variance of T(0, v) per scale with bootstrap CIs, boundary-touch
// accounting, and the per-model consistency checks described above.
ScanResult variance_scan(const ScanSpec& spec);

struct ShiftReport {
  std::int64_t v_norm = 0;
  int samples = 0;
  int m = 0;
  double ks_stat = 0, ks_p = 0;
  double var_plain = 0, var_shifted = 0;
  double var_diff = 0, diff_ci_lo = 0, diff_ci_hi = 0;
};

// Compare T(0,v) with T(z, v+z) on independent fields, z the tent-map block
// average redrawn per sample.
ShiftReport shift_invariance_test(const ModelSpec& model, const Vertex& v, int samples, double margin_factor,
                                  int bootstrap_resamples, std::uint64_t seed, int threads);

struct ConnectivityReport {
  std::int64_t v_norm = 0;
  int samples = 0;
  std::int64_t agreements = 0;
  double fraction = 0;
};

// T(0,v) == 0 must agree with same-cluster connectivity in the zero-weight
// graph; fraction of replications where the two predicates coincide.
ConnectivityReport signchange_connectivity_check(const ModelSpec& model, const Vertex& v, int samples,
                                                 double margin_factor, std::uint64_t seed, int threads);

struct PathLengthReport {
  std::int64_t v_norm = 0;
  int samples = 0;
  double c1 = 0;
  std::int64_t exceeded = 0;
  double fraction = 0;
  double ci_lo = 0, ci_hi = 0;
};

// Probability that every minimal path needs more than ceil(c1 |v|_1)
// vertices (hop-constrained optimum strictly above the free optimum).
PathLengthReport path_length_statistics(const ModelSpec& model, const Vertex& v, int samples, double c1,
                                        double margin_factor, std::uint64_t seed, int threads);

void write_scan_csv(std::ostream& os, const ScanResult& res, std::uint64_t config_hash);
// one JSON object per replication record, in (v, rep) order
void write_raw_jsonl(std::ostream& os, const ScanResult& res);

}  // namespace fpp
