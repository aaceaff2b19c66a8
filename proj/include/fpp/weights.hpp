#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpp/lattice.hpp"
#include "fpp/rng.hpp"

namespace fpp {

// Heat-bath conditional P(spin = +1 | sum of neighbouring spins).
double ising_conditional(double beta, double h, int neighbor_sum);

// Single-site conditional law of a translation-invariant specification:
// alphabet of q values, `slots` ordered neighbour positions, and a row of q
// probabilities per boundary tuple. Boundary tuples are encoded mixed-radix
// with slot 0 most significant; slots are ordered (+axis0, -axis0, +axis1,
// ...) when attached to a lattice.
class LocalKernel {
 public:
  LocalKernel(int dim, int slots, std::vector<double> alphabet, std::vector<double> table);

  static LocalKernel ising(int dim, double beta, double h);       // site version, 2d slots
  static LocalKernel ising_bond(int dim, double beta, double h);  // bond version, 4d-2 slots
  // Neighbour-independent rows: an iid field in kernel form.
  static LocalKernel iid(int dim, int slots, std::vector<double> alphabet, std::vector<double> probs);

  int dim() const { return dim_; }
  int slots() const { return slots_; }
  int q() const { return static_cast<int>(alphabet_.size()); }
  Index rows() const { return rows_; }
  std::span<const double> alphabet() const { return alphabet_; }

  double cond(Index boundary_code, int symbol) const {
    return table_[static_cast<std::size_t>(boundary_code) * static_cast<std::size_t>(q()) +
                  static_cast<std::size_t>(symbol)];
  }

  // same conditional law, relabeled alphabet (e.g. spins to positive weights)
  LocalKernel with_alphabet(std::vector<double> alphabet) const;

 private:
  int dim_, slots_;
  Index rows_;
  std::vector<double> alphabet_;
  std::vector<double> table_;
};

void write_kernel(std::ostream& os, const LocalKernel& k);
LocalKernel read_kernel(std::istream& is);
LocalKernel read_kernel_file(const std::string& path);

// Uniform lower bound gamma = sum_w min_eta P(sigma_v = w | eta) compared
// against the high-noise threshold (m-1)/m, m = 2d for the site version and
// 4d-2 for the bond version.
struct HnReport {
  double gamma = 0;
  double threshold = 0;
  bool satisfied = false;
};
HnReport hn_gamma(const LocalKernel& kernel, Indexing version);

// Nearest-neighbour adjacency in CSR form; also used for the bond cover
// graph (one vertex per bond slot, bonds adjacent iff they share an
// endpoint, giving degree 4d-2).
class AdjacencyList {
 public:
  static AdjacencyList box_sites(const BoxSpec& torus);
  static AdjacencyList cover_graph(const BoxSpec& torus);

  Index size() const { return static_cast<Index>(off_.size()) - 1; }
  int degree() const { return deg_; }
  std::span<const Index> nbrs(Index v) const {
    return {flat_.data() + off_[static_cast<std::size_t>(v)],
            static_cast<std::size_t>(off_[static_cast<std::size_t>(v) + 1] - off_[static_cast<std::size_t>(v)])};
  }

 private:
  int deg_ = 0;
  std::vector<std::size_t> off_;
  std::vector<Index> flat_;
};

enum class InitState { all_minus, all_plus, random };
enum class SamplerKind { gibbs, cftp };

std::string to_string(InitState s);
std::string to_string(SamplerKind s);

// Systematic-scan heat-bath dynamics for the Ising measure on a fixed-degree
// graph. One full sweep visits every vertex in index order. sweeps = 0
// returns the initial state.
std::vector<std::int8_t> gibbs_ising_graph(const AdjacencyList& adj, double beta, double h, int sweeps,
                                           InitState init, RngStream& rng);

SpinField gibbs_ising(const BoxSpec& torus, double beta, double h, int sweeps, InitState init, RngStream& rng);

// Coupling from the past with the monotone all-plus/all-minus sandwich.
// Horizon doubles (1, 2, 4, ... sweeps) until the chains coalesce at time 0;
// sweep randomness is a pure function of (seed, sweep index), so doubling
// reuses the randomness of already-simulated sweeps. Throws CoalescenceError
// beyond the horizon cap.
struct CftpGraphResult {
  std::vector<std::int8_t> spins;
  int horizon = 0;  // sweeps actually needed
};
CftpGraphResult cftp_ising_graph(const AdjacencyList& adj, double beta, double h, std::uint64_t seed,
                                 int horizon_cap = 1 << 20);

struct CftpResult {
  SpinField spins;
  int horizon = 0;
};
CftpResult cftp_ising(const BoxSpec& torus, double beta, double h, std::uint64_t seed, int horizon_cap = 1 << 20);

// Site weights t(v) = a if spin -1, b if spin +1 (requires 0 < a < b).
WeightField spins_to_ab(const SpinField& spins, double a, double b);

// Bond weights t(e) = 1 iff the endpoint spins differ, else 0.
WeightField sign_change_weights(const SpinField& spins);

// General finite-alphabet field on torus sites (systematic-scan heat bath
// driven by the kernel's conditional rows).
class StateField {
 public:
  StateField(const BoxSpec& box, std::uint8_t fill = 0);
  const BoxSpec& box() const { return box_; }
  std::uint8_t at(Index v) const { return s_[static_cast<std::size_t>(v)]; }
  std::uint8_t& at(Index v) { return s_[static_cast<std::size_t>(v)]; }
  friend bool operator==(const StateField&, const StateField&) = default;

 private:
  BoxSpec box_;
  std::vector<std::uint8_t> s_;
};

StateField mrf_gibbs(const LocalKernel& kernel, const BoxSpec& torus, int sweeps, InitState init, RngStream& rng);
WeightField states_to_weights(const StateField& state, const LocalKernel& kernel);

// --- model specification (the weight laws the experiments understand) ---

enum class ModelKind { iid, ising_site, ising_bond, ising_signchange, mrf };

std::string to_string(ModelKind k);

struct ModelSpec {
  ModelKind kind = ModelKind::iid;
  Indexing iid_indexing = Indexing::bond;     // iid only
  std::vector<double> values{1.0, 2.0};       // iid atoms
  std::vector<double> probs{0.5, 0.5};
  double a = 1.0, b = 2.0;                    // ising_site / ising_bond weights
  double beta = 0.2, h = 0.0;
  SamplerKind sampler = SamplerKind::gibbs;
  int sweeps = 64;
  InitState init = InitState::random;
  std::optional<LocalKernel> kernel;          // mrf

  Indexing indexing() const;
  void validate() const;
};

// iid field directly on a box (open or torus); values drawn by inverse CDF
// in canonical slot order.
WeightField gen_iid(const BoxSpec& box, Indexing ix, std::span<const double> values,
                    std::span<const double> probs, RngStream& rng);

// Draw one weight field for the model on the given open window. Dependent
// models are sampled on the torus with the same corner coordinates and then
// re-indexed onto the open window. The stream is derived from (seed, rep).
WeightField sample_weight_field(const ModelSpec& model, const BoxSpec& window, std::uint64_t seed,
                                std::uint64_t rep);

// Same law, but keeps the torus indexing (no wrap bonds dropped). iid models
// sample directly on the torus slots.
WeightField sample_weight_field_torus(const ModelSpec& model, const BoxSpec& torus, std::uint64_t seed,
                                      std::uint64_t rep);

// The spin/state field underlying the last concept, for operations that act
// on configurations rather than weights. Only meaningful for dependent kinds.
SpinField sample_spin_field(const ModelSpec& model, const BoxSpec& torus, std::uint64_t seed, std::uint64_t rep);

// --- determination probe ---

// Couple chains from extremal (monotone kinds) or all (small mrf) initial
// states with shared per-sweep randomness and report how often the state at
// probe vertex v is still undetermined after k sweeps, for each k in klist.
struct ProbeRow {
  int k = 0;
  std::int64_t replications = 0;
  std::int64_t undetermined = 0;
  double estimate = 0;
  double ci_lo = 0, ci_hi = 0;  // Wilson 95%
};
std::vector<ProbeRow> determination_probe(const ModelSpec& model, const BoxSpec& torus, const Vertex& v,
                                          std::span<const int> klist, std::int64_t replications,
                                          std::uint64_t seed);

}  // namespace fpp
