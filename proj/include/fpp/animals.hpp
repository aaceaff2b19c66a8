#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fpp/lattice.hpp"
#include "fpp/rng.hpp"

namespace fpp {

// Best total site weight over origin-containing animals of exactly n cells.
struct AnimalScore {
  int n = 0;
  double value = 0;
  std::vector<Vertex> witness;  // the maximizing animal (cells sorted)
  bool exact = false;
};

// Highest-scoring animal within an enumerated set. The field must contain
// the L1 ball of radius n-1 around the origin.
AnimalScore best_animal_score(const AnimalSet& animals, const WeightField& site_field);

// Exact maximum by full enumeration (CapError if the census is too large).
AnimalScore greedy_exact(const WeightField& site_field, int n, Index cap = 4'000'000);

// Heuristic lower bounds. `greedy` grows the best boundary cell, ties to
// the smallest vertex; `multistart` adds `param` randomized growths;
// `anneal` refines the greedy animal with `param` remove/add proposals.
enum class HeuristicStrategy { greedy, multistart, anneal };
AnimalScore greedy_heuristic(const WeightField& site_field, int n, HeuristicStrategy strategy, int param,
                             RngStream& rng);

// Law of a nonnegative weight: finite atoms, or a continuous CDF supported
// in [0, upper].
class Distribution {
 public:
  static Distribution finite(std::vector<double> values, std::vector<double> probs);
  static Distribution continuous(std::function<double(double)> cdf, double upper);

  bool is_finite() const { return finite_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> probs() const { return probs_; }
  double cdf(double x) const;
  double upper() const { return upper_; }
  double sample(RngStream& rng) const;  // finite laws only

 private:
  Distribution() = default;
  bool finite_ = true;
  std::vector<double> values_, probs_;
  std::function<double(double)> cdf_;
  double upper_ = 0;
};

// integral_0^inf (1 - F(x))^(1/d) dx: closed form over atoms for finite
// laws, adaptive Simpson otherwise.
double martin_integral(const Distribution& dist, int d);

struct MartinRow {
  int n = 0;
  int replications = 0;
  double mean_score_over_n = 0;  // E[N(n)] / n estimate
  double ci_lo = 0, ci_hi = 0;   // normal-approximation 95% CI of the mean
  double integral = 0;
  double ratio = 0;  // mean_score_over_n / integral
};

// For each n: exact greedy scores of iid fields drawn from `dist`, scaled by
// n and compared against the integral bound.
std::vector<MartinRow> martin_ratio_experiment(const Distribution& dist, int d, std::span<const int> ns,
                                               int replications, std::uint64_t seed,
                                               Index cap = 4'000'000);

}  // namespace fpp
