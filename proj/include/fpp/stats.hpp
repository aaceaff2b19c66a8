#pragma once

#include <cstdint>
#include <span>

#include "fpp/rng.hpp"

namespace fpp {

double mean(std::span<const double> xs);
// Unbiased sample variance (n-1 denominator); n >= 2 required.
double variance(std::span<const double> xs);

struct Interval {
  double lo = 0, hi = 0;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

// Percentile bootstrap CI for the sample variance. Deterministic given the
// stream. The interval is widened, if ever necessary, to contain the point
// estimate (containment is part of the contract).
Interval bootstrap_variance_ci(std::span<const double> xs, int resamples, RngStream& rng,
                               double level = 0.95);

// CI for var(a) - var(b) with independent resampling of both samples.
Interval bootstrap_variance_diff_ci(std::span<const double> a, std::span<const double> b,
                                    int resamples, RngStream& rng, double level = 0.95);

struct KsResult {
  double stat = 0;    // sup-distance between empirical CDFs
  double p_value = 0; // asymptotic two-sample tail
};
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// Regularized upper incomplete gamma Q(a, x). Series + continued fraction.
double regularized_gamma_q(double a, double x);
// Tail P(X >= x) for chi-square with df degrees of freedom.
double chi_square_tail(double x, double df);

// Wilson score interval for a binomial proportion (95% by default).
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.959963984540054);

}  // namespace fpp
