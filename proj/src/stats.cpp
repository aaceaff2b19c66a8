#include "fpp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fpp/errors.hpp"

namespace fpp {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("mean of empty sample");
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw DomainError("variance needs at least 2 observations");
  const double m = mean(xs);
  double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

namespace {

Interval percentile_interval(std::vector<double>& stats, double level, double point) {
  std::sort(stats.begin(), stats.end());
  const double alpha = (1.0 - level) / 2.0;
  const auto b = static_cast<double>(stats.size());
  auto lo_i = static_cast<std::size_t>(std::floor(alpha * b));
  auto hi_i = static_cast<std::size_t>(std::ceil((1.0 - alpha) * b)) - 1;
  lo_i = std::min(lo_i, stats.size() - 1);
  hi_i = std::min(hi_i, stats.size() - 1);
  Interval ci{stats[lo_i], stats[hi_i]};
  // percentile intervals are not guaranteed to cover the point estimate;
  // widen in the (practically unobserved) case they miss it
  ci.lo = std::min(ci.lo, point);
  ci.hi = std::max(ci.hi, point);
  return ci;
}

void resample_into(std::span<const double> xs, RngStream& rng, std::vector<double>& out) {
  const std::size_t n = xs.size();
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = xs[rng.below(n)];
}

}  // namespace

Interval bootstrap_variance_ci(std::span<const double> xs, int resamples, RngStream& rng, double level) {
  if (resamples < 1) throw DomainError("bootstrap needs >= 1 resample");
  const double point = variance(xs);
  std::vector<double> stats(static_cast<std::size_t>(resamples));
  std::vector<double> buf;
  for (int b = 0; b < resamples; ++b) {
    resample_into(xs, rng, buf);
    stats[static_cast<std::size_t>(b)] = variance(buf);
  }
  return percentile_interval(stats, level, point);
}

Interval bootstrap_variance_diff_ci(std::span<const double> a, std::span<const double> b, int resamples,
                                    RngStream& rng, double level) {
  if (resamples < 1) throw DomainError("bootstrap needs >= 1 resample");
  const double point = variance(a) - variance(b);
  std::vector<double> stats(static_cast<std::size_t>(resamples));
  std::vector<double> ra, rb;
  for (int i = 0; i < resamples; ++i) {
    resample_into(a, rng, ra);
    resample_into(b, rng, rb);
    stats[static_cast<std::size_t>(i)] = variance(ra) - variance(rb);
  }
  return percentile_interval(stats, level, point);
}

namespace {
// Kolmogorov tail Q_ks(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_tail(double lambda) {
  const double l2 = lambda * lambda;
  double sum = 0, sign = 1, prev = 0;
  for (int j = 1; j <= 100; ++j) {
    const double term = sign * 2.0 * std::exp(-2.0 * j * j * l2);
    sum += term;
    if (std::abs(term) <= 1e-12 * std::abs(sum) || std::abs(term) <= 1e-16) break;
    if (j > 1 && std::abs(term) >= prev) return 1.0;  // no convergence: lambda tiny
    prev = std::abs(term);
    sign = -sign;
  }
  return std::clamp(sum, 0.0, 1.0);
}
}  // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  const double ne = nx * ny / (nx + ny);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  return {d, kolmogorov_tail(lambda)};
}

namespace {

double gamma_p_series(double a, double x) {
  double ap = a, sum = 1.0 / a, del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (!(a > 0) || x < 0) throw DomainError("regularized_gamma_q: need a > 0, x >= 0");
  if (x == 0) return 1.0;
  if (x < a + 1.0) return std::clamp(1.0 - gamma_p_series(a, x), 0.0, 1.0);
  return std::clamp(gamma_q_contfrac(a, x), 0.0, 1.0);
}

double chi_square_tail(double x, double df) {
  if (!(df > 0)) throw DomainError("chi_square_tail: df must be > 0");
  if (x <= 0) return 1.0;
  return regularized_gamma_q(df / 2.0, x / 2.0);
}

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
  if (trials <= 0 || successes < 0 || successes > trials)
    throw DomainError("wilson_interval: need 0 <= successes <= trials, trials > 0");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // exact endpoints at the degenerate counts (the formula leaves FP dust)
  const double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

}  // namespace fpp
