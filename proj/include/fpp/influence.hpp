#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fpp/lattice.hpp"

namespace fpp {

// A function of n iid coordinates, each over a finite alphabet of q symbols
// with law `probs`, tabulated exhaustively over all q^n inputs. Input codes
// are mixed-radix with coordinate 0 most significant. Everything downstream
// (derivatives, norms, functionals) is exact arithmetic over this table, so
// it serves as the ground-truth oracle for the concentration inequalities.
class FunctionTable {
 public:
  FunctionTable(int n, std::vector<double> probs, std::vector<double> values);
  static FunctionTable build(int n, std::vector<double> probs,
                             const std::function<double(std::span<const int>)>& fn);

  int n() const { return n_; }
  int q() const { return static_cast<int>(probs_.size()); }
  Index size() const { return static_cast<Index>(values_.size()); }
  std::span<const double> probs() const { return probs_; }
  double value(Index code) const { return values_[static_cast<std::size_t>(code)]; }
  std::span<const double> values() const { return values_; }

  int digit(Index code, int i) const {
    return static_cast<int>(code / pow_[static_cast<std::size_t>(i)] % q());
  }
  Index with_digit(Index code, int i, int s) const {
    return code + (static_cast<Index>(s) - digit(code, i)) * pow_[static_cast<std::size_t>(i)];
  }
  // product measure of the code
  double weight(Index code) const {
    double w = 1;
    for (int i = 0; i < n_; ++i) w *= probs_[static_cast<std::size_t>(digit(code, i))];
    return w;
  }

 private:
  int n_;
  std::vector<double> probs_;
  std::vector<double> values_;
  std::vector<Index> pow_;
};

double table_mean(const FunctionTable& f);
double table_variance(const FunctionTable& f);

// Discrete derivative along coordinate i: (delta_i f)(x) = f(x) - E[f | all
// coordinates except i]. Returned as a table over the same product space.
FunctionTable delta(const FunctionTable& f, int i);

struct Norms {
  double l1 = 0, l2 = 0;  // E|g| and sqrt(E g^2) under the product measure
};
Norms table_norms(const FunctionTable& g);
double prob_nonzero(const FunctionTable& g);

// E[g^2] >= E[|g|]^2 / P(g != 0): `holds` on strict content, `vacuous` when
// g is identically zero.
enum class SecondMomentVerdict { holds, fails, vacuous };
SecondMomentVerdict second_moment_check(const FunctionTable& g, double tol = 1e-9);

struct CoordinateInfluence {
  int i = 0;
  double l1 = 0, l2 = 0;
  double p_nonzero = 0;
  double term = 0;  // l2^2 / log(e * l2 / l1), 0 when delta_i f == 0
};

struct TalagrandReport {
  double variance = 0;
  double sum_terms = 0;
  double ratio = 0;  // variance / sum_terms (0 when the sum vanishes)
  std::vector<CoordinateInfluence> coords;
};
TalagrandReport talagrand_functional(const FunctionTable& f);

struct EfronSteinReport {
  double variance = 0;
  double sum_sq = 0;  // sum_i ||delta_i f||_2^2
  bool holds = false;
};
EfronSteinReport efron_stein_check(const FunctionTable& f, double tol = 1e-9);

// Tent-map block average of m^2 fair bits: value m - |(bitsum mod 2m) - m|,
// taking every value in [0, m].
int averaging_value(int m, std::span<const std::uint8_t> bits);
// Exact law of the average: index j holds P(value = j).
std::vector<double> averaging_distribution(int m);

// Passage time T(src, dst) on an open box with iid site weights, tabulated
// over every weight configuration; coordinate i is the vertex with linear
// index i. Guarded by a table cap.
FunctionTable passage_function_table(const BoxSpec& box, const Vertex& src, const Vertex& dst,
                                     std::span<const double> values, std::span<const double> probs,
                                     Index cap = Index{1} << 24);

void write_function_table(std::ostream& os, const FunctionTable& f);
void write_function_table_file(const std::string& path, const FunctionTable& f);
FunctionTable read_function_table(std::istream& is);
FunctionTable read_function_table_file(const std::string& path);

}  // namespace fpp
