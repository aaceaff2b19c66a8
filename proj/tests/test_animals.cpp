// Greedy lattice animals: exact enumeration scores against hand brute force,
// heuristic lower bounds, and the integral bound on the linear growth rate.
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <vector>

#include "fpp/animals.hpp"

using namespace fpp;
using doctest::Approx;

namespace {

WeightField random_sites(const BoxSpec& box, double lo, double hi, std::uint64_t seed) {
  WeightField f(box, Indexing::site);
  RngStream rng(seed);
  for (Index v = 0; v < box.num_vertices(); ++v) f.site(v) = lo + (hi - lo) * rng.u01();
  return f;
}

bool connected(const std::vector<Vertex>& cells) {
  if (cells.empty()) return false;
  std::set<Vertex> left(cells.begin() + 1, cells.end());
  std::queue<Vertex> bfs;
  bfs.push(cells[0]);
  while (!bfs.empty()) {
    const Vertex v = bfs.front();
    bfs.pop();
    for (int ax = 0; ax < v.dim(); ++ax)
      for (int dir : {+1, -1}) {
        Vertex w = v;
        w[ax] += dir;
        const auto it = left.find(w);
        if (it != left.end()) {
          left.erase(it);
          bfs.push(w);
        }
      }
  }
  return left.empty();
}

double cell_sum(const WeightField& f, const std::vector<Vertex>& cells) {
  double s = 0;
  for (const Vertex& v : cells) s += f.site_at(v);
  return s;
}

// exhaustive maximum over 3-cell connected origin-containing sets, by
// checking every pair of additional cells in the box
double brute_best3(const WeightField& f) {
  const BoxSpec& box = f.box();
  std::vector<Vertex> cells;
  for (Index i = 0; i < box.num_vertices(); ++i) cells.push_back(box.vertex_at(i));
  const Vertex origin = Vertex::zero(box.dim());
  double best = -1;
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      if (cells[i] == origin || cells[j] == origin) continue;
      std::vector<Vertex> a{origin, cells[i], cells[j]};
      if (!connected(a)) continue;
      best = std::max(best, cell_sum(f, a));
    }
  return best;
}

}  // namespace

TEST_CASE("single-cell animal score is the origin weight") {
  const BoxSpec box = BoxSpec::cube(2, -2, 2, Boundary::open);
  const WeightField f = random_sites(box, 0.5, 1.5, 5);
  const AnimalScore s = greedy_exact(f, 1);
  CHECK(s.n == 1);
  CHECK(s.exact);
  CHECK(s.value == f.site_at(Vertex{0, 0}));
  REQUIRE(s.witness.size() == 1);
  CHECK(s.witness[0] == Vertex{0, 0});
}

TEST_CASE("constant field scores n for any strategy") {
  const BoxSpec box = BoxSpec::cube(2, -4, 4, Boundary::open);
  const WeightField ones(box, Indexing::site, 1.0);
  CHECK(greedy_exact(ones, 4).value == 4.0);
  RngStream rng(3);
  CHECK(greedy_heuristic(ones, 4, HeuristicStrategy::greedy, 0, rng).value == 4.0);
  CHECK(greedy_heuristic(ones, 4, HeuristicStrategy::multistart, 8, rng).value == 4.0);
  CHECK(greedy_heuristic(ones, 4, HeuristicStrategy::anneal, 32, rng).value == 4.0);
}

TEST_CASE("exact three-cell score matches pairwise brute force") {
  const BoxSpec box = BoxSpec::cube(2, -2, 2, Boundary::open);
  for (std::uint64_t seed : {11ULL, 12ULL, 13ULL, 14ULL}) {
    const WeightField f = random_sites(box, 0.1, 2.0, seed);
    const AnimalScore s = greedy_exact(f, 3);
    CHECK(s.value == Approx(brute_best3(f)).epsilon(1e-12));
    CHECK(s.exact);
  }
}

TEST_CASE("one-dimensional animals are intervals") {
  const BoxSpec line = BoxSpec::cube(1, -5, 5, Boundary::open);
  const WeightField f = random_sites(line, 0.25, 1.75, 77);
  const int n = 4;
  double best = -1;
  for (int left = -(n - 1); left <= 0; ++left) {
    double s = 0;
    for (int x = left; x < left + n; ++x) s += f.site_at(Vertex{x});
    best = std::max(best, s);
  }
  CHECK(greedy_exact(f, n).value == Approx(best).epsilon(1e-12));
}

TEST_CASE("witnesses are valid animals achieving the reported value") {
  const BoxSpec box = BoxSpec::cube(2, -4, 4, Boundary::open);
  for (int n = 1; n <= 5; ++n) {
    const WeightField f = random_sites(box, 0.5, 1.5, 100 + static_cast<std::uint64_t>(n));
    RngStream rng(9);
    for (const AnimalScore& s : {greedy_exact(f, n),
                                 greedy_heuristic(f, n, HeuristicStrategy::greedy, 0, rng),
                                 greedy_heuristic(f, n, HeuristicStrategy::multistart, 8, rng),
                                 greedy_heuristic(f, n, HeuristicStrategy::anneal, 40, rng)}) {
      CHECK(s.n == n);
      REQUIRE(static_cast<int>(s.witness.size()) == n);
      CHECK(std::is_sorted(s.witness.begin(), s.witness.end()));
      CHECK(std::adjacent_find(s.witness.begin(), s.witness.end()) == s.witness.end());
      CHECK(std::find(s.witness.begin(), s.witness.end(), Vertex{0, 0}) != s.witness.end());
      CHECK(connected(s.witness));
      CHECK(s.value == Approx(cell_sum(f, s.witness)).epsilon(1e-12));
    }
  }
}

TEST_CASE("heuristics are exact-value lower bounds; refinement never hurts") {
  const BoxSpec box = BoxSpec::cube(2, -5, 5, Boundary::open);
  for (std::uint64_t seed : {21ULL, 22ULL, 23ULL}) {
    const WeightField f = random_sites(box, 0.1, 3.0, seed);
    for (int n : {3, 5, 6}) {
      const double exact = greedy_exact(f, n).value;
      RngStream rng(seed);
      const double g = greedy_heuristic(f, n, HeuristicStrategy::greedy, 0, rng).value;
      const double ms = greedy_heuristic(f, n, HeuristicStrategy::multistart, 64, rng).value;
      const double an = greedy_heuristic(f, n, HeuristicStrategy::anneal, 200, rng).value;
      CHECK(g <= exact + 1e-12);
      CHECK(ms <= exact + 1e-12);
      CHECK(an <= exact + 1e-12);
      CHECK(ms >= g - 1e-12);  // multistart includes the deterministic start
      CHECK(an >= g - 1e-12);  // anneal refines the greedy animal
    }
  }
}

TEST_CASE("animal score guards") {
  const BoxSpec small = BoxSpec::cube(2, -1, 1, Boundary::open);
  const WeightField f(small, Indexing::site, 1.0);
  CHECK_THROWS_AS(greedy_exact(f, 3), DomainError);  // needs radius n-1 = 2
  const WeightField bonds(small, Indexing::bond, 1.0);
  CHECK_THROWS_AS(greedy_exact(bonds, 1), DomainError);
  const BoxSpec big = BoxSpec::cube(2, -8, 8, Boundary::open);
  const WeightField g(big, Indexing::site, 1.0);
  CHECK_THROWS_AS(greedy_exact(g, 8, 100), CapError);
}

TEST_CASE("martin integral closed forms") {
  const Distribution bern = Distribution::finite({0.0, 1.0}, {0.2, 0.8});
  CHECK(martin_integral(bern, 2) == Approx(0.8944271909999159).epsilon(1e-12));
  CHECK(martin_integral(bern, 1) == Approx(0.8).epsilon(1e-12));

  const Distribution two = Distribution::finite({1.0, 2.0}, {0.5, 0.5});
  // a + (b-a) p^(1/d)
  CHECK(martin_integral(two, 2) == Approx(1.0 + std::sqrt(0.5)).epsilon(1e-12));
  CHECK(martin_integral(two, 3) == Approx(1.0 + std::cbrt(0.5)).epsilon(1e-12));

  const Distribution three = Distribution::finite({0.5, 2.0, 3.0}, {0.25, 0.45, 0.30});
  CHECK(martin_integral(three, 3) == Approx(2.5322733947062743).epsilon(1e-12));

  const Distribution point = Distribution::finite({1.0}, {1.0});
  CHECK(martin_integral(point, 2) == Approx(1.0).epsilon(1e-12));

  const Distribution unif = Distribution::continuous([](double x) {
    if (x < 0) return 0.0;
    if (x > 1) return 1.0;
    return x;
  }, 1.0);
  CHECK(martin_integral(unif, 2) == Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(martin_integral(unif, 1) == Approx(0.5).epsilon(1e-9));
}

TEST_CASE("distribution plumbing") {
  const Distribution d = Distribution::finite({1.0, 2.0, 4.0}, {0.25, 0.5, 0.25});
  CHECK(d.is_finite());
  CHECK(d.cdf(0.5) == Approx(0.0));
  CHECK(d.cdf(1.0) == Approx(0.25));
  CHECK(d.cdf(3.0) == Approx(0.75));
  CHECK(d.cdf(4.0) == Approx(1.0));
  CHECK(d.upper() == 4.0);
  RngStream a(4), b(4);
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 4000; ++i) {
    const double x = d.sample(a);
    CHECK(d.sample(b) == x);
    counts[x == 1.0 ? 0 : x == 2.0 ? 1 : 2]++;
  }
  CHECK(counts[0] / 4000.0 == Approx(0.25).epsilon(0.12));
  CHECK(counts[1] / 4000.0 == Approx(0.5).epsilon(0.12));

  CHECK_THROWS_AS(Distribution::finite({-1.0, 1.0}, {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(Distribution::finite({1.0}, {0.9}), DomainError);
  const Distribution c = Distribution::continuous([](double x) { return x < 1 ? 0.0 : 1.0; }, 2.0);
  CHECK_THROWS_AS(c.sample(a), DomainError);
}

TEST_CASE("growth-rate experiment rows") {
  const Distribution two = Distribution::finite({1.0, 2.0}, {0.5, 0.5});
  const std::vector<int> ns{1, 2, 3};
  const auto rows = martin_ratio_experiment(two, 2, ns, 40, 17);
  const auto again = martin_ratio_experiment(two, 2, ns, 40, 17);
  REQUIRE(rows.size() == 3);
  const double integral = martin_integral(two, 2);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const MartinRow& r = rows[k];
    CHECK(r.n == ns[k]);
    CHECK(r.replications == 40);
    CHECK(r.mean_score_over_n >= 1.0 - 1e-12);  // scores of {1,2} weights
    CHECK(r.mean_score_over_n <= 2.0 + 1e-12);
    CHECK(r.ci_lo <= r.mean_score_over_n);
    CHECK(r.mean_score_over_n <= r.ci_hi);
    CHECK(r.integral == Approx(integral).epsilon(1e-12));
    CHECK(r.ratio == Approx(r.mean_score_over_n / integral).epsilon(1e-12));
    CHECK(again[k].mean_score_over_n == r.mean_score_over_n);
    CHECK(again[k].ci_lo == r.ci_lo);
  }

  // a point mass makes every field constant: ratio exactly 1, zero-width CI
  const Distribution point = Distribution::finite({1.0}, {1.0});
  const auto prow = martin_ratio_experiment(point, 2, std::vector<int>{2}, 10, 3);
  CHECK(prow[0].mean_score_over_n == Approx(1.0).epsilon(1e-12));
  CHECK(prow[0].ratio == Approx(1.0).epsilon(1e-12));
  CHECK(prow[0].ci_lo == Approx(prow[0].ci_hi).epsilon(1e-12));

  CHECK_THROWS_AS(martin_ratio_experiment(two, 2, std::vector<int>{2, 2}, 10, 1), DomainError);
  CHECK_THROWS_AS(martin_ratio_experiment(two, 2, ns, 1, 1), DomainError);
  const Distribution unif = Distribution::continuous([](double x) { return std::clamp(x, 0.0, 1.0); }, 1.0);
  CHECK_THROWS_AS(martin_ratio_experiment(unif, 2, ns, 10, 1), DomainError);
}
