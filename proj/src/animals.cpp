#include "fpp/animals.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "fpp/stats.hpp"
#include "fpp/weights.hpp"

namespace fpp {

namespace {
constexpr std::uint64_t kMartinTag = 0x4d415254ULL;  // "MART"

void check_animal_field(const WeightField& f, int n) {
  if (f.indexing() != Indexing::site) throw DomainError("animal scores need a site weight field");
  const BoxSpec& b = f.box();
  for (int a = 0; a < b.dim(); ++a)
    if (b.lo(a) > -(n - 1) || b.hi(a) < n - 1)
      throw DomainError("animal scores: field box must contain the cube of radius n-1 around the origin");
}
}  // namespace

AnimalScore best_animal_score(const AnimalSet& animals, const WeightField& site_field) {
  check_animal_field(site_field, animals.n());
  const BoxSpec& box = site_field.box();
  const int d = animals.dim();
  if (box.dim() != d) throw DomainError("best_animal_score: dimension mismatch");
  AnimalScore best;
  best.n = animals.n();
  best.exact = true;
  bool first = true;
  for (Index i = 0; i < animals.count(); ++i) {
    const auto cells = animals.cells(i);
    double sum = 0;
    for (int j = 0; j < animals.n(); ++j) {
      Index idx = 0;
      // inline index to avoid per-cell Vertex construction
      for (int a = 0; a < d; ++a) {
        const Coord c = cells[static_cast<std::size_t>(j * d + a)];
        idx = idx * box.extent(a) + (c - box.lo(a));
      }
      sum += site_field.site(idx);
    }
    if (first || sum > best.value) {
      first = false;
      best.value = sum;
      best.witness.clear();
      for (int j = 0; j < animals.n(); ++j) best.witness.push_back(animals.cell(i, j));
    }
  }
  if (first) throw DomainError("best_animal_score: empty animal set");
  return best;
}

AnimalScore greedy_exact(const WeightField& site_field, int n, Index cap) {
  const AnimalSet animals = enumerate_animals(n, site_field.box().dim(), cap);
  return best_animal_score(animals, site_field);
}

namespace {

struct GrowState {
  std::vector<Vertex> cells;  // sorted
  bool has(const Vertex& v) const { return std::binary_search(cells.begin(), cells.end(), v); }
  void add(const Vertex& v) { cells.insert(std::upper_bound(cells.begin(), cells.end(), v), v); }
  void remove(const Vertex& v) {
    auto it = std::lower_bound(cells.begin(), cells.end(), v);
    cells.erase(it);
  }
};

std::vector<Vertex> boundary_cells(const GrowState& s, const BoxSpec& box) {
  std::vector<Vertex> out;
  for (const Vertex& c : s.cells)
    for (int a = 0; a < c.dim(); ++a)
      for (int dir : {-1, +1}) {
        Vertex w = c;
        w[a] += static_cast<Coord>(dir);
        if (!box.contains(w) || s.has(w)) continue;
        out.push_back(w);
      }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool connected_without(const GrowState& s, const Vertex& drop) {
  std::vector<Vertex> rest;
  rest.reserve(s.cells.size() - 1);
  for (const Vertex& c : s.cells)
    if (!(c == drop)) rest.push_back(c);
  if (rest.empty()) return false;
  std::vector<char> seen(rest.size(), 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const Vertex cur = rest[queue.front()];
    queue.pop_front();
    for (int a = 0; a < cur.dim(); ++a)
      for (int dir : {-1, +1}) {
        Vertex w = cur;
        w[a] += static_cast<Coord>(dir);
        const auto it = std::lower_bound(rest.begin(), rest.end(), w);
        if (it == rest.end() || !(*it == w)) continue;
        const std::size_t k = static_cast<std::size_t>(it - rest.begin());
        if (!seen[k]) {
          seen[k] = 1;
          ++reached;
          queue.push_back(k);
        }
      }
  }
  return reached == rest.size();
}

AnimalScore score_of(const GrowState& s, const WeightField& f, int n) {
  AnimalScore sc;
  sc.n = n;
  sc.exact = false;
  sc.witness = s.cells;
  for (const Vertex& c : s.cells) sc.value += f.site_at(c);
  return sc;
}

GrowState grow(const WeightField& f, int n, RngStream* rng) {
  const BoxSpec& box = f.box();
  GrowState s;
  s.cells.push_back(Vertex::zero(box.dim()));
  while (static_cast<int>(s.cells.size()) < n) {
    const auto cand = boundary_cells(s, box);
    if (cand.empty()) throw DomainError("greedy growth ran out of cells (box too small)");
    std::size_t pick = 0;
    if (rng && rng->u01() < 0.15) {
      pick = static_cast<std::size_t>(rng->below(cand.size()));
    } else {
      double bw = f.site_at(cand[0]);
      for (std::size_t i = 1; i < cand.size(); ++i) {
        const double w = f.site_at(cand[i]);
        if (w > bw) {
          bw = w;
          pick = i;
        }
      }
    }
    s.add(cand[pick]);
  }
  return s;
}

}  // namespace

AnimalScore greedy_heuristic(const WeightField& site_field, int n, HeuristicStrategy strategy, int param,
                             RngStream& rng) {
  check_animal_field(site_field, n);
  if (n < 1) throw DomainError("greedy_heuristic: n must be >= 1");
  if (param < 0) throw DomainError("greedy_heuristic: param must be >= 0");
  AnimalScore best = score_of(grow(site_field, n, nullptr), site_field, n);
  if (strategy == HeuristicStrategy::greedy || n == 1) return best;

  if (strategy == HeuristicStrategy::multistart) {
    for (int r = 0; r < param; ++r) {
      const AnimalScore sc = score_of(grow(site_field, n, &rng), site_field, n);
      if (sc.value > best.value) best = sc;
    }
    return best;
  }

  // anneal: remove a non-origin, non-cut cell and regrow somewhere else
  GrowState cur = grow(site_field, n, nullptr);
  double cur_val = best.value;
  double wmin = cur.cells.empty() ? 0 : site_field.site_at(cur.cells[0]);
  double wmax = wmin;
  for (const Vertex& c : cur.cells) {
    wmin = std::min(wmin, site_field.site_at(c));
    wmax = std::max(wmax, site_field.site_at(c));
  }
  const double t0 = std::max(wmax - wmin, 1e-6);
  const Vertex origin = Vertex::zero(site_field.box().dim());
  for (int step = 0; step < param; ++step) {
    const double temp = t0 * std::pow(1e-3, param <= 1 ? 1.0 : static_cast<double>(step) / (param - 1));
    const std::size_t di = static_cast<std::size_t>(rng.below(cur.cells.size()));
    const Vertex drop = cur.cells[di];
    if (drop == origin || !connected_without(cur, drop)) continue;
    GrowState trial = cur;
    trial.remove(drop);
    const auto cand = boundary_cells(trial, site_field.box());
    if (cand.empty()) continue;
    const Vertex add = cand[static_cast<std::size_t>(rng.below(cand.size()))];
    const double delta_w = site_field.site_at(add) - site_field.site_at(drop);
    if (delta_w >= 0 || rng.u01() < std::exp(delta_w / temp)) {
      trial.add(add);
      cur = std::move(trial);
      cur_val += delta_w;
      if (cur_val > best.value) best = score_of(cur, site_field, n);
    }
  }
  return best;
}

Distribution Distribution::finite(std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size())
    throw DomainError("Distribution::finite: values/probs must be non-empty and equally sized");
  double sum = 0;
  for (double p : probs) {
    if (!(p >= 0.0) || !(p <= 1.0)) throw DomainError("Distribution::finite: bad probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DomainError("Distribution::finite: probabilities must sum to 1");
  for (double v : values)
    if (!std::isfinite(v) || v < 0.0) throw DomainError("Distribution::finite: atoms must be finite and >= 0");
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  Distribution d;
  d.finite_ = true;
  for (std::size_t i : order) {
    d.values_.push_back(values[i]);
    d.probs_.push_back(probs[i]);
  }
  d.upper_ = d.values_.back();
  return d;
}

Distribution Distribution::continuous(std::function<double(double)> cdf, double upper) {
  if (!cdf) throw DomainError("Distribution::continuous: missing cdf");
  if (!(upper > 0.0)) throw DomainError("Distribution::continuous: upper must be > 0");
  Distribution d;
  d.finite_ = false;
  d.cdf_ = std::move(cdf);
  d.upper_ = upper;
  return d;
}

double Distribution::cdf(double x) const {
  if (!finite_) {
    if (x < 0) return 0;
    if (x >= upper_) return 1;
    return cdf_(x);
  }
  double c = 0;
  for (std::size_t i = 0; i < values_.size() && values_[i] <= x; ++i) c += probs_[i];
  return c;
}

double Distribution::sample(RngStream& rng) const {
  if (!finite_) throw DomainError("Distribution::sample: only finite laws can be sampled here");
  const double u = rng.u01();
  double c = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    c += probs_[i];
    if (u < c) return values_[i];
  }
  return values_.back();
}

namespace {
double simpson(const std::function<double(double)>& g, double a, double fa, double b, double fb, double fm,
               double whole, double tol, int depth) {
  const double m = (a + b) / 2;
  const double lm = (a + m) / 2, rm = (m + b) / 2;
  const double flm = g(lm), frm = g(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol) return left + right + (left + right - whole) / 15;
  return simpson(g, a, fa, m, fm, flm, left, tol / 2, depth - 1) +
         simpson(g, m, fm, b, fb, frm, right, tol / 2, depth - 1);
}
}  // namespace

double martin_integral(const Distribution& dist, int d) {
  if (d < 1) throw DomainError("martin_integral: d must be >= 1");
  const double inv_d = 1.0 / static_cast<double>(d);
  if (dist.is_finite()) {
    const auto v = dist.values();
    const auto p = dist.probs();
    double integral = v[0];  // (1-F) = 1 on [0, smallest atom)
    double tail = 1.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      tail -= p[i];
      const double t = std::max(tail, 0.0);
      integral += (v[i + 1] - v[i]) * std::pow(t, inv_d);
    }
    return integral;
  }
  auto g = [&](double x) { return std::pow(std::max(0.0, 1.0 - dist.cdf(x)), inv_d); };
  const double a = 0, b = dist.upper();
  const double fa = g(a), fb = g(b), fm = g((a + b) / 2);
  const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return simpson(g, a, fa, b, fb, fm, whole, 1e-10, 30);
}

std::vector<MartinRow> martin_ratio_experiment(const Distribution& dist, int d, std::span<const int> ns,
                                               int replications, std::uint64_t seed, Index cap) {
  if (!dist.is_finite())
    throw DomainError("martin_ratio_experiment: sampling needs a finite law");
  if (replications < 2) throw DomainError("martin_ratio_experiment: need >= 2 replications");
  if (ns.empty()) throw DomainError("martin_ratio_experiment: empty n list");
  const double integral = martin_integral(dist, d);
  std::vector<MartinRow> rows;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const int n = ns[k];
    if (n < 1) throw DomainError("martin_ratio_experiment: n must be >= 1");
    if (k && ns[k] <= ns[k - 1]) throw DomainError("martin_ratio_experiment: n list must be increasing");
    const AnimalSet animals = enumerate_animals(n, d, cap);
    const BoxSpec box = BoxSpec::cube(d, static_cast<Coord>(-(n - 1)), static_cast<Coord>(n - 1),
                                      Boundary::open);
    std::vector<double> scores(static_cast<std::size_t>(replications));
    for (int r = 0; r < replications; ++r) {
      RngStream rng = RngStream::derive(seed, {kMartinTag, static_cast<std::uint64_t>(n),
                                               static_cast<std::uint64_t>(r)});
      const WeightField f = gen_iid(box, Indexing::site, dist.values(), dist.probs(), rng);
      scores[static_cast<std::size_t>(r)] =
          best_animal_score(animals, f).value / static_cast<double>(n);
    }
    MartinRow row;
    row.n = n;
    row.replications = replications;
    row.mean_score_over_n = mean(scores);
    const double sd = std::sqrt(variance(scores));
    const double half = 1.959963984540054 * sd / std::sqrt(static_cast<double>(replications));
    row.ci_lo = row.mean_score_over_n - half;
    row.ci_hi = row.mean_score_over_n + half;
    row.integral = integral;
    row.ratio = integral > 0 ? row.mean_score_over_n / integral : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fpp
