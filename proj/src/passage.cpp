#include "fpp/passage.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <queue>
#include <tuple>

#include "fpp/util.hpp"

namespace fpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool close(double x, double y, double scale) {
  return std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(scale));
}

void check_field(const WeightField& f, const Vertex& src, const Vertex& dst) {
  if (f.box().mode() != Boundary::open)
    throw DomainError("passage: field must be on an open box (convert torus samples with open_window)");
  f.box().require_inside(src, "passage");
  f.box().require_inside(dst, "passage");
  if (f.indexing() == Indexing::site) {
    for (double v : f.raw())
      if (!(v > 0.0)) throw DomainError("passage: site weights must be positive");
  } else {
    for (Index v = 0; v < f.box().num_vertices(); ++v)
      for (int ax = 0; ax < f.box().dim(); ++ax)
        if (f.bond_present(v, ax) && !(f.bond(v, ax) >= 0.0))
          throw DomainError("passage: bond weights must be nonnegative");
  }
}

struct Labels {
  std::vector<double> cost;
  std::vector<Index> hops;
};

// Dijkstra over the lexicographic (cost, hops) key. Both components are
// nondecreasing along edges (hops strictly), so the usual argument applies.
Labels dijkstra(const WeightField& f, Index src) {
  const BoxSpec& box = f.box();
  const bool site = f.indexing() == Indexing::site;
  const Index n = box.num_vertices();
  Labels lab;
  lab.cost.assign(static_cast<std::size_t>(n), kInf);
  lab.hops.assign(static_cast<std::size_t>(n), -1);
  std::vector<char> done(static_cast<std::size_t>(n), 0);
  using Item = std::tuple<double, Index, Index>;  // cost, hops, vertex
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  lab.cost[static_cast<std::size_t>(src)] = site ? f.site(src) : 0.0;
  lab.hops[static_cast<std::size_t>(src)] = 0;
  pq.emplace(lab.cost[static_cast<std::size_t>(src)], 0, src);
  while (!pq.empty()) {
    const auto [c, h, v] = pq.top();
    pq.pop();
    if (done[static_cast<std::size_t>(v)]) continue;
    done[static_cast<std::size_t>(v)] = 1;
    for (int ax = 0; ax < box.dim(); ++ax)
      for (int dir : {+1, -1}) {
        const Index w = box.step(v, ax, dir);
        if (w < 0 || done[static_cast<std::size_t>(w)]) continue;
        double ec;
        if (site) {
          ec = f.site(w);
        } else {
          ec = dir > 0 ? f.bond(v, ax) : f.bond(w, ax);
        }
        const double nc = c + ec;
        const Index nh = h + 1;
        if (nc < lab.cost[static_cast<std::size_t>(w)] ||
            (nc == lab.cost[static_cast<std::size_t>(w)] && nh < lab.hops[static_cast<std::size_t>(w)])) {
          lab.cost[static_cast<std::size_t>(w)] = nc;
          lab.hops[static_cast<std::size_t>(w)] = nh;
          pq.emplace(nc, nh, w);
        }
      }
  }
  return lab;
}

bool touches(const BoxSpec& box, const std::vector<Vertex>& path) {
  for (const Vertex& v : path)
    if (box.on_face(v)) return true;
  return false;
}

}  // namespace

PassageResult passage_time(const WeightField& f, const Vertex& src, const Vertex& dst) {
  check_field(f, src, dst);
  const BoxSpec& box = f.box();
  const bool site = f.indexing() == Indexing::site;
  const Index s = box.index_of(src), t = box.index_of(dst);

  PassageResult out;
  out.indexing = f.indexing();
  if (s == t) {
    out.value = site ? f.site(s) : 0.0;
    out.geodesic = {src};
    out.edge_count = 0;
    out.touched_boundary = box.on_face(src);
    return out;
  }

  const Labels fw = dijkstra(f, s);
  const Labels bw = dijkstra(f, t);
  const double total = fw.cost[static_cast<std::size_t>(t)];
  const Index hops = fw.hops[static_cast<std::size_t>(t)];

  out.value = total;
  out.edge_count = hops;
  out.geodesic.reserve(static_cast<std::size_t>(hops) + 1);
  out.geodesic.push_back(src);
  Index cur = s;
  while (cur != t) {
    const double fc = fw.cost[static_cast<std::size_t>(cur)];
    const Index fh = fw.hops[static_cast<std::size_t>(cur)];
    Index best = -1;
    Vertex best_v;
    for (int ax = 0; ax < box.dim(); ++ax)
      for (int dir : {+1, -1}) {
        const Index w = box.step(cur, ax, dir);
        if (w < 0) continue;
        const double ec = site ? f.site(w) : (dir > 0 ? f.bond(cur, ax) : f.bond(w, ax));
        // tight forward step...
        if (fw.hops[static_cast<std::size_t>(w)] != fh + 1) continue;
        if (!close(fw.cost[static_cast<std::size_t>(w)], fc + ec, total)) continue;
        // ...lying on a (cost, hops)-optimal s-t path
        if (fw.hops[static_cast<std::size_t>(w)] + bw.hops[static_cast<std::size_t>(w)] != hops) continue;
        const double through = site
            ? fw.cost[static_cast<std::size_t>(w)] + bw.cost[static_cast<std::size_t>(w)] - f.site(w)
            : fw.cost[static_cast<std::size_t>(w)] + bw.cost[static_cast<std::size_t>(w)];
        if (!close(through, total, total)) continue;
        const Vertex wv = box.vertex_at(w);
        if (best < 0 || wv < best_v) {
          best = w;
          best_v = wv;
        }
      }
    if (best < 0) throw std::logic_error("passage: geodesic extraction lost the optimal path");
    out.geodesic.push_back(best_v);
    cur = best;
  }
  out.touched_boundary = touches(box, out.geodesic);
  return out;
}

PassageResult passage_time_hop_constrained(const WeightField& f, const Vertex& src, const Vertex& dst,
                                           double c1) {
  check_field(f, src, dst);
  if (!(c1 > 0.0)) throw DomainError("hop-constrained passage: c1 must be > 0");
  const BoxSpec& box = f.box();
  const bool site = f.indexing() == Indexing::site;
  const Index n = box.num_vertices();
  const std::int64_t dist = l1_norm(dst - src);
  // budget counts path vertices: ceil(c1 * L1), nudged so that an exactly
  // integral product is not pushed up by FP dust
  const Index budget = static_cast<Index>(std::ceil(c1 * static_cast<double>(dist) - 1e-9));
  if (budget < dist + 1)
    throw InfeasibleError("hop-constrained passage: budget of " + std::to_string(budget) +
                          " vertices is below the L1 distance " + std::to_string(dist) + " plus 1");
  const Index s = box.index_of(src), t = box.index_of(dst);

  const NeighborTable nt(box);
  const int deg = nt.degree();
  std::vector<double> cur(static_cast<std::size_t>(n), kInf), nxt(static_cast<std::size_t>(n), kInf);
  // parent direction per layer for reconstruction; 0xff = none
  std::vector<std::uint8_t> parent(static_cast<std::size_t>(n * budget), 0xff);
  cur[static_cast<std::size_t>(s)] = site ? f.site(s) : 0.0;

  double best_cost = s == t ? cur[static_cast<std::size_t>(s)] : kInf;
  Index best_r = s == t ? 1 : -1;

  for (Index r = 2; r <= budget; ++r) {
    std::fill(nxt.begin(), nxt.end(), kInf);
    std::uint8_t* par = parent.data() + static_cast<std::size_t>((r - 1) * n);
    for (Index v = 0; v < n; ++v) {
      double bc = kInf;
      int bk = -1;
      for (int k = 0; k < deg; ++k) {
        const Index u = nt.at(v, k);
        if (u < 0 || cur[static_cast<std::size_t>(u)] == kInf) continue;
        double ec;
        if (site) {
          ec = f.site(v);
        } else {
          const int ax = k / 2;
          ec = (k % 2 == 0) ? f.bond(v, ax) : f.bond(u, ax);
          // neighbour slot k even means u = v + e_ax, so the connecting bond
          // is stored at (v, ax); odd means u = v - e_ax, stored at (u, ax)
        }
        const double cand = cur[static_cast<std::size_t>(u)] + ec;
        if (cand < bc) {
          bc = cand;
          bk = k;
        }
      }
      if (bk >= 0) {
        nxt[static_cast<std::size_t>(v)] = bc;
        par[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(bk);
      }
    }
    std::swap(cur, nxt);
    const double ct = cur[static_cast<std::size_t>(t)];
    if (ct < best_cost) {
      best_cost = ct;
      best_r = r;
    }
  }

  if (best_r < 0 || best_cost == kInf)
    throw InfeasibleError("hop-constrained passage: no path with at most " + std::to_string(budget) +
                          " vertices from " + src.to_string() + " to " + dst.to_string());

  // walk parents back from (best_r, t)
  PassageResult out;
  out.indexing = f.indexing();
  out.value = best_cost;
  out.edge_count = best_r - 1;
  std::vector<Index> rev{t};
  Index v = t;
  for (Index r = best_r; r >= 2; --r) {
    const std::uint8_t k = parent[static_cast<std::size_t>((r - 1) * n + v)];
    if (k == 0xff) throw std::logic_error("hop-constrained passage: broken parent chain");
    v = nt.at(v, k);
    rev.push_back(v);
  }
  if (v != s) throw std::logic_error("hop-constrained passage: reconstruction did not reach the source");
  out.geodesic.reserve(rev.size());
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) out.geodesic.push_back(box.vertex_at(*it));
  out.touched_boundary = touches(box, out.geodesic);
  return out;
}

bool geodesic_length_check(const PassageResult& r, double a, double b) {
  if (!(0.0 < a && a <= b)) throw DomainError("geodesic_length_check: need 0 < a <= b");
  if (r.geodesic.empty()) throw DomainError("geodesic_length_check: empty geodesic");
  const std::int64_t l1 = l1_norm(r.geodesic.back() - r.geodesic.front());
  // Bond version: cost >= a * edges and the straight path costs <= b * |v|.
  // Site version: the endpoint weights appear in both the lower bound
  // a*(edges-1) on the interior and the straight-path upper bound
  // b*(|v|-1), so edges <= (b/a)(|v|-1)+1 <= (b/a)|v| holds there too.
  return static_cast<double>(r.edge_count) <= (b / a) * static_cast<double>(l1) + 1e-9;
}

int tent_map(int m, std::int64_t bitsum) {
  if (m < 1) throw DomainError("tent_map: m must be >= 1");
  if (bitsum < 0) throw DomainError("tent_map: negative bit sum");
  const std::int64_t r = bitsum % (2 * m);
  return static_cast<int>(m - std::llabs(r - m));
}

ShiftSpec draw_shift(int dim, std::int64_t vnorm, RngStream& rng) {
  if (vnorm < 1) throw DomainError("draw_shift: |v| must be >= 1");
  std::int64_t m = static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(vnorm), 0.25)));
  while (m > 1 && m * m * m * m > vnorm) --m;
  while ((m + 1) * (m + 1) * (m + 1) * (m + 1) <= vnorm) ++m;
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(dim) * static_cast<std::size_t>(m) *
                                 static_cast<std::size_t>(m));
  for (auto& b : bits) b = rng.u01() < 0.5 ? 1 : 0;
  return shift_from_bits(dim, static_cast<int>(m), bits);
}

ShiftSpec shift_from_bits(int dim, int m, std::span<const std::uint8_t> bits) {
  if (dim < 1 || dim > Vertex::kMaxDim) throw DomainError("shift_from_bits: bad dimension");
  if (m < 1) throw DomainError("shift_from_bits: m must be >= 1");
  const std::size_t block = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
  if (bits.size() != static_cast<std::size_t>(dim) * block)
    throw DomainError("shift_from_bits: need dim * m^2 bits");
  ShiftSpec spec;
  spec.m = m;
  spec.bits.assign(bits.begin(), bits.end());
  spec.z = Vertex::zero(dim);
  for (int j = 0; j < dim; ++j) {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < block; ++i) {
      const std::uint8_t b = bits[static_cast<std::size_t>(j) * block + i];
      if (b > 1) throw DomainError("shift_from_bits: bits must be 0/1");
      sum += b;
    }
    spec.z[j] = static_cast<Coord>(tent_map(m, sum));
  }
  return spec;
}

PassageResult shifted_passage(const WeightField& f, const Vertex& v, const ShiftSpec& shift) {
  if (v.dim() != shift.z.dim()) throw DomainError("shifted_passage: dimension mismatch");
  const Vertex src = shift.z;
  const Vertex dst = v + shift.z;
  return passage_time(f, src, dst);
}

void write_geodesic(std::ostream& os, const PassageResult& r) {
  os << "fpplab-geodesic v1\n";
  os << "indexing " << to_string(r.indexing) << "\n";
  os << "value " << fmt_double(r.value) << "\n";
  os << "edges " << r.edge_count << "\n";
  os << "touched_boundary " << (r.touched_boundary ? 1 : 0) << "\n";
  os << "vertices " << r.geodesic.size() << "\n";
  for (const Vertex& v : r.geodesic) {
    for (int a = 0; a < v.dim(); ++a) {
      if (a) os << ' ';
      os << v[a];
    }
    os << "\n";
  }
}

void write_geodesic_file(const std::string& path, const PassageResult& r) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  write_geodesic(os, r);
  os.flush();
  if (!os) throw ConfigError("write failed: " + path);
}

}  // namespace fpp
