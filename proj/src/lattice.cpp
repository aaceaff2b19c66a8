#include "fpp/lattice.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "fpp/util.hpp"

namespace fpp {

namespace {
void check_dim(int d, const char* what) {
  if (d < 1 || d > Vertex::kMaxDim)
    throw DomainError(std::string(what) + ": dimension must be in [1, 8], got " + std::to_string(d));
}
}  // namespace

Vertex::Vertex(std::initializer_list<Coord> cs) : Vertex(std::span<const Coord>(cs.begin(), cs.size())) {}

Vertex::Vertex(std::span<const Coord> cs) {
  check_dim(static_cast<int>(cs.size()), "Vertex");
  dim_ = static_cast<int>(cs.size());
  std::copy(cs.begin(), cs.end(), c_.begin());
}

Vertex Vertex::zero(int dim) {
  check_dim(dim, "Vertex::zero");
  Vertex v;
  v.dim_ = dim;
  return v;
}

bool operator==(const Vertex& x, const Vertex& y) {
  return x.dim_ == y.dim_ && std::equal(x.c_.begin(), x.c_.begin() + x.dim_, y.c_.begin());
}

std::strong_ordering operator<=>(const Vertex& x, const Vertex& y) {
  if (x.dim_ != y.dim_) return x.dim_ <=> y.dim_;
  for (int a = 0; a < x.dim_; ++a)
    if (auto c = x.c_[static_cast<std::size_t>(a)] <=> y.c_[static_cast<std::size_t>(a)]; c != 0) return c;
  return std::strong_ordering::equal;
}

std::string Vertex::to_string() const {
  std::string s = "(";
  for (int a = 0; a < dim_; ++a) {
    if (a) s += ",";
    s += std::to_string(c_[static_cast<std::size_t>(a)]);
  }
  return s + ")";
}

Vertex operator+(const Vertex& x, const Vertex& y) {
  if (x.dim() != y.dim()) throw DomainError("Vertex+: dimension mismatch");
  Vertex r = x;
  for (int a = 0; a < x.dim(); ++a) r[a] += y[a];
  return r;
}

Vertex operator-(const Vertex& x, const Vertex& y) {
  if (x.dim() != y.dim()) throw DomainError("Vertex-: dimension mismatch");
  Vertex r = x;
  for (int a = 0; a < x.dim(); ++a) r[a] -= y[a];
  return r;
}

std::int64_t l1_norm(const Vertex& x) {
  std::int64_t s = 0;
  for (int a = 0; a < x.dim(); ++a) s += x[a] < 0 ? -static_cast<std::int64_t>(x[a]) : x[a];
  return s;
}

std::int64_t linf_norm(const Vertex& x) {
  std::int64_t s = 0;
  for (int a = 0; a < x.dim(); ++a) s = std::max(s, x[a] < 0 ? -static_cast<std::int64_t>(x[a]) : static_cast<std::int64_t>(x[a]));
  return s;
}

Edge::Edge(const Vertex& a, const Vertex& b) {
  if (a.dim() != b.dim()) throw DomainError("Edge: dimension mismatch");
  if (a <= b) { u = a; w = b; } else { u = b; w = a; }
}

std::string to_string(Boundary b) { return b == Boundary::open ? "open" : "torus"; }
std::string to_string(Indexing ix) { return ix == Indexing::site ? "site" : "bond"; }

BoxSpec::BoxSpec(std::span<const Coord> lo, std::span<const Coord> hi, Boundary mode) : mode_(mode) {
  if (lo.size() != hi.size()) throw DomainError("BoxSpec: lo/hi dimension mismatch");
  check_dim(static_cast<int>(lo.size()), "BoxSpec");
  dim_ = static_cast<int>(lo.size());
  for (int a = 0; a < dim_; ++a) {
    lo_[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)];
    hi_[static_cast<std::size_t>(a)] = hi[static_cast<std::size_t>(a)];
    if (hi[static_cast<std::size_t>(a)] < lo[static_cast<std::size_t>(a)])
      throw DomainError("BoxSpec: hi < lo on axis " + std::to_string(a));
    if (mode == Boundary::torus && extent(a) < 2)
      throw DomainError("BoxSpec: torus axes need extent >= 2");
  }
  Index n = 1;
  for (int a = dim_ - 1; a >= 0; --a) {
    stride_[static_cast<std::size_t>(a)] = n;
    Index e = extent(a);
    if (n > (Index{1} << 62) / e) throw DomainError("BoxSpec: box too large");
    n *= e;
  }
  nverts_ = n;
}

BoxSpec::BoxSpec(std::initializer_list<Coord> lo, std::initializer_list<Coord> hi, Boundary mode)
    : BoxSpec(std::span<const Coord>(lo.begin(), lo.size()), std::span<const Coord>(hi.begin(), hi.size()), mode) {}

BoxSpec BoxSpec::cube(int dim, Coord lo, Coord hi, Boundary mode) {
  check_dim(dim, "BoxSpec::cube");
  std::vector<Coord> l(static_cast<std::size_t>(dim), lo), h(static_cast<std::size_t>(dim), hi);
  return BoxSpec(l, h, mode);
}

Index BoxSpec::num_bonds() const {
  Index total = 0;
  for (int a = 0; a < dim_; ++a) {
    Index per_axis = nverts_;
    if (mode_ == Boundary::open) per_axis = nverts_ / extent(a) * (extent(a) - 1);
    total += per_axis;
  }
  return total;
}

bool BoxSpec::contains(const Vertex& v) const {
  if (v.dim() != dim_) return false;
  for (int a = 0; a < dim_; ++a)
    if (v[a] < lo(a) || v[a] > hi(a)) return false;
  return true;
}

void BoxSpec::require_inside(const Vertex& v, const char* what) const {
  if (!contains(v))
    throw DomainError(std::string(what) + ": vertex " + v.to_string() + " outside box " + to_string());
}

Index BoxSpec::index_of(const Vertex& v) const {
  require_inside(v, "index_of");
  Index idx = 0;
  for (int a = 0; a < dim_; ++a)
    idx += static_cast<Index>(v[a] - lo(a)) * stride_[static_cast<std::size_t>(a)];
  return idx;
}

Vertex BoxSpec::vertex_at(Index idx) const {
  if (idx < 0 || idx >= nverts_) throw DomainError("vertex_at: index out of range");
  Vertex v = Vertex::zero(dim_);
  for (int a = 0; a < dim_; ++a) {
    v[a] = static_cast<Coord>(idx / stride_[static_cast<std::size_t>(a)] % extent(a)) + lo(a);
  }
  return v;
}

Coord BoxSpec::coordinate(Index idx, int axis) const {
  return static_cast<Coord>(idx / stride_[static_cast<std::size_t>(axis)] % extent(axis)) + lo(axis);
}

Index BoxSpec::step(Index idx, int axis, int dir) const {
  const Index st = stride_[static_cast<std::size_t>(axis)];
  const Index e = extent(axis);
  const Index q = idx / st % e;
  Index nq = q + dir;
  if (nq < 0 || nq >= e) {
    if (mode_ == Boundary::open) return -1;
    nq -= dir * e;  // wrap
  }
  return idx + (nq - q) * st;
}

std::vector<Vertex> BoxSpec::neighbors(const Vertex& v) const {
  require_inside(v, "neighbors");
  const Index idx = index_of(v);
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(2 * dim_));
  for (int a = 0; a < dim_; ++a)
    for (int dir : {-1, +1}) {
      Index n = step(idx, a, dir);
      if (n >= 0) out.push_back(vertex_at(n));
    }
  return out;
}

bool BoxSpec::on_face(const Vertex& v) const {
  if (mode_ == Boundary::torus) return false;
  for (int a = 0; a < dim_; ++a)
    if (v[a] == lo(a) || v[a] == hi(a)) return true;
  return false;
}

std::string BoxSpec::to_string() const {
  std::string s = "[";
  for (int a = 0; a < dim_; ++a) {
    if (a) s += " x ";
    s += std::to_string(lo(a)) + ".." + std::to_string(hi(a));
  }
  return s + "] " + fpp::to_string(mode_);
}

NeighborTable::NeighborTable(const BoxSpec& box) : deg_(static_cast<std::size_t>(2 * box.dim())) {
  tab_.resize(static_cast<std::size_t>(box.num_vertices()) * deg_);
  for (Index v = 0; v < box.num_vertices(); ++v)
    for (int a = 0; a < box.dim(); ++a) {
      tab_[static_cast<std::size_t>(v) * deg_ + static_cast<std::size_t>(2 * a)] = box.step(v, a, +1);
      tab_[static_cast<std::size_t>(v) * deg_ + static_cast<std::size_t>(2 * a + 1)] = box.step(v, a, -1);
    }
}

WeightField::WeightField(const BoxSpec& box, Indexing ix, double init) : box_(box), ix_(ix) {
  const Index n = ix == Indexing::site ? box.num_vertices() : box.num_bond_slots();
  vals_.assign(static_cast<std::size_t>(n), init);
}

double WeightField::site_at(const Vertex& v) const {
  if (ix_ != Indexing::site) throw DomainError("site_at on a bond field");
  return vals_[static_cast<std::size_t>(box_.index_of(v))];
}

bool WeightField::bond_present(Index vidx, int axis) const {
  if (box_.mode() == Boundary::torus) return true;
  return box_.coordinate(vidx, axis) < box_.hi(axis);
}

double WeightField::bond_at(const Edge& e) const {
  if (ix_ != Indexing::bond) throw DomainError("bond_at on a site field");
  box_.require_inside(e.u, "bond_at");
  box_.require_inside(e.w, "bond_at");
  const Index ui = box_.index_of(e.u), wi = box_.index_of(e.w);
  for (int a = 0; a < box_.dim(); ++a) {
    if (box_.step(ui, a, +1) == wi) return bond(ui, a);
    if (box_.step(wi, a, +1) == ui) return bond(wi, a);
  }
  throw DomainError("bond_at: " + e.u.to_string() + "-" + e.w.to_string() + " is not a bond of the box");
}

void WeightField::validate_positive() const {
  for (double v : vals_)
    if (!(v > 0.0)) throw DomainError("weight field has a non-positive value; site passage weights must be > 0");
}

WeightField open_window(const WeightField& tf) {
  if (tf.box().mode() == Boundary::open) return tf;
  const BoxSpec& tb = tf.box();
  std::vector<Coord> lo(static_cast<std::size_t>(tb.dim())), hi(static_cast<std::size_t>(tb.dim()));
  for (int a = 0; a < tb.dim(); ++a) {
    lo[static_cast<std::size_t>(a)] = tb.lo(a);
    hi[static_cast<std::size_t>(a)] = tb.hi(a);
  }
  BoxSpec ob(lo, hi, Boundary::open);
  WeightField out(ob, tf.indexing());
  if (tf.indexing() == Indexing::site) {
    std::copy(tf.raw().begin(), tf.raw().end(), out.raw().begin());
  } else {
    for (Index v = 0; v < ob.num_vertices(); ++v)
      for (int a = 0; a < ob.dim(); ++a)
        if (out.bond_present(v, a)) out.bond(v, a) = tf.bond(v, a);
  }
  return out;
}

SpinField::SpinField(const BoxSpec& box, std::int8_t fill) : box_(box) {
  s_.assign(static_cast<std::size_t>(box.num_vertices()), fill);
}

// --- animals ---

Vertex AnimalSet::cell(Index i, int j) const {
  auto f = cells(i);
  return Vertex(f.subspan(static_cast<std::size_t>(j) * dim_, static_cast<std::size_t>(dim_)));
}

void AnimalSet::append(std::span<const Coord> flat_cells) {
  flat_.insert(flat_.end(), flat_cells.begin(), flat_cells.end());
}

namespace {

using Cells = std::vector<Coord>;  // flat, cells sorted lexicographically

// Grow every animal of the level by one boundary cell; dedup via ordered set
// so the resulting order is the canonical lexicographic one.
std::set<Cells> grow_level(const std::set<Cells>& level, int dim, Index cap) {
  std::set<Cells> next;
  std::vector<Coord> cand;
  for (const Cells& cs : level) {
    const std::size_t k = cs.size() / static_cast<std::size_t>(dim);
    for (std::size_t i = 0; i < k; ++i)
      for (int a = 0; a < dim; ++a)
        for (int dir : {-1, +1}) {
          cand.assign(cs.begin() + static_cast<std::ptrdiff_t>(i * static_cast<std::size_t>(dim)),
                      cs.begin() + static_cast<std::ptrdiff_t>((i + 1) * static_cast<std::size_t>(dim)));
          cand[static_cast<std::size_t>(a)] += static_cast<Coord>(dir);
          // already in the animal?
          bool present = false;
          for (std::size_t j = 0; j < k && !present; ++j)
            present = std::equal(cand.begin(), cand.end(),
                                 cs.begin() + static_cast<std::ptrdiff_t>(j * static_cast<std::size_t>(dim)));
          if (present) continue;
          Cells grown;
          grown.reserve(cs.size() + static_cast<std::size_t>(dim));
          // insert keeping cell order sorted
          std::size_t pos = 0;
          while (pos < k) {
            auto it = cs.begin() + static_cast<std::ptrdiff_t>(pos * static_cast<std::size_t>(dim));
            if (std::lexicographical_compare(it, it + dim, cand.begin(), cand.end()))
              pos++;
            else
              break;
          }
          grown.insert(grown.end(), cs.begin(), cs.begin() + static_cast<std::ptrdiff_t>(pos * static_cast<std::size_t>(dim)));
          grown.insert(grown.end(), cand.begin(), cand.end());
          grown.insert(grown.end(), cs.begin() + static_cast<std::ptrdiff_t>(pos * static_cast<std::size_t>(dim)), cs.end());
          next.insert(std::move(grown));
          if (static_cast<Index>(next.size()) > cap)
            throw CapError("animal enumeration exceeds cap of " + std::to_string(cap));
        }
  }
  return next;
}

}  // namespace

AnimalSet enumerate_animals(int n, int dim, Index cap) {
  check_dim(dim, "enumerate_animals");
  if (n < 1) throw DomainError("enumerate_animals: n must be >= 1");
  std::set<Cells> level{Cells(static_cast<std::size_t>(dim), 0)};
  for (int k = 1; k < n; ++k) level = grow_level(level, dim, cap);
  AnimalSet out(n, dim);
  for (const Cells& cs : level) out.append(cs);
  return out;
}

std::vector<Index> count_animals(int n, int dim, Index cap) {
  check_dim(dim, "count_animals");
  if (n < 1) throw DomainError("count_animals: n must be >= 1");
  std::vector<Index> counts;
  std::set<Cells> level{Cells(static_cast<std::size_t>(dim), 0)};
  counts.push_back(1);
  for (int k = 1; k < n; ++k) {
    level = grow_level(level, dim, cap);
    counts.push_back(static_cast<Index>(level.size()));
  }
  return counts;
}

// --- serialization ---

void write_field(std::ostream& os, const WeightField& f) {
  const BoxSpec& b = f.box();
  os << "fpplab-field v1\n";
  os << "dim " << b.dim() << "\n";
  os << "mode " << to_string(b.mode()) << "\n";
  os << "indexing " << to_string(f.indexing()) << "\n";
  os << "lo";
  for (int a = 0; a < b.dim(); ++a) os << ' ' << b.lo(a);
  os << "\nhi";
  for (int a = 0; a < b.dim(); ++a) os << ' ' << b.hi(a);
  os << "\n";
  std::vector<double> vals;
  if (f.indexing() == Indexing::site) {
    vals.assign(f.raw().begin(), f.raw().end());
  } else {
    for (Index v = 0; v < b.num_vertices(); ++v)
      for (int a = 0; a < b.dim(); ++a)
        if (f.bond_present(v, a)) vals.push_back(f.bond(v, a));
  }
  os << "count " << vals.size() << "\n";
  for (double v : vals) os << fmt_double(v) << "\n";
}

void write_field_file(const std::string& path, const WeightField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  write_field(os, f);
  os.flush();
  if (!os) throw ConfigError("write failed: " + path);
}

namespace {
std::string next_line(std::istream& is, const char* what) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError(std::string("field file truncated at ") + what);
  return std::string(trim(line));
}
std::vector<std::string> expect_kv(std::istream& is, const std::string& key) {
  auto toks = split(next_line(is, key.c_str()), ' ');
  std::erase_if(toks, [](const std::string& t) { return t.empty(); });
  if (toks.empty() || toks[0] != key) throw ConfigError("field file: expected '" + key + "' line");
  return toks;
}
}  // namespace

WeightField read_field(std::istream& is) {
  if (next_line(is, "header") != "fpplab-field v1")
    throw ConfigError("field file: bad magic (want 'fpplab-field v1')");
  auto dim_t = expect_kv(is, "dim");
  auto dim = parse_int(dim_t.at(1));
  if (!dim) throw ConfigError("field file: bad dim");
  auto mode_t = expect_kv(is, "mode");
  Boundary mode;
  if (mode_t.at(1) == "open") mode = Boundary::open;
  else if (mode_t.at(1) == "torus") mode = Boundary::torus;
  else throw ConfigError("field file: bad mode '" + mode_t.at(1) + "'");
  auto ix_t = expect_kv(is, "indexing");
  Indexing ix;
  if (ix_t.at(1) == "site") ix = Indexing::site;
  else if (ix_t.at(1) == "bond") ix = Indexing::bond;
  else throw ConfigError("field file: bad indexing '" + ix_t.at(1) + "'");
  auto lo_t = expect_kv(is, "lo");
  auto hi_t = expect_kv(is, "hi");
  if (static_cast<int>(lo_t.size()) != *dim + 1 || static_cast<int>(hi_t.size()) != *dim + 1)
    throw ConfigError("field file: lo/hi arity does not match dim");
  std::vector<Coord> lo, hi;
  for (int a = 1; a <= *dim; ++a) {
    auto l = parse_int(lo_t[static_cast<std::size_t>(a)]), h = parse_int(hi_t[static_cast<std::size_t>(a)]);
    if (!l || !h) throw ConfigError("field file: bad lo/hi coordinate");
    lo.push_back(static_cast<Coord>(*l));
    hi.push_back(static_cast<Coord>(*h));
  }
  BoxSpec box(lo, hi, mode);
  auto cnt_t = expect_kv(is, "count");
  auto cnt = parse_int(cnt_t.at(1));
  if (!cnt) throw ConfigError("field file: bad count");
  const Index expected = ix == Indexing::site ? box.num_vertices() : box.num_bonds();
  if (*cnt != expected)
    throw ConfigError("field file: count " + std::to_string(*cnt) + " does not match box (want " +
                      std::to_string(expected) + ")");
  WeightField f(box, ix);
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(*cnt));
  for (Index i = 0; i < *cnt; ++i) {
    auto v = parse_double(next_line(is, "values"));
    if (!v) throw ConfigError("field file: bad value at position " + std::to_string(i));
    vals.push_back(*v);
  }
  if (ix == Indexing::site) {
    std::copy(vals.begin(), vals.end(), f.raw().begin());
  } else {
    std::size_t k = 0;
    for (Index v = 0; v < box.num_vertices(); ++v)
      for (int a = 0; a < box.dim(); ++a)
        if (f.bond_present(v, a)) f.bond(v, a) = vals[k++];
  }
  return f;
}

WeightField read_field_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open field file: " + path);
  return read_field(is);
}

}  // namespace fpp
