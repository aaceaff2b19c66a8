#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fpp/errors.hpp"

namespace fpp {

using Coord = std::int32_t;
using Index = std::int64_t;

// A lattice point in Z^d, d in [1, kMaxDim]. Fixed storage, value semantics;
// comparison is lexicographic (the order used for tie-breaking and scans).
class Vertex {
 public:
  static constexpr int kMaxDim = 8;

  Vertex() = default;
  Vertex(std::initializer_list<Coord> cs);
  explicit Vertex(std::span<const Coord> cs);
  static Vertex zero(int dim);

  int dim() const { return dim_; }
  Coord operator[](int a) const { return c_[static_cast<std::size_t>(a)]; }
  Coord& operator[](int a) { return c_[static_cast<std::size_t>(a)]; }
  std::span<const Coord> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

  friend bool operator==(const Vertex& x, const Vertex& y);
  friend std::strong_ordering operator<=>(const Vertex& x, const Vertex& y);

  std::string to_string() const;

 private:
  std::array<Coord, kMaxDim> c_{};
  int dim_ = 0;
};

Vertex operator+(const Vertex& x, const Vertex& y);
Vertex operator-(const Vertex& x, const Vertex& y);
std::int64_t l1_norm(const Vertex& x);
std::int64_t linf_norm(const Vertex& x);

// An unordered nearest-neighbour bond, stored with endpoints normalized so
// that u <= w lexicographically.
struct Edge {
  Vertex u, w;
  Edge() = default;
  Edge(const Vertex& a, const Vertex& b);
  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class Boundary { open, torus };
enum class Indexing { site, bond };

std::string to_string(Boundary b);
std::string to_string(Indexing ix);

// A finite axis-aligned box {lo_a, ..., hi_a}^d with either open (free) or
// periodic boundary. Provides the vertex <-> linear index bijection (row
// major, axis 0 most significant, so index order equals lexicographic order)
// and nearest-neighbour adjacency.
class BoxSpec {
 public:
  BoxSpec(std::span<const Coord> lo, std::span<const Coord> hi, Boundary mode);
  BoxSpec(std::initializer_list<Coord> lo, std::initializer_list<Coord> hi, Boundary mode);
  static BoxSpec cube(int dim, Coord lo, Coord hi, Boundary mode);

  int dim() const { return dim_; }
  Boundary mode() const { return mode_; }
  Coord lo(int a) const { return lo_[static_cast<std::size_t>(a)]; }
  Coord hi(int a) const { return hi_[static_cast<std::size_t>(a)]; }
  Coord extent(int a) const { return hi_[static_cast<std::size_t>(a)] - lo_[static_cast<std::size_t>(a)] + 1; }
  Index num_vertices() const { return nverts_; }
  // Bond slots: every vertex owns one slot per axis for the bond towards
  // +e_axis. In open mode slots on the hi face are absent.
  Index num_bond_slots() const { return nverts_ * dim_; }
  Index num_bonds() const;

  bool contains(const Vertex& v) const;
  void require_inside(const Vertex& v, const char* what) const;

  Index index_of(const Vertex& v) const;
  Vertex vertex_at(Index idx) const;
  Coord coordinate(Index idx, int axis) const;

  // Linear-index neighbour step along an axis; dir is +1 or -1. Returns -1
  // when the neighbour does not exist (open boundary only).
  Index step(Index idx, int axis, int dir) const;

  std::vector<Vertex> neighbors(const Vertex& v) const;

  // True if v lies on the boundary face of an open box.
  bool on_face(const Vertex& v) const;

  friend bool operator==(const BoxSpec&, const BoxSpec&) = default;
  std::string to_string() const;

 private:
  int dim_ = 0;
  Boundary mode_ = Boundary::open;
  std::array<Coord, Vertex::kMaxDim> lo_{}, hi_{};
  std::array<Index, Vertex::kMaxDim> stride_{};
  Index nverts_ = 0;
};

// Precomputed adjacency for hot loops (Gibbs sweeps, Dijkstra). Entry
// (idx, k) for k in [0, 2d) is the neighbour index or -1; axis k/2,
// direction +1 for even k.
class NeighborTable {
 public:
  explicit NeighborTable(const BoxSpec& box);
  Index at(Index idx, int k) const { return tab_[static_cast<std::size_t>(idx) * deg_ + static_cast<std::size_t>(k)]; }
  int degree() const { return static_cast<int>(deg_); }

 private:
  std::size_t deg_;
  std::vector<Index> tab_;
};

// Weights attached to sites or to bonds of a box. Bond weights live in
// canonical slots (vertex index, axis); see BoxSpec::num_bond_slots.
class WeightField {
 public:
  WeightField(const BoxSpec& box, Indexing ix, double init = 0.0);

  const BoxSpec& box() const { return box_; }
  Indexing indexing() const { return ix_; }

  double site(Index vidx) const { return vals_[static_cast<std::size_t>(vidx)]; }
  double& site(Index vidx) { return vals_[static_cast<std::size_t>(vidx)]; }
  double site_at(const Vertex& v) const;

  bool bond_present(Index vidx, int axis) const;
  double bond(Index vidx, int axis) const { return vals_[static_cast<std::size_t>(vidx * box_.dim() + axis)]; }
  double& bond(Index vidx, int axis) { return vals_[static_cast<std::size_t>(vidx * box_.dim() + axis)]; }
  double bond_at(const Edge& e) const;

  std::span<const double> raw() const { return vals_; }
  std::span<double> raw() { return vals_; }

  void validate_positive() const;  // site fields used as passage weights must be > 0

  friend bool operator==(const WeightField&, const WeightField&) = default;

 private:
  BoxSpec box_;
  Indexing ix_;
  std::vector<double> vals_;
};

// Re-index a torus-sampled field onto the open box with the same coordinates,
// dropping wrap-around bonds. Passage computations only accept open fields.
WeightField open_window(const WeightField& torus_field);

// Plus/minus spin configuration on a box (always sampled on a torus here).
class SpinField {
 public:
  explicit SpinField(const BoxSpec& box, std::int8_t fill = 1);
  const BoxSpec& box() const { return box_; }
  std::int8_t at(Index vidx) const { return s_[static_cast<std::size_t>(vidx)]; }
  std::int8_t& at(Index vidx) { return s_[static_cast<std::size_t>(vidx)]; }
  std::span<const std::int8_t> raw() const { return s_; }
  friend bool operator==(const SpinField&, const SpinField&) = default;

 private:
  BoxSpec box_;
  std::vector<std::int8_t> s_;
};

// --- lattice animals (connected subsets of Z^d containing the origin) ---

// Compact storage: animal i occupies cells(i) = n*dim coords, each animal's
// cells sorted lexicographically, animals sorted lexicographically as flat
// tuples. The order is therefore deterministic.
class AnimalSet {
 public:
  AnimalSet(int n, int dim) : n_(n), dim_(dim) {}
  int n() const { return n_; }
  int dim() const { return dim_; }
  Index count() const { return static_cast<Index>(flat_.size()) / (n_ * dim_); }
  std::span<const Coord> cells(Index i) const {
    return {flat_.data() + static_cast<std::size_t>(i) * n_ * dim_, static_cast<std::size_t>(n_ * dim_)};
  }
  Vertex cell(Index i, int j) const;
  void append(std::span<const Coord> flat_cells);

 private:
  int n_, dim_;
  std::vector<Coord> flat_;
};

// All animals of exactly n cells containing the origin of Z^dim. Errors with
// CapError if the count would exceed cap.
AnimalSet enumerate_animals(int n, int dim, Index cap = 4'000'000);

// Number of origin-containing animals per size, 1..n (same cap semantics).
std::vector<Index> count_animals(int n, int dim, Index cap = 4'000'000);

// --- field serialization (text, versioned) ---

void write_field(std::ostream& os, const WeightField& f);
void write_field_file(const std::string& path, const WeightField& f);
WeightField read_field(std::istream& is);
WeightField read_field_file(const std::string& path);

}  // namespace fpp
