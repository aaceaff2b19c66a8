#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "fpp/lattice.hpp"
#include "fpp/rng.hpp"

namespace fpp {

// First-passage time between two vertices plus its certified geodesic.
// Site fields charge every path vertex including both endpoints (so the
// passage time from a vertex to itself is its own weight); bond fields
// charge edges only. Among minimal-cost paths the geodesic minimizes the
// hop count, and among those it is the forward walk that always takes the
// lexicographically smallest next vertex; the result is thus a
// deterministic function of the field.
struct PassageResult {
  double value = 0;
  std::vector<Vertex> geodesic;  // src .. dst inclusive
  Index edge_count = 0;
  bool touched_boundary = false;  // geodesic meets a face of the open box
  Indexing indexing = Indexing::bond;
};

PassageResult passage_time(const WeightField& field, const Vertex& src, const Vertex& dst);

// Restricted passage time over paths with at most ceil(c1 * |src-dst|_1)
// vertices. Throws InfeasibleError when no admissible path exists.
PassageResult passage_time_hop_constrained(const WeightField& field, const Vertex& src, const Vertex& dst,
                                           double c1);

// Consistency check for two-valued fields with weights in {a, b}: a minimal
// path cannot be longer than cost/a, and cost is at most b times the
// straight path. Returns true iff the geodesic respects the implied bound.
bool geodesic_length_check(const PassageResult& r, double a, double b);

// Side-to-side block average: the shift vector z(Y) has coordinates
// g_m(sum of a block of m^2 bits), g_m the tent map x -> m - |(x mod 2m) - m|.
struct ShiftSpec {
  int m = 1;
  std::vector<std::uint8_t> bits;  // dim blocks of m^2 bits
  Vertex z;
};

int tent_map(int m, std::int64_t bitsum);
// m = floor(vnorm^(1/4)), bits iid fair, z_j = tent_map over block j.
ShiftSpec draw_shift(int dim, std::int64_t vnorm, RngStream& rng);
ShiftSpec shift_from_bits(int dim, int m, std::span<const std::uint8_t> bits);

// Passage from 0 + z to v + z on the same field.
PassageResult shifted_passage(const WeightField& field, const Vertex& v, const ShiftSpec& shift);

void write_geodesic(std::ostream& os, const PassageResult& r);
void write_geodesic_file(const std::string& path, const PassageResult& r);

}  // namespace fpp
