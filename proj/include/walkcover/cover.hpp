#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "walkcover/distance_rows.hpp"
#include "walkcover/lattice.hpp"
#include "walkcover/visit_grid.hpp"

namespace walkcover {

// Squared distance from every site of the visited bounding box to the nearest deficient
// site (count < k). Everything outside the box is unvisited, hence deficient.
struct CoverField {
  Box region;
  std::vector<std::int64_t> values;  // row-major, y outer

  std::int64_t at(const LatticeSite& s) const {
    return values[static_cast<std::size_t>(s.y - region.min_y) * region.width() +
                  static_cast<std::size_t>(s.x - region.min_x)];
  }
};

// Rows "x,y,dist_sq" under a header line.
void write_csv(std::ostream& os, const CoverField& field);

struct CoveredDiscResult {
  std::optional<LatticeSite> center;  // empty when no site reaches the count threshold
  std::int64_t radius_sq = 0;

  double radius() const { return std::sqrt(static_cast<double>(radius_sq)); }
  friend bool operator==(const CoveredDiscResult&, const CoveredDiscResult&) = default;
};

// Throws std::invalid_argument on an empty grid and InvalidThreshold when k > cap.
CoverField distance_field(const VisitGrid& grid, std::uint32_t k,
                          std::size_t cell_budget = SquaredDistanceRows::kDefaultCellBudget);

// Largest open disc all of whose sites have count >= k. The field is streamed row by row,
// so memory stays within the cell budget whatever the box size. Ties go to the
// lexicographically smallest center.
CoveredDiscResult largest_covered_disc(
    const VisitGrid& grid, std::uint32_t k,
    std::size_t cell_budget = SquaredDistanceRows::kDefaultCellBudget);

// Largest open disc visited by every walk. Throws std::invalid_argument for an empty list
// or an empty grid.
CoveredDiscResult largest_covered_disc_multi(
    std::span<const VisitGrid> grids,
    std::size_t cell_budget = SquaredDistanceRows::kDefaultCellBudget);

// min |u|^2 over unvisited sites u; 0 when the origin itself is unvisited.
std::int64_t origin_covered_radius_sq(const VisitGrid& grid);
inline double origin_covered_radius(const VisitGrid& grid) {
  return std::sqrt(static_cast<double>(origin_covered_radius_sq(grid)));
}

// Smallest n such that every site of D(center, r) appears at least k times in
// path[0..n]; nullopt if the path ends first.
std::optional<std::uint64_t> cover_time(std::span<const LatticeSite> path,
                                        const LatticeSite& center, const DiscRadius& r,
                                        std::uint32_t k);

// Smallest j >= 1 with path[n + j] outside {path[0..n]}; nullopt if the path ends first.
// Throws std::out_of_range unless n < path.size().
std::optional<std::uint64_t> v_of_n(std::span<const LatticeSite> path, std::uint64_t n);

// True iff some x with |site - x| < rho has every site of D(x, rho) visited.
bool inside_covered_disc(const VisitGrid& grid, const LatticeSite& site, const DiscRadius& rho);

}  // namespace walkcover
