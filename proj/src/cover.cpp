#include "walkcover/cover.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

#include "walkcover/errors.hpp"

namespace walkcover {
namespace {

void check_threshold(const VisitGrid& grid, std::uint32_t k) {
  if (k == 0) throw std::invalid_argument("count threshold must be positive");
  if (k > grid.cap())
    throw InvalidThreshold("count threshold " + std::to_string(k) + " exceeds cap " +
                           std::to_string(grid.cap()));
}

// The visited box grown by one site on every side. Its outer ring is unvisited.
SquaredDistanceRows::Region extended_region(const Box& box) {
  return {box.min_x - 1, box.min_y - 1, static_cast<std::int32_t>(box.width() + 2),
          static_cast<std::int32_t>(box.height() + 2)};
}

// Marks sites of row y with count < k; `x0` is the x coordinate of out[0].
void fill_deficient(const VisitGrid& grid, std::uint32_t k, std::int32_t x0, std::int32_t y,
                    std::span<std::uint8_t> out) {
  const std::int32_t x1 = x0 + static_cast<std::int32_t>(out.size()) - 1;
  const std::int32_t ty = y >> VisitGrid::kTileShift;
  const std::int32_t row_off = (y & VisitGrid::kTileMask) << VisitGrid::kTileShift;
  for (std::int32_t tx = x0 >> VisitGrid::kTileShift; tx <= (x1 >> VisitGrid::kTileShift); ++tx) {
    const std::int32_t lo = std::max(x0, tx * VisitGrid::kTileSize);
    const std::int32_t hi = std::min(x1, tx * VisitGrid::kTileSize + VisitGrid::kTileMask);
    const VisitGrid::Tile* tile = grid.find_tile(tx, ty);
    if (tile == nullptr) {
      std::fill(out.begin() + (lo - x0), out.begin() + (hi - x0) + 1, std::uint8_t{1});
      continue;
    }
    for (std::int32_t x = lo; x <= hi; ++x)
      out[x - x0] = (*tile)[row_off | (x & VisitGrid::kTileMask)] < k;
  }
}

SquaredDistanceRows box_rows(const VisitGrid& grid, std::uint32_t k, std::int32_t emit_begin,
                             std::int32_t emit_end, std::size_t cell_budget) {
  const Box& box = grid.bounding_box();
  const auto region = extended_region(box);
  auto fill = [&grid, k, box, x0 = region.x0](std::int32_t y, std::span<std::uint8_t> out) {
    if (y < box.min_y || y > box.max_y) {
      std::fill(out.begin(), out.end(), std::uint8_t{1});
      return;
    }
    out.front() = 1;
    out.back() = 1;
    fill_deficient(grid, k, x0 + 1, y, out.subspan(1, out.size() - 2));
  };
  return SquaredDistanceRows(region, std::move(fill), emit_begin, emit_end, cell_budget);
}

void require_nonempty(const VisitGrid& grid) {
  if (grid.empty()) throw std::invalid_argument("grid has no recorded visits");
}

// Keeps the best (value, center) with ties going to the smaller center.
struct BestCenter {
  CoveredDiscResult result;

  void offer(std::int64_t value, const LatticeSite& site) {
    if (value <= 0) return;
    if (value > result.radius_sq || (value == result.radius_sq && site < *result.center)) {
      result.radius_sq = value;
      result.center = site;
    }
  }
};

}  // namespace

void write_csv(std::ostream& os, const CoverField& field) {
  os << "x,y,dist_sq\n";
  std::size_t i = 0;
  for (std::int32_t y = field.region.min_y; y <= field.region.max_y; ++y)
    for (std::int32_t x = field.region.min_x; x <= field.region.max_x; ++x)
      os << x << ',' << y << ',' << field.values[i++] << '\n';
}

CoverField distance_field(const VisitGrid& grid, std::uint32_t k, std::size_t cell_budget) {
  require_nonempty(grid);
  check_threshold(grid, k);
  const Box& box = grid.bounding_box();
  CoverField field{box, {}};
  field.values.reserve(static_cast<std::size_t>(box.area()));
  auto rows = box_rows(grid, k, box.min_y, box.max_y + 1, cell_budget);
  while (rows.next()) {
    const auto row = rows.row();
    field.values.insert(field.values.end(), row.begin() + 1, row.end() - 1);
  }
  return field;
}

CoveredDiscResult largest_covered_disc(const VisitGrid& grid, std::uint32_t k,
                                       std::size_t cell_budget) {
  require_nonempty(grid);
  check_threshold(grid, k);
  const Box& box = grid.bounding_box();
  BestCenter best;
  auto rows = box_rows(grid, k, box.min_y, box.max_y + 1, cell_budget);
  while (rows.next()) {
    const auto row = rows.row();
    for (std::size_t i = 1; i + 1 < row.size(); ++i)
      best.offer(row[i], {box.min_x + static_cast<std::int32_t>(i) - 1, rows.y()});
  }
  return best.result;
}

CoveredDiscResult largest_covered_disc_multi(std::span<const VisitGrid> grids,
                                             std::size_t cell_budget) {
  if (grids.empty()) throw std::invalid_argument("largest_covered_disc_multi: no walks");
  Box common = grids.front().bounding_box();
  for (const auto& g : grids) {
    require_nonempty(g);
    common = intersect(common, g.bounding_box());
  }
  if (common.empty()) return {};

  std::vector<SquaredDistanceRows> rows;
  rows.reserve(grids.size());
  for (const auto& g : grids) rows.push_back(box_rows(g, 1, common.min_y, common.max_y + 1, cell_budget));

  BestCenter best;
  std::vector<std::int64_t> row_min(static_cast<std::size_t>(common.width()));
  for (std::int32_t y = common.min_y; y <= common.max_y; ++y) {
    std::fill(row_min.begin(), row_min.end(), kNoSource);
    for (std::size_t j = 0; j < grids.size(); ++j) {
      rows[j].next();
      const auto row = rows[j].row();
      // Column of x in walk j's extended region.
      const std::size_t off =
          static_cast<std::size_t>(common.min_x - (grids[j].bounding_box().min_x - 1));
      for (std::size_t i = 0; i < row_min.size(); ++i) row_min[i] = std::min(row_min[i], row[off + i]);
    }
    for (std::size_t i = 0; i < row_min.size(); ++i)
      best.offer(row_min[i], {common.min_x + static_cast<std::int32_t>(i), y});
  }
  return best.result;
}

std::int64_t origin_covered_radius_sq(const VisitGrid& grid) {
  // Every unvisited u outside [-s, s]^2 has |u|^2 >= (s + 1)^2, so a minimum found inside
  // the square below that bound is global.
  for (std::int64_t s = 1;; s *= 2) {
    std::int64_t best = kNoSource;
    const auto si = static_cast<std::int32_t>(s);
    for (std::int32_t y = -si; y <= si; ++y)
      for (std::int32_t x = -si; x <= si; ++x) {
        const LatticeSite u{x, y};
        if (norm_sq(u) < best && grid.visit_count(u) == 0) best = norm_sq(u);
      }
    if (best < (s + 1) * (s + 1)) return best;
  }
}

std::optional<std::uint64_t> cover_time(std::span<const LatticeSite> path,
                                        const LatticeSite& center, const DiscRadius& r,
                                        std::uint32_t k) {
  if (k == 0) throw std::invalid_argument("cover_time: count threshold must be positive");
  const std::int64_t e = r.extent();
  const std::int64_t side = 2 * e + 1;
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(side * side), 0);
  std::size_t remaining = disc_sites(center, r).size();
  for (std::size_t t = 0; t < path.size(); ++t) {
    const std::int64_t dx = std::int64_t{path[t].x} - center.x;
    const std::int64_t dy = std::int64_t{path[t].y} - center.y;
    if (!r.inside(dx * dx + dy * dy)) continue;
    auto& c = counts[static_cast<std::size_t>((dy + e) * side + (dx + e))];
    if (++c == k && --remaining == 0) return t;
  }
  return std::nullopt;
}

std::optional<std::uint64_t> v_of_n(std::span<const LatticeSite> path, std::uint64_t n) {
  if (n >= path.size()) throw std::out_of_range("v_of_n: n beyond the stored path");
  VisitGrid seen(1);
  for (std::uint64_t t = 0; t <= n; ++t) seen.record_visit(path[t]);
  for (std::uint64_t t = n + 1; t < path.size(); ++t)
    if (seen.visit_count(path[t]) == 0) return t - n;
  return std::nullopt;
}

bool inside_covered_disc(const VisitGrid& grid, const LatticeSite& site, const DiscRadius& rho) {
  // Candidate centers lie within e of `site` and their discs within e of the center, so a
  // window of half-width 2e + 1 holds every unvisited site that matters. Sources outside
  // the window are farther than rho from every candidate and are left out.
  const std::int32_t e = rho.extent();
  const std::int32_t h = 2 * e + 1;
  const SquaredDistanceRows::Region region{site.x - h, site.y - h, 2 * h + 1, 2 * h + 1};
  auto fill = [&grid, x0 = region.x0](std::int32_t y, std::span<std::uint8_t> out) {
    fill_deficient(grid, 1, x0, y, out);
  };
  SquaredDistanceRows rows(region, fill, site.y - e, site.y + e + 1,
                           SquaredDistanceRows::kDefaultCellBudget);
  while (rows.next()) {
    const auto row = rows.row();
    for (std::int32_t dx = -e; dx <= e; ++dx) {
      const LatticeSite x{site.x + dx, rows.y()};
      if (rho.inside(x, site) && row[static_cast<std::size_t>(h + dx)] >= rho.threshold())
        return true;
    }
  }
  return false;
}

}  // namespace walkcover
