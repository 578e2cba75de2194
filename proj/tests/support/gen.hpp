#pragma once

// Hand-rolled generators for property tests. Every case is reproducible from its seed.

#include <cstdint>
#include <vector>

#include "walkcover/lattice.hpp"
#include "walkcover/rng.hpp"
#include "walkcover/visit_grid.hpp"
#include "walkcover/walk.hpp"

namespace gen {

inline std::int64_t uniform_int(walkcover::SplitMix64& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<std::int64_t>(rng.next() % span);
}

// S_0..S_n of a walk from `start`.
inline std::vector<walkcover::LatticeSite> path(std::uint64_t seed, std::size_t steps,
                                                walkcover::LatticeSite start = {}) {
  walkcover::Walk w(seed, start);
  std::vector<walkcover::LatticeSite> out{start};
  out.reserve(steps + 1);
  for (std::size_t i = 0; i < steps; ++i) out.push_back(w.step());
  return out;
}

inline walkcover::VisitGrid grid_of(const std::vector<walkcover::LatticeSite>& p,
                                    std::uint32_t cap = walkcover::VisitGrid::kMaxCap) {
  walkcover::VisitGrid g(cap);
  for (const auto& s : p) g.record_visit(s);
  return g;
}

// A w x h block at (x0, y0) where each site receives 0..max_count visits, plus a guaranteed
// visit at the block's corners so the bounding box is the whole block.
inline walkcover::VisitGrid random_block(walkcover::SplitMix64& rng, std::int32_t x0,
                                         std::int32_t y0, std::int32_t w, std::int32_t h,
                                         double fill, std::uint32_t max_count = 3) {
  walkcover::VisitGrid g;
  for (std::int32_t y = y0; y < y0 + h; ++y)
    for (std::int32_t x = x0; x < x0 + w; ++x) {
      if (rng.uniform() >= fill) continue;
      const auto c = 1 + uniform_int(rng, 0, max_count - 1);
      for (std::int64_t i = 0; i < c; ++i) g.record_visit({x, y});
    }
  for (auto corner : {walkcover::LatticeSite{x0, y0}, walkcover::LatticeSite{x0 + w - 1, y0 + h - 1}})
    g.record_visit(corner);
  return g;
}

}  // namespace gen
