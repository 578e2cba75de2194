#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "walkcover/lattice.hpp"

namespace walkcover {

// Sparse visit-count field of one walk over Z^2.
//
// Sites are grouped into 64x64 tiles keyed by (x >> 6, y >> 6); untouched tiles are not
// allocated and read as zero. Counts are 16-bit and saturate at `cap`. The walk's starting
// site S_0 counts as a visit, so after n steps the counts sum to n + 1 (absent saturation).
class VisitGrid {
 public:
  static constexpr int kTileShift = 6;
  static constexpr std::int32_t kTileSize = 1 << kTileShift;
  static constexpr std::int32_t kTileMask = kTileSize - 1;
  static constexpr std::uint32_t kMaxCap = 65535;

  using Tile = std::array<std::uint16_t, kTileSize * kTileSize>;

  explicit VisitGrid(std::uint32_t cap = kMaxCap, std::uint64_t seed = 0);

  VisitGrid(const VisitGrid& other);
  VisitGrid& operator=(const VisitGrid& other);
  VisitGrid(VisitGrid&& other) noexcept;
  VisitGrid& operator=(VisitGrid&& other) noexcept;

  // Increments the count at `site` (saturating) and returns the new count.
  std::uint32_t record_visit(const LatticeSite& site);

  std::uint32_t visit_count(const LatticeSite& site) const;

  bool empty() const { return visits_ == 0; }
  bool saturated() const { return saturated_; }
  std::uint32_t cap() const { return cap_; }
  std::uint64_t seed() const { return seed_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  // Number of recorded visits; equals steps + 1 for a grid fed S_0..S_n.
  std::uint64_t total_visits() const { return visits_; }
  std::uint64_t total_steps() const { return visits_ == 0 ? 0 : visits_ - 1; }

  // Smallest box holding every visited site; empty Box when nothing was recorded.
  const Box& bounding_box() const { return box_; }

  // Sites y with |y - center| < r and count(y) < k, in lexicographic order.
  // Throws InvalidThreshold when k > cap.
  std::vector<LatticeSite> deficient_sites(const LatticeSite& center, const DiscRadius& r,
                                           std::uint32_t k) const;

  // Tile access for bulk scans. Returns nullptr for untouched tiles.
  const Tile* find_tile(std::int32_t tile_x, std::int32_t tile_y) const;
  std::size_t tile_count() const { return tiles_.size(); }

  struct TileRef {
    std::int32_t tile_x;
    std::int32_t tile_y;
    const Tile* tile;
  };
  // All allocated tiles ordered by (tile_y, tile_x).
  std::vector<TileRef> sorted_tiles() const;

  // Counts equal, metadata equal.
  friend bool operator==(const VisitGrid& a, const VisitGrid& b);

 private:
  friend VisitGrid decode_snapshot(std::span<const std::uint8_t> bytes);

  static constexpr std::uint64_t key(std::int32_t tx, std::int32_t ty) {
    return (std::uint64_t{static_cast<std::uint32_t>(tx)} << 32) | static_cast<std::uint32_t>(ty);
  }
  Tile& tile_for_write(std::int32_t tx, std::int32_t ty);

  std::unordered_map<std::uint64_t, std::unique_ptr<Tile>> tiles_;
  std::uint32_t cap_;
  std::uint64_t seed_;
  std::uint64_t visits_ = 0;
  bool saturated_ = false;
  Box box_{};

  // Write-side cache of the last tile touched; a walk stays in one tile for long stretches.
  std::uint64_t cached_key_ = 0;
  Tile* cached_tile_ = nullptr;
};

// Snapshot layout (all integers little-endian):
//   header   : magic "WCVGRID\0" (8 bytes), format version u32, payload length u32
//   payload  : seed u64, total visits u64, tile size u32, cap u32, flags u32 (bit 0 =
//              saturated), bounding box 4 x i32 (min_x, min_y, max_x, max_y), tile count u32,
//              then per tile in (tile_y, tile_x) order: tile_x i32, tile_y i32, run count u32,
//              and that many (count u16, run length u16) pairs over the row-major cells
//   trailer  : FNV-1a 64-bit checksum of header and payload
inline constexpr std::uint32_t kSnapshotVersion = 1;

std::vector<std::uint8_t> encode_snapshot(const VisitGrid& grid);
VisitGrid decode_snapshot(std::span<const std::uint8_t> bytes);

void save_snapshot(const VisitGrid& grid, const std::filesystem::path& path);
VisitGrid load_snapshot(const std::filesystem::path& path);

}  // namespace walkcover
