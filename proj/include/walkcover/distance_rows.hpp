#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace walkcover {

// Marks the source cells of one row of a rectangular region: out[i] = 1 iff cell
// (x0 + i, y) is a source. `out` has the region's width.
using RowSourceFill = std::function<void(std::int32_t y, std::span<std::uint8_t> out)>;

inline constexpr std::int64_t kNoSource = std::numeric_limits<std::int64_t>::max();

// Exact squared Euclidean distance transform over a rectangle, produced row by row.
//
// Two separable passes in integer arithmetic: a vertical pass giving each cell its distance
// to the nearest source in its column, then per row the lower envelope of the parabolas
// (x - i)^2 + g(i)^2. Rows are processed in bands of at most `cell_budget` cells; when there
// is more than one band (or only part of the rows is emitted), a first sweep records per band
// and column the first and last source row, and these halos carry the column distances across
// band edges. The output does not depend on the budget.
class SquaredDistanceRows {
 public:
  struct Region {
    std::int32_t x0 = 0;
    std::int32_t y0 = 0;
    std::int32_t width = 0;
    std::int32_t height = 0;
  };

  // Emits rows [emit_begin, emit_end) in ascending order.
  SquaredDistanceRows(Region region, RowSourceFill fill, std::int32_t emit_begin,
                      std::int32_t emit_end, std::size_t cell_budget);

  // Advances to the next emitted row; false once all rows were produced.
  bool next();

  std::int32_t y() const { return current_y_; }
  // Squared distance of (x0 + i, y()) to the nearest source; kNoSource when the region
  // holds no source at all.
  std::span<const std::int64_t> row() const { return out_; }

  static constexpr std::size_t kDefaultCellBudget = std::size_t{1} << 24;

 private:
  void prepass();
  void load_band(std::size_t band);
  void envelope_row(std::int32_t local_row);

  Region region_;
  RowSourceFill fill_;
  std::int32_t emit_begin_;
  std::int32_t emit_end_;
  std::int32_t band_rows_;
  std::size_t band_count_;
  std::int64_t inf_g_;

  // Per band and column: first / last source row (absolute y), or sentinels.
  std::vector<std::int32_t> first_source_;
  std::vector<std::int32_t> last_source_;
  bool have_halos_ = false;

  std::size_t band_ = 0;
  bool band_loaded_ = false;
  std::int32_t band_y0_ = 0;
  std::int32_t band_y1_ = 0;
  std::vector<std::uint8_t> mask_;
  std::vector<std::int32_t> g_;

  std::vector<std::int32_t> env_site_;
  std::vector<std::int32_t> env_start_;
  std::vector<std::int64_t> out_;
  std::int32_t current_y_;
};

}  // namespace walkcover
