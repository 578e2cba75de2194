#include "walkcover/distance_rows.hpp"

#include <algorithm>
#include <stdexcept>

namespace walkcover {
namespace {

constexpr std::int32_t kNoneAbove = std::numeric_limits<std::int32_t>::min();
constexpr std::int32_t kNoneBelow = std::numeric_limits<std::int32_t>::max();

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  // b > 0
  const std::int64_t q = a / b;
  return (a % b != 0 && a < 0) ? q - 1 : q;
}

}  // namespace

SquaredDistanceRows::SquaredDistanceRows(Region region, RowSourceFill fill,
                                         std::int32_t emit_begin, std::int32_t emit_end,
                                         std::size_t cell_budget)
    : region_(region),
      fill_(std::move(fill)),
      emit_begin_(emit_begin),
      emit_end_(emit_end),
      current_y_(emit_begin) {
  if (region.width <= 0 || region.height <= 0)
    throw std::invalid_argument("SquaredDistanceRows: empty region");
  if (emit_begin < region.y0 || emit_end > region.y0 + region.height || emit_begin > emit_end)
    throw std::invalid_argument("SquaredDistanceRows: emitted rows outside the region");
  const auto width = static_cast<std::size_t>(region.width);
  band_rows_ = static_cast<std::int32_t>(
      std::clamp<std::size_t>(cell_budget / width, 1, static_cast<std::size_t>(region.height)));
  band_count_ = static_cast<std::size_t>((region.height + band_rows_ - 1) / band_rows_);
  inf_g_ = std::int64_t{region.width} + region.height + 2;
  out_.assign(width, kNoSource);
  env_site_.resize(width);
  env_start_.resize(width);

  const bool partial = emit_begin != region.y0 || emit_end != region.y0 + region.height;
  if (band_count_ > 1 || partial) prepass();
  band_ = static_cast<std::size_t>((emit_begin - region.y0) / band_rows_);
  current_y_ = emit_begin - 1;
}

void SquaredDistanceRows::prepass() {
  const auto width = static_cast<std::size_t>(region_.width);
  first_source_.assign(band_count_ * width, kNoneBelow);
  last_source_.assign(band_count_ * width, kNoneAbove);
  std::vector<std::uint8_t> row(width);
  for (std::int32_t r = 0; r < region_.height; ++r) {
    const std::int32_t y = region_.y0 + r;
    std::fill(row.begin(), row.end(), 0);
    fill_(y, row);
    const std::size_t base = static_cast<std::size_t>(r / band_rows_) * width;
    for (std::size_t i = 0; i < width; ++i) {
      if (!row[i]) continue;
      if (first_source_[base + i] == kNoneBelow) first_source_[base + i] = y;
      last_source_[base + i] = y;
    }
  }
  // Prefix max of last rows (bands <= b), suffix min of first rows (bands >= b).
  for (std::size_t b = 1; b < band_count_; ++b) {
    for (std::size_t i = 0; i < width; ++i) {
      auto& cur = last_source_[b * width + i];
      if (cur == kNoneAbove) cur = last_source_[(b - 1) * width + i];
    }
  }
  for (std::size_t b = band_count_ - 1; b-- > 0;) {
    for (std::size_t i = 0; i < width; ++i) {
      auto& cur = first_source_[b * width + i];
      if (cur == kNoneBelow) cur = first_source_[(b + 1) * width + i];
    }
  }
  have_halos_ = true;
}

void SquaredDistanceRows::load_band(std::size_t band) {
  const auto width = static_cast<std::size_t>(region_.width);
  band_y0_ = region_.y0 + static_cast<std::int32_t>(band) * band_rows_;
  band_y1_ = std::min(band_y0_ + band_rows_, region_.y0 + region_.height);
  const auto rows = static_cast<std::size_t>(band_y1_ - band_y0_);
  mask_.assign(rows * width, 0);
  g_.resize(rows * width);
  for (std::size_t r = 0; r < rows; ++r) {
    fill_(band_y0_ + static_cast<std::int32_t>(r),
          std::span<std::uint8_t>(mask_.data() + r * width, width));
  }

  const std::int64_t inf = inf_g_;
  for (std::size_t i = 0; i < width; ++i) {
    std::int64_t d = inf;
    if (have_halos_ && band > 0) {
      const std::int32_t above = last_source_[(band - 1) * width + i];
      if (above != kNoneAbove) d = std::min(inf, std::int64_t{band_y0_} - above - 1);
    }
    for (std::size_t r = 0; r < rows; ++r) {
      d = mask_[r * width + i] ? 0 : std::min(inf, d + 1);
      g_[r * width + i] = static_cast<std::int32_t>(d);
    }
    d = inf;
    if (have_halos_ && band + 1 < band_count_) {
      const std::int32_t below = first_source_[(band + 1) * width + i];
      if (below != kNoneBelow) d = std::min(inf, std::int64_t{below} - band_y1_);
    }
    for (std::size_t r = rows; r-- > 0;) {
      d = mask_[r * width + i] ? 0 : std::min(inf, d + 1);
      auto& g = g_[r * width + i];
      g = static_cast<std::int32_t>(std::min<std::int64_t>(g, d));
    }
  }
  band_loaded_ = true;
}

bool SquaredDistanceRows::next() {
  if (current_y_ + 1 >= emit_end_) return false;
  ++current_y_;
  if (!band_loaded_ || current_y_ >= band_y1_) {
    if (band_loaded_) ++band_;
    load_band(band_);
  }
  envelope_row(current_y_ - band_y0_);
  return true;
}

// Lower envelope of x -> (x - i)^2 + g(i)^2 over the columns i of one row.
void SquaredDistanceRows::envelope_row(std::int32_t local_row) {
  const std::int64_t m = region_.width;
  const std::int32_t* g = g_.data() + static_cast<std::size_t>(local_row) * region_.width;
  const auto f = [g](std::int64_t x, std::int64_t i) {
    const std::int64_t gi = g[i];
    return (x - i) * (x - i) + gi * gi;
  };
  // Leftmost x at which the parabola of u is at or below that of i (i < u).
  const auto sep = [g](std::int64_t i, std::int64_t u) {
    const std::int64_t gi = g[i];
    const std::int64_t gu = g[u];
    return floor_div(u * u - i * i + gu * gu - gi * gi, 2 * (u - i));
  };

  bool any_finite = false;
  for (std::int64_t i = 0; i < m && !any_finite; ++i) any_finite = g[i] < inf_g_;
  if (!any_finite) {
    // A finite column exists in some row iff the region has a source, and then every row
    // has one: column distances span the whole region.
    std::fill(out_.begin(), out_.end(), kNoSource);
    return;
  }

  std::int64_t q = 0;
  env_site_[0] = 0;
  env_start_[0] = 0;
  for (std::int64_t u = 1; u < m; ++u) {
    while (q >= 0 && f(env_start_[q], env_site_[q]) > f(env_start_[q], u)) --q;
    if (q < 0) {
      q = 0;
      env_site_[0] = static_cast<std::int32_t>(u);
    } else {
      const std::int64_t w = 1 + sep(env_site_[q], u);
      if (w < m) {
        ++q;
        env_site_[q] = static_cast<std::int32_t>(u);
        env_start_[q] = static_cast<std::int32_t>(w);
      }
    }
  }
  for (std::int64_t x = m - 1; x >= 0; --x) {
    out_[x] = f(x, env_site_[q]);
    if (x == env_start_[q]) --q;
  }
}

}  // namespace walkcover
