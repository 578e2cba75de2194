#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace walkcover {

// A point of Z^2. Coordinates are kept within |x|,|y| <= 2^30 so that squared
// norms fit exactly in a signed 64-bit integer.
struct LatticeSite {
  std::int32_t x = 0;
  std::int32_t y = 0;

  friend constexpr bool operator==(const LatticeSite&, const LatticeSite&) = default;
  // Lexicographic: x first, then y.
  friend constexpr auto operator<=>(const LatticeSite&, const LatticeSite&) = default;
};

std::ostream& operator<<(std::ostream& os, const LatticeSite& s);

constexpr std::int64_t norm_sq(const LatticeSite& s) {
  return std::int64_t{s.x} * s.x + std::int64_t{s.y} * s.y;
}

constexpr std::int64_t dist_sq(const LatticeSite& a, const LatticeSite& b) {
  const std::int64_t dx = std::int64_t{a.x} - b.x;
  const std::int64_t dy = std::int64_t{a.y} - b.y;
  return dx * dx + dy * dy;
}

constexpr std::int64_t l1_dist(const LatticeSite& a, const LatticeSite& b) {
  const std::int64_t dx = std::int64_t{a.x} - b.x;
  const std::int64_t dy = std::int64_t{a.y} - b.y;
  return (dx < 0 ? -dx : dx) + (dy < 0 ? -dy : dy);
}

struct SiteHash {
  std::size_t operator()(const LatticeSite& s) const noexcept {
    std::uint64_t k = (std::uint64_t{static_cast<std::uint32_t>(s.x)} << 32) |
                      static_cast<std::uint32_t>(s.y);
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    return static_cast<std::size_t>(k);
  }
};

// Closed axis-aligned box [min_x, max_x] x [min_y, max_y].
struct Box {
  std::int32_t min_x = 0;
  std::int32_t min_y = 0;
  std::int32_t max_x = -1;
  std::int32_t max_y = -1;

  constexpr bool empty() const { return max_x < min_x || max_y < min_y; }
  constexpr std::int64_t width() const { return empty() ? 0 : std::int64_t{max_x} - min_x + 1; }
  constexpr std::int64_t height() const { return empty() ? 0 : std::int64_t{max_y} - min_y + 1; }
  constexpr std::int64_t area() const { return width() * height(); }
  constexpr bool contains(const LatticeSite& s) const {
    return s.x >= min_x && s.x <= max_x && s.y >= min_y && s.y <= max_y;
  }
  friend constexpr bool operator==(const Box&, const Box&) = default;
};

Box intersect(const Box& a, const Box& b);

// Radius of an open lattice disc D(c, r) = {y : |y - c| < r}.
//
// Membership is decided in integer arithmetic: |y - c| < r  <=>  |y - c|^2 < ceil(r^2).
// The threshold ceil(r^2) is computed exactly from the binary representation of r,
// so a real radius never produces a floating-point boundary ambiguity.
class DiscRadius {
 public:
  static DiscRadius from_integer(std::int64_t r);
  static DiscRadius from_squared(std::int64_t r_sq);
  static DiscRadius from_real(double r);

  // Sites y with dist_sq(y, c) < threshold() form D(c, r).
  constexpr std::int64_t threshold() const { return threshold_; }
  constexpr double value() const { return value_; }

  constexpr bool inside(std::int64_t d_sq) const { return d_sq < threshold_; }
  constexpr bool inside(const LatticeSite& p, const LatticeSite& c) const {
    return dist_sq(p, c) < threshold_;
  }
  // Largest |dx| any member of the disc can have.
  std::int32_t extent() const;

  friend constexpr bool operator==(const DiscRadius& a, const DiscRadius& b) {
    return a.threshold_ == b.threshold_;
  }

 private:
  DiscRadius(std::int64_t threshold, double value) : threshold_(threshold), value_(value) {}

  std::int64_t threshold_;
  double value_;
};

// Exact ceil(r * r) for a finite r > 0 with r^2 < 2^62.
std::int64_t ceil_square(double r);

// Integer square root: largest s with s*s <= v.
std::int64_t isqrt(std::int64_t v);

// Sites of D(c, r) in lexicographic order.
std::vector<LatticeSite> disc_sites(const LatticeSite& c, const DiscRadius& r);

}  // namespace walkcover
