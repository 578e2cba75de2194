#include "walkcover/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace walkcover {

std::ostream& operator<<(std::ostream& os, const LatticeSite& s) {
  return os << '(' << s.x << ',' << s.y << ')';
}

Box intersect(const Box& a, const Box& b) {
  if (a.empty() || b.empty()) return Box{};
  return Box{std::max(a.min_x, b.min_x), std::max(a.min_y, b.min_y), std::min(a.max_x, b.max_x),
             std::min(a.max_y, b.max_y)};
}

std::int64_t isqrt(std::int64_t v) {
  if (v < 0) throw std::domain_error("isqrt of negative value");
  auto s = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (s > 0 && s * s > v) --s;
  while ((s + 1) * (s + 1) <= v) ++s;
  return s;
}

std::int64_t ceil_square(double r) {
  if (!std::isfinite(r) || r <= 0.0) throw std::invalid_argument("radius must be finite and positive");
  if (r >= 2147483648.0) throw std::out_of_range("radius too large for exact lattice geometry");
  int exp = 0;
  const double frac = std::frexp(r, &exp);  // r = frac * 2^exp, frac in [0.5, 1)
  const auto mantissa = static_cast<std::uint64_t>(std::ldexp(frac, 53));
  const int shift = 2 * (exp - 53);  // r^2 = mantissa^2 * 2^shift
  const unsigned __int128 sq = static_cast<unsigned __int128>(mantissa) * mantissa;
  if (shift >= 0) return static_cast<std::int64_t>(sq << shift);
  const int down = -shift;
  if (down >= 120) return 1;  // 0 < r^2 < 1
  const unsigned __int128 one = 1;
  const unsigned __int128 q = (sq + (one << down) - 1) >> down;
  return static_cast<std::int64_t>(q);
}

DiscRadius DiscRadius::from_integer(std::int64_t r) {
  if (r <= 0) throw std::invalid_argument("radius must be positive");
  if (r > (std::int64_t{1} << 31)) throw std::out_of_range("radius too large for exact lattice geometry");
  return DiscRadius(r * r, static_cast<double>(r));
}

DiscRadius DiscRadius::from_squared(std::int64_t r_sq) {
  if (r_sq <= 0) throw std::invalid_argument("squared radius must be positive");
  return DiscRadius(r_sq, std::sqrt(static_cast<double>(r_sq)));
}

DiscRadius DiscRadius::from_real(double r) { return DiscRadius(ceil_square(r), r); }

std::int32_t DiscRadius::extent() const {
  // dx^2 < threshold  <=>  |dx| <= isqrt(threshold - 1)
  return static_cast<std::int32_t>(isqrt(threshold_ - 1));
}

std::vector<LatticeSite> disc_sites(const LatticeSite& c, const DiscRadius& r) {
  std::vector<LatticeSite> out;
  const std::int32_t e = r.extent();
  for (std::int32_t dx = -e; dx <= e; ++dx) {
    for (std::int32_t dy = -e; dy <= e; ++dy) {
      const LatticeSite p{c.x + dx, c.y + dy};
      if (r.inside(p, c)) out.push_back(p);
    }
  }
  return out;
}

}  // namespace walkcover
