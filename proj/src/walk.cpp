#include "walkcover/walk.hpp"

#include <limits>

namespace walkcover {

std::uint64_t default_exit_budget(const DiscRadius& r) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const auto r_sq = static_cast<unsigned __int128>(r.threshold());
  const unsigned __int128 budget = 64 * r_sq * r_sq;
  return budget > kMax ? kMax : static_cast<std::uint64_t>(budget);
}

}  // namespace walkcover
