#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "walkcover/errors.hpp"
#include "walkcover/lattice.hpp"
#include "walkcover/rng.hpp"

namespace walkcover {

// Unit moves indexed by the top two bits of each generator word.
inline constexpr std::array<LatticeSite, 4> kMoves{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

// State of one simple random walk on Z^2. Single writer; movable between threads.
class Walk {
 public:
  explicit Walk(std::uint64_t seed, LatticeSite start = {})
      : position_(start), rng_(seed), seed_(seed) {}

  // Moves to one of the four neighbours, each with probability 1/4. 2^64 is divisible
  // by 4, so taking the top two bits carries no modulo bias.
  LatticeSite step() {
    const auto& mv = kMoves[rng_.next() >> 62];
    position_.x += mv.x;
    position_.y += mv.y;
    ++step_count_;
    return position_;
  }

  const LatticeSite& position() const { return position_; }
  std::uint64_t step_count() const { return step_count_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t rng_state() const { return rng_.state(); }

 private:
  LatticeSite position_;
  std::uint64_t step_count_ = 0;
  SplitMix64 rng_;
  std::uint64_t seed_;
};

struct ExitRecord {
  std::uint64_t exit_time = 0;  // steps taken from the call, = tau(r) when started at time 0
  LatticeSite exit_site;
};

// 64 * r^4, saturating.
std::uint64_t default_exit_budget(const DiscRadius& r);

struct NoObserver {
  void operator()(const LatticeSite&) const {}
};

// Advances the walk until its position p first satisfies |p - center| >= r. Every
// intermediate site (not the starting one) is passed to `observe`, including the exit site.
// Unit steps cannot jump over the boundary layer, so this first exit of the open disc is
// the hitting time of its outer boundary.
template <class Observer = NoObserver>
ExitRecord run_until_exit(Walk& walk, const LatticeSite& center, const DiscRadius& r,
                          std::optional<std::uint64_t> budget = std::nullopt,
                          Observer&& observe = {}) {
  if (!r.inside(walk.position(), center))
    throw std::invalid_argument("run_until_exit: walk starts outside the disc");
  const std::uint64_t limit = budget.value_or(default_exit_budget(r));
  std::uint64_t steps = 0;
  while (true) {
    if (steps == limit) throw BudgetExceeded("run_until_exit: step budget exceeded");
    const LatticeSite p = walk.step();
    ++steps;
    observe(p);
    if (!r.inside(p, center)) return ExitRecord{steps, p};
  }
}

// Smallest i >= 0 (counted from the current position) with S_i in the target set, looking
// at i = 0..cutoff. nullopt means the cutoff was exceeded; the walk has then taken `cutoff`
// steps.
template <class Predicate>
std::optional<std::uint64_t> hitting_time(Walk& walk, Predicate&& in_target, std::uint64_t cutoff) {
  if (cutoff == 0) throw std::invalid_argument("hitting_time: cutoff must be positive");
  if (in_target(walk.position())) return 0;
  for (std::uint64_t i = 1; i <= cutoff; ++i) {
    if (in_target(walk.step())) return i;
  }
  return std::nullopt;
}

}  // namespace walkcover
