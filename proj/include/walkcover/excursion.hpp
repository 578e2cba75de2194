#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "walkcover/lattice.hpp"
#include "walkcover/walk.hpp"

namespace walkcover {

using u128 = unsigned __int128;

std::string to_string(u128 v);

// r_k = (k!)^3 for k = 0..m, held exactly.
class RadiiSchedule {
 public:
  static constexpr int kMaxM = 12;

  // Throws std::invalid_argument unless 1 <= m <= 12.
  static RadiiSchedule factorial(int m);

  int m() const { return m_; }
  u128 r(int k) const;
  // r_{m,k} = r_m / r_k, k = 0..m.
  u128 ratio(int k) const;
  // r_{m,k} as a disc radius; throws std::out_of_range when it exceeds 2^31.
  DiscRadius ratio_disc(int k) const;

 private:
  explicit RadiiSchedule(int m);
  int m_;
  std::vector<u128> r_;
};

// Windows [n_k - k, n_k + k] over k = k_lo..k_hi.
struct CountWindowSchedule {
  enum class Kind { successful, sluggish };

  Kind kind;
  int k_lo;
  int k_hi;
  std::vector<std::int64_t> values;  // n_k at index k - k_lo

  std::int64_t n(int k) const;
  bool within(int k, std::uint64_t count) const;
};

// n_k = floor(3 a k^2 ln k), 3 <= k_lo <= k_hi <= m.
CountWindowSchedule successful_windows(double a, int k_lo, int k_hi, int m);
// n_k = floor(3 h (k + A m)^2 ln m), 1 <= k_lo <= k_hi.
CountWindowSchedule sluggish_windows(double h, double A, int m, int k_lo, int k_hi);

// Floor of beta * m, robust to the representation error of beta.
int scaled_level(double beta, int m);

struct LevelSpec {
  int label = 0;
  DiscRadius inner;
  DiscRadius outer;
};

struct StopSpec {
  LatticeSite center;
  DiscRadius radius;
};

// Per-site visit counts over D(center, radius), counted only during completed excursions of
// the level with the given label.
struct DeepSpec {
  int label = 0;
  DiscRadius radius;
};

struct DeepTally {
  int label = 0;
  DiscRadius radius;
  std::vector<LatticeSite> sites;     // lexicographic
  std::vector<std::uint32_t> counts;  // parallel to sites

  std::uint32_t min_count() const;
};

struct ExcursionLevel {
  int label = 0;
  DiscRadius inner;
  DiscRadius outer;
  std::uint64_t count = 0;
  // [begin, end] step indices of completed excursions, when recording was requested.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> intervals;
};

enum class StopReason { hit_stop_boundary, path_exhausted };

struct ExcursionTrace {
  LatticeSite center;
  std::vector<ExcursionLevel> levels;
  StopReason stop_reason = StopReason::path_exhausted;
  std::uint64_t stop_time = 0;  // index of the last observed site
  std::optional<DeepTally> deep;

  const ExcursionLevel* level(int label) const;
};

// Rows "level,inner_r,outer_r,count".
void write_csv(std::ostream& os, const ExcursionTrace& trace);

// True iff p is in D(c, r) or in its exterior boundary layer (a site outside the disc with a
// lattice neighbour inside). Coming from outside, this is the first hit of that layer.
bool reaches_boundary_layer(const LatticeSite& p, const LatticeSite& c, const DiscRadius& r);

// Streaming excursion counter for one center.
//
// Per level, an excursion from the inner boundary layer to the outer one begins at the first
// observed site in D(c, inner) or its boundary layer, and completes at the next observed site
// with |p - c| >= outer. Observed sites are numbered from 0. Level updates for a site precede
// the stop check, so an excursion completed by the stopping site counts.
class ExcursionCounter {
 public:
  // Throws std::invalid_argument unless inner < outer for every level, the stop radius (if
  // any) exceeds every outer radius, and the deep label names a level.
  ExcursionCounter(LatticeSite center, std::vector<LevelSpec> levels, std::optional<StopSpec> stop,
                   bool record_intervals = false, std::optional<DeepSpec> deep = std::nullopt);

  // Returns false once the stop boundary was hit; later calls are ignored.
  bool observe(const LatticeSite& p);

  bool stopped() const { return stopped_; }
  std::uint64_t count(std::size_t level_index) const { return levels_[level_index].out.count; }
  std::uint64_t observed() const { return t_; }

  ExcursionTrace finish() &&;

 private:
  struct Level {
    ExcursionLevel out;
    std::int64_t inner_t;
    std::int64_t outer_t;
    std::int64_t layer_limit;  // no boundary-layer site has |p - c|^2 at or above this
    bool open = false;
    std::uint64_t begin = 0;
  };

  void finish_deep_excursion();

  LatticeSite center_;
  std::vector<Level> levels_;
  std::optional<StopSpec> stop_;
  bool record_;
  std::uint64_t t_ = 0;
  bool stopped_ = false;

  std::optional<DeepTally> deep_;
  std::size_t deep_level_ = 0;
  std::int32_t deep_extent_ = 0;
  std::vector<std::int32_t> deep_index_;  // square window -> index in sites, or -1
  std::vector<std::uint32_t> pending_;
  std::vector<std::int32_t> touched_;
};

// Counts over a stored path S_0, S_1, ... .
ExcursionTrace count_excursions(std::span<const LatticeSite> path, const LatticeSite& center,
                                const std::vector<LevelSpec>& levels, const std::optional<StopSpec>& stop,
                                bool record_intervals = false,
                                const std::optional<DeepSpec>& deep = std::nullopt);

// Counts along a live walk from its current position until the stop boundary is hit. Throws
// BudgetExceeded after `budget` steps.
ExcursionTrace count_excursions(Walk& walk, const LatticeSite& center,
                                const std::vector<LevelSpec>& levels, const StopSpec& stop,
                                std::uint64_t budget, const std::optional<DeepSpec>& deep = std::nullopt);

// Levels k = k_lo..k_hi with inner r_{m,k} and outer r_{m,k-1}.
std::vector<LevelSpec> factorial_levels(const RadiiSchedule& radii, int k_lo, int k_hi);

// Visits to D(center, radius) during the recorded excursions of `level`.
DeepTally tally_deep_visits(std::span<const LatticeSite> path, const ExcursionLevel& level,
                            const LatticeSite& center, const DiscRadius& radius);

// All windows k = 3..floor(beta m) hold. Throws IncompleteTrace when a level is missing,
// its radii disagree with the factorial schedule, or the path ran out before the stop.
bool is_presuccessful(const ExcursionTrace& trace, const CountWindowSchedule& windows,
                      const RadiiSchedule& radii, double beta);

// Presuccessful, and every site of D(x, r_{m, floor(beta m) + 1}) has at least k_vis visits
// during the completed excursions at level floor(beta m). The trace must carry that tally.
bool is_successful(const ExcursionTrace& trace, const CountWindowSchedule& windows,
                   const RadiiSchedule& radii, double beta, std::uint32_t k_vis = 1);

// Conjunction over the walks; throws std::invalid_argument for an empty list.
bool is_multi_successful(std::span<const ExcursionTrace> traces, const CountWindowSchedule& windows,
                         const RadiiSchedule& radii, double beta, std::uint32_t k_vis = 1);

// ceil(alpha (ln r_m)^2 / pi), at least 1.
std::uint32_t visit_threshold(double alpha, const RadiiSchedule& radii);

// min{j >= 1 : |x - y| >= 2 (r_{m,j} + 1)}. Throws std::invalid_argument when x == y and
// PreconditionViolated when even j = m does not separate the sites.
int scale_index(const LatticeSite& x, const LatticeSite& y, const RadiiSchedule& radii);

// True iff z gets fewer than `threshold` visits during the first n_exc completed excursions
// from the boundary layer of D(z, rho) to that of D(z, R). Throws InsufficientPath when the
// path ends first.
bool visits_within_excursions(std::span<const LatticeSite> path, const LatticeSite& z,
                              const DiscRadius& rho, const DiscRadius& R, std::uint64_t n_exc,
                              std::uint32_t threshold);

// Greedy lexicographic scan of the box keeping every site at distance >= separation from all
// sites kept so far. The result is maximal.
std::vector<LatticeSite> pack_region(const Box& region, double separation);

}  // namespace walkcover
