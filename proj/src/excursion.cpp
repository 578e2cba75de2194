#include "walkcover/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "walkcover/errors.hpp"

namespace walkcover {

std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return {s.rbegin(), s.rend()};
}

// ---------------------------------------------------------------------------
// Schedules

RadiiSchedule::RadiiSchedule(int m) : m_(m) {
  r_.reserve(static_cast<std::size_t>(m) + 1);
  r_.push_back(1);
  u128 fact = 1;
  for (int k = 1; k <= m; ++k) {
    fact *= static_cast<u128>(k);
    r_.push_back(fact * fact * fact);
  }
}

RadiiSchedule RadiiSchedule::factorial(int m) {
  if (m < 1 || m > kMaxM) throw std::invalid_argument("factorial radii need 1 <= m <= 12");
  return RadiiSchedule(m);
}

u128 RadiiSchedule::r(int k) const {
  if (k < 0 || k > m_) throw std::out_of_range("radius index outside 0..m");
  return r_[static_cast<std::size_t>(k)];
}

u128 RadiiSchedule::ratio(int k) const { return r(m_) / r(k); }

DiscRadius RadiiSchedule::ratio_disc(int k) const {
  const u128 v = ratio(k);
  if (v > (u128{1} << 31)) throw std::out_of_range("r_{m,k} too large for lattice geometry");
  return DiscRadius::from_integer(static_cast<std::int64_t>(v));
}

std::int64_t CountWindowSchedule::n(int k) const {
  if (k < k_lo || k > k_hi) throw std::out_of_range("level outside the window schedule");
  return values[static_cast<std::size_t>(k - k_lo)];
}

bool CountWindowSchedule::within(int k, std::uint64_t count) const {
  const std::int64_t c = static_cast<std::int64_t>(count);
  return c >= n(k) - k && c <= n(k) + k;
}

CountWindowSchedule successful_windows(double a, int k_lo, int k_hi, int m) {
  if (!(a > 0)) throw std::invalid_argument("successful windows need a > 0");
  if (k_lo < 3 || k_lo > k_hi || k_hi > m)
    throw std::invalid_argument("successful windows need 3 <= k_lo <= k_hi <= m");
  CountWindowSchedule s{CountWindowSchedule::Kind::successful, k_lo, k_hi, {}};
  for (int k = k_lo; k <= k_hi; ++k)
    s.values.push_back(static_cast<std::int64_t>(std::floor(3 * a * k * k * std::log(k))));
  return s;
}

CountWindowSchedule sluggish_windows(double h, double A, int m, int k_lo, int k_hi) {
  if (!(h > 0) || !(A >= 0)) throw std::invalid_argument("sluggish windows need h > 0, A >= 0");
  if (m < 1 || k_lo < 1 || k_lo > k_hi) throw std::invalid_argument("sluggish windows need 1 <= k_lo <= k_hi");
  CountWindowSchedule s{CountWindowSchedule::Kind::sluggish, k_lo, k_hi, {}};
  for (int k = k_lo; k <= k_hi; ++k) {
    const double base = k + A * m;
    s.values.push_back(static_cast<std::int64_t>(std::floor(3 * h * base * base * std::log(m))));
  }
  return s;
}

int scaled_level(double beta, int m) { return static_cast<int>(std::floor(beta * m + 1e-9)); }

std::vector<LevelSpec> factorial_levels(const RadiiSchedule& radii, int k_lo, int k_hi) {
  if (k_lo < 1 || k_lo > k_hi || k_hi > radii.m()) throw std::invalid_argument("levels need 1 <= k_lo <= k_hi <= m");
  std::vector<LevelSpec> out;
  for (int k = k_lo; k <= k_hi; ++k) out.push_back({k, radii.ratio_disc(k), radii.ratio_disc(k - 1)});
  return out;
}

// ---------------------------------------------------------------------------
// Counting

std::uint32_t DeepTally::min_count() const {
  return counts.empty() ? 0 : *std::min_element(counts.begin(), counts.end());
}

const ExcursionLevel* ExcursionTrace::level(int label) const {
  for (const auto& l : levels)
    if (l.label == label) return &l;
  return nullptr;
}

void write_csv(std::ostream& os, const ExcursionTrace& trace) {
  os << "level,inner_r,outer_r,count\n";
  for (const auto& l : trace.levels)
    os << l.label << ',' << l.inner.value() << ',' << l.outer.value() << ',' << l.count << '\n';
}

bool reaches_boundary_layer(const LatticeSite& p, const LatticeSite& c, const DiscRadius& r) {
  if (r.inside(p, c)) return true;
  for (const auto& mv : kMoves)
    if (r.inside({p.x + mv.x, p.y + mv.y}, c)) return true;
  return false;
}

ExcursionCounter::ExcursionCounter(LatticeSite center, std::vector<LevelSpec> levels,
                                   std::optional<StopSpec> stop, bool record_intervals,
                                   std::optional<DeepSpec> deep)
    : center_(center), stop_(std::move(stop)), record_(record_intervals) {
  if (levels.empty()) throw std::invalid_argument("excursion counter needs at least one level");
  for (const auto& l : levels) {
    if (!(l.inner.threshold() < l.outer.threshold()))
      throw std::invalid_argument("excursion level needs inner < outer");
    if (stop_ && !(l.outer.threshold() < stop_->radius.threshold()))
      throw std::invalid_argument("stop radius must exceed every outer radius");
    const std::int64_t e = l.inner.extent();
    levels_.push_back(Level{ExcursionLevel{l.label, l.inner, l.outer, 0, {}}, l.inner.threshold(),
                            l.outer.threshold(), l.inner.threshold() + 2 * e + 2});
  }
  if (deep) {
    auto it = std::find_if(levels_.begin(), levels_.end(),
                           [&](const Level& l) { return l.out.label == deep->label; });
    if (it == levels_.end()) throw std::invalid_argument("deep tally names no tracked level");
    deep_level_ = static_cast<std::size_t>(it - levels_.begin());
    DeepTally tally{deep->label, deep->radius, disc_sites(center, deep->radius), {}};
    tally.counts.assign(tally.sites.size(), 0);
    deep_extent_ = deep->radius.extent();
    const auto side = static_cast<std::size_t>(2 * deep_extent_ + 1);
    deep_index_.assign(side * side, -1);
    for (std::size_t i = 0; i < tally.sites.size(); ++i) {
      const auto dx = static_cast<std::size_t>(tally.sites[i].x - center.x + deep_extent_);
      const auto dy = static_cast<std::size_t>(tally.sites[i].y - center.y + deep_extent_);
      deep_index_[dy * side + dx] = static_cast<std::int32_t>(i);
    }
    pending_.assign(tally.sites.size(), 0);
    deep_ = std::move(tally);
  }
}

void ExcursionCounter::finish_deep_excursion() {
  for (std::int32_t i : touched_) {
    deep_->counts[static_cast<std::size_t>(i)] += pending_[static_cast<std::size_t>(i)];
    pending_[static_cast<std::size_t>(i)] = 0;
  }
  touched_.clear();
}

bool ExcursionCounter::observe(const LatticeSite& p) {
  if (stopped_) return false;
  const std::int64_t d = dist_sq(p, center_);
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    Level& l = levels_[i];
    if (!l.open && d < l.layer_limit && (d < l.inner_t || reaches_boundary_layer(p, center_, l.out.inner))) {
      l.open = true;
      l.begin = t_;
    }
    if (!l.open) continue;
    if (deep_ && i == deep_level_ && deep_->radius.inside(d)) {
      const auto side = static_cast<std::size_t>(2 * deep_extent_ + 1);
      const auto dx = static_cast<std::size_t>(p.x - center_.x + deep_extent_);
      const auto dy = static_cast<std::size_t>(p.y - center_.y + deep_extent_);
      const std::int32_t idx = deep_index_[dy * side + dx];
      if (pending_[static_cast<std::size_t>(idx)]++ == 0) touched_.push_back(idx);
    }
    if (d >= l.outer_t) {
      l.open = false;
      ++l.out.count;
      if (record_) l.out.intervals.emplace_back(l.begin, t_);
      if (deep_ && i == deep_level_) finish_deep_excursion();
    }
  }
  ++t_;
  if (stop_ && !stop_->radius.inside(p, stop_->center)) stopped_ = true;
  return !stopped_;
}

ExcursionTrace ExcursionCounter::finish() && {
  ExcursionTrace trace;
  trace.center = center_;
  trace.stop_reason = stopped_ ? StopReason::hit_stop_boundary : StopReason::path_exhausted;
  trace.stop_time = t_ == 0 ? 0 : t_ - 1;
  for (auto& l : levels_) trace.levels.push_back(std::move(l.out));
  trace.deep = std::move(deep_);
  return trace;
}

ExcursionTrace count_excursions(std::span<const LatticeSite> path, const LatticeSite& center,
                                const std::vector<LevelSpec>& levels, const std::optional<StopSpec>& stop,
                                bool record_intervals, const std::optional<DeepSpec>& deep) {
  ExcursionCounter counter(center, levels, stop, record_intervals, deep);
  for (const auto& p : path)
    if (!counter.observe(p)) break;
  return std::move(counter).finish();
}

ExcursionTrace count_excursions(Walk& walk, const LatticeSite& center,
                                const std::vector<LevelSpec>& levels, const StopSpec& stop,
                                std::uint64_t budget, const std::optional<DeepSpec>& deep) {
  ExcursionCounter counter(center, levels, stop, false, deep);
  std::uint64_t steps = 0;
  if (counter.observe(walk.position())) {
    do {
      if (steps == budget) throw BudgetExceeded("count_excursions: step budget exceeded");
      ++steps;
    } while (counter.observe(walk.step()));
  }
  return std::move(counter).finish();
}

DeepTally tally_deep_visits(std::span<const LatticeSite> path, const ExcursionLevel& level,
                            const LatticeSite& center, const DiscRadius& radius) {
  if (level.intervals.size() != level.count)
    throw IncompleteTrace("tally_deep_visits: excursion intervals were not recorded");
  DeepTally tally{level.label, radius, disc_sites(center, radius), {}};
  tally.counts.assign(tally.sites.size(), 0);
  std::unordered_map<LatticeSite, std::size_t, SiteHash> index;
  for (std::size_t i = 0; i < tally.sites.size(); ++i) index.emplace(tally.sites[i], i);
  for (const auto& [b, e] : level.intervals) {
    if (e >= path.size()) throw IncompleteTrace("tally_deep_visits: interval beyond the path");
    for (std::uint64_t t = b; t <= e; ++t) {
      auto it = index.find(path[t]);
      if (it != index.end()) ++tally.counts[it->second];
    }
  }
  return tally;
}

// ---------------------------------------------------------------------------
// Predicates

namespace {

int checked_level(const CountWindowSchedule& windows, const RadiiSchedule& radii, double beta) {
  const int bm = scaled_level(beta, radii.m());
  if (bm < 3 || bm > radii.m()) throw std::invalid_argument("floor(beta m) must lie in [3, m]");
  if (windows.k_lo > 3 || windows.k_hi < bm)
    throw std::invalid_argument("window schedule does not cover k = 3..floor(beta m)");
  return bm;
}

}  // namespace

bool is_presuccessful(const ExcursionTrace& trace, const CountWindowSchedule& windows,
                      const RadiiSchedule& radii, double beta) {
  const int bm = checked_level(windows, radii, beta);
  if (trace.stop_reason != StopReason::hit_stop_boundary)
    throw IncompleteTrace("trace ended before the stop boundary");
  bool ok = true;
  for (int k = 3; k <= bm; ++k) {
    const ExcursionLevel* l = trace.level(k);
    if (l == nullptr) throw IncompleteTrace("trace lacks level " + std::to_string(k));
    if (!(l->inner == radii.ratio_disc(k)) || !(l->outer == radii.ratio_disc(k - 1)))
      throw IncompleteTrace("level " + std::to_string(k) + " radii differ from the factorial schedule");
    ok = ok && windows.within(k, l->count);
  }
  return ok;
}

bool is_successful(const ExcursionTrace& trace, const CountWindowSchedule& windows,
                   const RadiiSchedule& radii, double beta, std::uint32_t k_vis) {
  const int bm = checked_level(windows, radii, beta);
  if (bm + 1 > radii.m()) throw std::invalid_argument("floor(beta m) + 1 exceeds m");
  if (!trace.deep || trace.deep->label != bm || !(trace.deep->radius == radii.ratio_disc(bm + 1)))
    throw IncompleteTrace("trace lacks the deep-disc tally at level floor(beta m)");
  const bool windows_ok = is_presuccessful(trace, windows, radii, beta);
  return windows_ok && trace.deep->min_count() >= k_vis;
}

bool is_multi_successful(std::span<const ExcursionTrace> traces, const CountWindowSchedule& windows,
                         const RadiiSchedule& radii, double beta, std::uint32_t k_vis) {
  if (traces.empty()) throw std::invalid_argument("is_multi_successful: no walks");
  bool all = true;
  for (const auto& t : traces) all = is_successful(t, windows, radii, beta, k_vis) && all;
  return all;
}

std::uint32_t visit_threshold(double alpha, const RadiiSchedule& radii) {
  double log_rm = 0;
  for (int j = 2; j <= radii.m(); ++j) log_rm += 3 * std::log(j);
  const double v = std::ceil(alpha * log_rm * log_rm / std::numbers::pi);
  return v < 1 ? 1u : static_cast<std::uint32_t>(v);
}

int scale_index(const LatticeSite& x, const LatticeSite& y, const RadiiSchedule& radii) {
  if (x == y) throw std::invalid_argument("scale_index: sites coincide");
  const auto d = static_cast<u128>(dist_sq(x, y));
  for (int j = 1; j <= radii.m(); ++j) {
    const u128 r1 = radii.ratio(j) + 1;
    if (r1 > (u128{1} << 32)) continue;  // 4 (r + 1)^2 > 2^66 > any lattice distance^2
    if (d >= 4 * r1 * r1) return j;
  }
  throw PreconditionViolated("scale_index: sites closer than 4, no level separates them");
}

bool visits_within_excursions(std::span<const LatticeSite> path, const LatticeSite& z,
                              const DiscRadius& rho, const DiscRadius& R, std::uint64_t n_exc,
                              std::uint32_t threshold) {
  if (n_exc == 0) throw std::invalid_argument("visits_within_excursions: n_exc must be positive");
  ExcursionCounter counter(z, {LevelSpec{0, rho, R}}, std::nullopt, false,
                           DeepSpec{0, DiscRadius::from_integer(1)});
  for (const auto& p : path) {
    counter.observe(p);
    if (counter.count(0) == n_exc) {
      const auto trace = std::move(counter).finish();
      return trace.deep->counts.front() < threshold;
    }
  }
  throw InsufficientPath("path ended after " + std::to_string(counter.count(0)) + " of " +
                         std::to_string(n_exc) + " excursions");
}

std::vector<LatticeSite> pack_region(const Box& region, double separation) {
  if (region.empty()) throw std::invalid_argument("pack_region: empty region");
  if (!(separation >= 1)) throw std::invalid_argument("pack_region: separation must be >= 1");
  const auto sep = DiscRadius::from_real(separation);
  // A conflicting pair is closer than the separation, hence in adjacent buckets.
  const std::int64_t cell = sep.extent() + 1;
  const auto bucket = [cell](std::int64_t v) { return v >= 0 ? v / cell : -((-v + cell - 1) / cell); };
  const auto key = [](std::int64_t bx, std::int64_t by) {
    return (static_cast<std::uint64_t>(bx) << 32) ^ static_cast<std::uint32_t>(by);
  };
  std::unordered_map<std::uint64_t, std::vector<LatticeSite>> buckets;
  std::vector<LatticeSite> out;
  for (std::int32_t x = region.min_x; x <= region.max_x; ++x)
    for (std::int32_t y = region.min_y; y <= region.max_y; ++y) {
      const LatticeSite p{x, y};
      const std::int64_t bx = bucket(x), by = bucket(y);
      bool clear = true;
      for (std::int64_t i = bx - 1; i <= bx + 1 && clear; ++i)
        for (std::int64_t j = by - 1; j <= by + 1 && clear; ++j) {
          auto it = buckets.find(key(i, j));
          if (it == buckets.end()) continue;
          for (const auto& q : it->second)
            if (sep.inside(p, q)) {
              clear = false;
              break;
            }
        }
      if (clear) {
        out.push_back(p);
        buckets[key(bx, by)].push_back(p);
      }
    }
  return out;
}

}  // namespace walkcover
