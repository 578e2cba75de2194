#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <numbers>
#include <thread>

#include "json.hpp"
#include "walkcover/cover.hpp"
#include "walkcover/errors.hpp"
#include "walkcover/excursion.hpp"
#include "walkcover/harness.hpp"
#include "walkcover/walk.hpp"

namespace walkcover {
namespace {

using nlohmann::json;

struct Rows {
  std::vector<Measurement>& out;

  void add(std::uint64_t n, const char* statistic, double value, const json& extra = json::object()) {
    out.push_back({n, statistic, value, extra.dump()});
  }
};

json disc_extra(const CoveredDiscResult& r) {
  json e{{"radius_sq", r.radius_sq}};
  if (r.center) e["center"] = {r.center->x, r.center->y};
  return e;
}

// k = max(1, ceil(alpha (ln n)^2 / pi)).
std::uint32_t alpha_threshold(double alpha, std::uint64_t n) {
  const double l = std::log(static_cast<double>(n));
  const double k = std::ceil(alpha * l * l / std::numbers::pi);
  return k < 1 ? 1u : k > 4e9 ? 4000000000u : static_cast<std::uint32_t>(k);
}

void run_cover(const RunConfig& c, std::uint64_t seed, Rows rows) {
  const bool origin_only = c.kind == ExperimentKind::origin_radius;
  const std::uint32_t walks = origin_only ? 1 : c.walks;
  std::vector<Walk> w;
  std::vector<VisitGrid> grids;
  for (std::uint32_t j = 0; j < walks; ++j) {
    const std::uint64_t s = j == 0 ? seed : derive_seed(seed, j);
    w.emplace_back(s);
    grids.emplace_back(c.cap, s);
    grids.back().record_visit(w.back().position());
  }
  for (std::uint64_t n : c.checkpoints) {
    for (std::uint32_t j = 0; j < walks; ++j)
      while (w[j].step_count() < n) grids[j].record_visit(w[j].step());
    const VisitGrid& g = grids[0];
    const std::int64_t origin_sq = origin_covered_radius_sq(g);
    rows.add(n, "R_origin", std::sqrt(static_cast<double>(origin_sq)), {{"radius_sq", origin_sq}});
    if (origin_only) continue;

    std::map<std::uint32_t, CoveredDiscResult> by_k;
    auto disc_k = [&](std::uint32_t k) -> const CoveredDiscResult& {
      auto it = by_k.find(k);
      if (it == by_k.end()) it = by_k.emplace(k, largest_covered_disc(g, k)).first;
      return it->second;
    };
    const auto& base = disc_k(1);
    rows.add(n, "R_tilde", base.radius(), disc_extra(base));
    for (std::uint32_t k : c.k_values) {
      if (k > g.cap()) {
        rows.add(n, "R_tilde_k", 0, {{"k", k}, {"saturated", true}});
        continue;
      }
      const auto& r = disc_k(k);
      json e = disc_extra(r);
      e["k"] = k;
      rows.add(n, "R_tilde_k", r.radius(), e);
    }
    for (double alpha : c.alphas) {
      const std::uint32_t k = alpha_threshold(alpha, n);
      if (k > g.cap()) {
        rows.add(n, "R_tilde_alpha", 0, {{"alpha", alpha}, {"k", k}, {"saturated", true}});
        continue;
      }
      const auto& r = disc_k(k);
      json e = disc_extra(r);
      e["alpha"] = alpha;
      e["k"] = k;
      rows.add(n, "R_tilde_alpha", r.radius(), e);
    }
    if (walks >= 2) {
      const auto multi = largest_covered_disc_multi(grids);
      json e = disc_extra(multi);
      e["walks"] = walks;
      rows.add(n, "R_tilde_multi", multi.radius(), e);
      for (std::uint32_t j = 1; j < walks; ++j) {
        const auto r = largest_covered_disc(grids[j], 1);
        json ej = disc_extra(r);
        ej["walk"] = j;
        rows.add(n, "R_tilde_walk", r.radius(), ej);
      }
    }
  }
}

// V(n) between consecutive new-site times t_a < t_b is t_b - n for every n in [t_a, t_b), so
// ln V(n) / ln n over that stretch peaks at its left end. This gives the exact maximum over
// all n alongside the sampled one.
void run_vn(const RunConfig& c, std::uint64_t seed, Rows rows) {
  const auto samples = vn_sample_points(c.vn);
  const std::uint64_t horizon = c.vn.horizon;
  const std::uint64_t budget = c.budget ? c.budget : horizon;
  Walk w(seed);
  VisitGrid seen(2, seed);
  seen.record_visit(w.position());
  std::vector<std::uint64_t> v(samples.size(), 0);
  std::size_t next = 0;  // first sample without a resolved V
  std::uint64_t last_new = 0;
  double exact_max = -std::numeric_limits<double>::infinity();
  while (true) {
    if (w.step_count() >= horizon + budget) {
      rows.add(w.step_count(), "budget_exceeded", static_cast<double>(budget));
      return;
    }
    const LatticeSite p = w.step();
    if (seen.record_visit(p) != 1) continue;
    const std::uint64_t t = w.step_count();
    const std::uint64_t lo = std::max(last_new, c.vn.start);
    if (lo < t && lo <= horizon)
      exact_max = std::max(exact_max, std::log(static_cast<double>(t - lo)) / std::log(static_cast<double>(lo)));
    for (; next < samples.size() && samples[next] < t; ++next) v[next] = t - samples[next];
    last_new = t;
    if (next == samples.size()) break;
  }
  double sampled_max = -std::numeric_limits<double>::infinity();
  std::size_t ones = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    rows.add(samples[i], "V", static_cast<double>(v[i]));
    sampled_max = std::max(sampled_max, std::log(static_cast<double>(v[i])) / std::log(static_cast<double>(samples[i])));
    ones += v[i] == 1;
  }
  rows.add(horizon, "V_max_sampled", sampled_max, {{"samples", samples.size()}});
  rows.add(horizon, "V_max_exact", exact_max, {{"from", c.vn.start}});
  rows.add(horizon, "V_one_fraction", static_cast<double>(ones) / static_cast<double>(samples.size()),
           {{"samples", samples.size()}});
}

// One walk from the origin; tau(r) for increasing r are successive first exits.
void run_potential(const RunConfig& c, std::uint64_t seed, Rows rows) {
  Walk w(seed);
  for (double r : c.radii) {
    const DiscRadius disc = DiscRadius::from_real(r);
    if (disc.inside(w.position(), {0, 0})) {
      const std::uint64_t budget = c.budget ? c.budget : default_exit_budget(disc);
      try {
        run_until_exit(w, {0, 0}, disc, budget - std::min(budget, w.step_count()));
      } catch (const BudgetExceeded&) {
        rows.add(w.step_count(), "budget_exceeded", static_cast<double>(budget), {{"r", r}});
        return;
      }
    }
    rows.add(w.step_count(), "tau", static_cast<double>(w.step_count()), {{"r", r}});
  }
}

void run_excursion(const RunConfig& c, std::uint64_t seed, Rows rows) {
  const auto& e = c.excursion;
  Walk w(seed);
  if (e.m == 0) {
    const StopSpec stop{{0, 0}, DiscRadius::from_real(e.stop)};
    const std::uint64_t budget = c.budget ? c.budget : default_exit_budget(stop.radius);
    try {
      const auto trace = count_excursions(
          w, e.center, {LevelSpec{1, DiscRadius::from_real(e.inner), DiscRadius::from_real(e.outer)}}, stop, budget);
      rows.add(trace.stop_time, "N", static_cast<double>(trace.levels[0].count), {{"level", 1}});
    } catch (const BudgetExceeded&) {
      rows.add(w.step_count(), "budget_exceeded", static_cast<double>(budget));
    }
    return;
  }
  const auto radii = RadiiSchedule::factorial(e.m);
  const int bm = scaled_level(e.beta, e.m);
  const StopSpec stop{{0, 0}, radii.ratio_disc(0)};
  const std::uint64_t budget = c.budget ? c.budget : default_exit_budget(stop.radius);
  ExcursionTrace trace;
  try {
    trace = count_excursions(w, {0, 0}, factorial_levels(radii, 3, e.m), stop, budget,
                             DeepSpec{bm, radii.ratio_disc(bm + 1)});
  } catch (const BudgetExceeded&) {
    rows.add(w.step_count(), "budget_exceeded", static_cast<double>(budget));
    return;
  }
  for (const auto& l : trace.levels)
    rows.add(trace.stop_time, "N", static_cast<double>(l.count),
             {{"level", l.label}, {"inner", l.inner.value()}, {"outer", l.outer.value()}});
  const auto windows = successful_windows(e.a, 3, bm, e.m);
  const std::uint32_t k_vis = visit_threshold(e.alpha, radii);
  rows.add(trace.stop_time, "deep_min_count", trace.deep->min_count(), {{"level", bm}});
  rows.add(trace.stop_time, "presuccessful", is_presuccessful(trace, windows, radii, e.beta) ? 1 : 0);
  rows.add(trace.stop_time, "successful", is_successful(trace, windows, radii, e.beta, k_vis) ? 1 : 0,
           {{"k_vis", k_vis}});
}

}  // namespace

std::vector<const Measurement*> RunRecord::find(const std::string& statistic, const std::string& extra) const {
  std::vector<const Measurement*> out;
  for (const auto& r : rows)
    if (r.statistic == statistic && (extra.empty() || r.extra == extra)) out.push_back(&r);
  return out;
}

RunRecord run_replica(const RunConfig& config, std::uint32_t replica) {
  RunRecord rec;
  rec.experiment = to_string(config.kind);
  rec.replica = replica;
  rec.seed = derive_seed(config.seed, replica);
  Rows rows{rec.rows};
  switch (config.kind) {
    case ExperimentKind::cover:
    case ExperimentKind::cover_k:
    case ExperimentKind::cover_multi:
    case ExperimentKind::origin_radius:
      run_cover(config, rec.seed, rows);
      break;
    case ExperimentKind::vn:
      run_vn(config, rec.seed, rows);
      break;
    case ExperimentKind::potential:
      run_potential(config, rec.seed, rows);
      break;
    case ExperimentKind::excursion:
      run_excursion(config, rec.seed, rows);
      break;
  }
  return rec;
}

std::vector<RunRecord> run_ensemble(const RunConfig& config) {
  validate(config);
  std::vector<RunRecord> out(config.replicas);
  std::vector<std::exception_ptr> errors(config.replicas);
  std::atomic<std::uint32_t> next{0};
  auto worker = [&] {
    for (std::uint32_t i; (i = next.fetch_add(1)) < config.replicas;) {
      try {
        out[i] = run_replica(config, i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::uint32_t n_threads = std::min(config.threads, config.replicas);
  std::vector<std::thread> pool;
  for (std::uint32_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace walkcover
