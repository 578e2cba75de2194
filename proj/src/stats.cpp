#include "walkcover/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "json.hpp"
#include "walkcover/errors.hpp"
#include "walkcover/rng.hpp"

namespace walkcover {
namespace {

using nlohmann::json;

// Percentile by linear interpolation between order statistics of a sorted vector.
double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::size_t draw(SplitMix64& rng, std::size_t n) { return static_cast<std::size_t>(rng.next() % n); }

}  // namespace

double median(std::vector<double> v) {
  if (v.empty()) throw InsufficientData("median of an empty sample");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2) return v[mid];
  const double upper = v[mid];
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return lower + (upper - lower) / 2;
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InsufficientData("least squares needs two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw InsufficientData("least squares needs two distinct abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

ExponentEstimate estimate_exponent(std::span<const RunRecord> records, const SeriesSelector& sel,
                                   std::uint32_t bootstrap, std::uint64_t seed) {
  if (records.size() < 2) throw InsufficientData("estimate_exponent needs at least 2 replicas");
  // logs[r][i]: ln statistic of record r at checkpoint ns[i].
  std::set<std::uint64_t> ns_set;
  for (const auto* m : records[0].find(sel.statistic, sel.extra))
    if (m->n >= sel.n_min && m->n <= sel.n_max) ns_set.insert(m->n);
  const std::vector<std::uint64_t> ns(ns_set.begin(), ns_set.end());
  if (ns.size() < 3) throw InsufficientData("estimate_exponent needs at least 3 checkpoints");
  std::vector<std::vector<double>> logs(records.size(), std::vector<double>(ns.size()));
  for (std::size_t r = 0; r < records.size(); ++r) {
    std::map<std::uint64_t, double> at;
    for (const auto* m : records[r].find(sel.statistic, sel.extra))
      if (!at.emplace(m->n, m->value).second)
        throw InsufficientData("statistic " + sel.statistic + " is ambiguous at n = " + std::to_string(m->n));
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const auto it = at.find(ns[i]);
      if (it == at.end())
        throw InsufficientData("replica " + std::to_string(records[r].replica) + " lacks n = " + std::to_string(ns[i]));
      logs[r][i] = std::log(it->second);
    }
  }
  std::vector<double> x(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) x[i] = std::log(static_cast<double>(ns[i]));

  auto fit = [&](const std::vector<std::size_t>& pick, std::vector<double>* medians) {
    std::vector<double> y(ns.size());
    std::vector<double> col(pick.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
      for (std::size_t j = 0; j < pick.size(); ++j) col[j] = logs[pick[j]][i];
      y[i] = median(col);
    }
    if (medians) *medians = y;
    return least_squares(x, y);
  };

  ExponentEstimate est;
  est.n = ns;
  std::vector<std::size_t> all(records.size());
  for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;
  const LineFit line = fit(all, &est.median_log);
  for (double y : est.median_log)
    if (!std::isfinite(y)) throw InsufficientData("median of " + sel.statistic + " is not positive");
  est.slope = line.slope;
  est.intercept = line.intercept;

  if (bootstrap > 0) {
    SplitMix64 rng(seed);
    std::vector<double> slopes;
    std::vector<std::size_t> pick(records.size());
    for (std::uint32_t b = 0; b < bootstrap; ++b) {
      for (auto& p : pick) p = draw(rng, records.size());
      const double s = fit(pick, nullptr).slope;
      if (std::isfinite(s)) slopes.push_back(s);
    }
    if (slopes.empty()) throw InsufficientData("every bootstrap resample was degenerate");
    std::sort(slopes.begin(), slopes.end());
    est.half_width = (quantile_sorted(slopes, 0.975) - quantile_sorted(slopes, 0.025)) / 2;
  }
  return est;
}

double bootstrap_median_less(std::span<const double> a, std::span<const double> b, std::uint32_t resamples,
                             std::uint64_t seed) {
  if (a.size() != b.size() || a.empty()) throw InsufficientData("paired samples of equal positive size required");
  if (resamples == 0) throw std::invalid_argument("bootstrap needs at least one resample");
  SplitMix64 rng(seed);
  std::vector<double> ra(a.size()), rb(b.size());
  std::uint32_t less = 0;
  for (std::uint32_t t = 0; t < resamples; ++t) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::size_t j = draw(rng, a.size());
      ra[i] = a[j];
      rb[i] = b[j];
    }
    less += median(ra) < median(rb);
  }
  return static_cast<double>(less) / resamples;
}

SurvivalTable survival_vs_limit(std::vector<double> samples, const std::vector<double>& y_grid) {
  if (samples.empty()) throw InsufficientData("survival_vs_limit: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  const auto limit = [](double y) { return y <= 0 ? 1.0 : std::exp(-4 * y); };
  SurvivalTable t;
  t.samples = samples.size();
  for (double y : y_grid) {
    const auto ge = samples.end() - std::lower_bound(samples.begin(), samples.end(), y);
    const double emp = static_cast<double>(ge) / n;
    t.rows.push_back({y, emp, limit(y), emp - limit(y)});
  }
  // The empirical survival is a step function, constant on (v_i, v_{i+1}], and the limit is
  // continuous and decreasing, so the supremum is attained at a sample value or just above it.
  for (std::size_t i = 0; i < samples.size();) {
    const double v = samples[i];
    std::size_t j = i;
    while (j < samples.size() && samples[j] == v) ++j;
    const double at = static_cast<double>(samples.size() - i) / n;
    const double after = static_cast<double>(samples.size() - j) / n;
    t.ks = std::max({t.ks, std::abs(at - limit(v)), std::abs(after - limit(v))});
    i = j;
  }
  return t;
}

SurvivalTable survival_vs_limit(std::span<const RunRecord> records, std::uint64_t n,
                                const std::vector<double>& y_grid) {
  if (n < 2) throw std::invalid_argument("survival_vs_limit: n must be at least 2");
  std::vector<double> samples;
  for (const auto& r : records)
    for (const auto* m : r.find("R_origin"))
      if (m->n == n) {
        const double l = std::log(m->value);
        samples.push_back(l * l / std::log(static_cast<double>(n)));
      }
  if (samples.empty()) throw InsufficientData("no R_origin rows at n = " + std::to_string(n));
  auto t = survival_vs_limit(std::move(samples), y_grid);
  t.n = n;
  return t;
}

SweepTable multiplicity_sweep(std::span<const RunRecord> records, const std::vector<double>& alphas) {
  if (records.empty()) throw InsufficientData("multiplicity_sweep: no records");
  if (alphas.empty()) throw InsufficientData("multiplicity_sweep: no alpha values");
  struct Cell {
    std::uint32_t k;
    double ratio;
  };
  // per record: (n, alpha) -> cell
  std::vector<std::map<std::pair<std::uint64_t, double>, Cell>> table(records.size());
  std::set<std::uint64_t> ns;
  for (std::size_t r = 0; r < records.size(); ++r)
    for (const auto* m : records[r].find("R_tilde_alpha")) {
      const json e = json::parse(m->extra);
      const double alpha = e.at("alpha").get<double>();
      if (std::find(alphas.begin(), alphas.end(), alpha) == alphas.end()) continue;
      const auto k = e.at("k").get<std::uint32_t>();
      if (e.value("saturated", false))
        throw PreconditionViolated("multiplicity_sweep: replica " + std::to_string(records[r].replica) +
                                   " saturated at k = " + std::to_string(k) + " (alpha " + std::to_string(alpha) +
                                   ", n = " + std::to_string(m->n) + "); raise the grid cap");
      table[r][{m->n, alpha}] = {k, std::log(m->value) / std::log(static_cast<double>(m->n))};
      ns.insert(m->n);
    }
  if (ns.empty()) throw InsufficientData("multiplicity_sweep: no R_tilde_alpha rows for these alphas");

  std::vector<double> sorted = alphas;
  std::sort(sorted.begin(), sorted.end());
  SweepTable out;
  for (std::uint64_t n : ns) {
    for (double alpha : sorted) {
      std::vector<double> col;
      std::uint32_t k = 0;
      for (std::size_t r = 0; r < records.size(); ++r) {
        const auto it = table[r].find({n, alpha});
        if (it == table[r].end())
          throw InsufficientData("replica " + std::to_string(records[r].replica) + " lacks alpha " +
                                 std::to_string(alpha) + " at n = " + std::to_string(n));
        col.push_back(it->second.ratio);
        k = it->second.k;
      }
      out.rows.push_back({n, alpha, k, median(col), (1 - std::sqrt(alpha)) / 4});
    }
    for (std::size_t r = 0; r < records.size(); ++r)
      for (std::size_t i = 1; i < sorted.size(); ++i)
        if (table[r].at({n, sorted[i]}).ratio > table[r].at({n, sorted[i - 1]}).ratio)
          out.monotone_every_record = false;
  }
  return out;
}

}  // namespace walkcover
