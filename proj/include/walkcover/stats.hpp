#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "walkcover/harness.hpp"

namespace walkcover {

// Median of a copy; mean of the two middle values for even sizes. Throws InsufficientData
// on empty input.
double median(std::vector<double> v);

struct LineFit {
  double slope = 0;
  double intercept = 0;
};
// Ordinary least squares; needs two distinct abscissae.
LineFit least_squares(std::span<const double> x, std::span<const double> y);

struct ExponentEstimate {
  double slope = 0;
  double intercept = 0;
  double half_width = 0;  // half the 95% percentile-bootstrap interval of the slope
  std::vector<std::uint64_t> n;
  std::vector<double> median_log;  // per n
};

struct SeriesSelector {
  std::string statistic;
  std::string extra;  // empty matches any
  std::uint64_t n_min = 0;
  std::uint64_t n_max = UINT64_MAX;
};

// Least-squares slope of median ln(statistic) against ln n over the checkpoints in range,
// with a bootstrap over replicas (resampling whole records). Every record must carry every
// selected checkpoint. Throws InsufficientData unless there are >= 3 checkpoints and >= 2
// replicas, or when a median is not positive.
ExponentEstimate estimate_exponent(std::span<const RunRecord> records, const SeriesSelector& sel,
                                   std::uint32_t bootstrap = 1000, std::uint64_t seed = 1);

// Fraction of bootstrap resamples of replicas in which median(a) < median(b), with a and b
// taken from the same resampled records.
double bootstrap_median_less(std::span<const double> a, std::span<const double> b, std::uint32_t resamples,
                             std::uint64_t seed);

struct SurvivalRow {
  double y;
  double empirical;  // fraction of samples >= y
  double limit;      // e^{-4y}
  double gap;        // empirical - limit
};

struct SurvivalTable {
  std::uint64_t n = 0;
  std::size_t samples = 0;
  std::vector<SurvivalRow> rows;
  double ks = 0;  // sup over y >= 0 of |empirical - limit|
};

// Survival of (ln R_n)^2 / ln n against e^{-4y}, from the "R_origin" rows at checkpoint n.
// Throws InsufficientData when no record carries that checkpoint.
SurvivalTable survival_vs_limit(std::span<const RunRecord> records, std::uint64_t n,
                                const std::vector<double>& y_grid);
// The same from raw samples of (ln R_n)^2 / ln n.
SurvivalTable survival_vs_limit(std::vector<double> samples, const std::vector<double>& y_grid);

struct SweepRow {
  std::uint64_t n;
  double alpha;
  std::uint32_t k;
  double median_ratio;  // median over replicas of ln R~(n; k) / ln n
  double predicted;     // (1 - sqrt alpha) / 4
};

struct SweepTable {
  std::vector<SweepRow> rows;
  // ln R~(n; k_alpha) / ln n is nonincreasing in alpha for every record and checkpoint.
  bool monotone_every_record = true;
};

// From "R_tilde_alpha" rows. Throws PreconditionViolated when a needed row was saturated
// (k above the grid cap) and InsufficientData when a record lacks a needed row.
SweepTable multiplicity_sweep(std::span<const RunRecord> records, const std::vector<double>& alphas);

}  // namespace walkcover
