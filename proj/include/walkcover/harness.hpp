#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "walkcover/lattice.hpp"

namespace walkcover {

enum class ExperimentKind { cover, cover_k, cover_multi, origin_radius, vn, excursion, potential };

std::string to_string(ExperimentKind kind);
// Throws std::invalid_argument for an unknown name.
ExperimentKind parse_experiment_kind(const std::string& name);

// V(n) sampling grid: round(start * 10^(i / per_decade)) up to horizon, duplicates removed.
struct VnGrid {
  std::uint64_t start = 1000;
  std::uint64_t horizon = 1000000;
  std::uint32_t per_decade = 25;

  friend bool operator==(const VnGrid&, const VnGrid&) = default;
};

// Factorial mode (m > 0): center and start at the origin, levels k = 3..m with inner r_{m,k}
// and outer r_{m,k-1}, stop at the exit of D(0, r_m). Annulus mode (m == 0): one level
// (inner, outer) around `center`, walk from the origin, stop at the exit of D(0, stop).
struct ExcursionParams {
  int m = 0;
  double a = 1;
  double beta = 0.75;
  double alpha = 0;  // deep-disc multiplicity ceil(alpha (ln r_m)^2 / pi), at least 1

  LatticeSite center{};
  double inner = 0;
  double outer = 0;
  double stop = 0;

  friend bool operator==(const ExcursionParams&, const ExcursionParams&) = default;
};

struct RunConfig {
  ExperimentKind kind = ExperimentKind::cover;
  std::uint64_t seed = 1;
  std::uint32_t replicas = 1;
  std::uint32_t threads = 1;  // not part of the config hash
  std::string output;         // not part of the config hash

  std::vector<std::uint64_t> checkpoints;  // cover kinds, origin_radius
  std::vector<std::uint32_t> k_values;     // cover kinds: extra multiplicities
  std::vector<double> alphas;              // cover kinds: k = max(1, ceil(alpha (ln n)^2 / pi))
  std::uint32_t walks = 1;                 // cover kinds: walks per replica
  std::uint32_t cap = 65535;               // visit-count saturation cap of every grid
  VnGrid vn;
  std::vector<double> radii;  // potential: exit radii
  ExcursionParams excursion;
  std::uint64_t budget = 0;  // step budget per walk; 0 picks the default

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// n-schedules and r-schedules may be written as an explicit list or as
// {"start": a, "stop": b, "factor": f}, expanded to a, a f, a f^2, ... <= b. Unknown keys and
// invalid values throw std::invalid_argument.
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
// Canonical form: sorted keys, explicit lists, no whitespace. Round-trips losslessly.
std::string to_canonical_json(const RunConfig& config);
// 64-bit FNV-1a of the canonical form with threads and output removed.
std::uint64_t config_hash(const RunConfig& config);
// Throws std::invalid_argument when the config cannot run.
void validate(const RunConfig& config);

std::vector<std::uint64_t> geometric_schedule(std::uint64_t start, std::uint64_t stop, double factor);
std::vector<std::uint64_t> vn_sample_points(const VnGrid& grid);

// One CSV row. `extra` is a canonical JSON object (possibly "{}").
struct Measurement {
  std::uint64_t n = 0;
  std::string statistic;
  double value = 0;
  std::string extra = "{}";

  friend bool operator==(const Measurement&, const Measurement&) = default;
};

struct RunRecord {
  std::string experiment;
  std::uint32_t replica = 0;
  std::uint64_t seed = 0;
  std::vector<Measurement> rows;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;

  // Rows with the given statistic, and (when nonempty) the given `extra`.
  std::vector<const Measurement*> find(const std::string& statistic, const std::string& extra = "") const;
};

// Simulates one replica. The replica seed is derive_seed(config.seed, replica); walk j > 0
// of a multi-walk replica uses derive_seed(replica seed, j).
RunRecord run_replica(const RunConfig& config, std::uint32_t replica);

// Replicas 0..replicas-1 on config.threads workers, merged in replica order. The result does
// not depend on the thread count. Budget overruns are recorded as rows; other exceptions
// propagate (the lowest failing replica wins).
std::vector<RunRecord> run_ensemble(const RunConfig& config);

inline constexpr const char* kRecordFormat = "walkcover-records/1";

// "# format=walkcover-records/1 config_hash=<16 hex>" then
// "experiment,replica,seed,n,statistic,value,extra". Doubles use the shortest round-trip form.
void export_csv(std::ostream& os, const std::vector<RunRecord>& records, std::uint64_t config_hash);
void export_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records,
                std::uint64_t config_hash);

struct RecordFile {
  std::uint64_t config_hash = 0;
  std::vector<RunRecord> records;
};

// Throws MalformedFile on a bad header, a missing column or an unparsable row. A hash that
// differs from `expected_hash` only writes a warning to `warn`.
RecordFile import_csv(std::istream& is, std::optional<std::uint64_t> expected_hash = std::nullopt,
                      std::ostream* warn = nullptr);
RecordFile import_csv(const std::filesystem::path& path, std::optional<std::uint64_t> expected_hash = std::nullopt,
                      std::ostream* warn = nullptr);

}  // namespace walkcover
