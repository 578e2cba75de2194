// Command-line front end: simulate ensembles, export oracle tables, estimate exponents.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "walkcover/errors.hpp"
#include "walkcover/harness.hpp"
#include "walkcover/potential.hpp"
#include "walkcover/stats.hpp"

namespace {

using namespace walkcover;

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> replicas;
  std::optional<std::uint32_t> threads;
  std::string out;
};

void add_run_flags(CLI::App* app, RunFlags& f, bool config_required) {
  auto* opt = app->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  if (config_required) opt->required();
  app->add_option("--seed", f.seed, "master seed (overrides the config)");
  app->add_option("--replicas", f.replicas, "replica count (overrides the config)")->check(CLI::PositiveNumber);
  app->add_option("--threads", f.threads, "worker threads; output does not depend on it")->check(CLI::PositiveNumber);
  app->add_option("--out", f.out, "output CSV path");
}

std::filesystem::path output_path(const RunConfig& c, const std::string& flag, const char* stem) {
  if (!flag.empty()) return flag;
  if (!c.output.empty()) return c.output;
  const char* dir = std::getenv("WALKCOVER_OUT_DIR");
  char name[64];
  std::snprintf(name, sizeof name, "%s-%016llx.csv", stem, static_cast<unsigned long long>(config_hash(c)));
  return std::filesystem::path(dir && *dir ? dir : ".") / name;
}

int run(RunConfig c, const RunFlags& f) {
  if (f.seed) c.seed = *f.seed;
  if (f.replicas) c.replicas = *f.replicas;
  if (f.threads) c.threads = *f.threads;
  validate(c);
  const auto path = output_path(c, f.out, to_string(c.kind).c_str());
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  export_csv(path, run_ensemble(c), config_hash(c));
  std::cerr << "wrote " << path.string() << '\n';
  return 0;
}

RunConfig config_or(const RunFlags& f, const char* fallback) {
  return f.config.empty() ? config_from_json(fallback) : load_config(f.config);
}

void require_kind(const RunConfig& c, std::initializer_list<ExperimentKind> kinds, const char* cmd) {
  for (auto k : kinds)
    if (c.kind == k) return;
  throw std::invalid_argument(std::string(cmd) + ": config experiment '" + to_string(c.kind) + "' does not belong here");
}

void print_estimate(std::ostream& os, const ExponentEstimate& e, const SeriesSelector& sel) {
  os << "statistic,slope,intercept,half_width,checkpoints\n"
     << sel.statistic << ',' << e.slope << ',' << e.intercept << ',' << e.half_width << ',' << e.n.size() << '\n';
  os << "n,median_log\n";
  for (std::size_t i = 0; i < e.n.size(); ++i) os << e.n[i] << ',' << e.median_log[i] << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and analysis of planar random-walk cover statistics"};
  app.require_subcommand(1);

  RunFlags sim_f, cover_f, exc_f, pot_f;
  auto* simulate = app.add_subcommand("simulate", "run any configured experiment");
  add_run_flags(simulate, sim_f, true);

  auto* cover = app.add_subcommand("cover", "covered-disc ensembles (cover, cover_k, cover_multi, origin_radius, vn)");
  add_run_flags(cover, cover_f, false);

  auto* excursion = app.add_subcommand("excursion", "excursion-count ensembles");
  add_run_flags(excursion, exc_f, false);

  auto* potential = app.add_subcommand("potential", "Green-function table of D(0,R), or exit-time ensembles");
  add_run_flags(potential, pot_f, false);
  double radius = 0;
  std::string solver = "automatic";
  potential->add_option("--radius", radius, "write the oracle table of D(0, R) instead of simulating");
  potential->add_option("--solver", solver, "automatic | direct | iterative")
      ->check(CLI::IsMember({"automatic", "direct", "iterative"}));

  auto* estimate = app.add_subcommand("estimate", "analyse a records CSV");
  std::string in_path, est_out, extra;
  SeriesSelector sel{"R_tilde", "", 0, UINT64_MAX};
  std::uint32_t bootstrap = 1000;
  std::optional<std::uint64_t> survival_n;
  std::vector<double> sweep;
  estimate->add_option("--in", in_path, "records CSV")->required()->check(CLI::ExistingFile);
  estimate->add_option("--statistic", sel.statistic, "statistic to regress on ln n");
  estimate->add_option("--extra", sel.extra, "exact extra-JSON filter");
  estimate->add_option("--n-min", sel.n_min);
  estimate->add_option("--n-max", sel.n_max);
  estimate->add_option("--bootstrap", bootstrap, "bootstrap resamples");
  estimate->add_option("--survival", survival_n, "survival of (ln R_n)^2/ln n at this checkpoint instead");
  estimate->add_option("--sweep", sweep, "multiplicity sweep over these alphas instead")->expected(1, -1);
  estimate->add_option("--out", est_out, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return run(load_config(sim_f.config), sim_f);
    if (*cover) {
      auto c = config_or(cover_f, R"({"experiment": "cover", "checkpoints": {"start": 1e4, "stop": 1e6, "factor": 10}})");
      require_kind(c,
                   {ExperimentKind::cover, ExperimentKind::cover_k, ExperimentKind::cover_multi,
                    ExperimentKind::origin_radius, ExperimentKind::vn},
                   "cover");
      return run(c, cover_f);
    }
    if (*excursion) {
      auto c = config_or(exc_f, R"({"experiment": "excursion", "excursion": {"m": 4, "a": 1, "beta": 0.75}})");
      require_kind(c, {ExperimentKind::excursion}, "excursion");
      return run(c, exc_f);
    }
    if (*potential) {
      if (radius > 0) {
        const SolverKind kind = solver == "direct" ? SolverKind::direct
                                : solver == "iterative" ? SolverKind::iterative
                                                        : SolverKind::automatic;
        const DiscOracle oracle(radius, kind);
        if (pot_f.out.empty()) {
          write_oracle_csv(std::cout, oracle);
        } else {
          std::ofstream out(pot_f.out, std::ios::binary);
          write_oracle_csv(out, oracle);
        }
        return 0;
      }
      auto c = config_or(pot_f, R"({"experiment": "potential", "radii": {"start": 8, "stop": 128, "factor": 2}})");
      require_kind(c, {ExperimentKind::potential}, "potential");
      return run(c, pot_f);
    }
    if (*estimate) {
      const auto file = import_csv(std::filesystem::path(in_path), std::nullopt, &std::cerr);
      std::ofstream file_out;
      if (!est_out.empty()) file_out.open(est_out, std::ios::binary);
      std::ostream& os = est_out.empty() ? std::cout : file_out;
      os.precision(10);
      if (survival_n) {
        std::vector<double> grid;
        for (int i = 0; i <= 40; ++i) grid.push_back(i * 0.025);
        const auto t = survival_vs_limit(file.records, *survival_n, grid);
        os << "y,empirical,limit,gap\n";
        for (const auto& r : t.rows) os << r.y << ',' << r.empirical << ',' << r.limit << ',' << r.gap << '\n';
        os << "# n=" << t.n << " samples=" << t.samples << " ks=" << t.ks << '\n';
      } else if (!sweep.empty()) {
        const auto t = multiplicity_sweep(file.records, sweep);
        os << "n,alpha,k,median_ratio,predicted\n";
        for (const auto& r : t.rows)
          os << r.n << ',' << r.alpha << ',' << r.k << ',' << r.median_ratio << ',' << r.predicted << '\n';
        os << "# monotone_every_record=" << (t.monotone_every_record ? "true" : "false") << '\n';
      } else {
        print_estimate(os, estimate_exponent(file.records, sel, bootstrap), sel);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "walkcover: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
