#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "walkcover/excursion.hpp"
#include "walkcover/harness.hpp"

namespace walkcover {
namespace {

using nlohmann::json;

constexpr std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::cover, "cover"},
    {ExperimentKind::cover_k, "cover_k"},
    {ExperimentKind::cover_multi, "cover_multi"},
    {ExperimentKind::origin_radius, "origin_radius"},
    {ExperimentKind::vn, "vn"},
    {ExperimentKind::excursion, "excursion"},
    {ExperimentKind::potential, "potential"},
};

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

std::vector<double> real_schedule(const json& v, const char* key) {
  if (v.is_array()) return v.get<std::vector<double>>();
  if (!v.is_object()) throw std::invalid_argument(std::string("config: '") + key + "' must be a list or a range");
  reject_unknown(v, {"start", "stop", "factor"}, key);
  const double start = v.at("start").get<double>();
  const double stop = v.at("stop").get<double>();
  const double factor = v.at("factor").get<double>();
  if (!(start > 0) || !(factor > 1) || !(stop >= start))
    throw std::invalid_argument(std::string("config: '") + key + "' range needs 0 < start <= stop, factor > 1");
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double x = start * std::pow(factor, i);
    if (x > stop * (1 + 1e-12)) break;
    out.push_back(x);
  }
  return out;
}

std::vector<std::uint64_t> count_schedule(const json& v, const char* key) {
  if (v.is_array()) return v.get<std::vector<std::uint64_t>>();
  std::vector<std::uint64_t> out;
  for (double x : real_schedule(v, key)) out.push_back(static_cast<std::uint64_t>(std::llround(x)));
  return out;
}

json to_json(const RunConfig& c, bool with_run_fields) {
  json j;
  j["experiment"] = to_string(c.kind);
  j["seed"] = c.seed;
  j["replicas"] = c.replicas;
  if (with_run_fields) {
    j["threads"] = c.threads;
    j["output"] = c.output;
  }
  j["checkpoints"] = c.checkpoints;
  j["k"] = c.k_values;
  j["alpha"] = c.alphas;
  j["walks"] = c.walks;
  j["cap"] = c.cap;
  j["vn"] = {{"start", c.vn.start}, {"horizon", c.vn.horizon}, {"per_decade", c.vn.per_decade}};
  j["radii"] = c.radii;
  const auto& e = c.excursion;
  j["excursion"] = {{"m", e.m},          {"a", e.a},         {"beta", e.beta},   {"alpha", e.alpha},
                    {"center", {e.center.x, e.center.y}}, {"inner", e.inner}, {"outer", e.outer},
                    {"stop", e.stop}};
  j["budget"] = c.budget;
  return j;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  throw std::invalid_argument("unknown experiment kind");
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (const auto& [k, n] : kKindNames)
    if (name == n) return k;
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

std::vector<std::uint64_t> geometric_schedule(std::uint64_t start, std::uint64_t stop, double factor) {
  return count_schedule(json{{"start", start}, {"stop", stop}, {"factor", factor}}, "schedule");
}

std::vector<std::uint64_t> vn_sample_points(const VnGrid& grid) {
  if (grid.start < 2 || grid.horizon < grid.start || grid.per_decade == 0)
    throw std::invalid_argument("vn grid needs 2 <= start <= horizon and per_decade >= 1");
  std::set<std::uint64_t> pts;
  for (std::uint32_t i = 0;; ++i) {
    const double x = static_cast<double>(grid.start) * std::pow(10.0, static_cast<double>(i) / grid.per_decade);
    const auto n = static_cast<std::uint64_t>(std::llround(x));
    if (n > grid.horizon) break;
    pts.insert(n);
  }
  pts.insert(grid.horizon);
  return {pts.begin(), pts.end()};
}

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  reject_unknown(j,
                 {"experiment", "seed", "replicas", "threads", "output", "checkpoints", "k", "alpha", "walks",
                  "cap", "vn", "radii", "excursion", "budget"},
                 "config");
  if (!j.contains("experiment")) throw std::invalid_argument("config: 'experiment' is required");
  RunConfig c;
  c.kind = parse_experiment_kind(j.at("experiment").get<std::string>());
  c.seed = get<std::uint64_t>(j, "seed", c.seed);
  c.replicas = get<std::uint32_t>(j, "replicas", c.replicas);
  c.threads = get<std::uint32_t>(j, "threads", c.threads);
  c.output = get<std::string>(j, "output", c.output);
  if (j.contains("checkpoints")) c.checkpoints = count_schedule(j.at("checkpoints"), "checkpoints");
  c.k_values = get<std::vector<std::uint32_t>>(j, "k", {});
  c.alphas = get<std::vector<double>>(j, "alpha", {});
  c.walks = get<std::uint32_t>(j, "walks", c.walks);
  c.cap = get<std::uint32_t>(j, "cap", c.cap);
  if (j.contains("vn")) {
    const json& v = j.at("vn");
    reject_unknown(v, {"start", "horizon", "per_decade"}, "vn");
    c.vn.start = get<std::uint64_t>(v, "start", c.vn.start);
    c.vn.horizon = get<std::uint64_t>(v, "horizon", c.vn.horizon);
    c.vn.per_decade = get<std::uint32_t>(v, "per_decade", c.vn.per_decade);
  }
  if (j.contains("radii")) c.radii = real_schedule(j.at("radii"), "radii");
  if (j.contains("excursion")) {
    const json& v = j.at("excursion");
    reject_unknown(v, {"m", "a", "beta", "alpha", "center", "inner", "outer", "stop"}, "excursion");
    auto& e = c.excursion;
    e.m = get<int>(v, "m", e.m);
    e.a = get<double>(v, "a", e.a);
    e.beta = get<double>(v, "beta", e.beta);
    e.alpha = get<double>(v, "alpha", e.alpha);
    if (v.contains("center")) {
      const auto xy = v.at("center").get<std::vector<std::int32_t>>();
      if (xy.size() != 2) throw std::invalid_argument("config: excursion center needs two coordinates");
      e.center = {xy[0], xy[1]};
    }
    e.inner = get<double>(v, "inner", e.inner);
    e.outer = get<double>(v, "outer", e.outer);
    e.stop = get<double>(v, "stop", e.stop);
  }
  c.budget = get<std::uint64_t>(j, "budget", c.budget);
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string to_canonical_json(const RunConfig& config) { return to_json(config, true).dump(); }

std::uint64_t config_hash(const RunConfig& config) {
  const std::string s = to_json(config, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
  if (c.replicas == 0) fail("replicas must be positive");
  if (c.threads == 0) fail("threads must be positive");
  if (c.cap == 0 || c.cap > 65535) fail("cap must lie in 1..65535");
  auto increasing = [](const auto& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(v[i - 1] < v[i])) return false;
    return true;
  };
  switch (c.kind) {
    case ExperimentKind::cover:
    case ExperimentKind::cover_k:
    case ExperimentKind::cover_multi:
    case ExperimentKind::origin_radius:
      if (c.checkpoints.empty() || c.checkpoints.front() == 0 || !increasing(c.checkpoints))
        fail("checkpoints must be a nonempty increasing list of positive step counts");
      for (auto k : c.k_values)
        if (k == 0) fail("k values must be positive");
      for (double a : c.alphas)
        if (!(a >= 0)) fail("alpha values must be nonnegative");
      if (c.walks == 0) fail("walks must be positive");
      if (c.kind == ExperimentKind::cover_k && c.k_values.empty() && c.alphas.empty())
        fail("cover_k needs k or alpha values");
      if (c.kind == ExperimentKind::cover_multi && c.walks < 2) fail("cover_multi needs walks >= 2");
      break;
    case ExperimentKind::vn:
      vn_sample_points(c.vn);
      break;
    case ExperimentKind::potential:
      if (c.radii.empty() || !increasing(c.radii) || !(c.radii.front() >= 1))
        fail("potential needs an increasing list of radii >= 1");
      break;
    case ExperimentKind::excursion: {
      const auto& e = c.excursion;
      if (e.m > 0) {
        if (e.m > 5) fail("excursion m above 5 cannot run end to end");
        const int bm = scaled_level(e.beta, e.m);
        if (bm < 3 || bm + 1 > e.m) fail("excursion needs 3 <= floor(beta m) < m");
        if (!(e.a > 0) || !(e.alpha >= 0)) fail("excursion needs a > 0 and alpha >= 0");
      } else if (e.m == 0) {
        if (!(e.inner > 0) || !(e.inner < e.outer)) fail("excursion annulus needs 0 < inner < outer");
        if (!(std::sqrt(static_cast<double>(norm_sq(e.center))) + e.outer < e.stop))
          fail("excursion annulus must lie inside the stop disc");
      } else {
        fail("excursion m must be nonnegative");
      }
      break;
    }
  }
}

}  // namespace walkcover
