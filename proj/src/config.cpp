#include "gstrack/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace gstrack {

using nlohmann::json;

std::string_view scenario_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Sensor: return "sensor";
    case ScenarioKind::Social: return "social";
    case ScenarioKind::Custom: return "custom";
  }
  return "unknown";
}

std::optional<ScenarioKind> parse_scenario(std::string_view name) {
  for (ScenarioKind k : {ScenarioKind::Sensor, ScenarioKind::Social, ScenarioKind::Custom}) {
    if (name == scenario_name(k)) return k;
  }
  return std::nullopt;
}

std::string_view social_filter_name(SocialFilterModel model) {
  return model == SocialFilterModel::Identity ? "identity" : "res-diffusion";
}

std::optional<SocialFilterModel> parse_social_filter(std::string_view name) {
  if (name == "identity") return SocialFilterModel::Identity;
  if (name == "res-diffusion") return SocialFilterModel::ResDiffusion;
  return std::nullopt;
}

double ScenarioConfig::effective_translation_scale(Index n) const {
  return translation_scale.value_or(std::sqrt(static_cast<double>(n)));
}

Index ScenarioConfig::vertex_count() const {
  if (kind != ScenarioKind::Social) return vertices;
  Index n = 0;
  for (Index s : community_sizes) n += s;
  return n;
}

ScenarioConfig sensor_defaults() { return ScenarioConfig{}; }

ScenarioConfig social_defaults() {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::Social;
  cfg.community_sizes.assign(7, 10);
  cfg.obs_noise_var = 1e-4;
  cfg.initial_cov_scale = 0.1;
  cfg.horizon = 100;
  return cfg;
}

ScenarioConfig custom_defaults() {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::Custom;
  cfg.vertices = 30;
  cfg.normalize_energy = false;
  cfg.avg_budget = 3;
  cfg.step_cap = 6;
  cfg.horizon = 100;
  return cfg;
}

ScenarioConfig defaults_for(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Sensor: return sensor_defaults();
    case ScenarioKind::Social: return social_defaults();
    case ScenarioKind::Custom: return custom_defaults();
  }
  return sensor_defaults();
}

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw std::invalid_argument("config field '" + field + "': " + what);
}

}  // namespace

void validate(const ScenarioConfig& cfg) {
  const Index n = cfg.vertex_count();
  require(n >= 1, cfg.kind == ScenarioKind::Social ? "community_sizes" : "vertices", "need at least one vertex");
  for (Index s : cfg.community_sizes) require(s >= 0, "community_sizes", "sizes must be >= 0");
  require(cfg.radius >= 0.0, "radius", "must be >= 0");
  require(cfg.p_intra >= 0.0 && cfg.p_intra <= 1.0, "p_intra", "must lie in [0,1]");
  require(cfg.p_inter >= 0.0 && cfg.p_inter <= 1.0, "p_inter", "must lie in [0,1]");
  require(cfg.res_probability >= 0.0 && cfg.res_probability <= 1.0, "res_probability", "must lie in [0,1]");
  require(cfg.kh_confidence >= 0.0, "kh_confidence", "must be >= 0");
  require(!cfg.res_diffusion_rate || *cfg.res_diffusion_rate >= 0.0, "res_diffusion_rate", "must be >= 0");
  require(!cfg.translation_scale || *cfg.translation_scale > 0.0, "translation_scale", "must be > 0");
  require(cfg.diffusion_tau >= 0.0, "diffusion_tau", "must be >= 0");
  require(cfg.process_noise_var > 0.0, "process_noise_var", "must be > 0");
  require(cfg.obs_noise_var > 0.0, "obs_noise_var", "must be > 0");
  require(cfg.initial_cov_scale > 0.0, "initial_cov_scale", "must be > 0");
  require(cfg.avg_budget >= 0 && cfg.avg_budget <= n, "avg_budget", "must lie in [0, n]");
  require(cfg.step_cap >= cfg.avg_budget && cfg.step_cap <= n, "step_cap", "must lie in [avg_budget, n]");
  require(cfg.discount > 0.0 && cfg.discount < 1.0, "discount", "must lie in (0,1)");
  require(cfg.horizon >= 1, "horizon", "must be >= 1");
  require(!cfg.policies.empty(), "policies", "at least one policy required");
  require(cfg.solver.max_iterations >= 0, "solver.max_iterations", "must be >= 0");
  require(cfg.solver.shrink > 0.0 && cfg.solver.shrink < 1.0, "solver.shrink", "must lie in (0,1)");
  require(cfg.solver.initial_step > 0.0, "solver.initial_step", "must be > 0");
}

namespace {

template <typename T>
void read(const json& doc, const char* key, T& out) {
  if (auto it = doc.find(key); it != doc.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string("config field '") + key + "': " + e.what());
    }
  }
}

// Absent keeps the base value, null resets to "automatic".
void read_optional(const json& doc, const char* key, std::optional<double>& out) {
  if (auto it = doc.find(key); it != doc.end()) {
    if (it->is_null()) {
      out.reset();
    } else {
      double value = 0.0;
      read(doc, key, value);
      out = value;
    }
  }
}

void check_keys(const json& doc, const std::set<std::string>& allowed, const std::string& where) {
  if (!doc.is_object()) throw std::invalid_argument(where + " must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!allowed.count(key)) throw std::invalid_argument("unknown config key '" + key + "' in " + where);
  }
}

const std::set<std::string> kTopLevelKeys = {
    "scenario",          "vertices",           "radius",            "community_sizes",   "p_intra",
    "p_inter",           "res_probability",    "kh_confidence",     "social_filter",     "res_diffusion_rate",
    "translation_scale", "diffusion_tau",      "normalize_energy",  "process_noise_var", "obs_noise_var",
    "initial_cov_scale", "avg_budget",         "step_cap",          "discount",          "receding_horizon",
    "solver",            "horizon",            "seed",              "policies",          "output_dir",
    "output_prefix",     "schema_version"};

const std::set<std::string> kSolverKeys = {"armijo", "shrink", "initial_step", "tolerance", "max_iterations",
                                           "max_backtracks"};

}  // namespace

ScenarioConfig config_from_json(const nlohmann::json& doc, const ScenarioConfig& base) {
  check_keys(doc, kTopLevelKeys, "config");
  ScenarioConfig cfg = base;
  if (auto it = doc.find("scenario"); it != doc.end()) {
    const auto kind = parse_scenario(it->get<std::string>());
    if (!kind) throw std::invalid_argument("config field 'scenario': unknown scenario '" + it->get<std::string>() + "'");
    if (*kind != base.kind) cfg = defaults_for(*kind);
  }
  read(doc, "vertices", cfg.vertices);
  read(doc, "radius", cfg.radius);
  read(doc, "community_sizes", cfg.community_sizes);
  read(doc, "p_intra", cfg.p_intra);
  read(doc, "p_inter", cfg.p_inter);
  read(doc, "res_probability", cfg.res_probability);
  read(doc, "kh_confidence", cfg.kh_confidence);
  if (auto it = doc.find("social_filter"); it != doc.end()) {
    const auto name = it->get<std::string>();
    const auto model = parse_social_filter(name);
    if (!model) throw std::invalid_argument("config field 'social_filter': unknown model '" + name + "'");
    cfg.social_filter = *model;
  }
  read_optional(doc, "res_diffusion_rate", cfg.res_diffusion_rate);
  read_optional(doc, "translation_scale", cfg.translation_scale);
  read(doc, "diffusion_tau", cfg.diffusion_tau);
  read(doc, "normalize_energy", cfg.normalize_energy);
  read(doc, "process_noise_var", cfg.process_noise_var);
  read(doc, "obs_noise_var", cfg.obs_noise_var);
  read(doc, "initial_cov_scale", cfg.initial_cov_scale);
  read(doc, "avg_budget", cfg.avg_budget);
  read(doc, "step_cap", cfg.step_cap);
  read(doc, "discount", cfg.discount);
  read(doc, "receding_horizon", cfg.receding_horizon);
  if (auto it = doc.find("solver"); it != doc.end()) {
    check_keys(*it, kSolverKeys, "solver");
    read(*it, "armijo", cfg.solver.armijo);
    read(*it, "shrink", cfg.solver.shrink);
    read(*it, "initial_step", cfg.solver.initial_step);
    read(*it, "tolerance", cfg.solver.tolerance);
    read(*it, "max_iterations", cfg.solver.max_iterations);
    read(*it, "max_backtracks", cfg.solver.max_backtracks);
  }
  read(doc, "horizon", cfg.horizon);
  read(doc, "seed", cfg.seed);
  if (auto it = doc.find("policies"); it != doc.end()) {
    cfg.policies.clear();
    for (const auto& name : it->get<std::vector<std::string>>()) {
      const auto kind = parse_policy(name);
      if (!kind) throw std::invalid_argument("config field 'policies': unknown policy '" + name + "'");
      cfg.policies.push_back(*kind);
    }
  }
  read(doc, "output_dir", cfg.output_dir);
  read(doc, "output_prefix", cfg.output_prefix);
  validate(cfg);
  return cfg;
}

ScenarioConfig config_from_json(const nlohmann::json& doc) { return config_from_json(doc, sensor_defaults()); }

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("cannot parse config file '" + path + "': " + e.what());
  }
  return config_from_json(doc);
}

json to_json(const ScenarioConfig& cfg) {
  json doc;
  doc["scenario"] = scenario_name(cfg.kind);
  doc["vertices"] = cfg.vertices;
  doc["radius"] = cfg.radius;
  doc["community_sizes"] = cfg.community_sizes;
  doc["p_intra"] = cfg.p_intra;
  doc["p_inter"] = cfg.p_inter;
  doc["res_probability"] = cfg.res_probability;
  doc["kh_confidence"] = cfg.kh_confidence;
  doc["social_filter"] = social_filter_name(cfg.social_filter);
  doc["res_diffusion_rate"] = cfg.res_diffusion_rate ? json(*cfg.res_diffusion_rate) : json(nullptr);
  doc["translation_scale"] = cfg.translation_scale ? json(*cfg.translation_scale) : json(nullptr);
  doc["diffusion_tau"] = cfg.diffusion_tau;
  doc["normalize_energy"] = cfg.normalize_energy;
  doc["process_noise_var"] = cfg.process_noise_var;
  doc["obs_noise_var"] = cfg.obs_noise_var;
  doc["initial_cov_scale"] = cfg.initial_cov_scale;
  doc["avg_budget"] = cfg.avg_budget;
  doc["step_cap"] = cfg.step_cap;
  doc["discount"] = cfg.discount;
  doc["receding_horizon"] = cfg.receding_horizon;
  doc["solver"] = {{"armijo", cfg.solver.armijo},
                   {"shrink", cfg.solver.shrink},
                   {"initial_step", cfg.solver.initial_step},
                   {"tolerance", cfg.solver.tolerance},
                   {"max_iterations", cfg.solver.max_iterations},
                   {"max_backtracks", cfg.solver.max_backtracks}};
  doc["horizon"] = cfg.horizon;
  doc["seed"] = cfg.seed;
  std::vector<std::string> names;
  for (PolicyKind k : cfg.policies) names.emplace_back(policy_name(k));
  doc["policies"] = names;
  doc["output_dir"] = cfg.output_dir;
  doc["output_prefix"] = cfg.output_prefix;
  return doc;
}

}  // namespace gstrack
