#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gstrack/optimizer.hpp"
#include "gstrack/policies.hpp"

namespace gstrack {

enum class ScenarioKind { Sensor, Social, Custom };

/// Filter evolution model of the social scenario: identity, or one diffusion
/// step I - rate L_t on the random-edge realization of each step.
enum class SocialFilterModel { Identity, ResDiffusion };

std::string_view scenario_name(ScenarioKind kind);
std::string_view social_filter_name(SocialFilterModel model);
std::optional<SocialFilterModel> parse_social_filter(std::string_view name);
std::optional<ScenarioKind> parse_scenario(std::string_view name);

/// Everything needed to reproduce one run. Defaults depend on the scenario;
/// start from sensor_defaults() / social_defaults() / custom_defaults().
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Sensor;

  // graph
  Index vertices = 100;  // sensor and custom scenarios
  double radius = 0.6;
  std::vector<Index> community_sizes;  // social scenario
  double p_intra = 0.8;
  double p_inter = 0.02;

  // dynamics
  double res_probability = 0.5;
  double kh_confidence = 0.3;
  SocialFilterModel social_filter = SocialFilterModel::ResDiffusion;
  std::optional<double> res_diffusion_rate;  // unset: 1 / (1 + max degree)
  std::optional<double> translation_scale;  // unset: sqrt(n)
  double diffusion_tau = 1.0;               // custom scenario heat kernel
  bool normalize_energy = true;

  // filter
  double process_noise_var = 1e-4;
  double obs_noise_var = 1e-3;
  double initial_cov_scale = 1.0;

  // sampling
  int avg_budget = 10;
  int step_cap = 20;
  double discount = 0.8;
  bool receding_horizon = false;
  SolverOptions solver;

  // run
  int horizon = 1000;
  std::uint64_t seed = 1;
  std::vector<PolicyKind> policies{PolicyKind::Proposed, PolicyKind::GreedyInstant, PolicyKind::InfoGain,
                                   PolicyKind::Random};
  std::string output_dir = "out";
  std::string output_prefix = "run";

  BudgetParams budget() const { return BudgetParams(avg_budget, step_cap, discount); }
  double effective_translation_scale(Index n) const;
  Index vertex_count() const;
};

ScenarioConfig sensor_defaults();
ScenarioConfig social_defaults();
ScenarioConfig custom_defaults();
ScenarioConfig defaults_for(ScenarioKind kind);

/// Throws std::invalid_argument naming the offending field.
void validate(const ScenarioConfig& cfg);

/// Applies the keys of `doc` on top of `base`. Unknown keys are errors. If
/// `doc` names a scenario, the defaults of that scenario are the base instead.
ScenarioConfig config_from_json(const nlohmann::json& doc, const ScenarioConfig& base);
ScenarioConfig config_from_json(const nlohmann::json& doc);

/// Reads a JSON config file. Throws std::runtime_error naming the path if it
/// cannot be opened or parsed.
ScenarioConfig load_config_file(const std::string& path);

nlohmann::json to_json(const ScenarioConfig& cfg);

}  // namespace gstrack
