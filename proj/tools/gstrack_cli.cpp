// gstrack: simulate sampling policies for tracking time-varying graph signals.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gstrack/config.hpp"
#include "gstrack/harness.hpp"

namespace {

using gstrack::ScenarioConfig;

struct Overrides {
  std::optional<int> horizon;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policies;
  std::optional<gstrack::Index> vertices;
  std::optional<double> radius;
  std::optional<double> sigma_v2;
  std::optional<double> sigma_w2;
  std::optional<int> budget;
  std::optional<int> cap;
  std::optional<double> discount;
  std::optional<double> res_probability;
  std::optional<double> kh_confidence;
  std::optional<std::string> social_filter;
  std::optional<double> translation_scale;
  std::optional<double> initial_cov_scale;
  std::optional<int> max_iterations;
  std::optional<std::string> out_dir;
  std::optional<std::string> prefix;
  bool receding = false;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--horizon", o.horizon, "Number of time steps T");
  cmd->add_option("--seed", o.seed, "Master seed (overrides GS_TRACK_SEED and the config file)");
  cmd->add_option("--policies", o.policies, "Comma-separated: proposed,greedy-instant,info-gain,random");
  cmd->add_option("--vertices", o.vertices, "Vertex count (sensor/custom)");
  cmd->add_option("--radius", o.radius, "Geometric graph connection radius");
  cmd->add_option("--sigma-v2", o.sigma_v2, "Process noise variance");
  cmd->add_option("--sigma-w2", o.sigma_w2, "Observation noise variance");
  cmd->add_option("--budget", o.budget, "Average sampling budget M");
  cmd->add_option("--cap", o.cap, "Per-step budget cap M_t");
  cmd->add_option("--discount", o.discount, "Discount factor gamma");
  cmd->add_option("--res-probability", o.res_probability, "Edge activation probability (social)");
  cmd->add_option("--kh-eps", o.kh_confidence, "Bounded-confidence radius (social)");
  cmd->add_option("--social-filter", o.social_filter, "Filter model of the social scenario: res-diffusion | identity");
  cmd->add_option("--translation-scale", o.translation_scale, "Scale of the translation operator (sensor)");
  cmd->add_option("--initial-cov", o.initial_cov_scale, "P+_0 = c I");
  cmd->add_option("--max-iterations", o.max_iterations, "Solver iteration cap");
  cmd->add_option("--out-dir", o.out_dir, "Output directory");
  cmd->add_option("--prefix", o.prefix, "Output file prefix");
  cmd->add_flag("--receding-horizon", o.receding, "Re-plan at even steps with the committed budget");
}

std::vector<gstrack::PolicyKind> parse_policy_list(const std::string& list) {
  std::vector<gstrack::PolicyKind> out;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    const auto kind = gstrack::parse_policy(name);
    if (!kind) throw std::invalid_argument("unknown policy '" + name + "'");
    out.push_back(*kind);
  }
  return out;
}

void apply_env_seed(ScenarioConfig& cfg) {
  if (const char* env = std::getenv("GS_TRACK_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("GS_TRACK_SEED is not an unsigned integer: '") + env + "'");
    }
  }
}

void apply(const Overrides& o, ScenarioConfig& cfg) {
  apply_env_seed(cfg);
  if (o.horizon) cfg.horizon = *o.horizon;
  if (o.seed) cfg.seed = *o.seed;
  if (o.policies) cfg.policies = parse_policy_list(*o.policies);
  if (o.vertices) cfg.vertices = *o.vertices;
  if (o.radius) cfg.radius = *o.radius;
  if (o.sigma_v2) cfg.process_noise_var = *o.sigma_v2;
  if (o.sigma_w2) cfg.obs_noise_var = *o.sigma_w2;
  if (o.budget) cfg.avg_budget = *o.budget;
  if (o.cap) cfg.step_cap = *o.cap;
  if (o.discount) cfg.discount = *o.discount;
  if (o.res_probability) cfg.res_probability = *o.res_probability;
  if (o.kh_confidence) cfg.kh_confidence = *o.kh_confidence;
  if (o.social_filter) {
    const auto model = gstrack::parse_social_filter(*o.social_filter);
    if (!model) throw std::invalid_argument("unknown social filter model '" + *o.social_filter + "'");
    cfg.social_filter = *model;
  }
  if (o.translation_scale) cfg.translation_scale = *o.translation_scale;
  if (o.initial_cov_scale) cfg.initial_cov_scale = *o.initial_cov_scale;
  if (o.max_iterations) cfg.solver.max_iterations = *o.max_iterations;
  if (o.out_dir) cfg.output_dir = *o.out_dir;
  if (o.prefix) cfg.output_prefix = *o.prefix;
  if (o.receding) cfg.receding_horizon = true;
  gstrack::validate(cfg);
}

void print_summary(const gstrack::RunReport& report, const gstrack::WrittenReport& paths) {
  for (const auto& trace : report.traces) {
    std::cout << gstrack::policy_label(trace.policy) << ": accumulated NMSE "
              << gstrack::format_double(gstrack::accumulated_error(trace)) << '\n';
  }
  std::cout << "wrote " << paths.trace_path << "\nwrote " << paths.summary_path << '\n';
}

int run_one(const ScenarioConfig& cfg) {
  const auto report = gstrack::run_scenario(cfg);
  print_summary(report, gstrack::write_report(report));
  return 0;
}

int run_sweep(ScenarioConfig cfg, int seeds) {
  if (seeds < 1) throw std::invalid_argument("--seeds must be >= 1");
  const std::uint64_t first = cfg.seed;
  const std::string prefix = cfg.output_prefix;
  std::vector<std::uint64_t> seed_list;
  std::vector<std::vector<double>> errors;  // [policy][seed]
  std::vector<gstrack::PolicyKind> kinds = cfg.policies;
  errors.resize(kinds.size());
  for (int k = 0; k < seeds; ++k) {
    cfg.seed = first + static_cast<std::uint64_t>(k);
    cfg.output_prefix = prefix + "_seed" + std::to_string(cfg.seed);
    seed_list.push_back(cfg.seed);
    const auto report = gstrack::run_scenario(cfg);
    const auto paths = gstrack::write_report(report);
    std::cout << "seed " << cfg.seed << ": wrote " << paths.trace_path << '\n';
    for (std::size_t p = 0; p < report.traces.size(); ++p) {
      errors[p].push_back(gstrack::accumulated_error(report.traces[p]));
    }
  }
  const std::string path = cfg.output_dir + "/" + prefix + "_sweep.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "policy";
  for (auto s : seed_list) out << ",seed_" << s;
  out << ",mean\n";
  for (std::size_t p = 0; p < kinds.size(); ++p) {
    out << gstrack::policy_label(kinds[p]);
    double sum = 0.0;
    for (double e : errors[p]) {
      out << ',' << gstrack::format_double(e);
      sum += e;
    }
    out << ',' << gstrack::format_double(sum / static_cast<double>(errors[p].size())) << '\n';
  }
  std::cout << "wrote " << path << '\n';
  return 0;
}

int emit_plot_data(const std::string& report_path, const std::string& out_path) {
  std::ifstream in(report_path);
  if (!in) throw std::runtime_error("cannot open report '" + report_path + "'");
  const auto rows = gstrack::read_trace_csv(in);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
  gstrack::write_plot_data(rows, out);
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampling policy simulator for tracking time-varying graph signals"};
  app.require_subcommand(1);

  Overrides sensor_o, social_o, config_o, sweep_o;
  auto* sensor = app.add_subcommand("run-sensor", "Heat source moving on a geometric sensor network");
  add_overrides(sensor, sensor_o);
  auto* social = app.add_subcommand("run-social", "Opinion dynamics on a random-edge community graph");
  add_overrides(social, social_o);

  std::string config_path;
  auto* from_config = app.add_subcommand("run-config", "Run the scenario described by a JSON config file");
  from_config->add_option("file", config_path, "Config file")->required();
  add_overrides(from_config, config_o);

  int seeds = 1;
  std::string sweep_scenario = "sensor";
  std::string sweep_config;
  auto* sweep = app.add_subcommand("sweep", "Run consecutive seeds and aggregate accumulated errors");
  sweep->add_option("--seeds", seeds, "Number of seeds")->required();
  sweep->add_option("--scenario", sweep_scenario, "sensor | social | custom");
  sweep->add_option("--config", sweep_config, "Config file used as the base");
  add_overrides(sweep, sweep_o);

  std::string report_path, plot_out;
  auto* plot = app.add_subcommand("emit-plot-data", "Pivot a trace CSV into per-step NMSE columns");
  plot->add_option("report", report_path, "Trace CSV")->required();
  plot->add_option("--out", plot_out, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sensor) {
      auto cfg = gstrack::sensor_defaults();
      apply(sensor_o, cfg);
      return run_one(cfg);
    }
    if (*social) {
      auto cfg = gstrack::social_defaults();
      apply(social_o, cfg);
      return run_one(cfg);
    }
    if (*from_config) {
      auto cfg = gstrack::load_config_file(config_path);
      apply(config_o, cfg);
      return run_one(cfg);
    }
    if (*sweep) {
      ScenarioConfig cfg;
      if (!sweep_config.empty()) {
        cfg = gstrack::load_config_file(sweep_config);
      } else {
        const auto kind = gstrack::parse_scenario(sweep_scenario);
        if (!kind) throw std::invalid_argument("unknown scenario '" + sweep_scenario + "'");
        cfg = gstrack::defaults_for(*kind);
      }
      apply(sweep_o, cfg);
      return run_sweep(cfg, seeds);
    }
    if (*plot) return emit_plot_data(report_path, plot_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "gstrack: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gstrack: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
