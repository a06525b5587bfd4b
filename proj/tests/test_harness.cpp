#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gstrack/config.hpp"
#include "gstrack/harness.hpp"
#include "test_support.hpp"

using namespace gstrack;

namespace {

std::string trace_csv(const RunReport& r) {
  std::ostringstream out;
  write_trace_csv(r, out);
  return out.str();
}

ScenarioConfig small_sensor() {
  ScenarioConfig cfg = sensor_defaults();
  cfg.vertices = 30;
  cfg.avg_budget = 3;
  cfg.step_cap = 6;
  cfg.horizon = 12;
  return cfg;
}

ScenarioConfig small_social() {
  ScenarioConfig cfg = social_defaults();
  cfg.community_sizes.assign(4, 6);
  cfg.avg_budget = 3;
  cfg.step_cap = 6;
  cfg.horizon = 12;
  return cfg;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("gstrack_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("experiment_harness") {

TEST_CASE("nmse") {
  VectorXd truth(3);
  truth << 1.0, -2.0, 0.5;
  CHECK(nmse(truth, truth) == 0.0);
  CHECK(nmse(VectorXd::Zero(3), truth) == doctest::Approx(1.0));
  CHECK(nmse(2.0 * truth, truth) == doctest::Approx(1.0));
  CHECK_THROWS_AS(nmse(truth, VectorXd::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(nmse(VectorXd::Zero(2), truth), std::invalid_argument);
}

TEST_CASE("accumulated error") {
  PolicyTrace zero;
  zero.steps.resize(4);
  CHECK(accumulated_error(zero) == 0.0);
  PolicyTrace half;
  for (int t = 1; t <= 10; ++t) half.steps.push_back(StepRecord{t, 0.5, 2.0, 0, {}, 0, 0.0});
  CHECK(accumulated_error(half) == doctest::Approx(5.0));
  CHECK(accumulated_trace(half) == doctest::Approx(20.0));
}

TEST_CASE("sensor runs are deterministic and records are consistent") {
  ScenarioConfig one = small_sensor();
  one.horizon = 1;
  one.policies = {PolicyKind::Random};
  CHECK(trace_csv(run_sensor_scenario(one)) == trace_csv(run_sensor_scenario(one)));

  const ScenarioConfig cfg = small_sensor();
  const RunReport r = run_scenario(cfg);
  CHECK(trace_csv(r) == trace_csv(run_scenario(cfg)));
  REQUIRE(r.traces.size() == 4);
  CHECK(r.trajectory.size() == static_cast<std::size_t>(cfg.horizon) + 1);
  for (const auto& trace : r.traces) {
    REQUIRE(trace.steps.size() == static_cast<std::size_t>(cfg.horizon));
    for (const auto& s : trace.steps) {
      CHECK(s.budget == static_cast<int>(s.vertices.size()));
      CHECK_NOTHROW(validate_vertex_set(s.vertices, cfg.vertices));
      CHECK(s.nmse >= 0.0);
    }
    if (trace.policy == PolicyKind::Proposed) {
      CHECK(trace.solves.size() == static_cast<std::size_t>((cfg.horizon + 1) / 2));
      for (std::size_t k = 0; k + 1 < trace.steps.size(); k += 2) {
        CHECK(trace.steps[k].budget + trace.steps[k + 1].budget == 2 * cfg.avg_budget);
        CHECK(trace.steps[k].budget <= cfg.step_cap);
      }
    } else {
      for (const auto& s : trace.steps) CHECK(s.budget == cfg.avg_budget);
    }
  }

  ScenarioConfig other_seed = cfg;
  other_seed.seed = 2;
  CHECK(trace_csv(run_scenario(other_seed)) != trace_csv(r));
}

TEST_CASE("near-noiseless full observation tracks exactly") {
  ScenarioConfig cfg = small_sensor();
  cfg.vertices = 15;
  cfg.avg_budget = cfg.step_cap = 15;
  cfg.obs_noise_var = 1e-12;
  cfg.horizon = 6;
  for (const auto& trace : run_scenario(cfg).traces) {
    for (const auto& s : trace.steps) CHECK(s.nmse < 1e-6);
  }
}

TEST_CASE("policies share the truth and noise streams") {
  ScenarioConfig cfg = small_sensor();
  cfg.avg_budget = cfg.step_cap = cfg.vertices;
  cfg.policies = {PolicyKind::Random, PolicyKind::GreedyInstant};
  const RunReport r = run_scenario(cfg);
  // With every vertex sampled, the policy is irrelevant.
  REQUIRE(r.traces.size() == 2);
  for (std::size_t k = 0; k < r.traces[0].steps.size(); ++k) {
    CHECK(r.traces[0].steps[k].nmse == r.traces[1].steps[k].nmse);
  }
}

TEST_CASE("social scenario") {
  const ScenarioConfig cfg = small_social();
  const RunReport r = run_scenario(cfg);
  CHECK(trace_csv(r) == trace_csv(run_scenario(cfg)));
  CHECK(r.realization_edge_counts.size() == static_cast<std::size_t>(cfg.horizon));
  for (Index e : r.realization_edge_counts) CHECK(e <= r.base_edge_count);

  ScenarioConfig identity = cfg;
  identity.social_filter = SocialFilterModel::Identity;
  CHECK_NOTHROW(run_scenario(identity));

  // Wide confidence: opinions collapse to their mean in one step, which the
  // constant prior mean already matches up to the small process noise.
  ScenarioConfig consensus = cfg;
  consensus.kh_confidence = 1.0;
  consensus.horizon = 20;
  for (const auto& trace : run_scenario(consensus).traces) {
    for (const auto& step : trace.steps) CHECK(step.nmse < 0.01);
  }
}

TEST_CASE("custom scenario and receding horizon") {
  ScenarioConfig cfg = custom_defaults();
  cfg.horizon = 8;
  const RunReport r = run_scenario(cfg);
  CHECK(r.traces.size() == 4);

  ScenarioConfig receding = small_sensor();
  receding.receding_horizon = true;
  receding.policies = {PolicyKind::Proposed};
  const RunReport rr = run_scenario(receding);
  const auto& steps = rr.traces[0].steps;
  CHECK(rr.traces[0].solves.size() == steps.size());
  for (std::size_t k = 0; k + 1 < steps.size(); k += 2) {
    CHECK(steps[k].budget + steps[k + 1].budget == 2 * receding.avg_budget);
  }
}

TEST_CASE("report files") {
  ScenarioConfig cfg = small_sensor();
  cfg.horizon = 4;
  cfg.output_dir = scratch_dir("report").string();
  cfg.output_prefix = "unit";
  const RunReport r = run_scenario(cfg);
  const WrittenReport paths = write_report(r);

  std::ifstream trace(paths.trace_path);
  std::string header;
  std::getline(trace, header);
  CHECK(header == "t,policy,nmse,trace_p_post,budget,vertices,solver_iters,solver_gradnorm");
  trace.seekg(0);
  const auto rows = read_trace_csv(trace);
  CHECK(rows.size() == 16);
  CHECK(rows.front().policy == std::string(policy_label(PolicyKind::Proposed)));

  std::ifstream summary_file(paths.summary_path);
  const nlohmann::json summary = nlohmann::json::parse(summary_file);
  CHECK(summary["schema_version"] == kReportSchemaVersion);
  CHECK(summary["policies"].size() == 4);
  CHECK(summary["policies"][0]["accumulated_nmse"].get<double>() == doctest::Approx(accumulated_error(r.traces[0])));
  CHECK(summary["policies"][0].contains("solver"));
  CHECK(config_from_json(summary["config"]).seed == cfg.seed);

  std::ostringstream plot;
  write_plot_data(rows, plot);
  std::istringstream lines(plot.str());
  std::string first;
  std::getline(lines, first);
  CHECK(first == "t,proposed,greedy-instant[M2-style],info-gain[M1-style],random");
  int count = 0;
  for (std::string line; std::getline(lines, line);) ++count;
  CHECK(count == 4);
  std::filesystem::remove_all(cfg.output_dir);
}

TEST_CASE("trace CSV parsing errors") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_trace_csv(empty), std::runtime_error);
  std::istringstream wrong("a,b,c\n");
  CHECK_THROWS_AS(read_trace_csv(wrong), std::runtime_error);
  std::istringstream bad("t,policy,nmse\n1,random,abc\n");
  CHECK_THROWS_AS(read_trace_csv(bad), std::runtime_error);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789, 0.0}) CHECK(std::stod(format_double(v)) == v);
}

}  // TEST_SUITE

TEST_SUITE("config") {

TEST_CASE("defaults per scenario") {
  const ScenarioConfig sensor = sensor_defaults();
  CHECK(sensor.vertices == 100);
  CHECK(sensor.radius == 0.6);
  CHECK(sensor.process_noise_var == 1e-4);
  CHECK(sensor.obs_noise_var == 1e-3);
  CHECK(sensor.avg_budget == 10);
  CHECK(sensor.step_cap == 20);
  CHECK(sensor.discount == 0.8);
  CHECK(sensor.effective_translation_scale(100) == doctest::Approx(10.0));

  const ScenarioConfig social = social_defaults();
  CHECK(social.vertex_count() == 70);
  CHECK(social.initial_cov_scale == 0.1);
  CHECK(social.obs_noise_var == 1e-4);
  CHECK(social.kh_confidence == 0.3);
  CHECK(social.res_probability == 0.5);
  CHECK(social.horizon == 100);
  CHECK_NOTHROW(validate(custom_defaults()));
}

TEST_CASE("json round trip and overrides") {
  ScenarioConfig cfg = social_defaults();
  cfg.seed = 99;
  cfg.res_diffusion_rate = 0.05;
  cfg.policies = {PolicyKind::Random};
  const ScenarioConfig back = config_from_json(to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));

  const ScenarioConfig switched = config_from_json(nlohmann::json{{"scenario", "social"}, {"horizon", 5}});
  CHECK(switched.kind == ScenarioKind::Social);
  CHECK(switched.horizon == 5);
  CHECK(switched.initial_cov_scale == 0.1);

  const ScenarioConfig filter = config_from_json(nlohmann::json{{"scenario", "social"}, {"social_filter", "identity"}});
  CHECK(filter.social_filter == SocialFilterModel::Identity);
}

TEST_CASE("config errors name the field") {
  auto message = [](const nlohmann::json& doc) {
    try {
      config_from_json(doc);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message({{"bogus", 1}}).find("bogus") != std::string::npos);
  CHECK(message({{"solver", {{"bogus", 1}}}}).find("bogus") != std::string::npos);
  CHECK(message({{"discount", 1.5}}).find("discount") != std::string::npos);
  CHECK(message({{"horizon", 0}}).find("horizon") != std::string::npos);
  CHECK(message({{"avg_budget", 30}, {"step_cap", 20}}).find("step_cap") != std::string::npos);
  CHECK(message({{"obs_noise_var", 0.0}}).find("obs_noise_var") != std::string::npos);
  CHECK(message({{"policies", {"optimal"}}}).find("optimal") != std::string::npos);
  CHECK(message({{"scenario", "weather"}}).find("weather") != std::string::npos);
  CHECK(message({{"social_filter", "kalman"}}).find("social_filter") != std::string::npos);
  CHECK(message({{"radius", "far"}}).find("radius") != std::string::npos);
}

TEST_CASE("config files") {
  try {
    load_config_file("/nonexistent/missing.json");
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent/missing.json") != std::string::npos);
  }
  const auto dir = scratch_dir("config");
  std::filesystem::create_directories(dir);
  const auto path = (dir / "broken.json").string();
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_WITH_AS(load_config_file(path), doctest::Contains("broken.json"), std::runtime_error);
  const auto good = (dir / "good.json").string();
  std::ofstream(good) << R"({"scenario": "custom", "horizon": 7, "seed": 3})";
  const ScenarioConfig cfg = load_config_file(good);
  CHECK(cfg.kind == ScenarioKind::Custom);
  CHECK(cfg.horizon == 7);
  CHECK(cfg.seed == 3);
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
