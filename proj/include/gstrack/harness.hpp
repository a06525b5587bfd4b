#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gstrack/config.hpp"
#include "gstrack/dynamics.hpp"
#include "gstrack/kalman.hpp"
#include "gstrack/policies.hpp"

namespace gstrack {

inline constexpr int kReportSchemaVersion = 1;

struct StepRecord {
  int t = 0;
  double nmse = 0.0;
  double trace_p_post = 0.0;
  int budget = 0;
  VertexSet vertices;
  int solver_iters = 0;
  double solver_gradnorm = 0.0;
};

struct PolicyTrace {
  PolicyKind policy = PolicyKind::Random;
  std::vector<StepRecord> steps;
  std::vector<SolverDiagnostics> solves;
};

struct RunReport {
  ScenarioConfig config;
  std::vector<PolicyTrace> traces;
  Index base_edge_count = 0;
  std::vector<Index> trajectory;               // sensor: heat-source center per step, t = 0..T
  std::vector<Index> realization_edge_counts;  // social: active RES edges per step, t = 1..T
};

/// ||estimate - truth||^2 / ||truth||^2. Throws std::invalid_argument for a zero truth.
double nmse(const VectorXd& estimate, const VectorXd& truth);

/// Sum of per-step NMSE.
double accumulated_error(const PolicyTrace& trace);
/// Sum of per-step tr(P+).
double accumulated_trace(const PolicyTrace& trace);

/// A fully specified tracking problem: filter model plus the spectral ground
/// truth f_1..f_T (index t-1).
struct TrackingProblem {
  SpectralBasis basis;
  EvolutionModel model;
  SignalPrior prior;
  ObservationNoise noise;
  BudgetParams budget;
  std::vector<VectorXd> truth;
};

/// Runs one policy over the problem. Observation noise is drawn from a stream
/// seeded with `noise_seed`, so policies given the same seed see the same
/// noise realizations.
PolicyTrace track(const TrackingProblem& problem, PolicyKind policy, std::uint64_t noise_seed,
                  std::uint64_t policy_seed, const SolverOptions& solver = {}, bool receding_horizon = false);

RunReport run_sensor_scenario(const ScenarioConfig& cfg);
RunReport run_social_scenario(const ScenarioConfig& cfg);
RunReport run_custom_scenario(const ScenarioConfig& cfg);
RunReport run_scenario(const ScenarioConfig& cfg);

/// Columns: t,policy,nmse,trace_p_post,budget,vertices,solver_iters,solver_gradnorm
void write_trace_csv(const RunReport& report, std::ostream& out);
nlohmann::json summary_json(const RunReport& report);

struct WrittenReport {
  std::string trace_path;
  std::string summary_path;
};

/// Writes <output_dir>/<output_prefix>_trace.csv and _summary.json.
WrittenReport write_report(const RunReport& report);

struct TraceRow {
  int t = 0;
  std::string policy;
  double nmse = 0.0;
};

/// Parses a trace CSV written by write_trace_csv.
std::vector<TraceRow> read_trace_csv(std::istream& in);

/// Wide per-step NMSE table: t,<policy>,<policy>,...
void write_plot_data(const std::vector<TraceRow>& rows, std::ostream& out);

/// Shortest round-trip decimal representation used in every report.
std::string format_double(double v);

}  // namespace gstrack
