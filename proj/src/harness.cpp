#include "gstrack/harness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gstrack {

double nmse(const VectorXd& estimate, const VectorXd& truth) {
  if (estimate.size() != truth.size()) throw std::invalid_argument("nmse: dimension mismatch");
  const double energy = truth.squaredNorm();
  if (energy == 0.0) throw std::invalid_argument("nmse: truth has zero norm");
  return (estimate - truth).squaredNorm() / energy;
}

double accumulated_error(const PolicyTrace& trace) {
  double sum = 0.0;
  for (const auto& s : trace.steps) sum += s.nmse;
  return sum;
}

double accumulated_trace(const PolicyTrace& trace) {
  double sum = 0.0;
  for (const auto& s : trace.steps) sum += s.trace_p_post;
  return sum;
}

PolicyTrace track(const TrackingProblem& problem, PolicyKind policy, std::uint64_t noise_seed,
                  std::uint64_t policy_seed, const SolverOptions& solver, bool receding_horizon) {
  const Index n = problem.basis.size();
  const BudgetParams& budget = problem.budget;
  budget.validate_for(n);
  Rng noise_rng(noise_seed);
  Rng policy_rng(policy_seed);

  PolicyTrace trace;
  trace.policy = policy;
  FilterState state = initial_state(problem.prior);
  const VertexSet static_set = policy == PolicyKind::InfoGain
                                   ? policy_info_gain(problem.basis, problem.prior, problem.noise, budget.avg_budget())
                                   : VertexSet{};
  VertexSet pending_set;
  int pending_budget = 0;

  const int horizon = static_cast<int>(problem.truth.size());
  for (int t = 1; t <= horizon; ++t) {
    StepRecord rec;
    rec.t = t;
    Prediction pred;
    switch (policy) {
      case PolicyKind::Proposed: {
        if (t % 2 == 1) {
          ProposedPlan out = policy_proposed(state, problem.basis, problem.model, problem.noise, budget, t, solver);
          pred = std::move(out.prediction);
          rec.vertices = out.plan.vertex_sets[0];
          pending_set = out.plan.vertex_sets[1];
          pending_budget = out.plan.step_budgets[1];
          rec.solver_iters = out.solve.diagnostics.iterations;
          rec.solver_gradnorm = out.solve.diagnostics.gradient_norm;
          trace.solves.push_back(std::move(out.solve.diagnostics));
        } else if (receding_horizon) {
          // Re-plan with the committed budget of this step.
          ProposedPlan out = policy_proposed(state, problem.basis, problem.model, problem.noise, budget, t, solver);
          pred = std::move(out.prediction);
          rec.vertices = top_entries(out.solve.decision.d_now, pending_budget);
          rec.solver_iters = out.solve.diagnostics.iterations;
          rec.solver_gradnorm = out.solve.diagnostics.gradient_norm;
          trace.solves.push_back(std::move(out.solve.diagnostics));
        } else {
          pred = predict(state, problem.model, t);
          rec.vertices = pending_set;
        }
        break;
      }
      case PolicyKind::GreedyInstant:
        pred = predict(state, problem.model, t);
        rec.vertices = policy_greedy_instant(pred, problem.basis, problem.noise, budget.avg_budget());
        break;
      case PolicyKind::InfoGain:
        pred = predict(state, problem.model, t);
        rec.vertices = static_set;
        break;
      case PolicyKind::Random:
        pred = predict(state, problem.model, t);
        rec.vertices = policy_random(n, budget.avg_budget(), policy_rng);
        break;
    }

    const VectorXd& truth = problem.truth[static_cast<std::size_t>(t - 1)];
    const VectorXd y = observe(igft(problem.basis, truth), rec.vertices, problem.noise, noise_rng);
    state = update(pred, y, rec.vertices, problem.basis, problem.noise);
    rec.nmse = nmse(state.posterior_mean, truth);
    rec.trace_p_post = instant_mse(state);
    rec.budget = static_cast<int>(rec.vertices.size());
    trace.steps.push_back(std::move(rec));
  }
  return trace;
}

namespace {

VectorXd draw_gaussian(const VectorXd& mean, const VectorXd& variances, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd out(mean.size());
  for (Index k = 0; k < out.size(); ++k) out(k) = mean(k) + std::sqrt(variances(k)) * gauss(rng);
  return out;
}

void run_policies(const TrackingProblem& problem, const ScenarioConfig& cfg, RunReport& report) {
  const std::uint64_t noise_seed = derive_seed(cfg.seed, "observation");
  for (PolicyKind kind : cfg.policies) {
    const std::uint64_t policy_seed = derive_seed(cfg.seed, std::string("policy:") + std::string(policy_name(kind)));
    report.traces.push_back(track(problem, kind, noise_seed, policy_seed, cfg.solver, cfg.receding_horizon));
  }
}

}  // namespace

RunReport run_sensor_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  RunReport report;
  report.config = cfg;
  const Index n = cfg.vertices;

  Rng graph_rng = make_stream(cfg.seed, "graph");
  const WeightedGraph graph = connected_geometric_graph(n, cfg.radius, graph_rng);
  report.base_edge_count = graph.edge_count();
  SpectralBasis basis = spectral_decompose(build_laplacian(graph));

  // One extra step so the look-ahead operator exists at t = T.
  Rng trajectory_rng = make_stream(cfg.seed, "trajectory");
  const Index start = std::uniform_int_distribution<Index>(0, n - 1)(trajectory_rng);
  const std::vector<Index> path = heat_source_trajectory(graph, start, cfg.horizon + 1, trajectory_rng);
  report.trajectory.assign(path.begin(), path.end() - 1);

  const double scale = cfg.effective_translation_scale(n);
  EvolutionModel model(
      n,
      [basis, path, scale](int t) {
        const auto idx = static_cast<std::size_t>(std::clamp<int>(t, 0, static_cast<int>(path.size()) - 1));
        return translation_operator(basis, path[idx], scale);
      },
      cfg.process_noise_var);

  SignalPrior prior{VectorXd::Ones(n), VectorXd::Constant(n, cfg.initial_cov_scale)};

  Rng truth_rng = make_stream(cfg.seed, "truth");
  std::vector<VectorXd> truth;
  VectorXd current = draw_gaussian(prior.mean, prior.covariance_diag, truth_rng);
  for (int t = 1; t <= cfg.horizon; ++t) {
    current = evolve(current, model, t, truth_rng, cfg.normalize_energy);
    truth.push_back(current);
  }

  TrackingProblem problem{std::move(basis), std::move(model), std::move(prior), ObservationNoise(cfg.obs_noise_var),
                          cfg.budget(), std::move(truth)};
  run_policies(problem, cfg, report);
  return report;
}

RunReport run_social_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  RunReport report;
  report.config = cfg;

  Rng graph_rng = make_stream(cfg.seed, "graph");
  const WeightedGraph graph = community_graph(cfg.community_sizes, cfg.p_intra, cfg.p_inter, graph_rng);
  const Index n = graph.size();
  report.base_edge_count = graph.edge_count();
  SpectralBasis basis = spectral_decompose(build_laplacian(graph));

  // Latent opinions follow the bounded-confidence model; the tracked signal is
  // their unit-energy rescaling.
  auto as_signal = [&](const VectorXd& opinions) {
    if (!cfg.normalize_energy) return opinions;
    const double norm = opinions.norm();
    if (norm == 0.0) throw std::runtime_error("social scenario: opinions collapsed to zero");
    return VectorXd(opinions / norm);
  };

  Rng truth_rng = make_stream(cfg.seed, "truth");
  Rng res_rng = make_stream(cfg.seed, "res");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sigma_v = std::sqrt(cfg.process_noise_var);

  VectorXd opinions(n);
  for (Index i = 0; i < n; ++i) opinions(i) = unit(truth_rng);
  // Realizations for t = 1..T+1; the last one only feeds the look-ahead at t = T.
  std::vector<MatrixXd> operators;
  const double rate = cfg.res_diffusion_rate.value_or(1.0 / (1.0 + max_degree(graph)));
  for (int t = 1; t <= cfg.horizon + 1; ++t) {
    const WeightedGraph active = res_realize(graph, cfg.res_probability, res_rng);
    if (t <= cfg.horizon) report.realization_edge_counts.push_back(active.edge_count());
    if (cfg.social_filter == SocialFilterModel::ResDiffusion) {
      operators.push_back(res_diffusion_operator(basis, active, rate));
    }
  }

  std::vector<VectorXd> truth;
  for (int t = 1; t <= cfg.horizon; ++t) {
    opinions = kh_step(opinions, cfg.kh_confidence);
    for (Index i = 0; i < n; ++i) opinions(i) += sigma_v * gauss(truth_rng);
    truth.push_back(gft(basis, as_signal(opinions)));
  }

  SignalPrior prior{gft(basis, as_signal(VectorXd::Constant(n, 0.5))), VectorXd::Constant(n, cfg.initial_cov_scale)};
  EvolutionModel model = cfg.social_filter == SocialFilterModel::Identity
                             ? EvolutionModel::identity(n, cfg.process_noise_var)
                             : EvolutionModel(
                                   n,
                                   [operators = std::move(operators)](int t) {
                                     const int last = static_cast<int>(operators.size());
                                     return operators[static_cast<std::size_t>(std::clamp(t, 1, last) - 1)];
                                   },
                                   cfg.process_noise_var);
  TrackingProblem problem{std::move(basis), std::move(model), std::move(prior),
                          ObservationNoise(cfg.obs_noise_var), cfg.budget(), std::move(truth)};
  run_policies(problem, cfg, report);
  return report;
}

RunReport run_custom_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  RunReport report;
  report.config = cfg;
  const Index n = cfg.vertices;

  Rng graph_rng = make_stream(cfg.seed, "graph");
  const WeightedGraph graph = connected_geometric_graph(n, cfg.radius, graph_rng);
  report.base_edge_count = graph.edge_count();
  SpectralBasis basis = spectral_decompose(build_laplacian(graph));

  // Heat-kernel diffusion exp(-tau L), diagonal in the spectral domain.
  const MatrixXd heat = (-cfg.diffusion_tau * basis.eigenvalues).array().exp().matrix().asDiagonal();
  EvolutionModel model(n, [heat](int) { return heat; }, cfg.process_noise_var);
  SignalPrior prior{VectorXd::Ones(n), VectorXd::Constant(n, cfg.initial_cov_scale)};

  Rng truth_rng = make_stream(cfg.seed, "truth");
  std::vector<VectorXd> truth;
  VectorXd current = draw_gaussian(prior.mean, prior.covariance_diag, truth_rng);
  for (int t = 1; t <= cfg.horizon; ++t) {
    current = evolve(current, model, t, truth_rng, cfg.normalize_energy);
    truth.push_back(current);
  }

  TrackingProblem problem{std::move(basis), std::move(model), std::move(prior), ObservationNoise(cfg.obs_noise_var),
                          cfg.budget(), std::move(truth)};
  run_policies(problem, cfg, report);
  return report;
}

RunReport run_scenario(const ScenarioConfig& cfg) {
  switch (cfg.kind) {
    case ScenarioKind::Sensor: return run_sensor_scenario(cfg);
    case ScenarioKind::Social: return run_social_scenario(cfg);
    case ScenarioKind::Custom: return run_custom_scenario(cfg);
  }
  throw std::invalid_argument("run_scenario: unknown scenario kind");
}

}  // namespace gstrack
