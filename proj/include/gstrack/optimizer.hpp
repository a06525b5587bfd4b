#pragma once

#include <vector>

#include "gstrack/dynamics.hpp"
#include "gstrack/graph.hpp"

namespace gstrack {

/// Relaxed sampling vectors for the current and the next step, entries in [0,1].
struct RelaxedDecision {
  VectorXd d_now;
  VectorXd d_next;
};

/// Average budget M, per-step caps (M_t, M_{t+1}) and discount gamma.
class BudgetParams {
 public:
  /// Caps for both steps equal `step_cap`.
  BudgetParams(int avg_budget, int step_cap, double discount);
  BudgetParams(int avg_budget, int step_cap, int next_cap, double discount);

  int avg_budget() const { return avg_budget_; }
  int step_cap() const { return step_cap_; }
  int next_cap() const { return next_cap_; }
  double discount() const { return discount_; }
  /// 2M, the joint budget of a decision epoch.
  int pair_budget() const { return 2 * avg_budget_; }

  /// Throws std::invalid_argument unless M <= caps <= n.
  void validate_for(Index n) const;

 private:
  int avg_budget_;
  int step_cap_;
  int next_cap_;
  double discount_;
};

/// Two-step truncated cost at step t,
///   tr(A(d_now)^-1) + gamma tr((f_t(P_inv, d_now) + sigma_w^-2 V^T diag(d_next) V)^-1),
/// with A(d) = P_inv + sigma_w^-2 V^T diag(d) V and f_t the information transition.
class TwoStepObjective {
 public:
  struct Evaluation {
    double value = 0.0;
    double current_cost = 0.0;
    double next_cost = 0.0;
    VectorXd grad_now;   // empty unless requested
    VectorXd grad_next;  // empty unless requested
  };

  /// Throws std::invalid_argument if `prior_information` is not SPD or sizes differ.
  TwoStepObjective(MatrixXd prior_information, const SpectralBasis& basis, const EvolutionModel& model,
                   const ObservationNoise& noise, double discount, int t);

  Evaluation evaluate(const RelaxedDecision& dec, bool with_gradient) const;
  double value(const RelaxedDecision& dec) const { return evaluate(dec, false).value; }

  Index size() const { return prior_information_.rows(); }
  double discount() const { return discount_; }

 private:
  MatrixXd prior_information_;
  MatrixXd eigenvectors_;
  MatrixXd next_operator_;
  double process_noise_var_;
  double precision_;
  double discount_;
};

double two_step_objective(const MatrixXd& prior_information, const RelaxedDecision& dec,
                          const SpectralBasis& basis, const EvolutionModel& model,
                          const ObservationNoise& noise, double discount, int t);

/// Analytic gradient of two_step_objective with respect to (d_now, d_next).
std::pair<VectorXd, VectorXd> two_step_gradient(const MatrixXd& prior_information,
                                                const RelaxedDecision& dec, const SpectralBasis& basis,
                                                const EvolutionModel& model, const ObservationNoise& noise,
                                                double discount, int t);

struct ProjectionOptions {
  double tolerance = 1e-9;
  int max_sweeps = 500;
};

struct ProjectionResult {
  RelaxedDecision decision;
  int sweeps = 0;
  bool converged = false;
};

/// Euclidean projection onto
///   [0,1]^{2n} ∩ {sum(d_now) + sum(d_next) = 2M, sum(d_now) <= M_t, sum(d_next) <= M_{t+1}}
/// by Dykstra's alternating projections between the box and the budget polyhedron.
ProjectionResult project_feasible_detailed(const VectorXd& d_now, const VectorXd& d_next,
                                           const BudgetParams& budget, const ProjectionOptions& options = {});

RelaxedDecision project_feasible(const VectorXd& d_now, const VectorXd& d_next, const BudgetParams& budget);

struct SolverOptions {
  double armijo = 1e-4;
  double shrink = 0.5;
  double initial_step = 1.0;
  double tolerance = 1e-6;
  int max_iterations = 2000;
  int max_backtracks = 60;
};

struct SolverDiagnostics {
  int iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
  std::vector<double> objective_trace;  // objective after each accepted step, starting at the initial point
};

struct SolveResult {
  RelaxedDecision decision;
  SolverDiagnostics diagnostics;
};

/// Projected gradient descent with Armijo backtracking along the projection
/// arc, started from the uniform point (M/n) 1 on both steps. Returns the best
/// iterate; `diagnostics.converged` is false if the iteration cap was hit.
SolveResult solve_relaxed(const TwoStepObjective& objective, const BudgetParams& budget,
                          const SolverOptions& options = {});

}  // namespace gstrack
