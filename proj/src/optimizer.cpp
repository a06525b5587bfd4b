#include "gstrack/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gstrack/kalman.hpp"

namespace gstrack {

BudgetParams::BudgetParams(int avg_budget, int step_cap, double discount)
    : BudgetParams(avg_budget, step_cap, step_cap, discount) {}

BudgetParams::BudgetParams(int avg_budget, int step_cap, int next_cap, double discount)
    : avg_budget_(avg_budget), step_cap_(step_cap), next_cap_(next_cap), discount_(discount) {
  if (avg_budget < 0) throw std::invalid_argument("BudgetParams: average budget must be >= 0");
  if (step_cap < avg_budget || next_cap < avg_budget) {
    throw std::invalid_argument("BudgetParams: per-step caps must be >= the average budget");
  }
  if (2 * avg_budget > step_cap + next_cap) throw std::invalid_argument("BudgetParams: 2M exceeds M_t + M_{t+1}");
  if (!(discount > 0.0 && discount < 1.0)) throw std::invalid_argument("BudgetParams: discount must lie in (0,1)");
}

void BudgetParams::validate_for(Index n) const {
  if (avg_budget_ > n || step_cap_ > n || next_cap_ > n) {
    throw std::invalid_argument("BudgetParams: budgets exceed the number of vertices");
  }
}

// ---------------------------------------------------------------------------
// Objective and gradient

TwoStepObjective::TwoStepObjective(MatrixXd prior_information, const SpectralBasis& basis,
                                   const EvolutionModel& model, const ObservationNoise& noise,
                                   double discount, int t)
    : prior_information_(std::move(prior_information)),
      eigenvectors_(basis.eigenvectors),
      next_operator_(model.spectral_operator_at(t + 1)),
      process_noise_var_(model.process_noise_var()),
      precision_(noise.precision()),
      discount_(discount) {
  const Index n = basis.size();
  if (prior_information_.rows() != n || prior_information_.cols() != n || model.size() != n) {
    throw std::invalid_argument("TwoStepObjective: dimension mismatch");
  }
  if ((prior_information_ - prior_information_.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, prior_information_.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("TwoStepObjective: prior information is not symmetric");
  }
  if (Eigen::LLT<MatrixXd>(prior_information_).info() != Eigen::Success) {
    throw std::invalid_argument("TwoStepObjective: prior information is not positive definite");
  }
}

TwoStepObjective::Evaluation TwoStepObjective::evaluate(const RelaxedDecision& dec, bool with_gradient) const {
  const Index n = size();
  if (dec.d_now.size() != n || dec.d_next.size() != n) throw std::invalid_argument("TwoStepObjective: decision size mismatch");
  const MatrixXd& v = eigenvectors_;
  const MatrixXd vt = v.transpose();

  MatrixXd current_info = prior_information_;
  current_info.noalias() += precision_ * (vt * dec.d_now.asDiagonal() * v);
  const MatrixXd current_cov = spd_inverse(current_info, "two-step objective: current information");

  MatrixXd next_prior_cov = next_operator_ * current_cov * next_operator_.transpose();
  next_prior_cov.diagonal().array() += process_noise_var_;
  const MatrixXd next_prior_info = spd_inverse(symmetrized(next_prior_cov), "two-step objective: next prior");

  MatrixXd next_info = next_prior_info;
  next_info.noalias() += precision_ * (vt * dec.d_next.asDiagonal() * v);
  const MatrixXd next_cov = spd_inverse(next_info, "two-step objective: next information");

  Evaluation out;
  out.current_cost = current_cov.trace();
  out.next_cost = next_cov.trace();
  out.value = out.current_cost + discount_ * out.next_cost;
  if (!with_gradient) return out;

  // d tr(M^-1) = -tr(M^-1 dM M^-1); every column below is M^-1 applied to a
  // rank-one direction v_i = V^T e_i.
  const MatrixXd current_dirs = current_cov * vt;
  const MatrixXd chained_dirs = next_cov * (next_prior_info * (next_operator_ * current_dirs));
  const MatrixXd next_dirs = next_cov * vt;
  out.grad_now = -precision_ * (current_dirs.colwise().squaredNorm().transpose() +
                                discount_ * chained_dirs.colwise().squaredNorm().transpose());
  out.grad_next = -precision_ * discount_ * next_dirs.colwise().squaredNorm().transpose();
  return out;
}

double two_step_objective(const MatrixXd& prior_information, const RelaxedDecision& dec,
                          const SpectralBasis& basis, const EvolutionModel& model,
                          const ObservationNoise& noise, double discount, int t) {
  return TwoStepObjective(prior_information, basis, model, noise, discount, t).value(dec);
}

std::pair<VectorXd, VectorXd> two_step_gradient(const MatrixXd& prior_information,
                                                const RelaxedDecision& dec, const SpectralBasis& basis,
                                                const EvolutionModel& model, const ObservationNoise& noise,
                                                double discount, int t) {
  auto eval = TwoStepObjective(prior_information, basis, model, noise, discount, t).evaluate(dec, true);
  return {std::move(eval.grad_now), std::move(eval.grad_next)};
}

// ---------------------------------------------------------------------------
// Projection

namespace {

VectorXd project_box(const VectorXd& x) { return x.cwiseMax(0.0).cwiseMin(1.0); }

// Exact projection onto {sum(a) + sum(b) = 2M, sum(a) <= M_t, sum(b) <= M_{t+1}}.
// The constraints only see the block sums, so the projection shifts each block
// uniformly; the optimal target sums solve a one-dimensional clamp, which is
// the closed form of the active-set enumeration over the three constraints.
VectorXd project_budget_polyhedron(const VectorXd& x, Index n, const BudgetParams& budget) {
  const double sum_now = x.head(n).sum();
  const double sum_next = x.tail(n).sum();
  const double total = budget.pair_budget();
  const double lo = total - budget.next_cap();
  const double hi = budget.step_cap();
  const double target_now = std::clamp(0.5 * (total + sum_now - sum_next), lo, hi);
  const double target_next = total - target_now;
  VectorXd y = x;
  y.head(n).array() += (target_now - sum_now) / static_cast<double>(n);
  y.tail(n).array() += (target_next - sum_next) / static_cast<double>(n);
  return y;
}

}  // namespace

ProjectionResult project_feasible_detailed(const VectorXd& d_now, const VectorXd& d_next,
                                           const BudgetParams& budget, const ProjectionOptions& options) {
  const Index n = d_now.size();
  if (d_next.size() != n || n == 0) throw std::invalid_argument("project_feasible: size mismatch");
  budget.validate_for(n);

  VectorXd x(2 * n);
  x << d_now, d_next;
  VectorXd box_correction = VectorXd::Zero(2 * n);
  VectorXd poly_correction = VectorXd::Zero(2 * n);

  ProjectionResult result;
  for (result.sweeps = 1; result.sweeps <= options.max_sweeps; ++result.sweeps) {
    const VectorXd y = project_box(x + box_correction);
    box_correction = x + box_correction - y;
    const VectorXd next = project_budget_polyhedron(y + poly_correction, n, budget);
    poly_correction = y + poly_correction - next;
    const double move = (next - x).norm();
    x = next;
    if (move < options.tolerance && (x - y).norm() < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.sweeps = std::min(result.sweeps, options.max_sweeps);
  x = project_box(x);
  result.decision = RelaxedDecision{x.head(n), x.tail(n)};
  return result;
}

RelaxedDecision project_feasible(const VectorXd& d_now, const VectorXd& d_next, const BudgetParams& budget) {
  return project_feasible_detailed(d_now, d_next, budget).decision;
}

// ---------------------------------------------------------------------------
// Solver

namespace {

VectorXd stack(const RelaxedDecision& dec) {
  VectorXd x(dec.d_now.size() * 2);
  x << dec.d_now, dec.d_next;
  return x;
}

constexpr double kMinStep = 1e-12;
constexpr double kMaxStep = 1e12;

RelaxedDecision project_stacked(const VectorXd& x, Index n, const BudgetParams& budget) {
  return project_feasible(x.head(n), x.tail(n), budget);
}

}  // namespace

SolveResult solve_relaxed(const TwoStepObjective& objective, const BudgetParams& budget,
                          const SolverOptions& options) {
  const Index n = objective.size();
  budget.validate_for(n);
  const double uniform = static_cast<double>(budget.avg_budget()) / static_cast<double>(n);
  RelaxedDecision current{VectorXd::Constant(n, uniform), VectorXd::Constant(n, uniform)};

  SolveResult result;
  auto eval = objective.evaluate(current, true);
  result.diagnostics.objective_trace.push_back(eval.value);

  double trial_step = options.initial_step;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const VectorXd x = stack(current);
    VectorXd grad(2 * n);
    grad << eval.grad_now, eval.grad_next;

    const VectorXd projected_unit = stack(project_stacked(x - grad, n, budget));
    result.diagnostics.gradient_norm = (x - projected_unit).norm();
    result.diagnostics.iterations = iter;
    if (result.diagnostics.gradient_norm < options.tolerance) {
      result.diagnostics.converged = true;
      break;
    }

    double step = trial_step;
    bool accepted = false;
    for (int bt = 0; bt < options.max_backtracks; ++bt, step *= options.shrink) {
      RelaxedDecision trial = project_stacked(x - step * grad, n, budget);
      const VectorXd delta = stack(trial) - x;
      if (delta.squaredNorm() == 0.0) break;
      const double trial_value = objective.value(trial);
      if (trial_value <= eval.value + options.armijo * grad.dot(delta)) {
        current = std::move(trial);
        eval = objective.evaluate(current, true);
        accepted = true;
        // Barzilai-Borwein step for the next trial.
        VectorXd new_grad(2 * n);
        new_grad << eval.grad_now, eval.grad_next;
        const double curvature = delta.dot(new_grad - grad);
        trial_step = curvature > 0.0 ? std::clamp(delta.squaredNorm() / curvature, kMinStep, kMaxStep)
                                     : options.initial_step;
        break;
      }
    }
    // No descent along the projection arc at working precision.
    if (!accepted) break;
    result.diagnostics.objective_trace.push_back(eval.value);
    result.diagnostics.iterations = iter + 1;
  }
  result.decision = std::move(current);
  return result;
}

}  // namespace gstrack
