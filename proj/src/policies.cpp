#include "gstrack/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gstrack {

VertexSet top_entries(const VectorXd& weights, int count) {
  const Index n = weights.size();
  if (count < 0 || count > n) throw std::invalid_argument("top_entries: count out of range");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return weights(a) > weights(b); });
  VertexSet chosen(order.begin(), order.begin() + count);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

SamplingPlan round_and_select(const RelaxedDecision& dec, const BudgetParams& budget) {
  const int total = budget.pair_budget();
  const int lo = std::max(0, total - budget.next_cap());
  const int hi = std::min(budget.step_cap(), total);
  const int now = std::clamp(static_cast<int>(std::lround(dec.d_now.sum())), lo, hi);
  SamplingPlan plan;
  plan.step_budgets = {now, total - now};
  plan.vertex_sets[0] = top_entries(dec.d_now, plan.step_budgets[0]);
  plan.vertex_sets[1] = top_entries(dec.d_next, plan.step_budgets[1]);
  return plan;
}

ProposedPlan policy_proposed(const FilterState& state, const SpectralBasis& basis, const EvolutionModel& model,
                             const ObservationNoise& noise, const BudgetParams& budget, int t,
                             const SolverOptions& options) {
  ProposedPlan out;
  out.prediction = predict(state, model, t);
  const TwoStepObjective objective(spd_inverse(out.prediction.prior_cov, "policy_proposed: prior covariance"), basis,
                                   model, noise, budget.discount(), t);
  out.solve = solve_relaxed(objective, budget, options);
  out.plan = round_and_select(out.solve.decision, budget);
  return out;
}

namespace {

// Greedy over vertices with a rank-one score; `score(info_inverse, v)` is
// maximized, ties going to the lowest index. The information matrix is kept
// as its inverse and updated by Sherman-Morrison after each pick.
template <typename Score>
VertexSet greedy_rank_one(MatrixXd cov, const SpectralBasis& basis, double precision, int budget, Score score) {
  const Index n = basis.size();
  if (budget < 0 || budget > n) throw std::invalid_argument("greedy policy: budget out of range");
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  VertexSet chosen;
  for (int k = 0; k < budget; ++k) {
    Index best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      const VectorXd v = basis.eigenvectors.row(i).transpose();
      const double s = score(cov, v);
      if (s > best_score) {
        best_score = s;
        best = i;
      }
    }
    taken[static_cast<std::size_t>(best)] = true;
    chosen.push_back(best);
    const VectorXd v = basis.eigenvectors.row(best).transpose();
    const VectorXd cv = cov * v;
    cov -= (precision / (1.0 + precision * v.dot(cv))) * cv * cv.transpose();
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

VertexSet policy_greedy_instant(const Prediction& pred, const SpectralBasis& basis, const ObservationNoise& noise,
                                int budget_per_step) {
  const double s = noise.precision();
  // Trace reduction of adding vertex v: s |P v|^2 / (1 + s v^T P v).
  return greedy_rank_one(pred.prior_cov, basis, s, budget_per_step, [s](const MatrixXd& cov, const VectorXd& v) {
    const VectorXd cv = cov * v;
    return s * cv.squaredNorm() / (1.0 + s * v.dot(cv));
  });
}

VertexSet policy_info_gain(const SpectralBasis& basis, const SignalPrior& prior, const ObservationNoise& noise,
                           int budget_per_step) {
  prior.validate();
  const double s = noise.precision();
  // Log-det gain of adding vertex v: log(1 + s v^T P v).
  return greedy_rank_one(MatrixXd(prior.covariance_diag.asDiagonal()), basis, s, budget_per_step,
                         [s](const MatrixXd& cov, const VectorXd& v) { return std::log1p(s * v.dot(cov * v)); });
}

VertexSet policy_random(Index n, int budget_per_step, Rng& rng) {
  if (budget_per_step < 0 || budget_per_step > n) throw std::invalid_argument("policy_random: budget out of range");
  std::vector<Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Index{0});
  // Partial Fisher-Yates.
  for (int k = 0; k < budget_per_step; ++k) {
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(k), all.size() - 1);
    std::swap(all[static_cast<std::size_t>(k)], all[pick(rng)]);
  }
  VertexSet chosen(all.begin(), all.begin() + budget_per_step);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Proposed: return "proposed";
    case PolicyKind::GreedyInstant: return "greedy-instant";
    case PolicyKind::InfoGain: return "info-gain";
    case PolicyKind::Random: return "random";
  }
  return "unknown";
}

std::string_view policy_label(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Proposed: return "proposed";
    case PolicyKind::GreedyInstant: return "greedy-instant[M2-style]";
    case PolicyKind::InfoGain: return "info-gain[M1-style]";
    case PolicyKind::Random: return "random";
  }
  return "unknown";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  for (PolicyKind k : {PolicyKind::Proposed, PolicyKind::GreedyInstant, PolicyKind::InfoGain, PolicyKind::Random}) {
    if (name == policy_name(k) || name == policy_label(k)) return k;
  }
  return std::nullopt;
}

}  // namespace gstrack
