#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "gstrack/dynamics.hpp"
#include "gstrack/kalman.hpp"
#include "gstrack/optimizer.hpp"

namespace gstrack {

/// Integer budgets and vertex sets for a decision epoch (steps t and t+1).
struct SamplingPlan {
  std::array<int, 2> step_budgets{0, 0};
  std::array<VertexSet, 2> vertex_sets;
};

/// Rounds the relaxed budget of the current step, gives the rest of 2M to the
/// next step, and keeps the vertices with the largest relaxed weights (lowest
/// index first on ties).
SamplingPlan round_and_select(const RelaxedDecision& dec, const BudgetParams& budget);

/// Indices of the `count` largest entries, lowest index first on ties, sorted ascending.
VertexSet top_entries(const VectorXd& weights, int count);

struct ProposedPlan {
  SamplingPlan plan;
  SolveResult solve;
  Prediction prediction;
};

/// Two-step policy: predict, solve the relaxed two-step problem, round.
ProposedPlan policy_proposed(const FilterState& state, const SpectralBasis& basis, const EvolutionModel& model,
                             const ObservationNoise& noise, const BudgetParams& budget, int t,
                             const SolverOptions& options = {});

/// Myopic greedy: adds the vertex that most reduces tr(P+) at the current step.
VertexSet policy_greedy_instant(const Prediction& pred, const SpectralBasis& basis, const ObservationNoise& noise,
                                int budget_per_step);

/// Evolution-blind greedy log-det information gain against the static prior.
VertexSet policy_info_gain(const SpectralBasis& basis, const SignalPrior& prior, const ObservationNoise& noise,
                           int budget_per_step);

/// Uniform sample without replacement.
VertexSet policy_random(Index n, int budget_per_step, Rng& rng);

enum class PolicyKind { Proposed, GreedyInstant, InfoGain, Random };

/// CLI name: proposed | greedy-instant | info-gain | random.
std::string_view policy_name(PolicyKind kind);
/// Report label, marking the baselines as approximations of the cited methods.
std::string_view policy_label(PolicyKind kind);
std::optional<PolicyKind> parse_policy(std::string_view name);

}  // namespace gstrack
