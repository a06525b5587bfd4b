#pragma once

#include <functional>

#include "gstrack/graph.hpp"
#include "gstrack/rng.hpp"

namespace gstrack {

/// Gaussian prior on the spectral coefficients: mean and diagonal covariance.
struct SignalPrior {
  VectorXd mean;
  VectorXd covariance_diag;

  /// Throws std::invalid_argument on size mismatch or negative variances.
  void validate() const;
};

/// Linear spectral evolution  f_t = H_t f_{t-1} + v_t,  v_t ~ N(0, sigma_v^2 I).
class EvolutionModel {
 public:
  using OperatorFn = std::function<MatrixXd(int t)>;

  EvolutionModel(Index n, OperatorFn spectral_operator, double process_noise_var);

  /// H_t = I for every t.
  static EvolutionModel identity(Index n, double process_noise_var);

  /// Throws std::invalid_argument if the operator returned for `t` is not n x n.
  MatrixXd spectral_operator_at(int t) const;
  double process_noise_var() const { return process_noise_var_; }
  Index size() const { return n_; }

 private:
  Index n_;
  OperatorFn op_;
  double process_noise_var_;
};

/// Observation noise variance sigma_w^2. Strictly positive: the filter update
/// divides by it.
class ObservationNoise {
 public:
  explicit ObservationNoise(double variance);
  double variance() const { return variance_; }
  double precision() const { return 1.0 / variance_; }

 private:
  double variance_;
};

/// diag(scale * V^T delta_center).
MatrixXd translation_operator(const SpectralBasis& basis, Index center, double scale = 1.0);

/// V^T (I - rate L(active)) V: one diffusion step on a graph realization,
/// expressed in the (fixed) spectral basis of the underlying graph.
MatrixXd res_diffusion_operator(const SpectralBasis& basis, const WeightedGraph& active, double rate);

/// Largest weighted degree.
double max_degree(const WeightedGraph& g);

/// One bounded-confidence (Krause-Hegselmann) averaging step. The confidence
/// set of vertex i is every vertex j with |f_i - f_j| <= eps.
VectorXd kh_step(const VectorXd& opinions, double eps);

/// H_t f + xi, xi ~ N(0, sigma_v^2 I), optionally rescaled to unit norm.
VectorXd evolve(const VectorXd& coefficients, const EvolutionModel& model, int t, Rng& rng,
                bool normalize_energy = false);

/// Samples of f + w at `sample_set`, in ascending vertex order. A full
/// length-n noise vector is always drawn so that the stream position does not
/// depend on which vertices were sampled.
VectorXd observe(const VectorXd& signal, const VertexSet& sample_set, const ObservationNoise& noise,
                 Rng& rng);

/// Uniform random walk over neighbors, `steps` moves from `start`. The
/// returned sequence has steps + 1 entries. Isolated vertices keep the walk in
/// place.
std::vector<Index> heat_source_trajectory(const WeightedGraph& g, Index start, Index steps, Rng& rng);

/// Throws std::invalid_argument unless the set is sorted, duplicate-free and
/// within [0, n).
void validate_vertex_set(const VertexSet& set, Index n);

}  // namespace gstrack
