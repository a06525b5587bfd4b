#pragma once

#include "gstrack/dynamics.hpp"
#include "gstrack/graph.hpp"

namespace gstrack {

/// Posterior (f+, P+) of the spectral-domain Kalman filter at step `time`.
struct FilterState {
  VectorXd posterior_mean;
  MatrixXd posterior_cov;
  int time = 0;
};

/// Prior (f-, P-) for step `time`.
struct Prediction {
  VectorXd prior_mean;
  MatrixXd prior_cov;
  int time = 0;
};

/// f+_0 = mu, P+_0 = diag(sigma_k^2).
FilterState initial_state(const SignalPrior& prior);

/// f- = H_t f+,  P- = H_t P+ H_t^T + sigma_v^2 I.
Prediction predict(const FilterState& state, const EvolutionModel& model, int t);

/// Measurement update for observations `y` taken at `sample_set` (ascending
/// vertex order). The mean uses the gain form, the covariance the information
/// form ((P-)^-1 + sigma_w^-2 V^T D V)^-1. An empty set returns the prior.
FilterState update(const Prediction& pred, const VectorXd& y, const VertexSet& sample_set,
                   const SpectralBasis& basis, const ObservationNoise& noise);

/// tr(P+), the immediate cost of the decision process.
double instant_mse(const FilterState& state);

/// Information contributed by a (possibly fractional) sampling vector d:
/// sigma_w^-2 V^T diag(d) V.
MatrixXd sampling_information(const SpectralBasis& basis, const VectorXd& d, double precision);

/// State transition of the decision process. Maps the prior information
/// (P-_t)^-1 and action d at step t to (P-_{t+1})^-1, propagating with H_{t+1}:
///   [H_{t+1} (P_inv + sigma_w^-2 V^T diag(d) V)^-1 H_{t+1}^T + sigma_v^2 I]^-1
MatrixXd transition_information(const MatrixXd& prior_information, const VectorXd& d,
                                const SpectralBasis& basis, const EvolutionModel& model,
                                const ObservationNoise& noise, int t);

/// Inverse of a symmetric positive-definite matrix through a Cholesky
/// factorization, symmetrized. Throws std::runtime_error naming `what` if the
/// factorization fails.
MatrixXd spd_inverse(const MatrixXd& m, const char* what);

/// (m + m^T) / 2
MatrixXd symmetrized(const MatrixXd& m);

}  // namespace gstrack
