#include "gstrack/kalman.hpp"

#include <stdexcept>
#include <string>

namespace gstrack {

MatrixXd symmetrized(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

MatrixXd spd_inverse(const MatrixXd& m, const char* what) {
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(std::string(what) + ": matrix is not positive definite");
  }
  return symmetrized(llt.solve(MatrixXd::Identity(m.rows(), m.cols())));
}

FilterState initial_state(const SignalPrior& prior) {
  prior.validate();
  return FilterState{prior.mean, prior.covariance_diag.asDiagonal(), 0};
}

Prediction predict(const FilterState& state, const EvolutionModel& model, int t) {
  const Index n = state.posterior_mean.size();
  if (state.posterior_cov.rows() != n || state.posterior_cov.cols() != n || model.size() != n) {
    throw std::invalid_argument("predict: dimension mismatch");
  }
  const MatrixXd h = model.spectral_operator_at(t);
  Prediction pred;
  pred.prior_mean = h * state.posterior_mean;
  pred.prior_cov = h * state.posterior_cov * h.transpose();
  pred.prior_cov.diagonal().array() += model.process_noise_var();
  pred.prior_cov = symmetrized(pred.prior_cov);
  pred.time = t;
  return pred;
}

FilterState update(const Prediction& pred, const VectorXd& y, const VertexSet& sample_set,
                   const SpectralBasis& basis, const ObservationNoise& noise) {
  const Index n = pred.prior_mean.size();
  if (basis.size() != n || pred.prior_cov.rows() != n) throw std::invalid_argument("update: dimension mismatch");
  if (static_cast<Index>(sample_set.size()) != y.size()) {
    throw std::invalid_argument("update: observation count does not match sample set");
  }
  validate_vertex_set(sample_set, n);
  if (sample_set.empty()) return FilterState{pred.prior_mean, pred.prior_cov, pred.time};

  const Index m = y.size();
  // Psi V: sampled rows of the eigenvector matrix.
  MatrixXd sampled_rows(m, n);
  for (Index k = 0; k < m; ++k) sampled_rows.row(k) = basis.eigenvectors.row(sample_set[static_cast<std::size_t>(k)]);

  MatrixXd innovation = sampled_rows * pred.prior_cov * sampled_rows.transpose();
  innovation.diagonal().array() += noise.variance();
  Eigen::LLT<MatrixXd> innovation_llt(symmetrized(innovation));
  if (innovation_llt.info() != Eigen::Success) throw std::runtime_error("update: singular innovation covariance");
  // K = P- V^T Psi^T S^-1, computed as (S^-1 Psi V P-)^T.
  const MatrixXd gain = innovation_llt.solve(sampled_rows * pred.prior_cov).transpose();

  FilterState post;
  post.time = pred.time;
  post.posterior_mean = pred.prior_mean + gain * (y - sampled_rows * pred.prior_mean);
  MatrixXd information = spd_inverse(pred.prior_cov, "update: prior covariance");
  information.noalias() += noise.precision() * sampled_rows.transpose() * sampled_rows;
  post.posterior_cov = spd_inverse(information, "update: posterior information");
  return post;
}

double instant_mse(const FilterState& state) { return state.posterior_cov.trace(); }

MatrixXd sampling_information(const SpectralBasis& basis, const VectorXd& d, double precision) {
  if (d.size() != basis.size()) throw std::invalid_argument("sampling_information: dimension mismatch");
  const MatrixXd& v = basis.eigenvectors;
  return precision * (v.transpose() * d.asDiagonal() * v);
}

MatrixXd transition_information(const MatrixXd& prior_information, const VectorXd& d,
                                const SpectralBasis& basis, const EvolutionModel& model,
                                const ObservationNoise& noise, int t) {
  const Index n = basis.size();
  if (prior_information.rows() != n || prior_information.cols() != n) {
    throw std::invalid_argument("transition_information: dimension mismatch");
  }
  const MatrixXd posterior_cov =
      spd_inverse(prior_information + sampling_information(basis, d, noise.precision()),
                  "transition_information: posterior information");
  const MatrixXd h = model.spectral_operator_at(t + 1);
  MatrixXd next_cov = h * posterior_cov * h.transpose();
  next_cov.diagonal().array() += model.process_noise_var();
  return spd_inverse(symmetrized(next_cov), "transition_information: next prior covariance");
}

}  // namespace gstrack
