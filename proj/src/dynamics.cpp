#include "gstrack/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace gstrack {

void SignalPrior::validate() const {
  if (mean.size() != covariance_diag.size()) throw std::invalid_argument("SignalPrior: size mismatch");
  if (covariance_diag.size() > 0 && covariance_diag.minCoeff() < 0.0) {
    throw std::invalid_argument("SignalPrior: variances must be nonnegative");
  }
}

EvolutionModel::EvolutionModel(Index n, OperatorFn spectral_operator, double process_noise_var)
    : n_(n), op_(std::move(spectral_operator)), process_noise_var_(process_noise_var) {
  if (process_noise_var < 0.0) throw std::invalid_argument("EvolutionModel: process noise variance must be >= 0");
  if (!op_) throw std::invalid_argument("EvolutionModel: missing operator");
}

EvolutionModel EvolutionModel::identity(Index n, double process_noise_var) {
  return EvolutionModel(n, [n](int) -> MatrixXd { return MatrixXd::Identity(n, n); }, process_noise_var);
}

MatrixXd EvolutionModel::spectral_operator_at(int t) const {
  MatrixXd h = op_(t);
  if (h.rows() != n_ || h.cols() != n_) throw std::invalid_argument("EvolutionModel: operator dimension mismatch");
  return h;
}

ObservationNoise::ObservationNoise(double variance) : variance_(variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("ObservationNoise: variance must be > 0");
}

MatrixXd translation_operator(const SpectralBasis& basis, Index center, double scale) {
  if (center < 0 || center >= basis.size()) throw std::out_of_range("translation_operator: center out of range");
  // V^T delta_c is row c of V.
  VectorXd diag = scale * basis.eigenvectors.row(center).transpose();
  return diag.asDiagonal();
}

MatrixXd res_diffusion_operator(const SpectralBasis& basis, const WeightedGraph& active, double rate) {
  if (active.size() != basis.size()) throw std::invalid_argument("res_diffusion_operator: dimension mismatch");
  if (rate < 0.0) throw std::invalid_argument("res_diffusion_operator: rate must be >= 0");
  const MatrixXd& v = basis.eigenvectors;
  MatrixXd h = -rate * (v.transpose() * build_laplacian(active) * v);
  h.diagonal().array() += 1.0;
  return 0.5 * (h + h.transpose());
}

double max_degree(const WeightedGraph& g) {
  return g.size() == 0 ? 0.0 : g.weights().rowwise().sum().maxCoeff();
}

VectorXd kh_step(const VectorXd& opinions, double eps) {
  if (eps < 0.0) throw std::invalid_argument("kh_step: eps must be >= 0");
  const Index n = opinions.size();
  VectorXd next(n);
  for (Index i = 0; i < n; ++i) {
    double sum = 0.0;
    Index count = 0;
    for (Index j = 0; j < n; ++j) {
      if (std::abs(opinions(i) - opinions(j)) <= eps) {
        sum += opinions(j);
        ++count;
      }
    }
    next(i) = sum / static_cast<double>(count);
  }
  return next;
}

VectorXd evolve(const VectorXd& coefficients, const EvolutionModel& model, int t, Rng& rng,
                bool normalize_energy) {
  if (coefficients.size() != model.size()) throw std::invalid_argument("evolve: dimension mismatch");
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sigma = std::sqrt(model.process_noise_var());
  VectorXd out = model.spectral_operator_at(t) * coefficients;
  for (Index k = 0; k < out.size(); ++k) out(k) += sigma * gauss(rng);
  if (normalize_energy) {
    const double norm = out.norm();
    if (norm == 0.0) throw std::runtime_error("evolve: cannot normalize a zero signal");
    out /= norm;
  }
  return out;
}

void validate_vertex_set(const VertexSet& set, Index n) {
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (set[k] < 0 || set[k] >= n) throw std::invalid_argument("vertex index out of range");
    if (k > 0 && set[k] <= set[k - 1]) throw std::invalid_argument("vertex set must be sorted and duplicate-free");
  }
}

VectorXd observe(const VectorXd& signal, const VertexSet& sample_set, const ObservationNoise& noise,
                 Rng& rng) {
  validate_vertex_set(sample_set, signal.size());
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sigma = std::sqrt(noise.variance());
  VectorXd w(signal.size());
  for (Index i = 0; i < w.size(); ++i) w(i) = sigma * gauss(rng);
  VectorXd y(static_cast<Index>(sample_set.size()));
  for (std::size_t k = 0; k < sample_set.size(); ++k) {
    y(static_cast<Index>(k)) = signal(sample_set[k]) + w(sample_set[k]);
  }
  return y;
}

std::vector<Index> heat_source_trajectory(const WeightedGraph& g, Index start, Index steps, Rng& rng) {
  if (start < 0 || start >= g.size()) throw std::out_of_range("heat_source_trajectory: start out of range");
  if (steps < 0) throw std::invalid_argument("heat_source_trajectory: negative step count");
  std::vector<Index> path{start};
  path.reserve(static_cast<std::size_t>(steps + 1));
  Index current = start;
  for (Index s = 0; s < steps; ++s) {
    const auto nbrs = g.neighbors(current);
    if (!nbrs.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, nbrs.size() - 1);
      current = nbrs[pick(rng)];
    }
    path.push_back(current);
  }
  return path;
}

}  // namespace gstrack
