#include "gstrack/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

namespace gstrack {

namespace {

constexpr double kSymmetryTol = 1e-12;

bool is_symmetric(const MatrixXd& m) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTol * scale;
}

// Flip so that the largest-magnitude entry is positive. Entries within 1e-9
// of the largest magnitude count as ties; the first index wins.
void fix_sign(Eigen::Ref<VectorXd> v) {
  if (v.size() == 0) return;
  const double peak = v.cwiseAbs().maxCoeff();
  Index best = 0;
  while (std::abs(v(best)) < peak - 1e-9) ++best;
  if (v(best) < 0) v = -v;
}

bool lex_less(const VectorXd& a, const VectorXd& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (std::abs(a(i) - b(i)) > 1e-12) return a(i) < b(i);
  }
  return false;
}

}  // namespace

WeightedGraph::WeightedGraph(MatrixXd weights) : weights_(std::move(weights)) {
  if (weights_.rows() != weights_.cols()) {
    throw std::invalid_argument("weight matrix must be square");
  }
  if (weights_.size() > 0 && weights_.minCoeff() < 0.0) {
    throw std::invalid_argument("edge weights must be nonnegative");
  }
  if (!is_symmetric(weights_)) {
    throw std::invalid_argument("weight matrix must be symmetric");
  }
  for (Index i = 0; i < weights_.rows(); ++i) {
    if (weights_(i, i) != 0.0) throw std::invalid_argument("weight matrix must have a zero diagonal");
  }
}

WeightedGraph WeightedGraph::edgeless(Index n) { return WeightedGraph(MatrixXd::Zero(n, n)); }

std::vector<std::pair<Index, Index>> WeightedGraph::edges() const {
  std::vector<std::pair<Index, Index>> out;
  for (Index i = 0; i < size(); ++i) {
    for (Index j = i + 1; j < size(); ++j) {
      if (weights_(i, j) > 0.0) out.emplace_back(i, j);
    }
  }
  return out;
}

Index WeightedGraph::edge_count() const {
  Index count = 0;
  for (Index i = 0; i < size(); ++i) {
    for (Index j = i + 1; j < size(); ++j) count += weights_(i, j) > 0.0 ? 1 : 0;
  }
  return count;
}

std::vector<Index> WeightedGraph::neighbors(Index v) const {
  if (v < 0 || v >= size()) throw std::out_of_range("vertex index out of range");
  std::vector<Index> out;
  for (Index j = 0; j < size(); ++j) {
    if (weights_(v, j) > 0.0) out.push_back(j);
  }
  return out;
}

MatrixXd build_laplacian(const WeightedGraph& g) {
  const MatrixXd& w = g.weights();
  MatrixXd lap = -w;
  lap.diagonal() = w.colwise().sum().transpose();
  return lap;
}

SpectralBasis spectral_decompose(const MatrixXd& laplacian) {
  if (!is_symmetric(laplacian)) throw std::invalid_argument("spectral_decompose: matrix is not symmetric");
  const Index n = laplacian.rows();
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(laplacian);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("spectral_decompose: eigensolver did not converge");
  }
  SpectralBasis basis{solver.eigenvectors(), solver.eigenvalues()};
  for (Index k = 0; k < n; ++k) fix_sign(basis.eigenvectors.col(k));

  // Order vectors of a repeated eigenvalue lexicographically.
  const double scale = n > 0 ? std::max(1.0, basis.eigenvalues.cwiseAbs().maxCoeff()) : 1.0;
  const double tie_tol = 1e-9 * scale;
  Index start = 0;
  while (start < n) {
    Index end = start + 1;
    while (end < n && basis.eigenvalues(end) - basis.eigenvalues(start) <= tie_tol) ++end;
    if (end - start > 1) {
      std::vector<VectorXd> cols;
      for (Index k = start; k < end; ++k) cols.emplace_back(basis.eigenvectors.col(k));
      std::stable_sort(cols.begin(), cols.end(), lex_less);
      for (Index k = start; k < end; ++k) basis.eigenvectors.col(k) = cols[static_cast<std::size_t>(k - start)];
    }
    start = end;
  }
  return basis;
}

VectorXd gft(const SpectralBasis& basis, const VectorXd& signal) {
  if (signal.size() != basis.size()) throw std::invalid_argument("gft: dimension mismatch");
  return basis.eigenvectors.transpose() * signal;
}

VectorXd igft(const SpectralBasis& basis, const VectorXd& coefficients) {
  if (coefficients.size() != basis.size()) throw std::invalid_argument("igft: dimension mismatch");
  return basis.eigenvectors * coefficients;
}

Index count_components(const WeightedGraph& g) {
  const Index n = g.size();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  Index components = 0;
  for (Index s = 0; s < n; ++s) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    ++components;
    std::queue<Index> frontier;
    frontier.push(s);
    seen[static_cast<std::size_t>(s)] = true;
    while (!frontier.empty()) {
      const Index v = frontier.front();
      frontier.pop();
      for (Index u = 0; u < n; ++u) {
        if (g.weights()(v, u) > 0.0 && !seen[static_cast<std::size_t>(u)]) {
          seen[static_cast<std::size_t>(u)] = true;
          frontier.push(u);
        }
      }
    }
  }
  return components;
}

WeightedGraph random_geometric_graph(Index n, double radius, Rng& rng) {
  if (n < 1) throw std::invalid_argument("random_geometric_graph: n must be >= 1");
  if (radius < 0.0) throw std::invalid_argument("random_geometric_graph: radius must be >= 0");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixX2d points(n, 2);
  for (Index i = 0; i < n; ++i) {
    points(i, 0) = unit(rng);
    points(i, 1) = unit(rng);
  }
  MatrixXd w = MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if ((points.row(i) - points.row(j)).norm() <= radius) w(i, j) = w(j, i) = 1.0;
    }
  }
  return WeightedGraph(std::move(w));
}

WeightedGraph connected_geometric_graph(Index n, double radius, Rng& rng, int max_attempts) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    WeightedGraph g = random_geometric_graph(n, radius, rng);
    if (count_components(g) == 1) return g;
  }
  throw std::runtime_error("connected_geometric_graph: no connected graph after " +
                           std::to_string(max_attempts) + " attempts");
}

WeightedGraph community_graph(std::span<const Index> community_sizes, double p_intra,
                              double p_inter, Rng& rng) {
  if (p_intra < 0.0 || p_intra > 1.0 || p_inter < 0.0 || p_inter > 1.0) {
    throw std::invalid_argument("community_graph: probabilities must lie in [0,1]");
  }
  std::vector<Index> label;
  for (std::size_t c = 0; c < community_sizes.size(); ++c) {
    if (community_sizes[c] < 0) throw std::invalid_argument("community_graph: negative community size");
    label.insert(label.end(), static_cast<std::size_t>(community_sizes[c]), static_cast<Index>(c));
  }
  const Index n = static_cast<Index>(label.size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MatrixXd w = MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double p = label[static_cast<std::size_t>(i)] == label[static_cast<std::size_t>(j)] ? p_intra : p_inter;
      // Always consume one draw per pair so the stream layout is parameter-independent.
      if (unit(rng) < p) w(i, j) = w(j, i) = 1.0;
    }
  }
  return WeightedGraph(std::move(w));
}

WeightedGraph res_realize(const WeightedGraph& g, double p, Rng& rng) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("res_realize: p must lie in [0,1]");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MatrixXd w = MatrixXd::Zero(g.size(), g.size());
  for (const auto& [i, j] : g.edges()) {
    if (unit(rng) < p) w(i, j) = w(j, i) = g.weights()(i, j);
  }
  return WeightedGraph(std::move(w));
}

}  // namespace gstrack
