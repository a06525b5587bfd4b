#pragma once

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

#include "gstrack/rng.hpp"

namespace gstrack {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Sorted, duplicate-free list of vertex indices.
using VertexSet = std::vector<Index>;

/// Undirected graph with a symmetric, nonnegative, zero-diagonal weight matrix.
class WeightedGraph {
 public:
  /// Throws std::invalid_argument unless `weights` is square, symmetric,
  /// nonnegative and has a zero diagonal.
  explicit WeightedGraph(MatrixXd weights);

  static WeightedGraph edgeless(Index n);

  Index size() const { return weights_.rows(); }
  const MatrixXd& weights() const { return weights_; }

  /// Undirected edges (i < j) with positive weight.
  std::vector<std::pair<Index, Index>> edges() const;
  Index edge_count() const;
  std::vector<Index> neighbors(Index v) const;

 private:
  MatrixXd weights_;
};

/// Laplacian eigenbasis. Columns of `eigenvectors` are the graph Fourier
/// atoms, ordered by ascending `eigenvalues`.
struct SpectralBasis {
  MatrixXd eigenvectors;
  VectorXd eigenvalues;

  Index size() const { return eigenvalues.size(); }
};

/// L = D - W with D = diag(1^T W).
MatrixXd build_laplacian(const WeightedGraph& g);

/// Symmetric eigendecomposition with a reproducible sign convention: the
/// largest-magnitude entry of every eigenvector is positive (lowest index wins
/// ties). Inside a repeated eigenvalue the vectors are ordered
/// lexicographically.
SpectralBasis spectral_decompose(const MatrixXd& laplacian);

VectorXd gft(const SpectralBasis& basis, const VectorXd& signal);
VectorXd igft(const SpectralBasis& basis, const VectorXd& coefficients);

/// Number of connected components (edges with positive weight).
Index count_components(const WeightedGraph& g);

/// Unit square, unit weights between points at distance <= radius.
WeightedGraph random_geometric_graph(Index n, double radius, Rng& rng);

/// Redraws the geometric graph until it is connected. Throws
/// std::runtime_error after `max_attempts` disconnected draws.
WeightedGraph connected_geometric_graph(Index n, double radius, Rng& rng, int max_attempts = 100);

/// Stochastic block model with unit weights.
WeightedGraph community_graph(std::span<const Index> community_sizes, double p_intra,
                              double p_inter, Rng& rng);

/// Random edge sampling: each edge survives independently with probability p.
WeightedGraph res_realize(const WeightedGraph& g, double p, Rng& rng);

}  // namespace gstrack
