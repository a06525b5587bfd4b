#include <doctest.h>

#include <cmath>

#include "gstrack/graph.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace gstrack;
using testing_support::random_basis;
using testing_support::random_vector;

namespace {

MatrixXd path3() {
  MatrixXd w = MatrixXd::Zero(3, 3);
  w(0, 1) = w(1, 0) = 1.0;
  w(1, 2) = w(2, 1) = 1.0;
  return w;
}

MatrixXd single_edge() {
  MatrixXd w = MatrixXd::Zero(2, 2);
  w(0, 1) = w(1, 0) = 1.0;
  return w;
}

void check_basis_invariants(const MatrixXd& lap, const SpectralBasis& b) {
  const Index n = lap.rows();
  CHECK((b.eigenvectors.transpose() * b.eigenvectors - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs(b.eigenvalues(0)) < 1e-9);
  for (Index k = 1; k < n; ++k) CHECK(b.eigenvalues(k) >= b.eigenvalues(k - 1));
  const MatrixXd rebuilt = b.eigenvectors * b.eigenvalues.asDiagonal() * b.eigenvectors.transpose();
  const double norm = std::max(lap.norm(), 1e-300);
  CHECK((rebuilt - lap).norm() / norm < 1e-8);
  for (Index k = 0; k < n; ++k) {
    const auto col = b.eigenvectors.col(k);
    const double peak = col.cwiseAbs().maxCoeff();
    Index best = 0;
    while (std::abs(col(best)) < peak - 1e-9) ++best;
    CHECK(col(best) > 0.0);
  }
}

}  // namespace

TEST_SUITE("graph_core") {

TEST_CASE("weighted graph validation") {
  CHECK_NOTHROW(WeightedGraph(path3()));
  MatrixXd asym = path3();
  asym(0, 1) = 2.0;
  CHECK_THROWS_AS(WeightedGraph{asym}, std::invalid_argument);
  MatrixXd negative = path3();
  negative(0, 1) = negative(1, 0) = -1.0;
  CHECK_THROWS_AS(WeightedGraph{negative}, std::invalid_argument);
  MatrixXd loop = path3();
  loop(2, 2) = 1.0;
  CHECK_THROWS_AS(WeightedGraph{loop}, std::invalid_argument);
  CHECK_THROWS_AS(WeightedGraph(MatrixXd::Zero(2, 3)), std::invalid_argument);

  const WeightedGraph g(path3());
  CHECK(g.edge_count() == 2);
  CHECK(g.neighbors(1) == std::vector<Index>{0, 2});
  CHECK_THROWS_AS(g.neighbors(3), std::out_of_range);
  CHECK(WeightedGraph::edgeless(4).edge_count() == 0);
}

TEST_CASE("build_laplacian examples") {
  MatrixXd expected2(2, 2);
  expected2 << 1, -1, -1, 1;
  CHECK(build_laplacian(WeightedGraph(single_edge())) == expected2);
  CHECK(build_laplacian(WeightedGraph::edgeless(4)) == MatrixXd::Zero(4, 4));
  MatrixXd expected3(3, 3);
  expected3 << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  CHECK(build_laplacian(WeightedGraph(path3())) == expected3);
}

TEST_CASE("laplacian rows sum to zero and spectrum is nonnegative") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const WeightedGraph g = random_geometric_graph(25, 0.3, rng);
    const MatrixXd lap = build_laplacian(g);
    CHECK(lap.rowwise().sum().cwiseAbs().maxCoeff() < 1e-10);
    CHECK(spectral_decompose(lap).eigenvalues.minCoeff() >= -1e-9);
  }
}

TEST_CASE("spectral_decompose examples") {
  const SpectralBasis two = spectral_decompose(build_laplacian(WeightedGraph(single_edge())));
  CHECK(two.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(two.eigenvalues(1) == doctest::Approx(2.0));

  Rng rng(3);
  const WeightedGraph g = connected_geometric_graph(30, 0.4, rng);
  const SpectralBasis b = spectral_decompose(build_laplacian(g));
  const VectorXd dc = VectorXd::Constant(30, 1.0 / std::sqrt(30.0));
  CHECK((b.eigenvectors.col(0) - dc).cwiseAbs().maxCoeff() < 1e-9);
  check_basis_invariants(build_laplacian(g), b);
}

TEST_CASE("number of null eigenvalues equals number of components") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const WeightedGraph g = random_geometric_graph(20, 0.15 + 0.01 * trial, rng);
    const SpectralBasis b = spectral_decompose(build_laplacian(g));
    Index small = 0;
    for (Index k = 0; k < b.size(); ++k) small += b.eigenvalues(k) < 1e-9 ? 1 : 0;
    const Index expected = oracle::union_find_components(g.weights());
    CHECK(small == expected);
    CHECK(count_components(g) == expected);
    check_basis_invariants(build_laplacian(g), b);
  }
}

TEST_CASE("repeated eigenvalues are ordered lexicographically") {
  // K4: eigenvalue 4 with multiplicity 3.
  MatrixXd w = MatrixXd::Ones(4, 4) - MatrixXd::Identity(4, 4);
  const SpectralBasis b = spectral_decompose(build_laplacian(WeightedGraph(w)));
  for (Index k = 1; k < 4; ++k) CHECK(b.eigenvalues(k) == doctest::Approx(4.0));
  for (Index k = 1; k < 3; ++k) {
    const VectorXd a = b.eigenvectors.col(k), c = b.eigenvectors.col(k + 1);
    Index i = 0;
    while (i < 4 && std::abs(a(i) - c(i)) <= 1e-12) ++i;
    REQUIRE(i < 4);
    CHECK(a(i) < c(i));
  }
  // Same input, same output.
  const SpectralBasis again = spectral_decompose(build_laplacian(WeightedGraph(w)));
  CHECK(again.eigenvectors == b.eigenvectors);
}

TEST_CASE("spectral_decompose rejects asymmetric input") {
  MatrixXd m = MatrixXd::Identity(3, 3);
  m(0, 2) = 1.0;
  CHECK_THROWS_AS(spectral_decompose(m), std::invalid_argument);
}

TEST_CASE("gft and igft") {
  Rng rng(7);
  const SpectralBasis b = random_basis(20, rng);
  for (int trial = 0; trial < 100; ++trial) {
    const VectorXd f = random_vector(20, rng, -3.0, 3.0);
    const VectorXd coeffs = gft(b, f);
    CHECK((igft(b, coeffs) - f).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(coeffs.norm() - f.norm()) < 1e-10);
    CHECK((gft(b, igft(b, f)) - f).cwiseAbs().maxCoeff() < 1e-10);
  }
  const VectorXd constant = gft(b, VectorXd::Constant(20, 2.5));
  CHECK(constant(0) == doctest::Approx(2.5 * std::sqrt(20.0)));
  CHECK(constant.tail(19).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(gft(b, VectorXd::Zero(19)), std::invalid_argument);
  CHECK_THROWS_AS(igft(b, VectorXd::Zero(21)), std::invalid_argument);
}

TEST_CASE("random_geometric_graph") {
  Rng rng(1);
  CHECK(random_geometric_graph(12, std::sqrt(2.0), rng).edge_count() == 12 * 11 / 2);
  CHECK(random_geometric_graph(12, 0.0, rng).edge_count() == 0);
  CHECK_THROWS_AS(random_geometric_graph(0, 0.5, rng), std::invalid_argument);
  CHECK_THROWS_AS(random_geometric_graph(5, -0.1, rng), std::invalid_argument);

  int connected = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng r(seed);
    connected += oracle::union_find_components(random_geometric_graph(100, 0.6, r).weights()) == 1 ? 1 : 0;
  }
  CHECK(connected >= 99);

  Rng a(42), b(42);
  CHECK(random_geometric_graph(30, 0.3, a).weights() == random_geometric_graph(30, 0.3, b).weights());
}

TEST_CASE("connected_geometric_graph gives up after the attempt cap") {
  Rng rng(1);
  CHECK_THROWS_AS(connected_geometric_graph(5, 0.0, rng, 10), std::runtime_error);
  CHECK(count_components(connected_geometric_graph(40, 0.3, rng)) == 1);
}

TEST_CASE("community_graph") {
  Rng rng(2);
  const std::vector<Index> one{8};
  CHECK(community_graph(one, 1.0, 0.0, rng).edge_count() == 28);
  const std::vector<Index> sizes(7, 10);
  CHECK(community_graph(sizes, 0.0, 0.0, rng).edge_count() == 0);
  CHECK_THROWS_AS(community_graph(sizes, 1.5, 0.0, rng), std::invalid_argument);

  const double intra_pairs = 7 * 45, inter_pairs = 70 * 69 / 2 - 315;
  const double mean = 0.8 * intra_pairs + 0.02 * inter_pairs;
  const double sigma = std::hypot(oracle::binomial_sigma(intra_pairs, 0.8), oracle::binomial_sigma(inter_pairs, 0.02));
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng r(seed);
    total += static_cast<double>(community_graph(sizes, 0.8, 0.02, r).edge_count());
  }
  CHECK(std::abs(total / 100.0 - mean) <= 3.0 * sigma / std::sqrt(100.0));

  Rng a(9), b(9);
  CHECK(community_graph(sizes, 0.8, 0.02, a).weights() == community_graph(sizes, 0.8, 0.02, b).weights());
}

TEST_CASE("res_realize") {
  Rng rng(4);
  const WeightedGraph g = connected_geometric_graph(30, 0.4, rng);
  CHECK(res_realize(g, 1.0, rng).weights() == g.weights());
  const WeightedGraph none = res_realize(g, 0.0, rng);
  CHECK(none.size() == g.size());
  CHECK(none.edge_count() == 0);
  CHECK_THROWS_AS(res_realize(g, -0.1, rng), std::invalid_argument);

  const double edges = static_cast<double>(g.edge_count());
  double total = 0.0;
  for (int draw = 0; draw < 200; ++draw) {
    const WeightedGraph r = res_realize(g, 0.5, rng);
    // Surviving edges are a subset of the original ones.
    for (const auto& [i, j] : r.edges()) CHECK(g.weights()(i, j) > 0.0);
    total += static_cast<double>(r.edge_count());
  }
  CHECK(std::abs(total / 200.0 - edges / 2.0) <= 3.0 * oracle::binomial_sigma(edges, 0.5) / std::sqrt(200.0));
}

}  // TEST_SUITE
