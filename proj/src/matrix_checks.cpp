#include "gstrack/matrix_checks.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "gstrack/kalman.hpp"

namespace gstrack {

double min_eigenvalue(const MatrixXd& m) {
  if (m.size() == 1) return m(0, 0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(symmetrized(m), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("min_eigenvalue: eigensolver failed");
  return solver.eigenvalues()(0);
}

CheckResult check_matrix_convex_midpoint(const MatrixMap& fn, const MatrixXd& x1, const MatrixXd& x2,
                                         std::span<const double> thetas, Curvature claim, double tolerance) {
  if (x1.rows() != x2.rows() || x1.cols() != x2.cols()) throw std::invalid_argument("convexity check: shape mismatch");
  const MatrixXd f1 = fn(x1);
  const MatrixXd f2 = fn(x2);
  const double orientation = claim == Curvature::Convex ? 1.0 : -1.0;
  CheckResult result{true, std::numeric_limits<double>::infinity()};
  for (double theta : thetas) {
    if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("convexity check: theta outside [0,1]");
    const MatrixXd mixed = fn(theta * x1 + (1.0 - theta) * x2);
    const MatrixXd slack = orientation * (theta * f1 + (1.0 - theta) * f2 - mixed);
    result.worst_slack = std::min(result.worst_slack, min_eigenvalue(slack));
  }
  result.holds = result.worst_slack >= -tolerance;
  return result;
}

CheckResult check_matrix_monotone(const MatrixMap& fn, const MatrixXd& larger, const MatrixXd& smaller,
                                  Monotonicity claim, double tolerance) {
  if (larger.rows() != smaller.rows() || larger.cols() != smaller.cols()) {
    throw std::invalid_argument("monotonicity check: shape mismatch");
  }
  if (min_eigenvalue(larger - smaller) < -tolerance) {
    throw std::invalid_argument("monotonicity check: inputs are not ordered");
  }
  const MatrixXd diff = fn(larger) - fn(smaller);
  CheckResult result;
  result.worst_slack = min_eigenvalue(claim == Monotonicity::Nondecreasing ? diff : MatrixXd(-diff));
  result.holds = result.worst_slack >= -tolerance;
  return result;
}

namespace {

MatrixXd general_inverse(const MatrixXd& x) {
  Eigen::PartialPivLU<MatrixXd> lu(x);
  return symmetrized(lu.inverse());
}

MatrixXd scalar(double v) { return MatrixXd::Constant(1, 1, v); }

}  // namespace

MatrixMap trace_inverse_map() {
  return [](const MatrixXd& x) { return scalar(general_inverse(x).trace()); };
}

MatrixMap negative_trace_inverse_map() {
  return [](const MatrixXd& x) { return scalar(-general_inverse(x).trace()); };
}

MatrixMap negative_congruence_inverse_map(MatrixXd a, MatrixXd b) {
  return [a = std::move(a), b = std::move(b)](const MatrixXd& x) -> MatrixXd {
    return symmetrized(-a.transpose() * general_inverse(x) * a - b);
  };
}

MatrixMap congruence_inverse_map(MatrixXd a, MatrixXd b) {
  return [a = std::move(a), b = std::move(b)](const MatrixXd& x) -> MatrixXd {
    return symmetrized(a.transpose() * general_inverse(x) * a + b);
  };
}

namespace {

MatrixXd z1_value(const TransitionTerms& terms, const VectorXd& d) {
  const MatrixXd& v = terms.eigenvectors;
  const MatrixXd info = terms.prior_information + terms.precision * (v.transpose() * d.asDiagonal() * v);
  MatrixXd z1 = -terms.next_operator * spd_inverse(info, "z1_map") * terms.next_operator.transpose();
  z1.diagonal().array() -= terms.process_noise_var;
  return symmetrized(z1);
}

}  // namespace

MatrixMap z1_map(TransitionTerms terms) {
  return [terms = std::move(terms)](const MatrixXd& d) -> MatrixXd {
    return z1_value(terms, d.diagonal());
  };
}

MatrixMap z2_map(TransitionTerms terms) {
  return [terms = std::move(terms)](const MatrixXd& blocks) -> MatrixXd {
    const Index n = terms.eigenvectors.rows();
    if (blocks.rows() != 2 * n) throw std::invalid_argument("z2_map: expected a 2n x 2n block-diagonal input");
    const VectorXd diag = blocks.diagonal();
    const MatrixXd& v = terms.eigenvectors;
    const MatrixXd z1_inv = general_inverse(z1_value(terms, diag.head(n)));
    return symmetrized(z1_inv - terms.precision * (v.transpose() * diag.tail(n).asDiagonal() * v));
  };
}

}  // namespace gstrack
