#pragma once

#include <functional>
#include <span>

#include "gstrack/graph.hpp"

namespace gstrack {

/// Matrix-valued map on symmetric matrices. Scalar functions are 1x1 maps.
using MatrixMap = std::function<MatrixXd(const MatrixXd&)>;

enum class Curvature { Convex, Concave };
enum class Monotonicity { Nondecreasing, Nonincreasing };

struct CheckResult {
  bool holds = false;
  /// Smallest eigenvalue over all slack matrices, oriented so that the claimed
  /// property holds iff it is >= -tolerance.
  double worst_slack = 0.0;
};

/// Loewner-order midpoint test of convexity/concavity:
///   convex:  theta f(X1) + (1-theta) f(X2) - f(theta X1 + (1-theta) X2) >= 0
///   concave: the negation.
CheckResult check_matrix_convex_midpoint(const MatrixMap& fn, const MatrixXd& x1, const MatrixXd& x2,
                                         std::span<const double> thetas, Curvature claim,
                                         double tolerance = 1e-9);

/// Loewner-order monotonicity test for a pair with `larger` - `smaller` PSD.
/// Throws std::invalid_argument if the inputs are not ordered.
CheckResult check_matrix_monotone(const MatrixMap& fn, const MatrixXd& larger, const MatrixXd& smaller,
                                  Monotonicity claim, double tolerance = 1e-9);

/// Smallest eigenvalue of the symmetric part of m.
double min_eigenvalue(const MatrixXd& m);

// Maps appearing in the convexity argument of the two-step objective.

/// X -> tr(X^-1)
MatrixMap trace_inverse_map();
/// X -> -tr(X^-1)
MatrixMap negative_trace_inverse_map();
/// X -> -A^T X^-1 A - B
MatrixMap negative_congruence_inverse_map(MatrixXd a, MatrixXd b);
/// X -> A^T X^-1 A + B
MatrixMap congruence_inverse_map(MatrixXd a, MatrixXd b);

/// Parameters of the information recursion shared by the Z maps.
struct TransitionTerms {
  MatrixXd prior_information;  // (P-_t)^-1
  MatrixXd eigenvectors;       // V
  MatrixXd next_operator;      // H_{t+1}
  double process_noise_var = 0.0;
  double precision = 0.0;      // sigma_w^-2
};

/// D -> -H (P_inv + sigma_w^-2 V^T D V)^-1 H^T - sigma_v^2 I, D diagonal n x n.
MatrixMap z1_map(TransitionTerms terms);

/// blockdiag(D_now, D_next) -> Z1(D_now)^-1 - sigma_w^-2 V^T D_next V, input 2n x 2n.
MatrixMap z2_map(TransitionTerms terms);

}  // namespace gstrack
