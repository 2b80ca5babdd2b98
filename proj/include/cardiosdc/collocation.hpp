#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace cardiosdc {

/// Radau IIa collocation on the reference step [0, 1].
///
/// All quadrature matrices are m x (m+1). Row i covers the interval
/// [tau_i, tau_{i+1}] (tau_0 = 0), column j refers to node tau_j. Column 0 is
/// identically zero: the interpolant only uses the m collocation nodes, so the
/// fixed point of the sweep iteration is the Radau IIa collocation solution.
struct CollocationScheme {
  int m = 0;
  std::vector<double> nodes;  ///< tau_1 < ... < tau_m = 1
  Eigen::MatrixXd S;          ///< node-to-node weights
  Eigen::MatrixXd Q;          ///< cumulative weights, integral from 0 to tau_{i+1}
  Eigen::MatrixXd Shat;       ///< lower triangular approximation (LU trick)

  /// Diagonal weight of the sweep system at node i+1 (row i).
  double shatDiagonal(int i) const { return Shat(i, i + 1); }
};

/// Roots of P_m(x) - P_{m-1}(x) mapped to (0, 1]; supported for 1 <= m <= 9.
std::vector<double> radau_iia_nodes(int m);

struct QuadratureMatrices {
  Eigen::MatrixXd S;
  Eigen::MatrixXd Q;
};

QuadratureMatrices quadrature_matrix(std::span<const double> nodes);

/// Q^T restricted to the collocation block is factored as L U without pivoting;
/// the lower triangular Uᵀ replaces Q, and Shat holds its row differences.
Eigen::MatrixXd lu_trick(const Eigen::MatrixXd& Q);

CollocationScheme make_radau_iia(int m);

/// Legendre polynomial P_n(x) and its derivative, by the three-term recurrence.
std::pair<double, double> legendre(int n, double x);

}  // namespace cardiosdc
