#include "cardiosdc/collocation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cardiosdc {

std::pair<double, double> legendre(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  // P_n' from the standard identity, valid away from x = +-1.
  double dp;
  if (std::abs(1.0 - x * x) > 1e-14) {
    dp = n * (p0 - x * p1) / (1.0 - x * x);
  } else {
    dp = 0.5 * n * (n + 1.0) * (x > 0 ? 1.0 : ((n % 2 == 0) ? -1.0 : 1.0));
  }
  return {p1, dp};
}

std::vector<double> radau_iia_nodes(int m) {
  if (m < 1 || m > 9) throw std::invalid_argument("radau_iia_nodes: m must be in [1, 9]");
  std::vector<double> x;
  if (m > 1) {
    // Interior nodes are the zeros of the Jacobi polynomial P^{(1,0)}_{m-1};
    // Golub-Welsch on its symmetric tridiagonal Jacobi matrix.
    const int n = m - 1;
    const double alpha = 1.0;
    const double beta = 0.0;
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(std::max(n - 1, 0));
    for (int k = 0; k < n; ++k) {
      const double s = 2.0 * k + alpha + beta;
      diag(k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    }
    for (int k = 1; k < n; ++k) {
      const double s = 2.0 * k + alpha + beta;
      sub(k - 1) = std::sqrt(4.0 * k * (k + alpha) * (k + beta) * (k + alpha + beta) /
                             (s * s * (s + 1.0) * (s - 1.0)));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    for (int k = 0; k < n; ++k) {
      double r = ev(k);
      // One Newton step on P_m - P_{m-1} polishes the eigenvalue.
      for (int it = 0; it < 2; ++it) {
        const auto [pm, dpm] = legendre(m, r);
        const auto [pm1, dpm1] = legendre(m - 1, r);
        const double d = dpm - dpm1;
        if (d == 0.0) break;
        r -= (pm - pm1) / d;
      }
      x.push_back(r);
    }
    std::sort(x.begin(), x.end());
  }
  std::vector<double> tau;
  tau.reserve(m);
  for (double r : x) tau.push_back(0.5 * (r + 1.0));
  tau.push_back(1.0);
  return tau;
}

namespace {

// Monomial coefficients (ascending) of the Lagrange basis polynomial l_j.
std::vector<double> lagrange_coefficients(std::span<const double> nodes, int j) {
  std::vector<double> c{1.0};
  for (int k = 0; k < static_cast<int>(nodes.size()); ++k) {
    if (k == j) continue;
    const double denom = nodes[j] - nodes[k];
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t d = 0; d < c.size(); ++d) {
      next[d + 1] += c[d] / denom;
      next[d] -= c[d] * nodes[k] / denom;
    }
    c = std::move(next);
  }
  return c;
}

double integrate_poly(const std::vector<double>& c, double a, double b) {
  double s = 0.0;
  double pa = a;
  double pb = b;
  for (std::size_t d = 0; d < c.size(); ++d) {
    s += c[d] * (pb - pa) / static_cast<double>(d + 1);
    pa *= a;
    pb *= b;
  }
  return s;
}

}  // namespace

QuadratureMatrices quadrature_matrix(std::span<const double> nodes) {
  const int m = static_cast<int>(nodes.size());
  if (m < 1) throw std::invalid_argument("quadrature_matrix: empty node list");
  for (int i = 1; i < m; ++i)
    if (!(nodes[i] > nodes[i - 1]))
      throw std::invalid_argument("quadrature_matrix: nodes must be strictly increasing");
  QuadratureMatrices out{Eigen::MatrixXd::Zero(m, m + 1), Eigen::MatrixXd::Zero(m, m + 1)};
  for (int j = 0; j < m; ++j) {
    const auto c = lagrange_coefficients(nodes, j);
    double lower = 0.0;
    for (int i = 0; i < m; ++i) {
      out.S(i, j + 1) = integrate_poly(c, lower, nodes[i]);
      out.Q(i, j + 1) = integrate_poly(c, 0.0, nodes[i]);
      lower = nodes[i];
    }
  }
  return out;
}

Eigen::MatrixXd lu_trick(const Eigen::MatrixXd& Q) {
  const int m = static_cast<int>(Q.rows());
  if (Q.cols() != m + 1) throw std::invalid_argument("lu_trick: Q must be m x (m+1)");
  // Doolittle without pivoting on A = Q_blockᵀ.
  Eigen::MatrixXd u = Q.rightCols(m).transpose();
  for (int k = 0; k < m; ++k) {
    if (std::abs(u(k, k)) < 1e-14) throw std::domain_error("lu_trick: singular collocation block");
    for (int i = k + 1; i < m; ++i) {
      const double l = u(i, k) / u(k, k);
      u.row(i).tail(m - k) -= l * u.row(k).tail(m - k);
      u(i, k) = 0.0;
    }
  }
  const Eigen::MatrixXd qhat = u.transpose();
  Eigen::MatrixXd shat = Eigen::MatrixXd::Zero(m, m + 1);
  for (int i = 0; i < m; ++i) {
    shat.row(i).tail(m) = qhat.row(i);
    if (i > 0) shat.row(i).tail(m) -= qhat.row(i - 1);
  }
  return shat;
}

CollocationScheme make_radau_iia(int m) {
  CollocationScheme s;
  s.m = m;
  s.nodes = radau_iia_nodes(m);
  auto q = quadrature_matrix(s.nodes);
  s.S = std::move(q.S);
  s.Q = std::move(q.Q);
  s.Shat = lu_trick(s.Q);
  return s;
}

}  // namespace cardiosdc
