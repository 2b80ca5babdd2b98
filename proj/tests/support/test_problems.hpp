#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "cardiosdc/problem.hpp"
#include "cardiosdc/sparse.hpp"

namespace testing_support {

using cardiosdc::SparseMatrix;
using cardiosdc::Triplet;

/// M u' = -A u - b(u, w), w' = R(u, w) with b and R given pointwise.
class PointwiseProblem : public cardiosdc::SdcProblem {
 public:
  using Reaction = std::function<void(int row, double u, double w, double& b, double& jac)>;
  using Rate = std::function<void(double v, double w, double& rate, double& dRateDw)>;

  PointwiseProblem(SparseMatrix mass, SparseMatrix stiffness, Reaction reaction, Rate rate = {})
      : mass_(std::move(mass)), stiffness_(std::move(stiffness)), reaction_(std::move(reaction)),
        rate_(std::move(rate)) {
    for (int d = 0; d < mass_.rows(); ++d) {
      gating_.push_back(d);
      partner_.push_back(-1);
    }
  }

  int size() const override { return mass_.rows(); }
  const SparseMatrix& mass() const override { return mass_; }
  const SparseMatrix& stiffness() const override { return stiffness_; }
  const SparseMatrix& sweepStiffness() const override { return stiffness_; }
  void reaction(int row, std::span<const double> u, std::span<const double> w, double& b,
                double& jac) const override {
    b = 0.0;
    jac = 0.0;
    if (reaction_) reaction_(row, u[row], w[row], b, jac);
  }
  bool hasGating() const override { return static_cast<bool>(rate_); }
  std::span<const int> gatingDofs() const override { return gating_; }
  std::span<const int> gatingPartner() const override { return partner_; }
  void gatingRate(double v, double w, double& rate, double& d) const override { rate_(v, w, rate, d); }

 private:
  SparseMatrix mass_;
  SparseMatrix stiffness_;
  Reaction reaction_;
  Rate rate_;
  std::vector<int> gating_;
  std::vector<int> partner_;
};

inline SparseMatrix from_dense(const Eigen::MatrixXd& a) {
  std::vector<Triplet> t;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0) t.push_back({i, j, a(i, j)});
  return SparseMatrix::from_triplets(static_cast<int>(a.rows()), static_cast<int>(a.cols()), t);
}

inline Eigen::MatrixXd to_dense(const SparseMatrix& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  const auto rp = m.rowPtr();
  const auto ci = m.colIdx();
  const auto v = m.values();
  for (int r = 0; r < m.rows(); ++r)
    for (int k = rp[r]; k < rp[r + 1]; ++k) d(r, ci[k]) = v[k];
  return d;
}

/// 1D P1 reaction-diffusion on n vertices of [0, 1] with Neumann ends:
/// consistent mass, stiffness D*K, linear reaction kappa * lumped * u.
struct LinearReactionDiffusion {
  Eigen::MatrixXd mass;
  Eigen::MatrixXd stiffness;
  Eigen::VectorXd lumped;
  double kappa;

  LinearReactionDiffusion(int n, double diffusion, double kappa_) : kappa(kappa_) {
    const double h = 1.0 / (n - 1);
    mass = Eigen::MatrixXd::Zero(n, n);
    stiffness = Eigen::MatrixXd::Zero(n, n);
    for (int e = 0; e + 1 < n; ++e) {
      mass(e, e) += h / 3;
      mass(e + 1, e + 1) += h / 3;
      mass(e, e + 1) += h / 6;
      mass(e + 1, e) += h / 6;
      stiffness(e, e) += diffusion / h;
      stiffness(e + 1, e + 1) += diffusion / h;
      stiffness(e, e + 1) -= diffusion / h;
      stiffness(e + 1, e) -= diffusion / h;
    }
    lumped = mass.rowwise().sum();
  }

  /// A + dB/du, the full linear operator.
  Eigen::MatrixXd op() const {
    return stiffness + Eigen::MatrixXd(kappa * lumped.asDiagonal());
  }

  PointwiseProblem problem() const {
    const Eigen::VectorXd l = lumped;
    const double k = kappa;
    return PointwiseProblem(from_dense(mass), from_dense(stiffness),
                            [l, k](int row, double u, double, double& b, double& jac) {
                              b = k * l(row) * u;
                              jac = k * l(row);
                            });
  }
};

/// Dense collocation solution at the m nodes: (I (x) M + T Q (x) L) U = 1 (x) M u0
/// with Q the collocation block of the cumulative quadrature matrix.
inline std::vector<Eigen::VectorXd> dense_collocation(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& M,
                                                      const Eigen::MatrixXd& L, double T,
                                                      const Eigen::VectorXd& u0) {
  const int m = static_cast<int>(Q.rows());
  const int n = static_cast<int>(M.rows());
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(m * n, m * n);
  Eigen::VectorXd rhs(m * n);
  for (int i = 0; i < m; ++i) {
    big.block(i * n, i * n, n, n) += M;
    for (int j = 0; j < m; ++j) big.block(i * n, j * n, n, n) += T * Q(i, j + 1) * L;
    rhs.segment(i * n, n) = M * u0;
  }
  const Eigen::VectorXd sol = big.partialPivLu().solve(rhs);
  std::vector<Eigen::VectorXd> out;
  for (int i = 0; i < m; ++i) out.push_back(sol.segment(i * n, n));
  return out;
}

}  // namespace testing_support
