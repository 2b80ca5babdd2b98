#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <span>

#include "cardiosdc/collocation.hpp"

using namespace cardiosdc;

namespace {

// Roots of P_m - P_{m-1} on [-1, 1] from the companion matrix of its monomial
// coefficients, mapped to (0, 1].
std::vector<double> companion_nodes(int m) {
  // Legendre monomial coefficients by the three-term recurrence.
  std::vector<Eigen::VectorXd> p{Eigen::VectorXd::Zero(m + 1), Eigen::VectorXd::Zero(m + 1)};
  p[0](0) = 1.0;
  p[1](1) = 1.0;
  for (int n = 1; n < m; ++n) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(m + 1);
    for (int k = 0; k < m; ++k) next(k + 1) += (2.0 * n + 1.0) / (n + 1.0) * p[n](k);
    next -= n / (n + 1.0) * p[n - 1];
    p.push_back(next);
  }
  const Eigen::VectorXd c = p[m] - p[m - 1];
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < m; ++k) comp(0, k) = -c(m - 1 - k) / c(m);
  for (int k = 1; k < m; ++k) comp(k, k - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
  std::vector<double> r;
  for (int k = 0; k < m; ++k) r.push_back((1.0 + es.eigenvalues()(k).real()) / 2.0);
  std::sort(r.begin(), r.end());
  return r;
}

double lagrange_integral(std::span<const double> nodes, int j, double a, double b) {
  // Gauss-Legendre with 8 points is exact for the degree <= 8 polynomials used here.
  static const double x[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                              0.9602898564975363};
  static const double w[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                              0.1012285362903763};
  auto ell = [&](double t) {
    double v = 1.0;
    for (std::size_t k = 0; k < nodes.size(); ++k)
      if (static_cast<int>(k) != j) v *= (t - nodes[k]) / (nodes[j] - nodes[k]);
    return v;
  };
  double s = 0.0;
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int k = 0; k < 4; ++k) s += w[k] * (ell(mid + half * x[k]) + ell(mid - half * x[k]));
  return half * s;
}

// Row-cumulative collocation block of Shat.
Eigen::MatrixXd qhat_block(const CollocationScheme& s) {
  Eigen::MatrixXd q = s.Shat.rightCols(s.m);
  for (int i = 1; i < s.m; ++i) q.row(i) += q.row(i - 1);
  return q;
}

}  // namespace

TEST_CASE("Radau IIa nodes") {
  CHECK(radau_iia_nodes(1) == std::vector<double>{1.0});
  const auto n2 = radau_iia_nodes(2);
  CHECK(n2[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(n2[1] == 1.0);
  const auto n3 = radau_iia_nodes(3);
  CHECK(std::abs(n3[0] - (4.0 - std::sqrt(6.0)) / 10.0) < 1e-14);
  CHECK(std::abs(n3[1] - (4.0 + std::sqrt(6.0)) / 10.0) < 1e-14);
  CHECK(n3[2] == 1.0);
  for (int m = 2; m <= 9; ++m) {
    const auto n = radau_iia_nodes(m);
    const auto oracle = companion_nodes(m);
    REQUIRE(n.size() == static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) CHECK(std::abs(n[k] - oracle[k]) < 1e-10);
    CHECK(n.back() == 1.0);
  }
  CHECK_THROWS(radau_iia_nodes(0));
  CHECK_THROWS(radau_iia_nodes(10));
}

TEST_CASE("quadrature matrix") {
  const auto q1 = quadrature_matrix(std::vector<double>{1.0});
  CHECK(q1.S(0, 0) == 0.0);
  CHECK(q1.S(0, 1) == doctest::Approx(1.0));

  const std::vector<double> n2{1.0 / 3.0, 1.0};
  const auto q2 = quadrature_matrix(n2);
  CHECK(q2.S(0, 1) == doctest::Approx(5.0 / 12.0).epsilon(1e-14));
  CHECK(q2.S(0, 2) == doctest::Approx(-1.0 / 12.0).epsilon(1e-14));
  CHECK(q2.S(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(q2.S(1, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  // cumulative form is the Butcher matrix of 2-stage Radau IIa
  CHECK(q2.Q(1, 1) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(q2.Q(1, 2) == doctest::Approx(0.25).epsilon(1e-14));

  for (int m = 1; m <= 6; ++m) {
    const auto n = radau_iia_nodes(m);
    const auto q = quadrature_matrix(n);
    for (int i = 0; i < m; ++i) {
      const double a = i == 0 ? 0.0 : n[i - 1];
      CHECK(q.S(i, 0) == 0.0);
      CHECK(q.S.row(i).sum() == doctest::Approx(n[i] - a).epsilon(1e-13));
      for (int j = 0; j < m; ++j)
        CHECK(std::abs(q.S(i, j + 1) - lagrange_integral(n, j, a, n[i])) < 1e-13);
    }
  }
  CHECK_THROWS(quadrature_matrix(std::vector<double>{0.5, 0.5}));
}

TEST_CASE("LU trick") {
  const auto s1 = make_radau_iia(1);
  CHECK(s1.Shat(0, 1) == doctest::Approx(1.0));

  for (int m = 2; m <= 5; ++m) {
    const auto s = make_radau_iia(m);
    const Eigen::MatrixXd block = s.Q.rightCols(m);
    const Eigen::MatrixXd qhat = qhat_block(s);
    // dense Doolittle LU of the transposed block
    Eigen::MatrixXd u = block.transpose();
    for (int k = 0; k < m; ++k)
      for (int r = k + 1; r < m; ++r) u.row(r) -= u(r, k) / u(k, k) * u.row(k);
    CHECK((qhat - u.transpose()).cwiseAbs().maxCoeff() < 1e-13);
    for (int i = 0; i < m; ++i) {
      CHECK(s.shatDiagonal(i) > 0.0);
      for (int j = i + 2; j <= m; ++j) CHECK(s.Shat(i, j) == 0.0);
    }
  }
}

TEST_CASE("LU trick contraction on the Dahlquist problem") {
  const auto s = make_radau_iia(3);
  const double z = -10.0;
  const Eigen::MatrixXd q = s.Q.rightCols(3);
  const Eigen::MatrixXd qhat = qhat_block(s);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  const Eigen::MatrixXd iter = id - (id - z * qhat).inverse() * (id - z * q);
  const double radius = iter.eigenvalues().cwiseAbs().maxCoeff();
  CHECK(radius < 1.0);
}

TEST_CASE("collocation stability function") {
  const auto s = make_radau_iia(3);
  const double z = -1.0;
  const Eigen::MatrixXd q = s.Q.rightCols(3);
  const Eigen::VectorXd y =
      (Eigen::MatrixXd::Identity(3, 3) - z * q).lu().solve(Eigen::VectorXd::Ones(3));
  // (2,3) Pade approximant of exp(z)
  const double pade = (1.0 + 2.0 * z / 5.0 + z * z / 20.0) /
                      (1.0 - 3.0 * z / 5.0 + 3.0 * z * z / 20.0 - z * z * z / 60.0);
  CHECK(y(2) == doctest::Approx(pade).epsilon(1e-13));
  CHECK(std::abs(y(2) - std::exp(-1.0)) < 5e-4);
}

TEST_CASE("Legendre recurrence") {
  const auto [p, dp] = legendre(3, 0.5);
  CHECK(p == doctest::Approx(0.5 * (5 * 0.125 - 3 * 0.5)));
  CHECK(dp == doctest::Approx(0.5 * (15 * 0.25 - 3)));
}
