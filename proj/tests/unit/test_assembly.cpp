#include <doctest.h>

#include <Eigen/Dense>
#include <memory>
#include <random>
#include <set>

#include "cardiosdc/adaptivity.hpp"
#include "cardiosdc/assembly.hpp"
#include "../support/test_problems.hpp"

using namespace cardiosdc;
using testing_support::to_dense;

namespace {

std::shared_ptr<const Mesh> emi_chain(int cells) {
  EmiLayout layout;
  layout.spacing = 1.0;
  for (int k = 0; k < cells; ++k) layout.myocytes.push_back({4.0 * k, 0, 4.0 * (k + 1), 2});
  return std::make_shared<const Mesh>(build_emi_layout(layout, 2.0));
}

std::vector<double> random_vector(int n, std::mt19937& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("1D stiffness by hand") {
  const Mesh m = build_cartesian(1, {2, 0}, {1.0, 0.0});
  const DofMap d = build_dof_map(m, DofMode::monodomain);
  const std::vector<double> sigma{1.0};
  const Eigen::MatrixXd a = to_dense(assemble_stiffness(m, d, sigma, 0.0));
  Eigen::MatrixXd expect(3, 3);
  expect << 2, -2, 0, -2, 4, -2, 0, -2, 2;
  CHECK((a - expect).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS(assemble_stiffness(m, d, std::vector<double>{}, 0.0));
}

TEST_CASE("stiffness kernel") {
  const Mesh m = build_cartesian(2, {6, 5}, {3.0, 2.0});
  const DofMap d = build_dof_map(m, DofMode::monodomain);
  const auto a = assemble_stiffness(m, d, std::vector<double>{0.7}, 0.0);
  const std::vector<double> ones(d.totalDofs, 1.0);
  for (double r : a.multiply(ones)) CHECK(std::abs(r) < 1e-13);
  CHECK(a.isSymmetric(1e-14));

  const auto mesh = emi_chain(2);
  const DofMap de = build_dof_map(*mesh, DofMode::emi);
  const auto ae = assemble_stiffness(*mesh, de, std::vector<double>{2.0, 0.3, 0.3}, 1.0);
  const std::vector<double> c(de.totalDofs, 1.0);
  CHECK(energy_norm_squared(ae, c) > 0.0);
}

TEST_CASE("monodomain mass") {
  const double beta = 1400.0, cm = 1e-4;
  const Mesh m1 = build_cartesian(1, {4, 0}, {2.0, 0.0});
  const Eigen::MatrixXd mm = to_dense(assemble_mass_monodomain(m1, beta, cm));
  const double h = 0.5;
  CHECK(mm(2, 1) == doctest::Approx(beta * cm * h / 6));
  CHECK(mm(2, 2) == doctest::Approx(beta * cm * h * 2 / 3));
  CHECK(mm(2, 3) == doctest::Approx(beta * cm * h / 6));
  CHECK(mm.sum() == doctest::Approx(beta * cm * 2.0));

  const Mesh m2 = build_cartesian(2, {5, 7}, {2.0, 3.0});
  const auto m = assemble_mass_monodomain(m2, beta, cm);
  CHECK(m.isSymmetric(1e-15));
  CHECK(to_dense(m).sum() == doctest::Approx(beta * cm * 6.0).epsilon(1e-13));
  CHECK(to_dense(m).llt().info() == Eigen::Success);
  CHECK_THROWS(assemble_mass_monodomain(m2, 0.0, cm));
}

TEST_CASE("EMI membrane mass") {
  const auto mesh = emi_chain(2);
  const DofMap d = build_dof_map(*mesh, DofMode::emi);
  const double cm = 1e-4;
  const auto mass = assemble_membrane_mass_emi(*mesh, d, cm);
  const Eigen::MatrixXd md = to_dense(mass);
  CHECK(mass.isSymmetric(1e-18));
  // rows sum to zero: the capacitive current only sees u_i - u_j
  CHECK(md.rowwise().sum().cwiseAbs().maxCoeff() < 1e-18);
  double length = 0.0;
  for (const auto& f : mesh->membraneFacets) length += mesh->facetMeasure(f);
  CHECK(md.trace() == doctest::Approx(2.0 * cm * length * (2.0 / 3.0)).epsilon(1e-13));
  // positive semidefinite
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(md);
  CHECK(es.eigenvalues().minCoeff() > -1e-18);
  // interior dofs carry no capacitance
  std::set<int> onMembrane;
  for (const auto& p : d.facetDofPairs)
    for (int k = 0; k < 2; ++k) onMembrane.insert({p.first[k], p.second[k]});
  for (int r = 0; r < d.totalDofs; ++r)
    if (!onMembrane.count(r)) CHECK(md.row(r).cwiseAbs().sum() == 0.0);

  const Mesh mono = build_cartesian(2, {2, 2}, {1.0, 1.0});
  CHECK_THROWS(assemble_membrane_mass_emi(mono, build_dof_map(mono, DofMode::monodomain), cm));
}

TEST_CASE("monodomain reaction") {
  auto mesh = std::make_shared<const Mesh>(build_cartesian(2, {4, 4}, {1.0, 1.0}));
  const MonodomainCoefficients coeff;
  const AlievPanfilovParams ionic;
  const auto ops = ModelOperators::monodomain(mesh, coeff, ionic);
  const int n = ops.size();
  const std::vector<double> zero(n, 0.0);
  const auto rest = assemble_reaction(ops, zero, zero);
  for (double b : rest.b) CHECK(b == 0.0);

  const std::vector<double> half(n, 0.5);
  const auto r = assemble_reaction(ops, half, zero);
  const auto lumped = lumped_mass(*mesh);
  for (int d = 0; d < n; ++d)
    CHECK(r.b[d] == doctest::Approx(coeff.surfaceToVolume * lumped[d] * -0.8).epsilon(1e-13));
  CHECK_THROWS(assemble_reaction(ops, std::vector<double>(n + 1), zero));
}

TEST_CASE("EMI gap junction load is antisymmetric") {
  const auto mesh = emi_chain(3);
  EmiCoefficients coeff;
  const auto ops = ModelOperators::emi(mesh, coeff, AlievPanfilovParams{});
  const DofMap& d = ops.dofMap();
  std::mt19937 rng(17);
  const auto u = random_vector(d.totalDofs, rng, -0.2, 1.0);
  const std::vector<double> w(d.totalDofs, 0.0);
  const auto r = assemble_reaction(ops, u, w);

  // Vertices strictly inside a junction touch only the two myocytes.
  int checked = 0;
  for (int v = 0; v < mesh->vertexCount(); ++v) {
    if (d.dofCount(v) != 2) continue;
    const int a = d.vertexOffset[v];
    const int b = a + 1;
    if (d.dofSubdomain[a] == 0) continue;
    CHECK(std::abs(r.b[a] + r.b[b]) <= 1e-14 * std::max(1.0, std::abs(r.b[a])));
    ++checked;
  }
  CHECK(checked == 2);

  // the gap part is linear with Jacobian G
  const auto g = ops.gapCoupling().multiply(u);
  for (int v = 0; v < mesh->vertexCount(); ++v) {
    if (d.dofCount(v) != 2 || d.dofSubdomain[d.vertexOffset[v]] == 0) continue;
    const int a = d.vertexOffset[v];
    CHECK(r.b[a] == doctest::Approx(g[a]).epsilon(1e-12));
  }

  // every membrane load is balanced by its counterpart
  double total = 0.0;
  double scale = 0.0;
  for (double b : r.b) {
    total += b;
    scale += std::abs(b);
  }
  CHECK(std::abs(total) <= 1e-13 * scale);
}

TEST_CASE("EMI constant shift gives no membrane current") {
  const auto mesh = emi_chain(2);
  const auto ops = ModelOperators::emi(mesh, EmiCoefficients{}, AlievPanfilovParams{});
  const int n = ops.size();
  const std::vector<double> c(n, 0.3);
  const std::vector<double> w(n, 0.0);
  const auto r = assemble_reaction(ops, c, w);
  for (double b : r.b) CHECK(std::abs(b) < 1e-15);
  for (double x : ops.mass().multiply(c)) CHECK(std::abs(x) < 1e-18);
  // stiffness residual reduces to the Robin term
  const auto ac = ops.stiffness().multiply(c);
  std::set<int> boundary;
  for (const auto& f : mesh->boundaryFacets)
    for (int k = 0; k < 2; ++k) boundary.insert(ops.dofMap().dof(f.vertices[k], 0));
  for (int r2 = 0; r2 < n; ++r2)
    if (!boundary.count(r2)) CHECK(std::abs(ac[r2]) < 1e-12);
}

TEST_CASE("EMI membrane pairs") {
  const auto mesh = emi_chain(1);
  EmiCoefficients coeff;
  const auto ops = ModelOperators::emi(mesh, coeff, AlievPanfilovParams{});
  const auto pairs = ops.membranePairs();
  REQUIRE(pairs.size() == ops.gatingDofs().size());
  double lumped = 0.0;
  for (const auto& p : pairs) {
    CHECK(ops.dofMap().dofSubdomain[p.first] == 0);
    CHECK(ops.dofMap().dofSubdomain[p.second] == 1);
    lumped += p.lumpedMass;
  }
  double length = 0.0;
  for (const auto& f : mesh->membraneFacets) length += mesh->facetMeasure(f);
  CHECK(lumped == doctest::Approx(coeff.capacitance * length));
  CHECK(ops.normalization() == doctest::Approx(coeff.capacitance * length));

  // The pair Jacobian is the derivative of the intracellular load under a
  // uniform shift of the transmembrane voltage.
  std::mt19937 rng(23);
  const auto u = random_vector(ops.size(), rng, 0.0, 1.0);
  const std::vector<double> w(ops.size(), 0.0);
  const double h = 1e-6;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const int g = pairs[k].second;
    auto shifted = [&](double s) {
      auto x = u;
      for (int d = 0; d < ops.size(); ++d)
        if (ops.dofMap().dofSubdomain[d] == 1) x[d] += s;
      double b = 0.0, j = 0.0;
      ops.reaction(g, x, w, b, j);
      return b;
    };
    const double fd = (shifted(h) - shifted(-h)) / (2 * h);
    CHECK(ops.pairJacobian(static_cast<int>(k), u, w) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("sweep systems stay positive definite with the Jacobian floor") {
  auto mesh = std::make_shared<const Mesh>(build_cartesian(2, {8, 8}, {4.0, 4.0}));
  const auto ops =
      ModelOperators::monodomain(mesh, MonodomainCoefficients{2.142857, 1.0, 1.0}, AlievPanfilovParams{});
  const auto op = SweepOperator::build(ops.mass(), ops.sweepStiffness());
  const auto lumped = lumped_mass(*mesh);
  std::mt19937 rng(29);
  for (double c : {0.01, 0.1, 1.0, 10.0}) {
    std::vector<double> d(ops.size());
    for (int r = 0; r < ops.size(); ++r) d[r] = -0.2 * lumped[r] / c;
    const auto a = op.combine(c, d);
    CHECK(a.isSymmetric(1e-14));
    for (int trial = 0; trial < 20; ++trial) {
      const auto x = random_vector(ops.size(), rng);
      CHECK(energy_norm_squared(a, x) > 0.0);
    }
  }
}
