#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "cardiosdc/mesh.hpp"

using namespace cardiosdc;

namespace {

Mesh one_cell() {
  EmiLayout layout;
  layout.spacing = 1.0;
  layout.myocytes = {{2, 2, 5, 4}};
  return build_emi_layout(layout, 2.0);
}

Mesh chain(int n) {
  EmiLayout layout;
  layout.spacing = 1.0;
  for (int k = 0; k < n; ++k) layout.myocytes.push_back({4.0 * k, 0, 4.0 * (k + 1), 2});
  return build_emi_layout(layout, 2.0);
}

}  // namespace

TEST_CASE("cartesian counts") {
  const Mesh m1 = build_cartesian(1, {4, 0}, {1.0, 0.0});
  CHECK(m1.vertexCount() == 5);
  CHECK(m1.elementCount() == 4);
  CHECK(m1.boundaryFacets.size() == 2);

  const Mesh m2 = build_cartesian(2, {2, 2}, {1.0, 1.0});
  CHECK(m2.vertexCount() == 9);
  CHECK(m2.elementCount() == 8);
  CHECK(m2.boundaryFacets.size() == 8);
  CHECK(m2.totalMeasure() == doctest::Approx(1.0).epsilon(1e-14));

  const Mesh big = build_cartesian(2, {256, 256}, {1.0, 1.0});
  CHECK(big.vertexCount() == 257 * 257);
}

TEST_CASE("cartesian orientation and ordering") {
  const Mesh m = build_cartesian(2, {3, 2}, {3.0, 2.0});
  // x-fastest numbering
  CHECK(m.vertices[1][0] == doctest::Approx(1.0));
  CHECK(m.vertices[4][1] == doctest::Approx(1.0));
  for (int e = 0; e < m.elementCount(); ++e) CHECK(m.elementMeasure(e) == doctest::Approx(0.5));
  const Mesh again = build_cartesian(2, {3, 2}, {3.0, 2.0});
  CHECK(again.elements == m.elements);
}

TEST_CASE("cartesian rejects bad input") {
  CHECK_THROWS(build_cartesian(2, {0, 2}, {1.0, 1.0}));
  CHECK_THROWS(build_cartesian(2, {2, 2}, {-1.0, 1.0}));
  CHECK_THROWS(build_cartesian(3, {2, 2}, {1.0, 1.0}));
}

TEST_CASE("single myocyte has only outer membrane") {
  const Mesh m = one_cell();
  CHECK(m.subdomainCount() == 2);
  CHECK_FALSE(m.membraneFacets.empty());
  for (const auto& f : m.membraneFacets) {
    CHECK(f.kind == FacetKind::outerMembrane);
    CHECK(f.subdomains[0] == 0);
    CHECK(f.subdomains[1] == 1);
  }
  // perimeter of a 3 x 2 cell on a unit grid
  CHECK(m.membraneFacets.size() == 10);
}

TEST_CASE("chain facets match brute-force enumeration") {
  const Mesh m = chain(3);
  // Brute force: scan every edge of every element and classify by the
  // subdomains of the elements sharing it.
  std::map<std::pair<int, int>, std::set<int>> edgeSubdomains;
  for (int e = 0; e < m.elementCount(); ++e)
    for (int k = 0; k < 3; ++k) {
      int a = m.elements[e][k];
      int b = m.elements[e][(k + 1) % 3];
      if (a > b) std::swap(a, b);
      edgeSubdomains[{a, b}].insert(m.elementSubdomain[e]);
    }
  int gap = 0;
  int outer = 0;
  for (const auto& [edge, subs] : edgeSubdomains) {
    if (subs.size() != 2) continue;
    if (*subs.begin() == 0)
      ++outer;
    else
      ++gap;
  }
  int gapFound = 0;
  int outerFound = 0;
  for (const auto& f : m.membraneFacets) (f.kind == FacetKind::gapJunction ? gapFound : outerFound)++;
  CHECK(gapFound == gap);
  CHECK(outerFound == outer);
  CHECK(gap == 2 * 2);  // two junctions, each 2 edges high
  CHECK(outer == 2 * (12 + 2));
}

TEST_CASE("overlapping myocytes are rejected") {
  EmiLayout layout;
  layout.spacing = 1.0;
  layout.myocytes = {{0, 0, 3, 2}, {2, 0, 5, 2}};
  CHECK_THROWS_AS(build_emi_layout(layout, 1.0), std::invalid_argument);
  layout.myocytes = {{0, 0, 2.5, 2}};
  CHECK_THROWS_AS(build_emi_layout(layout, 1.0), std::invalid_argument);
}

TEST_CASE("monodomain dof map is the vertex numbering") {
  const Mesh m = build_cartesian(1, {4, 0}, {1.0, 0.0});
  const DofMap d = build_dof_map(m, DofMode::monodomain);
  CHECK(d.totalDofs == 5);
  CHECK(d.gatingDofs.size() == 5);
  for (int v = 0; v < 5; ++v) CHECK(d.dof(v, 0) == v);
}

TEST_CASE("EMI dof count equals vertices plus duplicated membrane vertices") {
  const Mesh m = one_cell();
  const DofMap d = build_dof_map(m, DofMode::emi);
  std::set<int> membraneVertices;
  for (const auto& f : m.membraneFacets) membraneVertices.insert(f.vertices.begin(), f.vertices.end());
  CHECK(d.totalDofs == m.vertexCount() + static_cast<int>(membraneVertices.size()));
  CHECK(d.gatingDofs.size() == membraneVertices.size());
  for (std::size_t k = 0; k < d.gatingDofs.size(); ++k) {
    const int g = d.gatingDofs[k];
    CHECK(d.dofSubdomain[g] == 1);
    CHECK(d.dofSubdomain[d.gatingPartner[k]] == 0);
    CHECK(d.dofVertex[d.gatingPartner[k]] == d.dofVertex[g]);
  }
}

TEST_CASE("vertex shared by two myocytes and the bath owns three dofs") {
  const Mesh m = chain(2);
  const DofMap d = build_dof_map(m, DofMode::emi);
  // junction corner at (4, 0)
  int corner = -1;
  for (int v = 0; v < m.vertexCount(); ++v)
    if (m.vertices[v][0] == 4.0 && m.vertices[v][1] == 0.0) corner = v;
  REQUIRE(corner >= 0);
  CHECK(d.dofCount(corner) == 3);
  CHECK(d.dof(corner, 0) < d.dof(corner, 1));
  CHECK(d.dof(corner, 1) < d.dof(corner, 2));
  CHECK_THROWS(d.dof(corner, 5));
}

TEST_CASE("facet dof pairs sit on the same vertex") {
  const Mesh m = chain(2);
  const DofMap d = build_dof_map(m, DofMode::emi);
  REQUIRE(d.facetDofPairs.size() == m.membraneFacets.size());
  for (std::size_t f = 0; f < m.membraneFacets.size(); ++f) {
    const auto& p = d.facetDofPairs[f];
    for (int k = 0; k < 2; ++k) {
      CHECK(d.dofVertex[p.first[k]] == d.dofVertex[p.second[k]]);
      CHECK(d.dofSubdomain[p.first[k]] == m.membraneFacets[f].subdomains[0]);
      CHECK(d.dofSubdomain[p.second[k]] == m.membraneFacets[f].subdomains[1]);
      CHECK(d.paired(static_cast<int>(f), p.first[k]) == p.second[k]);
    }
  }
}
