#include "cardiosdc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cardiosdc {

int Mesh::subdomainCount() const {
  int n = 0;
  for (int s : elementSubdomain) n = std::max(n, s + 1);
  return n;
}

double Mesh::elementMeasure(int e) const {
  const auto& el = elements[e];
  if (dim == 1) return std::abs(vertices[el[1]][0] - vertices[el[0]][0]);
  const auto& a = vertices[el[0]];
  const auto& b = vertices[el[1]];
  const auto& c = vertices[el[2]];
  return 0.5 * std::abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

double Mesh::facetMeasure(const Facet& f) const {
  if (dim == 1) return 1.0;
  const auto& a = vertices[f.vertices[0]];
  const auto& b = vertices[f.vertices[1]];
  return std::hypot(b[0] - a[0], b[1] - a[1]);
}

double Mesh::totalMeasure() const {
  double s = 0.0;
  for (int e = 0; e < elementCount(); ++e) s += elementMeasure(e);
  return s;
}

double Mesh::domainMeasure() const {
  if (dim == 1) return upper[0] - lower[0];
  return (upper[0] - lower[0]) * (upper[1] - lower[1]);
}

void Mesh::validate() const {
  if (dim != 1 && dim != 2) throw std::logic_error("Mesh: dim must be 1 or 2");
  if (elementSubdomain.size() != elements.size())
    throw std::logic_error("Mesh: every element needs a subdomain id");
  for (int s : elementSubdomain)
    if (s < 0) throw std::logic_error("Mesh: negative subdomain id");
  for (const auto& f : boundaryFacets)
    if (f.elements[0] < 0 || f.elements[1] >= 0)
      throw std::logic_error("Mesh: boundary facet must have exactly one element");
  for (const auto& f : membraneFacets) {
    if (f.elements[0] < 0 || f.elements[1] < 0)
      throw std::logic_error("Mesh: membrane facet must have two elements");
    const int s0 = elementSubdomain[f.elements[0]];
    const int s1 = elementSubdomain[f.elements[1]];
    if (s0 == s1 || s0 != f.subdomains[0] || s1 != f.subdomains[1])
      throw std::logic_error("Mesh: membrane facet subdomains inconsistent");
    const bool outer = f.subdomains[0] == 0;
    if ((f.kind == FacetKind::outerMembrane) != outer)
      throw std::logic_error("Mesh: membrane facet kind inconsistent");
  }
  const double dm = domainMeasure();
  if (std::abs(totalMeasure() - dm) > 1e-12 * dm)
    throw std::logic_error("Mesh: element measures do not add up to the domain measure");
}

namespace {

// Collects boundary and membrane facets from element adjacency.
void extract_facets(Mesh& mesh) {
  struct Entry {
    std::int64_t key;
    int element;
    std::array<int, 2> verts;
  };
  std::vector<Entry> entries;
  const int nv = mesh.vertexCount();
  for (int e = 0; e < mesh.elementCount(); ++e) {
    const auto& el = mesh.elements[e];
    if (mesh.dim == 1) {
      for (int k = 0; k < 2; ++k) entries.push_back({el[k], e, {el[k], -1}});
    } else {
      for (int k = 0; k < 3; ++k) {
        int a = el[k];
        int b = el[(k + 1) % 3];
        if (a > b) std::swap(a, b);
        entries.push_back({static_cast<std::int64_t>(a) * nv + b, e, {a, b}});
      }
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& x, const Entry& y) { return x.key < y.key; });
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i + 1;
    while (j < entries.size() && entries[j].key == entries[i].key) ++j;
    if (j - i == 1) {
      Facet f;
      f.vertices = entries[i].verts;
      f.elements = {entries[i].element, -1};
      f.subdomains = {mesh.elementSubdomain[entries[i].element], -1};
      f.kind = FacetKind::boundary;
      mesh.boundaryFacets.push_back(f);
    } else if (j - i == 2) {
      int e0 = entries[i].element;
      int e1 = entries[i + 1].element;
      int s0 = mesh.elementSubdomain[e0];
      int s1 = mesh.elementSubdomain[e1];
      if (s0 != s1) {
        if (s0 > s1) {
          std::swap(e0, e1);
          std::swap(s0, s1);
        }
        Facet f;
        f.vertices = entries[i].verts;
        f.elements = {e0, e1};
        f.subdomains = {s0, s1};
        f.kind = s0 == 0 ? FacetKind::outerMembrane : FacetKind::gapJunction;
        mesh.membraneFacets.push_back(f);
      }
    } else {
      throw std::logic_error("Mesh: non-manifold facet");
    }
    i = j;
  }
}

// Grid of (nx x ny) quads, each split along the (+x, +y) diagonal.
void fill_grid(Mesh& mesh, int nx, int ny, double x0, double y0, double hx, double hy,
               const std::vector<int>& cellSubdomain) {
  mesh.vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) mesh.vertices.push_back({x0 + i * hx, y0 + j * hy});
  auto id = [nx](int i, int j) { return i + (nx + 1) * j; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      const int s = cellSubdomain[i + nx * j];
      mesh.elements.push_back({v00, v10, v11});
      mesh.elements.push_back({v00, v11, v01});
      mesh.elementSubdomain.push_back(s);
      mesh.elementSubdomain.push_back(s);
    }
  }
}

int snap(double coordinate, double origin, double h, const char* what) {
  const double t = (coordinate - origin) / h;
  const double r = std::round(t);
  if (std::abs(t - r) > 1e-6)
    throw std::invalid_argument(std::string("build_emi_layout: ") + what +
                                " is not aligned with the grid spacing");
  return static_cast<int>(r);
}

}  // namespace

Mesh build_cartesian(int dim, std::array<int, 2> cellsPerAxis, std::array<double, 2> extent) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("build_cartesian: dim must be 1 or 2");
  for (int d = 0; d < dim; ++d) {
    if (cellsPerAxis[d] < 1) throw std::invalid_argument("build_cartesian: cells must be >= 1");
    if (!(extent[d] > 0.0)) throw std::invalid_argument("build_cartesian: extent must be > 0");
  }
  Mesh mesh;
  mesh.dim = dim;
  if (dim == 1) {
    const int n = cellsPerAxis[0];
    const double h = extent[0] / n;
    for (int i = 0; i <= n; ++i) mesh.vertices.push_back({i == n ? extent[0] : i * h, 0.0});
    for (int i = 0; i < n; ++i) {
      mesh.elements.push_back({i, i + 1, -1});
      mesh.elementSubdomain.push_back(0);
    }
    mesh.upper = {extent[0], 0.0};
  } else {
    const int nx = cellsPerAxis[0];
    const int ny = cellsPerAxis[1];
    fill_grid(mesh, nx, ny, 0.0, 0.0, extent[0] / nx, extent[1] / ny,
              std::vector<int>(static_cast<std::size_t>(nx) * ny, 0));
    // Pin the far edges so the bounding box is exact.
    for (auto& v : mesh.vertices) {
      if (std::abs(v[0] - extent[0]) < 1e-12 * extent[0]) v[0] = extent[0];
      if (std::abs(v[1] - extent[1]) < 1e-12 * extent[1]) v[1] = extent[1];
    }
    mesh.upper = extent;
  }
  extract_facets(mesh);
  mesh.validate();
  return mesh;
}

Mesh build_emi_layout(const EmiLayout& layout, double bathMargin) {
  const double h = layout.spacing;
  if (!(h > 0.0)) throw std::invalid_argument("build_emi_layout: spacing must be > 0");
  if (layout.myocytes.empty()) throw std::invalid_argument("build_emi_layout: no myocytes");
  Rect bath;
  if (layout.bath) {
    bath = *layout.bath;
  } else {
    if (bathMargin < 0.0) throw std::invalid_argument("build_emi_layout: myocyte outside bath");
    bath = layout.myocytes.front();
    for (const auto& r : layout.myocytes) {
      bath.x0 = std::min(bath.x0, r.x0);
      bath.y0 = std::min(bath.y0, r.y0);
      bath.x1 = std::max(bath.x1, r.x1);
      bath.y1 = std::max(bath.y1, r.y1);
    }
    bath.x0 -= bathMargin;
    bath.y0 -= bathMargin;
    bath.x1 += bathMargin;
    bath.y1 += bathMargin;
  }
  const int nx = snap(bath.x1, bath.x0, h, "bath width");
  const int ny = snap(bath.y1, bath.y0, h, "bath height");
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_emi_layout: empty bath");

  struct Cells {
    int i0, j0, i1, j1;
  };
  std::vector<Cells> cells;
  for (const auto& r : layout.myocytes) {
    Cells c{snap(r.x0, bath.x0, h, "myocyte x0"), snap(r.y0, bath.y0, h, "myocyte y0"),
            snap(r.x1, bath.x0, h, "myocyte x1"), snap(r.y1, bath.y0, h, "myocyte y1")};
    if (c.i1 <= c.i0 || c.j1 <= c.j0)
      throw std::invalid_argument("build_emi_layout: degenerate myocyte rectangle");
    if (c.i0 < 0 || c.j0 < 0 || c.i1 > nx || c.j1 > ny)
      throw std::invalid_argument("build_emi_layout: myocyte outside bath");
    cells.push_back(c);
  }
  for (std::size_t a = 0; a < cells.size(); ++a)
    for (std::size_t b = a + 1; b < cells.size(); ++b) {
      const auto& p = cells[a];
      const auto& q = cells[b];
      if (p.i0 < q.i1 && q.i0 < p.i1 && p.j0 < q.j1 && q.j0 < p.j1)
        throw std::invalid_argument("build_emi_layout: myocytes " + std::to_string(a + 1) +
                                    " and " + std::to_string(b + 1) + " overlap");
    }

  std::vector<int> cellSubdomain(static_cast<std::size_t>(nx) * ny, 0);
  for (std::size_t k = 0; k < cells.size(); ++k)
    for (int j = cells[k].j0; j < cells[k].j1; ++j)
      for (int i = cells[k].i0; i < cells[k].i1; ++i)
        cellSubdomain[i + nx * j] = static_cast<int>(k) + 1;

  Mesh mesh;
  mesh.dim = 2;
  fill_grid(mesh, nx, ny, bath.x0, bath.y0, h, h, cellSubdomain);
  mesh.lower = {bath.x0, bath.y0};
  mesh.upper = {bath.x0 + nx * h, bath.y0 + ny * h};
  extract_facets(mesh);
  mesh.validate();
  return mesh;
}

int DofMap::dof(int vertex, int subdomain) const {
  if (mode == DofMode::monodomain) return vertexOffset[vertex];
  for (int d = vertexOffset[vertex]; d < vertexOffset[vertex + 1]; ++d)
    if (dofSubdomain[d] == subdomain) return d;
  throw std::out_of_range("DofMap: vertex " + std::to_string(vertex) + " has no dof in subdomain " +
                          std::to_string(subdomain));
}

int DofMap::paired(int facet, int d) const {
  const auto& p = facetDofPairs.at(facet);
  for (int k = 0; k < 2; ++k) {
    if (p.first[k] == d) return p.second[k];
    if (p.second[k] == d) return p.first[k];
  }
  throw std::invalid_argument("DofMap::paired: dof is not on this facet");
}

DofMap build_dof_map(const Mesh& mesh, DofMode mode) {
  mesh.validate();
  DofMap map;
  map.mode = mode;
  const int nv = mesh.vertexCount();
  std::vector<std::vector<int>> touching(nv);
  for (int e = 0; e < mesh.elementCount(); ++e)
    for (int k = 0; k < mesh.verticesPerElement(); ++k)
      touching[mesh.elements[e][k]].push_back(mesh.elementSubdomain[e]);
  map.vertexOffset.assign(nv + 1, 0);
  for (int v = 0; v < nv; ++v) {
    auto& s = touching[v];
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (s.empty()) throw std::logic_error("build_dof_map: vertex without element");
    if (mode == DofMode::monodomain) s.resize(1);
    map.vertexOffset[v + 1] = map.vertexOffset[v] + static_cast<int>(s.size());
    for (int sub : s) {
      map.dofVertex.push_back(v);
      map.dofSubdomain.push_back(sub);
    }
  }
  map.totalDofs = map.vertexOffset[nv];

  if (mode == DofMode::monodomain) {
    map.gatingDofs.resize(map.totalDofs);
    for (int d = 0; d < map.totalDofs; ++d) map.gatingDofs[d] = d;
    map.gatingPartner.assign(map.totalDofs, -1);
    return map;
  }

  const int nfv = mesh.dim == 1 ? 1 : 2;
  std::vector<int> gating;
  for (const auto& f : mesh.membraneFacets) {
    FacetDofPair pair;
    for (int k = 0; k < nfv; ++k) {
      pair.first[k] = map.dof(f.vertices[k], f.subdomains[0]);
      pair.second[k] = map.dof(f.vertices[k], f.subdomains[1]);
      // Gating state lives on the intracellular side of outer membranes only.
      if (f.kind == FacetKind::outerMembrane) gating.push_back(pair.second[k]);
    }
    map.facetDofPairs.push_back(pair);
  }
  std::sort(gating.begin(), gating.end());
  gating.erase(std::unique(gating.begin(), gating.end()), gating.end());
  map.gatingDofs = std::move(gating);
  for (int g : map.gatingDofs) map.gatingPartner.push_back(map.dof(map.dofVertex[g], 0));
  return map;
}

}  // namespace cardiosdc
