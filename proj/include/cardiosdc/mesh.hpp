#pragma once

#include <array>
#include <optional>
#include <vector>

namespace cardiosdc {

enum class FacetKind { boundary, outerMembrane, gapJunction };

/// A facet is an edge in 2D and a point in 1D (vertices[1] == -1).
/// For membrane facets subdomains[0] < subdomains[1] and elements[] follow the
/// same order; boundary facets only use index 0.
struct Facet {
  std::array<int, 2> vertices{-1, -1};
  std::array<int, 2> elements{-1, -1};
  std::array<int, 2> subdomains{-1, -1};
  FacetKind kind = FacetKind::boundary;
};

/// Simplicial P1 mesh in 1D (segments) or 2D (triangles). Coordinates are
/// stored as (x, y) pairs, y == 0 in 1D. Immutable after construction.
struct Mesh {
  int dim = 2;
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> elements;  ///< 1D elements use the first two slots
  std::vector<int> elementSubdomain;
  std::vector<Facet> boundaryFacets;
  std::vector<Facet> membraneFacets;
  std::array<double, 2> lower{0.0, 0.0};
  std::array<double, 2> upper{0.0, 0.0};

  int verticesPerElement() const { return dim + 1; }
  int vertexCount() const { return static_cast<int>(vertices.size()); }
  int elementCount() const { return static_cast<int>(elements.size()); }
  int subdomainCount() const;
  double elementMeasure(int e) const;
  double facetMeasure(const Facet& f) const;
  double totalMeasure() const;
  double domainMeasure() const;
  /// Throws std::logic_error when the facet/subdomain invariants are violated.
  void validate() const;
};

/// Uniform grid on [0, extent_x] (x [0, extent_y]). Quads are split along the
/// (+x, +y) diagonal. Vertex ids run x-fastest.
Mesh build_cartesian(int dim, std::array<int, 2> cellsPerAxis, std::array<double, 2> extent);

struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
};

/// Axis-aligned rectangular myocytes on a structured grid of the given spacing.
/// Myocyte k gets subdomain id k+1, the bath is subdomain 0. Without an explicit
/// bath rectangle the bath is the myocytes' bounding box grown by bathMargin.
struct EmiLayout {
  double spacing = 0.0;
  std::vector<Rect> myocytes;
  std::optional<Rect> bath;
};

Mesh build_emi_layout(const EmiLayout& layout, double bathMargin);

enum class DofMode { monodomain, emi };

/// Dofs of a membrane facet's vertices on its two sides (subdomains[0] side first).
struct FacetDofPair {
  std::array<int, 2> first{-1, -1};
  std::array<int, 2> second{-1, -1};
};

/// (vertex, subdomain) -> dof numbering. In EMI mode a vertex touching k
/// subdomains owns k dofs, numbered vertex-major and by increasing subdomain id.
struct DofMap {
  DofMode mode = DofMode::monodomain;
  int totalDofs = 0;
  std::vector<int> vertexOffset;  ///< dofs of vertex v: [vertexOffset[v], vertexOffset[v+1])
  std::vector<int> dofVertex;
  std::vector<int> dofSubdomain;
  std::vector<FacetDofPair> facetDofPairs;  ///< per membrane facet (EMI only)
  std::vector<int> gatingDofs;              ///< sorted
  std::vector<int> gatingPartner;           ///< extracellular dof at the same vertex, or -1

  int dof(int vertex, int subdomain) const;
  int dofCount(int vertex) const { return vertexOffset[vertex + 1] - vertexOffset[vertex]; }
  /// The dof across membrane facet `facet` from `dof`; throws if not on the facet.
  int paired(int facet, int dof) const;
};

DofMap build_dof_map(const Mesh& mesh, DofMode mode);

}  // namespace cardiosdc
