#pragma once

#include <memory>
#include <span>
#include <vector>

#include "cardiosdc/ionic.hpp"
#include "cardiosdc/mesh.hpp"
#include "cardiosdc/problem.hpp"
#include "cardiosdc/sparse.hpp"

namespace cardiosdc {

/// P1 stiffness with per-subdomain conductivity, plus robinEps times the
/// boundary mass on the domain boundary.
SparseMatrix assemble_stiffness(const Mesh& mesh, const DofMap& dofs,
                                std::span<const double> conductivityBySubdomain,
                                double robinEps);

/// Consistent P1 mass scaled by beta * capacitance (vertex numbering).
SparseMatrix assemble_mass_monodomain(const Mesh& mesh, double beta, double capacitance);

/// Membrane facet mass coupling both sides of every membrane: + on the own
/// side, - across. Rows of dofs away from membranes are empty.
SparseMatrix assemble_membrane_mass_emi(const Mesh& mesh, const DofMap& dofs, double capacitance);

/// Same facet structure as the membrane mass, restricted to gap junctions and
/// weighted by 1/R_g: the exact Jacobian of the gap junction current.
SparseMatrix assemble_gap_coupling(const Mesh& mesh, const DofMap& dofs,
                                   const GapJunctionParams& gap);

/// Row sums of the consistent P1 mass (vertex numbering).
std::vector<double> lumped_mass(const Mesh& mesh);

enum class ModelKind { monodomain, emi };

struct MonodomainCoefficients {
  double conductivity = 0.3;
  double surfaceToVolume = 1400.0;
  double capacitance = 1e-4;
};

struct EmiCoefficients {
  double sigmaExtra = 2.0;
  double sigmaIntra = 0.3;
  double capacitance = 1e-4;
  double robinEps = 1.0;
  GapJunctionParams gap;
};

/// Assembled operators of one model together with the pointwise membrane
/// kinetics; implements the interface consumed by the sweep iteration.
class ModelOperators : public SdcProblem {
 public:
  static ModelOperators monodomain(std::shared_ptr<const Mesh> mesh,
                                   const MonodomainCoefficients& coeff,
                                   const AlievPanfilovParams& ionic, bool reaction = true,
                                   bool gating = true);
  static ModelOperators emi(std::shared_ptr<const Mesh> mesh, const EmiCoefficients& coeff,
                            const AlievPanfilovParams& ionic, bool gating = false);

  ModelKind kind() const { return kind_; }
  const Mesh& mesh() const { return *mesh_; }
  const DofMap& dofMap() const { return *dofs_; }
  const AlievPanfilovParams& ionic() const { return ionic_; }
  const SparseMatrix& gapCoupling() const { return gap_; }

  int size() const override { return dofs_->totalDofs; }
  const SparseMatrix& mass() const override { return mass_; }
  const SparseMatrix& stiffness() const override { return stiffness_; }
  const SparseMatrix& sweepStiffness() const override { return sweepStiffness_; }
  void reaction(int row, std::span<const double> u, std::span<const double> w, double& b,
                double& lumpedJacobian) const override;
  bool hasGating() const override { return gating_; }
  std::span<const int> gatingDofs() const override { return dofs_->gatingDofs; }
  std::span<const int> gatingPartner() const override { return dofs_->gatingPartner; }
  std::span<const MembranePair> membranePairs() const override { return pairs_; }
  double pairJacobian(int pair, std::span<const double> u,
                      std::span<const double> w) const override;
  void gatingRate(double v, double w, double& rate, double& dRateDw) const override;
  double normalization() const override { return normalization_; }

  /// Transmembrane voltage at a gating dof.
  double transmembrane(int gatingIndex, std::span<const double> u) const;

 private:
  struct MembraneFacet {
    double length;
    bool gap;
    FacetDofPair dofs;
  };

  ModelOperators() = default;
  double facetLoad(const MembraneFacet& f, int vertexSlot, std::span<const double> u,
                   std::span<const double> w, double& jac) const;

  ModelKind kind_ = ModelKind::monodomain;
  std::shared_ptr<const Mesh> mesh_;
  std::shared_ptr<const DofMap> dofs_;
  AlievPanfilovParams ionic_;
  GapJunctionParams gapParams_;
  bool reaction_ = true;
  bool gating_ = true;
  double beta_ = 1.0;
  double normalization_ = 1.0;
  SparseMatrix mass_;
  SparseMatrix stiffness_;
  SparseMatrix gap_;
  SparseMatrix sweepStiffness_;
  std::vector<double> lumpedMass_;  // monodomain, scaled by beta
  std::vector<MembraneFacet> facets_;
  // dof -> incident membrane facets as (facet, slot, side) with side 0/1
  std::vector<int> incidentOffset_;
  std::vector<std::array<int, 3>> incident_;
  std::vector<MembranePair> pairs_;  ///< EMI: (bath, intracellular) per gating dof
};

struct ReactionEval {
  std::vector<double> b;
  std::vector<double> lumpedJacobian;
};

/// b(u, w) and its lumped variable Jacobian on every dof.
ReactionEval assemble_reaction(const ModelOperators& ops, std::span<const double> u,
                               std::span<const double> w);

}  // namespace cardiosdc
