#include "cardiosdc/assembly.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cardiosdc {

namespace {

struct ElementGeometry {
  double measure;
  std::array<std::array<double, 2>, 3> grad;  // gradients of the P1 basis
};

ElementGeometry element_geometry(const Mesh& mesh, int e) {
  ElementGeometry g{};
  const auto& el = mesh.elements[e];
  if (mesh.dim == 1) {
    const double h = mesh.vertices[el[1]][0] - mesh.vertices[el[0]][0];
    g.measure = std::abs(h);
    g.grad[0] = {-1.0 / h, 0.0};
    g.grad[1] = {1.0 / h, 0.0};
    return g;
  }
  const auto& p0 = mesh.vertices[el[0]];
  const auto& p1 = mesh.vertices[el[1]];
  const auto& p2 = mesh.vertices[el[2]];
  const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
  g.measure = 0.5 * std::abs(det);
  const std::array<const std::array<double, 2>*, 3> p{&p0, &p1, &p2};
  for (int k = 0; k < 3; ++k) {
    const auto& a = *p[(k + 1) % 3];
    const auto& b = *p[(k + 2) % 3];
    g.grad[k] = {(a[1] - b[1]) / det, (b[0] - a[0]) / det};
  }
  return g;
}

// P1 facet mass, scaled: 2D edge of length L -> L/6 [2 1; 1 2]; 1D point -> 1.
double facet_mass(const Mesh& mesh, double length, int a, int b) {
  if (mesh.dim == 1) return 1.0;
  return length / 6.0 * (a == b ? 2.0 : 1.0);
}

SparseMatrix membrane_coupling(const Mesh& mesh, const DofMap& dofs, double weight,
                               bool gapOnly) {
  if (dofs.mode != DofMode::emi)
    throw std::invalid_argument("membrane assembly requires an EMI dof map");
  std::vector<Triplet> t;
  const int nfv = mesh.dim == 1 ? 1 : 2;
  for (std::size_t f = 0; f < mesh.membraneFacets.size(); ++f) {
    const auto& facet = mesh.membraneFacets[f];
    if (gapOnly && facet.kind != FacetKind::gapJunction) continue;
    const double len = mesh.facetMeasure(facet);
    const auto& pair = dofs.facetDofPairs[f];
    for (int a = 0; a < nfv; ++a)
      for (int b = 0; b < nfv; ++b) {
        const double m = weight * facet_mass(mesh, len, a, b);
        t.push_back({pair.first[a], pair.first[b], m});
        t.push_back({pair.second[a], pair.second[b], m});
        t.push_back({pair.first[a], pair.second[b], -m});
        t.push_back({pair.second[a], pair.first[b], -m});
      }
  }
  return SparseMatrix::from_triplets(dofs.totalDofs, dofs.totalDofs, t);
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<Triplet> t;
  t.reserve(a.nonZeros() + b.nonZeros());
  for (const SparseMatrix* m : {&a, &b}) {
    const auto rp = m->rowPtr();
    const auto ci = m->colIdx();
    const auto v = m->values();
    for (int r = 0; r < m->rows(); ++r)
      for (int k = rp[r]; k < rp[r + 1]; ++k) t.push_back({r, ci[k], v[k]});
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), t);
}

constexpr double kGaussLow = 0.21132486540518711775;   // (1 - 1/sqrt(3)) / 2
constexpr double kGaussHigh = 0.78867513459481288225;  // (1 + 1/sqrt(3)) / 2

}  // namespace

SparseMatrix assemble_stiffness(const Mesh& mesh, const DofMap& dofs,
                                std::span<const double> conductivityBySubdomain,
                                double robinEps) {
  if (robinEps < 0.0) throw std::invalid_argument("assemble_stiffness: robinEps must be >= 0");
  std::vector<Triplet> t;
  const int nve = mesh.verticesPerElement();
  t.reserve(static_cast<std::size_t>(mesh.elementCount()) * nve * nve);
  for (int e = 0; e < mesh.elementCount(); ++e) {
    const int s = mesh.elementSubdomain[e];
    if (s >= static_cast<int>(conductivityBySubdomain.size()))
      throw std::invalid_argument("assemble_stiffness: missing conductivity for subdomain " +
                                  std::to_string(s));
    const double sigma = conductivityBySubdomain[s];
    if (!(sigma > 0.0))
      throw std::invalid_argument("assemble_stiffness: conductivity must be positive");
    const auto g = element_geometry(mesh, e);
    for (int a = 0; a < nve; ++a) {
      const int da = dofs.dof(mesh.elements[e][a], s);
      for (int b = 0; b < nve; ++b) {
        const int db = dofs.dof(mesh.elements[e][b], s);
        const double k =
            sigma * g.measure * (g.grad[a][0] * g.grad[b][0] + g.grad[a][1] * g.grad[b][1]);
        t.push_back({da, db, k});
      }
    }
  }
  if (robinEps > 0.0) {
    const int nfv = mesh.dim == 1 ? 1 : 2;
    for (const auto& f : mesh.boundaryFacets) {
      const double len = mesh.facetMeasure(f);
      for (int a = 0; a < nfv; ++a)
        for (int b = 0; b < nfv; ++b)
          t.push_back({dofs.dof(f.vertices[a], f.subdomains[0]),
                       dofs.dof(f.vertices[b], f.subdomains[0]),
                       robinEps * facet_mass(mesh, len, a, b)});
    }
  }
  return SparseMatrix::from_triplets(dofs.totalDofs, dofs.totalDofs, t);
}

SparseMatrix assemble_mass_monodomain(const Mesh& mesh, double beta, double capacitance) {
  if (!(beta > 0.0) || !(capacitance > 0.0))
    throw std::invalid_argument("assemble_mass_monodomain: beta and capacitance must be > 0");
  const double scale = beta * capacitance;
  const int nve = mesh.verticesPerElement();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(mesh.elementCount()) * nve * nve);
  for (int e = 0; e < mesh.elementCount(); ++e) {
    const double m = mesh.elementMeasure(e);
    // 1D: h/6 [2 1; 1 2], 2D: |T|/12 [2 1 1; 1 2 1; 1 1 2]
    const double off = mesh.dim == 1 ? m / 6.0 : m / 12.0;
    for (int a = 0; a < nve; ++a)
      for (int b = 0; b < nve; ++b)
        t.push_back({mesh.elements[e][a], mesh.elements[e][b], scale * off * (a == b ? 2.0 : 1.0)});
  }
  return SparseMatrix::from_triplets(mesh.vertexCount(), mesh.vertexCount(), t);
}

std::vector<double> lumped_mass(const Mesh& mesh) {
  std::vector<double> lm(mesh.vertexCount(), 0.0);
  const int nve = mesh.verticesPerElement();
  for (int e = 0; e < mesh.elementCount(); ++e) {
    const double share = mesh.elementMeasure(e) / nve;
    for (int a = 0; a < nve; ++a) lm[mesh.elements[e][a]] += share;
  }
  return lm;
}

SparseMatrix assemble_membrane_mass_emi(const Mesh& mesh, const DofMap& dofs, double capacitance) {
  if (!(capacitance > 0.0))
    throw std::invalid_argument("assemble_membrane_mass_emi: capacitance must be > 0");
  return membrane_coupling(mesh, dofs, capacitance, false);
}

SparseMatrix assemble_gap_coupling(const Mesh& mesh, const DofMap& dofs,
                                   const GapJunctionParams& gap) {
  gap.validate();
  return membrane_coupling(mesh, dofs, gap_conductance(gap), true);
}

ModelOperators ModelOperators::monodomain(std::shared_ptr<const Mesh> mesh,
                                          const MonodomainCoefficients& coeff,
                                          const AlievPanfilovParams& ionic, bool reaction,
                                          bool gating) {
  ionic.validate();
  ModelOperators ops;
  ops.kind_ = ModelKind::monodomain;
  ops.mesh_ = std::move(mesh);
  ops.dofs_ = std::make_shared<DofMap>(build_dof_map(*ops.mesh_, DofMode::monodomain));
  ops.ionic_ = ionic;
  ops.reaction_ = reaction;
  ops.gating_ = gating && reaction;
  ops.beta_ = coeff.surfaceToVolume;
  const std::vector<double> sigma(std::max(1, ops.mesh_->subdomainCount()), coeff.conductivity);
  ops.stiffness_ = assemble_stiffness(*ops.mesh_, *ops.dofs_, sigma, 0.0);
  ops.mass_ = assemble_mass_monodomain(*ops.mesh_, coeff.surfaceToVolume, coeff.capacitance);
  ops.gap_ = SparseMatrix::from_triplets(ops.size(), ops.size(), {});
  ops.sweepStiffness_ = ops.stiffness_;
  ops.lumpedMass_ = lumped_mass(*ops.mesh_);
  for (double& m : ops.lumpedMass_) m *= ops.beta_;
  ops.normalization_ = 1.0;
  return ops;
}

ModelOperators ModelOperators::emi(std::shared_ptr<const Mesh> mesh, const EmiCoefficients& coeff,
                                   const AlievPanfilovParams& ionic, bool gating) {
  ionic.validate();
  coeff.gap.validate();
  if (!(coeff.robinEps > 0.0))
    throw std::invalid_argument("EMI model requires a positive Robin coefficient");
  ModelOperators ops;
  ops.kind_ = ModelKind::emi;
  ops.mesh_ = std::move(mesh);
  ops.dofs_ = std::make_shared<DofMap>(build_dof_map(*ops.mesh_, DofMode::emi));
  ops.ionic_ = ionic;
  ops.gapParams_ = coeff.gap;
  ops.gating_ = gating;
  const Mesh& m = *ops.mesh_;
  std::vector<double> sigma(std::max(1, m.subdomainCount()), coeff.sigmaIntra);
  sigma[0] = coeff.sigmaExtra;
  ops.stiffness_ = assemble_stiffness(m, *ops.dofs_, sigma, coeff.robinEps);
  ops.mass_ = assemble_membrane_mass_emi(m, *ops.dofs_, coeff.capacitance);
  ops.gap_ = assemble_gap_coupling(m, *ops.dofs_, coeff.gap);
  ops.sweepStiffness_ = add(ops.stiffness_, ops.gap_);

  double membraneLength = 0.0;
  std::vector<std::vector<std::array<int, 3>>> incident(ops.size());
  const int nfv = m.dim == 1 ? 1 : 2;
  for (std::size_t f = 0; f < m.membraneFacets.size(); ++f) {
    const auto& facet = m.membraneFacets[f];
    MembraneFacet mf{m.facetMeasure(facet), facet.kind == FacetKind::gapJunction,
                     ops.dofs_->facetDofPairs[f]};
    membraneLength += mf.length;
    for (int k = 0; k < nfv; ++k) {
      incident[mf.dofs.first[k]].push_back({static_cast<int>(f), k, 0});
      incident[mf.dofs.second[k]].push_back({static_cast<int>(f), k, 1});
    }
    ops.facets_.push_back(mf);
  }
  ops.incidentOffset_.assign(ops.size() + 1, 0);
  for (int d = 0; d < ops.size(); ++d) {
    ops.incidentOffset_[d + 1] = ops.incidentOffset_[d] + static_cast<int>(incident[d].size());
    ops.incident_.insert(ops.incident_.end(), incident[d].begin(), incident[d].end());
  }
  const auto& gd = ops.dofs_->gatingDofs;
  for (std::size_t k = 0; k < gd.size(); ++k) {
    double lumped = 0.0;
    for (int q = ops.incidentOffset_[gd[k]]; q < ops.incidentOffset_[gd[k] + 1]; ++q) {
      const auto& [facet, slot, side] = ops.incident_[q];
      if (side != 1 || ops.facets_[facet].gap) continue;
      lumped += coeff.capacitance * (m.dim == 1 ? 1.0 : 0.5 * ops.facets_[facet].length);
    }
    ops.pairs_.push_back({ops.dofs_->gatingPartner[k], gd[k], lumped});
  }
  ops.normalization_ = coeff.capacitance * (membraneLength > 0.0 ? membraneLength : 1.0);
  return ops;
}

// Load of facet f on the second-side dof at vertexSlot; the first side
// receives the negative. v = u_second - u_first.
double ModelOperators::facetLoad(const MembraneFacet& f, int slot, std::span<const double> u,
                                 std::span<const double> w, double& jac) const {
  jac = 0.0;
  if (mesh_->dim == 1) {
    const double v = u[f.dofs.second[0]] - u[f.dofs.first[0]];
    if (f.gap) return gap_current(v, gapParams_);
    const double wv = gating_ ? w[f.dofs.second[0]] : 0.0;
    jac = di_ion_dv(v, wv, ionic_);
    return i_ion(v, wv, ionic_);
  }
  const double v0 = u[f.dofs.second[0]] - u[f.dofs.first[0]];
  const double v1 = u[f.dofs.second[1]] - u[f.dofs.first[1]];
  double w0 = 0.0;
  double w1 = 0.0;
  if (gating_ && !f.gap) {
    w0 = w[f.dofs.second[0]];
    w1 = w[f.dofs.second[1]];
  }
  double load = 0.0;
  const double half = 0.5 * f.length;
  for (double xi : {kGaussLow, kGaussHigh}) {
    const double phi = slot == 0 ? 1.0 - xi : xi;
    const double v = (1.0 - xi) * v0 + xi * v1;
    if (f.gap) {
      load += half * phi * gap_current(v, gapParams_);
    } else {
      const double wv = (1.0 - xi) * w0 + xi * w1;
      load += half * phi * i_ion(v, wv, ionic_);
      jac += half * phi * di_ion_dv(v, wv, ionic_);
    }
  }
  return load;
}

void ModelOperators::reaction(int row, std::span<const double> u, std::span<const double> w,
                              double& b, double& lumpedJacobian) const {
  b = 0.0;
  lumpedJacobian = 0.0;
  if (kind_ == ModelKind::monodomain) {
    if (!reaction_) return;
    const double wv = gating_ ? w[row] : 0.0;
    b = lumpedMass_[row] * i_ion(u[row], wv, ionic_);
    lumpedJacobian = lumpedMass_[row] * di_ion_dv(u[row], wv, ionic_);
    return;
  }
  for (int k = incidentOffset_[row]; k < incidentOffset_[row + 1]; ++k) {
    const auto& [facet, slot, side] = incident_[k];
    double jac = 0.0;
    const double load = facetLoad(facets_[facet], slot, u, w, jac);
    b += side == 1 ? load : -load;
  }
}

double ModelOperators::pairJacobian(int pair, std::span<const double> u,
                                    std::span<const double> w) const {
  const int g = pairs_.at(pair).second;
  double total = 0.0;
  for (int k = incidentOffset_[g]; k < incidentOffset_[g + 1]; ++k) {
    const auto& [facet, slot, side] = incident_[k];
    if (side != 1 || facets_[facet].gap) continue;
    double jac = 0.0;
    facetLoad(facets_[facet], slot, u, w, jac);
    total += jac;
  }
  return total;
}

void ModelOperators::gatingRate(double v, double w, double& rate, double& dRateDw) const {
  rate = r_gate(v, w, ionic_);
  dRateDw = dr_dw(v, w, ionic_);
}

double ModelOperators::transmembrane(int gatingIndex, std::span<const double> u) const {
  const int g = dofs_->gatingDofs[gatingIndex];
  const int p = dofs_->gatingPartner[gatingIndex];
  return p < 0 ? u[g] : u[g] - u[p];
}

ReactionEval assemble_reaction(const ModelOperators& ops, std::span<const double> u,
                               std::span<const double> w) {
  if (u.size() != static_cast<std::size_t>(ops.size()) ||
      w.size() != static_cast<std::size_t>(ops.size()))
    throw std::invalid_argument("assemble_reaction: state size does not match the dof map");
  ReactionEval r{std::vector<double>(ops.size()), std::vector<double>(ops.size())};
  for (int d = 0; d < ops.size(); ++d) ops.reaction(d, u, w, r.b[d], r.lumpedJacobian[d]);
  return r;
}

}  // namespace cardiosdc
