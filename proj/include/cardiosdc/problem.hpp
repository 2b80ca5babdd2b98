#pragma once

#include <span>

#include "cardiosdc/sparse.hpp"

namespace cardiosdc {

/// Two dofs coupled through a membrane current of the transmembrane voltage
/// u[second] - u[first]; its Jacobian has the pattern [J -J; -J J].
struct MembranePair {
  int first;
  int second;
  double lumpedMass;  ///< lumped membrane capacitance of the pair
};

/// Semidiscrete system  M u' = -A u - b(u, w),  w' = R(v, w)  as seen by the
/// sweep iteration. b may contain linear membrane currents whose exact
/// Jacobian is part of sweepStiffness(); reaction() reports only the lumped
/// derivative of the variable part.
class SdcProblem {
 public:
  virtual ~SdcProblem() = default;

  virtual int size() const = 0;
  virtual const SparseMatrix& mass() const = 0;
  virtual const SparseMatrix& stiffness() const = 0;
  virtual const SparseMatrix& sweepStiffness() const = 0;

  /// b(u, w) at `row` and the pointwise part of the lumped variable Jacobian.
  virtual void reaction(int row, std::span<const double> u, std::span<const double> w, double& b,
                        double& lumpedJacobian) const = 0;

  /// Membrane parts of the lumped variable Jacobian.
  virtual std::span<const MembranePair> membranePairs() const { return {}; }
  virtual double pairJacobian(int /*pair*/, std::span<const double> /*u*/,
                              std::span<const double> /*w*/) const {
    return 0.0;
  }

  virtual bool hasGating() const { return false; }
  /// Dofs carrying a gating variable (sorted) and the dof whose potential is
  /// subtracted to form the transmembrane voltage (-1: none).
  virtual std::span<const int> gatingDofs() const { return {}; }
  virtual std::span<const int> gatingPartner() const { return {}; }
  virtual void gatingRate(double /*v*/, double /*w*/, double& rate, double& dRateDw) const {
    rate = 0.0;
    dRateDw = 0.0;
  }

  /// Correction energy norms are divided by this value.
  virtual double normalization() const { return 1.0; }
};

}  // namespace cardiosdc
