#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cardiosdc/adaptivity.hpp"
#include "cardiosdc/collocation.hpp"
#include "cardiosdc/problem.hpp"
#include "cardiosdc/sparse.hpp"

namespace cardiosdc {

struct SdcSettings {
  double tol = 1e-4;
  int maxSweeps = 25;
  CgSettings cg;
  double initialRho = 0.05;
  /// Negative lumped reaction Jacobians are kept down to -theta * m / c, with m
  /// the lumped mass and c the sweep weight; theta < 1/4 keeps the P1 sweep
  /// systems positive definite, theta = 0 drops negative parts entirely.
  double jacobianFloor = 0.2;
};

/// Iterate of one time step. Node 0 holds the initial value.
struct SdcState {
  double timeStep = 0.0;
  std::vector<std::vector<double>> u;
  std::vector<std::vector<double>> w;
  int sweep = 0;
  /// Normalized sum of squared correction energy norms, one entry per sweep.
  std::vector<double> correctionNormHistory;
  /// Prior until the second sweep, then estimated from the history.
  double rhoEstimate = 0.05;
};

struct SweepResult {
  std::vector<double> nodeNormsSquared;  ///< ||du_i||^2 in the node's sweep energy norm
  double normSquared = 0.0;              ///< sum over nodes divided by the normalization
  /// corrections[i][a]: correction at node i+1 of dof active.indices[a]
  std::vector<std::vector<double>> corrections;
  int solverIterations = 0;
  bool solverConverged = true;
  int activeDofs = 0;
  double wallMs = 0.0;
};

class SdcIntegrator {
 public:
  SdcIntegrator(const SdcProblem& problem, CollocationScheme scheme, SdcSettings settings);

  const SdcProblem& problem() const { return *problem_; }
  const CollocationScheme& scheme() const { return scheme_; }
  const SdcSettings& settings() const { return settings_; }

  /// Every node initialized with (u0, w0).
  SdcState initialState(std::span<const double> u0, std::span<const double> w0,
                        double timeStep) const;

  /// Phi_i = -M (u_{i+1} - u_i) - T sum_j S_ij (A u_j + b(u_j, w_j)), i = 0..m-1.
  std::vector<std::vector<double>> residual(const SdcState& state) const;
  /// psi_i = -(w_{i+1} - w_i) + T sum_j S_ij R(v_j, w_j) on the gating dofs
  /// (entries of other dofs are zero).
  std::vector<std::vector<double>> gatingResidual(const SdcState& state) const;

  /// One sweep restricted to `active`; dofs outside keep their values.
  /// Consecutive calls within a step must pass nested sets.
  SweepResult sweep(SdcState& state, const ActiveSet& active);

 private:
  struct Extraction {
    std::vector<int> indices;
    std::shared_ptr<const SweepOperator> op;
  };
  struct Coupling {
    int row;
    int col;
    int pos;  ///< storage position in the local sweep pattern
    double value;
  };
  struct NodeJacobian {
    std::vector<double> diag;
    std::vector<Coupling> off;
  };
  const Extraction& extraction(const ActiveSet& active);
  double floorJacobian(double jac, double lumpedMass, double c) const;
  NodeJacobian nodeJacobian(const SdcState& state, int node, std::span<const int> idx,
                            const SweepOperator& op) const;
  void gatingPass(SdcState& state, std::span<const int> idx) const;
  void checkState(const SdcState& state) const;

  const SdcProblem* problem_;
  CollocationScheme scheme_;
  SdcSettings settings_;
  std::shared_ptr<const SweepOperator> fullOp_;
  std::vector<int> gatingIndex_;  ///< dof -> position in gatingDofs, or -1
  std::vector<double> rowMass_;
  std::vector<int> pairOffset_;  ///< dof -> incident membrane pairs (CSR), empty without pairs
  std::vector<int> pairIncident_;
  mutable std::vector<int> localIndex_;  ///< global -> local active index during a sweep
  std::optional<Extraction> current_;
};

/// sqrt(h[k] / h[k-1]) clamped to [0.01, 0.95]; 0.05 with a single entry.
double estimate_rho(std::span<const double> history);

/// True iff sumSquares <= ((1 - rho) / rho * tol)^2.
bool check_termination(double sumSquares, double rho, double tol);

}  // namespace cardiosdc
