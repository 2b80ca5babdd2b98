#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cardiosdc/ionic.hpp"
#include "cardiosdc/sparse.hpp"

namespace cardiosdc {

/// Dofs updated in one sweep; sorted and unique. Sets of consecutive sweeps
/// within a step are nested.
struct ActiveSet {
  std::vector<int> indices;
  int sweep = 1;

  int size() const { return static_cast<int>(indices.size()); }
  static ActiveSet full(int n);
};

enum class DropMode { off, empirical, theoretical };

struct DropPolicy {
  DropMode mode = DropMode::empirical;
  double alpha = 0.1;
  double eta = 0.0;       ///< 1/time, theoretical mode
  double timeStep = 0.0;  ///< theoretical mode
  int sweeps = 4;         ///< planned sweep count r, theoretical mode
  double rho = 0.05;      ///< theoretical mode
  double tol = 1e-4;
  /// Replaces the computed value when set (any mode but off). Needed for drop
  /// tolerances above TOL, which alpha in (0, 1] cannot express.
  std::optional<double> absolute;

  void validate() const;
};

double drop_tolerance(const DropPolicy& policy);

/// Smallest integer r >= 0 with rho^r c <= (1 - rho) tol.
int required_sweeps(double c, double rho, double tol);

/// Keeps the parent dofs whose correction reaches tolDrop at some node.
/// corrections[node][a] refers to parent.indices[a].
ActiveSet select_active(std::span<const std::vector<double>> corrections, double tolDrop,
                        const ActiveSet& parent);

/// max(0, -min dI/dv) / (beta C_m) over the given node values.
double compute_eta(std::span<const std::vector<double>> vNodes,
                   std::span<const std::vector<double>> wNodes, const AlievPanfilovParams& params,
                   double beta, double capacitance);

/// Mass and stiffness of the sweep system on one shared pattern (union of
/// both, diagonal always stored), so that M + c (K + diag(d)) is assembled by
/// a single pass over the values.
struct SweepOperator {
  std::shared_ptr<const CsrPattern> pattern;
  std::vector<double> mass;
  std::vector<double> stiffness;
  std::vector<int> diagonal;  ///< storage position of (r, r)

  int size() const { return pattern->rows; }
  static SweepOperator build(const SparseMatrix& m, const SparseMatrix& k);

  /// Values of M + c (K + diag(d)).
  SparseMatrix combine(double c, std::span<const double> d) const;
  void multiplyMass(std::span<const double> x, std::span<double> y) const;
  /// y += s * (K x + d .* x)
  void addStiffness(double s, std::span<const double> x, std::span<const double> d,
                    std::span<double> y) const;
};

/// The operator on childIndices (global ids), extracted from an operator on
/// parentIndices. Throws std::invalid_argument if child is not a subset.
SweepOperator restrict_system(const SweepOperator& parent, std::span<const int> parentIndices,
                              std::span<const int> childIndices);

std::vector<double> restrict_vector(std::span<const double> full, std::span<const int> indices);
std::vector<double> prolong(std::span<const double> local, std::span<const int> indices,
                            int fullSize);

}  // namespace cardiosdc
