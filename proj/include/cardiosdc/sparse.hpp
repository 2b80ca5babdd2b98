#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace cardiosdc {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Row-compressed sparsity structure. Shared between matrices that only differ
/// in their values (mass, stiffness and the per-node sweep matrices).
struct CsrPattern {
  int rows = 0;
  int cols = 0;
  std::vector<int> rowPtr{0};
  std::vector<int> colIdx;

  int nonZeros() const { return static_cast<int>(colIdx.size()); }
  /// Storage position of (row, col), or -1 if the entry is not stored.
  int find(int row, int col) const;
  void validate() const;
};

class SparseMatrix {
 public:
  SparseMatrix();
  SparseMatrix(std::shared_ptr<const CsrPattern> pattern, std::vector<double> values);
  SparseMatrix(int rows, int cols, std::vector<int> rowPtr, std::vector<int> colIdx,
               std::vector<double> values);

  /// Duplicates are summed. Throws on out-of-range indices.
  static SparseMatrix from_triplets(int rows, int cols, std::span<const Triplet> triplets);
  static SparseMatrix identity(int n);

  int rows() const { return pattern_->rows; }
  int cols() const { return pattern_->cols; }
  int nonZeros() const { return pattern_->nonZeros(); }

  const std::shared_ptr<const CsrPattern>& pattern() const { return pattern_; }
  std::span<const int> rowPtr() const { return pattern_->rowPtr; }
  std::span<const int> colIdx() const { return pattern_->colIdx; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double at(int row, int col) const;
  double rowDot(int row, std::span<const double> x) const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<double> diagonal() const;
  SparseMatrix transpose() const;
  /// Row-major dense copy, for small matrices only.
  std::vector<double> toDense() const;
  bool isSymmetric(double tol) const;

  /// One "row col value" line per stored entry.
  void writeTriplets(std::ostream& os) const;

 private:
  std::shared_ptr<const CsrPattern> pattern_;
  std::vector<double> values_;
};

/// r[a,b] = m[idx[a], idx[b]]. idx must be sorted and unique.
SparseMatrix submatrix(const SparseMatrix& m, std::span<const int> idx);

struct SolveReport {
  int iterations = 0;
  double estimatedEnergyReduction = 0.0;
  bool converged = false;
};

struct CgSettings {
  double reductionTarget = 1e-3;
  int maxIterations = 500;
  /// Window of the delayed Gauss-quadrature error estimate.
  int delay = 5;
};

/// Jacobi-preconditioned conjugate gradients. x holds the initial guess on
/// entry and the solution on exit. Iteration stops once the estimated energy
/// error has dropped below reductionTarget times the estimated initial error.
SolveReport pcg_jacobi(const SparseMatrix& a, std::span<const double> rhs, std::span<double> x,
                       const CgSettings& settings = {});

/// sqrt(v^T a v); throws if the quadratic form is negative.
double energy_norm(const SparseMatrix& a, std::span<const double> v);
double energy_norm_squared(const SparseMatrix& a, std::span<const double> v);

}  // namespace cardiosdc
