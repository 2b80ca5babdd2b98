#include "cardiosdc/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cardiosdc {

int CsrPattern::find(int row, int col) const {
  const auto first = colIdx.begin() + rowPtr[row];
  const auto last = colIdx.begin() + rowPtr[row + 1];
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return -1;
  return static_cast<int>(it - colIdx.begin());
}

void CsrPattern::validate() const {
  if (rows < 0 || cols < 0) throw std::invalid_argument("CsrPattern: negative dimensions");
  if (rowPtr.size() != static_cast<std::size_t>(rows) + 1 || rowPtr.front() != 0)
    throw std::invalid_argument("CsrPattern: malformed row pointer");
  if (rowPtr.back() != nonZeros()) throw std::invalid_argument("CsrPattern: rowPtr[rows] != nnz");
  for (int r = 0; r < rows; ++r) {
    if (rowPtr[r + 1] < rowPtr[r]) throw std::invalid_argument("CsrPattern: rowPtr not monotone");
    for (int k = rowPtr[r]; k < rowPtr[r + 1]; ++k) {
      if (colIdx[k] < 0 || colIdx[k] >= cols)
        throw std::invalid_argument("CsrPattern: column index out of range");
      if (k > rowPtr[r] && colIdx[k] <= colIdx[k - 1])
        throw std::invalid_argument("CsrPattern: columns not strictly increasing in row " +
                                    std::to_string(r));
    }
  }
}

SparseMatrix::SparseMatrix() : pattern_(std::make_shared<CsrPattern>()) {}

SparseMatrix::SparseMatrix(std::shared_ptr<const CsrPattern> pattern, std::vector<double> values)
    : pattern_(std::move(pattern)), values_(std::move(values)) {
  if (!pattern_) throw std::invalid_argument("SparseMatrix: null pattern");
  if (values_.size() != static_cast<std::size_t>(pattern_->nonZeros()))
    throw std::invalid_argument("SparseMatrix: value count does not match pattern");
}

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> rowPtr, std::vector<int> colIdx,
                           std::vector<double> values) {
  auto p = std::make_shared<CsrPattern>();
  p->rows = rows;
  p->cols = cols;
  p->rowPtr = std::move(rowPtr);
  p->colIdx = std::move(colIdx);
  p->validate();
  if (values.size() != p->colIdx.size())
    throw std::invalid_argument("SparseMatrix: value count does not match pattern");
  pattern_ = std::move(p);
  values_ = std::move(values);
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::span<const Triplet> triplets) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("from_triplets: negative dimensions");
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::out_of_range("from_triplets: index (" + std::to_string(t.row) + ", " +
                              std::to_string(t.col) + ") out of range");
  }
  // Sort-then-sum: the result does not depend on triplet order beyond
  // the summation order of duplicates, which follows the input order.
  std::vector<int> order(triplets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ta = triplets[a];
    const auto& tb = triplets[b];
    return ta.row != tb.row ? ta.row < tb.row : ta.col < tb.col;
  });

  auto p = std::make_shared<CsrPattern>();
  p->rows = rows;
  p->cols = cols;
  p->rowPtr.assign(rows + 1, 0);
  std::vector<double> values;
  values.reserve(triplets.size());
  p->colIdx.reserve(triplets.size());
  int lastRow = -1;
  int lastCol = -1;
  for (int k : order) {
    const auto& t = triplets[k];
    if (t.row == lastRow && t.col == lastCol) {
      values.back() += t.value;
      continue;
    }
    p->colIdx.push_back(t.col);
    values.push_back(t.value);
    p->rowPtr[t.row + 1]++;
    lastRow = t.row;
    lastCol = t.col;
  }
  for (int r = 0; r < rows; ++r) p->rowPtr[r + 1] += p->rowPtr[r];
  return SparseMatrix(std::move(p), std::move(values));
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<int> rowPtr(n + 1);
  std::vector<int> colIdx(n);
  std::iota(rowPtr.begin(), rowPtr.end(), 0);
  std::iota(colIdx.begin(), colIdx.end(), 0);
  return SparseMatrix(n, n, std::move(rowPtr), std::move(colIdx), std::vector<double>(n, 1.0));
}

double SparseMatrix::at(int row, int col) const {
  if (row < 0 || row >= rows() || col < 0 || col >= cols())
    throw std::out_of_range("SparseMatrix::at: index out of range");
  const int k = pattern_->find(row, col);
  return k < 0 ? 0.0 : values_[k];
}

double SparseMatrix::rowDot(int row, std::span<const double> x) const {
  const auto& p = *pattern_;
  double s = 0.0;
  for (int k = p.rowPtr[row]; k < p.rowPtr[row + 1]; ++k) s += values_[k] * x[p.colIdx[k]];
  return s;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != static_cast<std::size_t>(cols()) || y.size() != static_cast<std::size_t>(rows()))
    throw std::invalid_argument("SparseMatrix::multiply: dimension mismatch");
  const auto& p = *pattern_;
  for (int r = 0; r < p.rows; ++r) {
    double s = 0.0;
    for (int k = p.rowPtr[r]; k < p.rowPtr[r + 1]; ++k) s += values_[k] * x[p.colIdx[k]];
    y[r] = s;
  }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows());
  multiply(x, y);
  return y;
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(std::min(rows(), cols()), 0.0);
  for (int r = 0; r < static_cast<int>(d.size()); ++r) {
    const int k = pattern_->find(r, r);
    if (k >= 0) d[r] = values_[k];
  }
  return d;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(nonZeros());
  const auto& p = *pattern_;
  for (int r = 0; r < p.rows; ++r)
    for (int k = p.rowPtr[r]; k < p.rowPtr[r + 1]; ++k) t.push_back({p.colIdx[k], r, values_[k]});
  return from_triplets(cols(), rows(), t);
}

std::vector<double> SparseMatrix::toDense() const {
  std::vector<double> d(static_cast<std::size_t>(rows()) * cols(), 0.0);
  const auto& p = *pattern_;
  for (int r = 0; r < p.rows; ++r)
    for (int k = p.rowPtr[r]; k < p.rowPtr[r + 1]; ++k)
      d[static_cast<std::size_t>(r) * cols() + p.colIdx[k]] = values_[k];
  return d;
}

bool SparseMatrix::isSymmetric(double tol) const {
  if (rows() != cols()) return false;
  const auto& p = *pattern_;
  for (int r = 0; r < p.rows; ++r)
    for (int k = p.rowPtr[r]; k < p.rowPtr[r + 1]; ++k)
      if (std::abs(values_[k] - at(p.colIdx[k], r)) > tol) return false;
  return true;
}

void SparseMatrix::writeTriplets(std::ostream& os) const {
  const auto& p = *pattern_;
  os.precision(17);
  for (int r = 0; r < p.rows; ++r)
    for (int k = p.rowPtr[r]; k < p.rowPtr[r + 1]; ++k)
      os << r << ' ' << p.colIdx[k] << ' ' << values_[k] << '\n';
}

SparseMatrix submatrix(const SparseMatrix& m, std::span<const int> idx) {
  if (m.rows() != m.cols()) throw std::invalid_argument("submatrix: matrix must be square");
  const int n = m.rows();
  std::vector<int> position(n, -1);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    if (idx[a] < 0 || idx[a] >= n) throw std::out_of_range("submatrix: index out of range");
    if (a > 0 && idx[a] <= idx[a - 1])
      throw std::invalid_argument("submatrix: indices must be sorted and unique");
    position[idx[a]] = static_cast<int>(a);
  }
  auto p = std::make_shared<CsrPattern>();
  p->rows = p->cols = static_cast<int>(idx.size());
  p->rowPtr.assign(idx.size() + 1, 0);
  std::vector<double> values;
  const auto rowPtr = m.rowPtr();
  const auto colIdx = m.colIdx();
  const auto vals = m.values();
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const int r = idx[a];
    for (int k = rowPtr[r]; k < rowPtr[r + 1]; ++k) {
      const int b = position[colIdx[k]];
      if (b < 0) continue;
      p->colIdx.push_back(b);
      values.push_back(vals[k]);
    }
    p->rowPtr[a + 1] = p->nonZeros();
  }
  return SparseMatrix(std::move(p), std::move(values));
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

SolveReport pcg_jacobi(const SparseMatrix& a, std::span<const double> rhs, std::span<double> x,
                       const CgSettings& settings) {
  const int n = a.rows();
  if (a.cols() != n || rhs.size() != static_cast<std::size_t>(n) ||
      x.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("pcg_jacobi: dimension mismatch");
  std::vector<double> invDiag = a.diagonal();
  for (int i = 0; i < n; ++i) {
    if (!(invDiag[i] > 0.0))
      throw std::domain_error("pcg_jacobi: non-positive diagonal entry at row " +
                              std::to_string(i));
    invDiag[i] = 1.0 / invDiag[i];
  }

  std::vector<double> r(n), z(n), p(n), q(n);
  a.multiply(x, r);
  for (int i = 0; i < n; ++i) {
    r[i] = rhs[i] - r[i];
    z[i] = invDiag[i] * r[i];
  }
  p = z;
  double rz = dot(r, z);
  SolveReport report;
  if (rz <= 0.0) {
    report.converged = true;
    return report;
  }
  const double rz0 = rz;
  const int delay = std::max(1, settings.delay);
  // gamma_j = alpha_j (r_j, z_j) sums to the squared initial energy error.
  std::vector<double> gamma;
  double total = 0.0;
  double window = 0.0;
  double reduction = 1.0;

  for (int k = 0; k < settings.maxIterations; ++k) {
    a.multiply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) throw std::domain_error("pcg_jacobi: matrix is not positive definite");
    const double alpha = rz / pq;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
      z[i] = invDiag[i] * r[i];
    }
    const double g = alpha * rz;
    gamma.push_back(g);
    total += g;
    window += g;
    if (static_cast<int>(gamma.size()) > delay) window -= gamma[gamma.size() - 1 - delay];
    report.iterations = k + 1;

    const double rzNew = dot(r, z);
    if (rzNew <= std::numeric_limits<double>::epsilon() * std::numeric_limits<double>::epsilon() * rz0) {
      reduction = std::sqrt(std::max(0.0, rzNew / rz0));
      report.converged = true;
      break;
    }
    if (report.iterations >= delay) {
      reduction = std::sqrt(std::max(0.0, window) / total);
      if (reduction <= settings.reductionTarget) {
        report.converged = true;
        break;
      }
    }
    const double beta = rzNew / rz;
    rz = rzNew;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  report.estimatedEnergyReduction = reduction;
  return report;
}

double energy_norm_squared(const SparseMatrix& a, std::span<const double> v) {
  if (a.rows() != a.cols() || v.size() != static_cast<std::size_t>(a.rows()))
    throw std::invalid_argument("energy_norm: dimension mismatch");
  double s = 0.0;
  double scale = 0.0;
  const auto rowPtr = a.rowPtr();
  const auto colIdx = a.colIdx();
  const auto vals = a.values();
  for (int r = 0; r < a.rows(); ++r) {
    double row = 0.0;
    for (int k = rowPtr[r]; k < rowPtr[r + 1]; ++k) {
      row += vals[k] * v[colIdx[k]];
      scale += std::abs(vals[k] * v[colIdx[k]] * v[r]);
    }
    s += row * v[r];
  }
  if (s < 0.0) {
    if (s < -1e-12 * scale)
      throw std::domain_error("energy_norm: negative quadratic form, matrix is not SPD");
    return 0.0;
  }
  return s;
}

double energy_norm(const SparseMatrix& a, std::span<const double> v) {
  return std::sqrt(energy_norm_squared(a, v));
}

}  // namespace cardiosdc
