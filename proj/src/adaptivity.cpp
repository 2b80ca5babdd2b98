#include "cardiosdc/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cardiosdc {

ActiveSet ActiveSet::full(int n) {
  ActiveSet s;
  s.indices.resize(n);
  std::iota(s.indices.begin(), s.indices.end(), 0);
  return s;
}

void DropPolicy::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("drop policy: tol must be > 0");
  if (mode == DropMode::off) return;
  if (absolute) {
    if (!(*absolute >= 0.0)) throw std::invalid_argument("drop policy: absolute must be >= 0");
    return;
  }
  if (mode == DropMode::empirical && !(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("drop policy: alpha must lie in (0, 1]");
  if (mode == DropMode::theoretical) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("drop policy: rho must lie in (0, 1)");
    if (eta < 0.0 || timeStep < 0.0 || sweeps < 0)
      throw std::invalid_argument("drop policy: eta, timeStep and sweeps must be >= 0");
  }
}

double drop_tolerance(const DropPolicy& policy) {
  policy.validate();
  switch (policy.mode) {
    case DropMode::off:
      return 0.0;
    case DropMode::empirical:
      return policy.absolute ? *policy.absolute : policy.alpha * policy.tol;
    case DropMode::theoretical:
      if (policy.absolute) return *policy.absolute;
      return std::exp(-policy.eta * policy.timeStep) * (1.0 - policy.rho) / (policy.sweeps + 1) *
             policy.tol;
  }
  return 0.0;
}

int required_sweeps(double c, double rho, double tol) {
  if (!(rho > 0.0 && rho < 1.0) || !(c > 0.0) || !(tol > 0.0))
    throw std::invalid_argument("required_sweeps: need 0 < rho < 1, c > 0, tol > 0");
  const double bound = std::log((1.0 - rho) * tol / c) / std::log(rho);
  // Guard against round-off pushing an exact integer up by one.
  const double r = std::ceil(bound - 1e-12);
  return std::max(0, static_cast<int>(r));
}

ActiveSet select_active(std::span<const std::vector<double>> corrections, double tolDrop,
                        const ActiveSet& parent) {
  ActiveSet child;
  child.sweep = parent.sweep + 1;
  const int n = parent.size();
  for (const auto& c : corrections)
    if (static_cast<int>(c.size()) != n)
      throw std::invalid_argument("select_active: correction size differs from parent set");
  if (tolDrop <= 0.0) {
    child.indices = parent.indices;
    return child;
  }
  child.indices.reserve(n);
  for (int a = 0; a < n; ++a) {
    double peak = 0.0;
    for (const auto& c : corrections) peak = std::max(peak, std::abs(c[a]));
    if (peak >= tolDrop) child.indices.push_back(parent.indices[a]);
  }
  return child;
}

double compute_eta(std::span<const std::vector<double>> vNodes,
                   std::span<const std::vector<double>> wNodes, const AlievPanfilovParams& params,
                   double beta, double capacitance) {
  if (vNodes.size() != wNodes.size())
    throw std::invalid_argument("compute_eta: node count mismatch");
  if (!(beta > 0.0) || !(capacitance > 0.0))
    throw std::invalid_argument("compute_eta: beta and capacitance must be > 0");
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < vNodes.size(); ++j) {
    if (vNodes[j].size() != wNodes[j].size())
      throw std::invalid_argument("compute_eta: v and w sizes differ");
    for (std::size_t d = 0; d < vNodes[j].size(); ++d)
      lowest = std::min(lowest, di_ion_dv(vNodes[j][d], wNodes[j][d], params));
  }
  if (!std::isfinite(lowest)) return 0.0;
  return std::max(0.0, -lowest) / (beta * capacitance);
}

SweepOperator SweepOperator::build(const SparseMatrix& m, const SparseMatrix& k) {
  if (m.rows() != k.rows() || m.cols() != k.cols() || m.rows() != m.cols())
    throw std::invalid_argument("SweepOperator: mass and stiffness must be square and alike");
  const int n = m.rows();
  auto pattern = std::make_shared<CsrPattern>();
  pattern->rows = n;
  pattern->cols = n;
  pattern->rowPtr.assign(n + 1, 0);
  SweepOperator op;
  op.diagonal.resize(n);
  const auto mp = m.rowPtr(), mc = m.colIdx();
  const auto kp = k.rowPtr(), kc = k.colIdx();
  const auto mv = m.values(), kv = k.values();
  for (int r = 0; r < n; ++r) {
    int a = mp[r], b = kp[r];
    bool diagDone = false;
    auto emit = [&](int col, double massValue, double stiffValue) {
      if (!diagDone && col > r) {
        op.diagonal[r] = static_cast<int>(pattern->colIdx.size());
        pattern->colIdx.push_back(r);
        op.mass.push_back(0.0);
        op.stiffness.push_back(0.0);
        diagDone = true;
      }
      if (col == r) {
        op.diagonal[r] = static_cast<int>(pattern->colIdx.size());
        diagDone = true;
      }
      pattern->colIdx.push_back(col);
      op.mass.push_back(massValue);
      op.stiffness.push_back(stiffValue);
    };
    while (a < mp[r + 1] || b < kp[r + 1]) {
      const int ca = a < mp[r + 1] ? mc[a] : n;
      const int cb = b < kp[r + 1] ? kc[b] : n;
      if (ca == cb) {
        emit(ca, mv[a++], kv[b++]);
      } else if (ca < cb) {
        emit(ca, mv[a++], 0.0);
      } else {
        emit(cb, 0.0, kv[b++]);
      }
    }
    if (!diagDone) {
      op.diagonal[r] = static_cast<int>(pattern->colIdx.size());
      pattern->colIdx.push_back(r);
      op.mass.push_back(0.0);
      op.stiffness.push_back(0.0);
    }
    pattern->rowPtr[r + 1] = static_cast<int>(pattern->colIdx.size());
  }
  op.pattern = std::move(pattern);
  return op;
}

SparseMatrix SweepOperator::combine(double c, std::span<const double> d) const {
  std::vector<double> v(mass.size());
  for (std::size_t p = 0; p < v.size(); ++p) v[p] = mass[p] + c * stiffness[p];
  for (int r = 0; r < size(); ++r) v[diagonal[r]] += c * d[r];
  return SparseMatrix(pattern, std::move(v));
}

void SweepOperator::multiplyMass(std::span<const double> x, std::span<double> y) const {
  const auto& rp = pattern->rowPtr;
  const auto& ci = pattern->colIdx;
  for (int r = 0; r < size(); ++r) {
    double s = 0.0;
    for (int p = rp[r]; p < rp[r + 1]; ++p) s += mass[p] * x[ci[p]];
    y[r] = s;
  }
}

void SweepOperator::addStiffness(double s, std::span<const double> x, std::span<const double> d,
                                 std::span<double> y) const {
  const auto& rp = pattern->rowPtr;
  const auto& ci = pattern->colIdx;
  for (int r = 0; r < size(); ++r) {
    double acc = d[r] * x[r];
    for (int p = rp[r]; p < rp[r + 1]; ++p) acc += stiffness[p] * x[ci[p]];
    y[r] += s * acc;
  }
}

SweepOperator restrict_system(const SweepOperator& parent, std::span<const int> parentIndices,
                              std::span<const int> childIndices) {
  if (static_cast<int>(parentIndices.size()) != parent.size())
    throw std::invalid_argument("restrict_system: parent index count differs from operator size");
  // Parent-local position -> child-local position (or -1), via a merge.
  std::vector<int> local(parentIndices.size(), -1);
  std::vector<int> keep;
  keep.reserve(childIndices.size());
  std::size_t a = 0;
  for (std::size_t c = 0; c < childIndices.size(); ++c) {
    if (c > 0 && childIndices[c] <= childIndices[c - 1])
      throw std::invalid_argument("restrict_system: child indices must be sorted and unique");
    while (a < parentIndices.size() && parentIndices[a] < childIndices[c]) ++a;
    if (a == parentIndices.size() || parentIndices[a] != childIndices[c])
      throw std::invalid_argument("restrict_system: active set is not nested in the parent set");
    local[a] = static_cast<int>(c);
    keep.push_back(static_cast<int>(a));
  }
  const int n = static_cast<int>(childIndices.size());
  auto pattern = std::make_shared<CsrPattern>();
  pattern->rows = n;
  pattern->cols = n;
  pattern->rowPtr.assign(n + 1, 0);
  SweepOperator op;
  op.diagonal.resize(n);
  const auto& rp = parent.pattern->rowPtr;
  const auto& ci = parent.pattern->colIdx;
  for (int r = 0; r < n; ++r) {
    const int pr = keep[r];
    for (int p = rp[pr]; p < rp[pr + 1]; ++p) {
      const int col = local[ci[p]];
      if (col < 0) continue;
      if (col == r) op.diagonal[r] = static_cast<int>(pattern->colIdx.size());
      pattern->colIdx.push_back(col);
      op.mass.push_back(parent.mass[p]);
      op.stiffness.push_back(parent.stiffness[p]);
    }
    pattern->rowPtr[r + 1] = static_cast<int>(pattern->colIdx.size());
  }
  op.pattern = std::move(pattern);
  return op;
}

std::vector<double> restrict_vector(std::span<const double> full, std::span<const int> indices) {
  std::vector<double> out(indices.size());
  for (std::size_t a = 0; a < indices.size(); ++a) {
    if (indices[a] < 0 || static_cast<std::size_t>(indices[a]) >= full.size())
      throw std::out_of_range("restrict_vector: index out of range");
    out[a] = full[indices[a]];
  }
  return out;
}

std::vector<double> prolong(std::span<const double> local, std::span<const int> indices,
                            int fullSize) {
  if (local.size() != indices.size())
    throw std::invalid_argument("prolong: value and index counts differ");
  std::vector<double> out(fullSize, 0.0);
  for (std::size_t a = 0; a < indices.size(); ++a) {
    if (indices[a] < 0 || indices[a] >= fullSize)
      throw std::out_of_range("prolong: index out of range");
    out[indices[a]] = local[a];
  }
  return out;
}

}  // namespace cardiosdc
