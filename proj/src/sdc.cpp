#include "cardiosdc/sdc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cardiosdc {

namespace {

bool column_is_zero(const Eigen::MatrixXd& s, int j) { return s.col(j).cwiseAbs().maxCoeff() == 0.0; }

}  // namespace

SdcIntegrator::SdcIntegrator(const SdcProblem& problem, CollocationScheme scheme,
                             SdcSettings settings)
    : problem_(&problem), scheme_(std::move(scheme)), settings_(settings) {
  if (!(settings_.tol > 0.0)) throw std::invalid_argument("SdcIntegrator: tol must be > 0");
  if (settings_.maxSweeps < 1) throw std::invalid_argument("SdcIntegrator: maxSweeps must be >= 1");
  const int n = problem.size();
  if (problem.mass().rows() != n || problem.stiffness().rows() != n ||
      problem.sweepStiffness().rows() != n)
    throw std::invalid_argument("SdcIntegrator: operator sizes differ from problem size");
  if (scheme_.S.rows() != scheme_.m || scheme_.S.cols() != scheme_.m + 1 ||
      scheme_.Shat.rows() != scheme_.m || scheme_.Shat.cols() != scheme_.m + 1)
    throw std::invalid_argument("SdcIntegrator: quadrature matrices must be m x (m+1)");
  fullOp_ = std::make_shared<const SweepOperator>(
      SweepOperator::build(problem.mass(), problem.sweepStiffness()));
  rowMass_.assign(n, 0.0);
  {
    const auto rp = problem.mass().rowPtr();
    const auto v = problem.mass().values();
    for (int r = 0; r < n; ++r)
      for (int k = rp[r]; k < rp[r + 1]; ++k) rowMass_[r] += v[k];
  }
  const auto pairs = problem.membranePairs();
  if (!pairs.empty()) {
    pairOffset_.assign(n + 1, 0);
    for (const auto& p : pairs) {
      ++pairOffset_.at(p.first + 1);
      ++pairOffset_.at(p.second + 1);
    }
    for (int r = 0; r < n; ++r) pairOffset_[r + 1] += pairOffset_[r];
    pairIncident_.resize(pairOffset_[n]);
    std::vector<int> fill(pairOffset_.begin(), pairOffset_.end() - 1);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      pairIncident_[fill[pairs[k].first]++] = static_cast<int>(k);
      pairIncident_[fill[pairs[k].second]++] = static_cast<int>(k);
    }
    localIndex_.assign(n, -1);
  }
  gatingIndex_.assign(n, -1);
  const auto g = problem.gatingDofs();
  for (std::size_t k = 0; k < g.size(); ++k) gatingIndex_.at(g[k]) = static_cast<int>(k);
}

SdcState SdcIntegrator::initialState(std::span<const double> u0, std::span<const double> w0,
                                     double timeStep) const {
  const auto n = static_cast<std::size_t>(problem_->size());
  if (u0.size() != n || w0.size() != n)
    throw std::invalid_argument("initialState: state size differs from problem size");
  if (!(timeStep > 0.0)) throw std::invalid_argument("initialState: time step must be > 0");
  SdcState s;
  s.timeStep = timeStep;
  s.u.assign(scheme_.m + 1, std::vector<double>(u0.begin(), u0.end()));
  s.w.assign(scheme_.m + 1, std::vector<double>(w0.begin(), w0.end()));
  s.rhoEstimate = settings_.initialRho;
  return s;
}

void SdcIntegrator::checkState(const SdcState& state) const {
  const auto n = static_cast<std::size_t>(problem_->size());
  if (state.u.size() != static_cast<std::size_t>(scheme_.m + 1) || state.w.size() != state.u.size())
    throw std::invalid_argument("SDC state: node count differs from the scheme");
  for (std::size_t j = 0; j < state.u.size(); ++j)
    if (state.u[j].size() != n || state.w[j].size() != n)
      throw std::invalid_argument("SDC state: vector size differs from problem size");
  if (!(state.timeStep > 0.0)) throw std::invalid_argument("SDC state: time step must be > 0");
}

std::vector<std::vector<double>> SdcIntegrator::residual(const SdcState& state) const {
  checkState(state);
  const int m = scheme_.m;
  const int n = problem_->size();
  const double t = state.timeStep;
  std::vector<std::vector<double>> f(m + 1);
  for (int j = 0; j <= m; ++j) {
    if (column_is_zero(scheme_.S, j)) continue;
    f[j] = problem_->stiffness().multiply(state.u[j]);
    for (int r = 0; r < n; ++r) {
      double b = 0.0, jac = 0.0;
      problem_->reaction(r, state.u[j], state.w[j], b, jac);
      f[j][r] += b;
    }
  }
  std::vector<std::vector<double>> phi(m, std::vector<double>(n));
  std::vector<double> diff(n);
  for (int i = 0; i < m; ++i) {
    for (int r = 0; r < n; ++r) diff[r] = state.u[i + 1][r] - state.u[i][r];
    problem_->mass().multiply(diff, phi[i]);
    for (int r = 0; r < n; ++r) phi[i][r] = -phi[i][r];
    for (int j = 0; j <= m; ++j) {
      if (f[j].empty()) continue;
      const double c = t * scheme_.S(i, j);
      for (int r = 0; r < n; ++r) phi[i][r] -= c * f[j][r];
    }
  }
  return phi;
}

std::vector<std::vector<double>> SdcIntegrator::gatingResidual(const SdcState& state) const {
  checkState(state);
  const int m = scheme_.m;
  const int n = problem_->size();
  const double t = state.timeStep;
  std::vector<std::vector<double>> psi(m, std::vector<double>(n, 0.0));
  if (!problem_->hasGating()) return psi;
  const auto dofs = problem_->gatingDofs();
  const auto partner = problem_->gatingPartner();
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    const int g = dofs[k];
    std::vector<double> rate(m + 1, 0.0);
    for (int j = 0; j <= m; ++j) {
      if (column_is_zero(scheme_.S, j)) continue;
      const double v = partner[k] < 0 ? state.u[j][g] : state.u[j][g] - state.u[j][partner[k]];
      double d = 0.0;
      problem_->gatingRate(v, state.w[j][g], rate[j], d);
    }
    for (int i = 0; i < m; ++i) {
      double r = -(state.w[i + 1][g] - state.w[i][g]);
      for (int j = 0; j <= m; ++j) r += t * scheme_.S(i, j) * rate[j];
      psi[i][g] = r;
    }
  }
  return psi;
}

const SdcIntegrator::Extraction& SdcIntegrator::extraction(const ActiveSet& active) {
  const int n = problem_->size();
  if (active.size() == n) {
    if (!current_ || static_cast<int>(current_->indices.size()) != n) {
      Extraction e;
      e.indices.resize(n);
      std::iota(e.indices.begin(), e.indices.end(), 0);
      e.op = fullOp_;
      current_ = std::move(e);
    }
    return *current_;
  }
  if (current_ && current_->indices == active.indices) return *current_;
  Extraction e;
  if (current_) {
    e.op = std::make_shared<const SweepOperator>(
        restrict_system(*current_->op, current_->indices, active.indices));
  } else {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    e.op = std::make_shared<const SweepOperator>(restrict_system(*fullOp_, all, active.indices));
  }
  e.indices = active.indices;
  current_ = std::move(e);
  return *current_;
}

double SdcIntegrator::floorJacobian(double jac, double lumpedMass, double c) const {
  if (lumpedMass <= 0.0 || c <= 0.0) return std::max(jac, 0.0);
  return std::max(jac, -settings_.jacobianFloor * lumpedMass / c);
}

SdcIntegrator::NodeJacobian SdcIntegrator::nodeJacobian(const SdcState& state, int node,
                                                        std::span<const int> idx,
                                                        const SweepOperator& op) const {
  const int n = static_cast<int>(idx.size());
  const double c = state.timeStep * scheme_.shatDiagonal(node - 1);
  NodeJacobian jac;
  jac.diag.resize(n);
  for (int a = 0; a < n; ++a) {
    double b = 0.0, d = 0.0;
    problem_->reaction(idx[a], state.u[node], state.w[node], b, d);
    jac.diag[a] = floorJacobian(d, rowMass_[idx[a]], c);
  }
  if (pairOffset_.empty()) return jac;
  const auto pairs = problem_->membranePairs();
  for (int a = 0; a < n; ++a) {
    const int r = idx[a];
    for (int q = pairOffset_[r]; q < pairOffset_[r + 1]; ++q) {
      const int p = pairIncident_[q];
      const double j = floorJacobian(problem_->pairJacobian(p, state.u[node], state.w[node]),
                                     pairs[p].lumpedMass, c);
      jac.diag[a] += j;
      const int other = pairs[p].first == r ? pairs[p].second : pairs[p].first;
      const int col = localIndex_[other];
      if (col < 0) continue;
      const int pos = op.pattern->find(a, col);
      if (pos < 0) throw std::logic_error("sweep: membrane pair missing from the sweep pattern");
      jac.off.push_back({a, col, pos, -j});
    }
  }
  return jac;
}

SweepResult SdcIntegrator::sweep(SdcState& state, const ActiveSet& active) {
  const auto start = std::chrono::steady_clock::now();
  checkState(state);
  const int m = scheme_.m;
  const double t = state.timeStep;
  SweepResult res;
  res.activeDofs = active.size();
  res.nodeNormsSquared.assign(m, 0.0);
  res.corrections.assign(m, {});

  if (active.size() > 0) {
    const Extraction& ex = extraction(active);
    const auto& idx = ex.indices;
    const SweepOperator& op = *ex.op;
    const int n = static_cast<int>(idx.size());
    if (!pairOffset_.empty())
      for (int a = 0; a < n; ++a) localIndex_[idx[a]] = a;

    // Everything below the solves is evaluated at the frozen iterate.
    std::vector<NodeJacobian> jac(m + 1);
    for (int j = 1; j <= m; ++j) jac[j] = nodeJacobian(state, j, idx, op);
    std::vector<std::vector<double>> f(m + 1);
    for (int j = 0; j <= m; ++j) {
      if (column_is_zero(scheme_.S, j)) continue;
      f[j].resize(n);
      for (int a = 0; a < n; ++a) {
        double b = 0.0, d = 0.0;
        problem_->reaction(idx[a], state.u[j], state.w[j], b, d);
        f[j][a] = b + problem_->stiffness().rowDot(idx[a], state.u[j]);
      }
    }
    std::vector<std::vector<double>> phi(m, std::vector<double>(n));
    for (int i = 0; i < m; ++i)
      for (int a = 0; a < n; ++a) {
        double r = -(problem_->mass().rowDot(idx[a], state.u[i + 1]) -
                     problem_->mass().rowDot(idx[a], state.u[i]));
        for (int j = 0; j <= m; ++j)
          if (!f[j].empty()) r -= t * scheme_.S(i, j) * f[j][a];
        phi[i][a] = r;
      }

    std::vector<std::vector<double>> delta(m + 1);
    delta[0].assign(n, 0.0);
    std::vector<double> tmp(n);
    for (int i = 0; i < m; ++i) {
      std::vector<double>& rhs = phi[i];
      if (i > 0) {
        op.multiplyMass(delta[i], tmp);
        for (int a = 0; a < n; ++a) rhs[a] += tmp[a];
      }
      for (int j = 1; j <= i; ++j) {
        const double c = -t * scheme_.Shat(i, j);
        if (c == 0.0) continue;
        op.addStiffness(c, delta[j], jac[j].diag, rhs);
        for (const auto& e : jac[j].off) rhs[e.row] += c * e.value * delta[j][e.col];
      }
      const double c = t * scheme_.shatDiagonal(i);
      SparseMatrix system = op.combine(c, jac[i + 1].diag);
      auto values = system.values();
      for (const auto& e : jac[i + 1].off) values[e.pos] += c * e.value;
      delta[i + 1].assign(n, 0.0);
      const SolveReport rep = pcg_jacobi(system, rhs, delta[i + 1], settings_.cg);
      res.solverIterations += rep.iterations;
      res.solverConverged = res.solverConverged && rep.converged;
      res.nodeNormsSquared[i] = energy_norm_squared(system, delta[i + 1]);
    }
    for (int i = 1; i <= m; ++i)
      for (int a = 0; a < n; ++a) state.u[i][idx[a]] += delta[i][a];
    if (!pairOffset_.empty())
      for (int a = 0; a < n; ++a) localIndex_[idx[a]] = -1;

    if (problem_->hasGating()) gatingPass(state, idx);
    for (int i = 0; i < m; ++i) res.corrections[i] = std::move(delta[i + 1]);
  }

  const double total = std::accumulate(res.nodeNormsSquared.begin(), res.nodeNormsSquared.end(), 0.0);
  res.normSquared = total / problem_->normalization();
  state.correctionNormHistory.push_back(res.normSquared);
  // A single entry carries no rate information; keep the prior.
  if (state.correctionNormHistory.size() >= 2)
    state.rhoEstimate = estimate_rho(state.correctionNormHistory);
  ++state.sweep;
  res.wallMs =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return res;
}

void SdcIntegrator::gatingPass(SdcState& state, std::span<const int> idx) const {
  const int m = scheme_.m;
  const double t = state.timeStep;
  const auto partner = problem_->gatingPartner();
  std::vector<int> gDof, gPartner;
  for (int r : idx) {
    const int k = gatingIndex_[r];
    if (k < 0) continue;
    gDof.push_back(r);
    gPartner.push_back(partner[k]);
  }
  const int ng = static_cast<int>(gDof.size());
  std::vector<std::vector<double>> rate(m + 1, std::vector<double>(ng, 0.0));
  std::vector<std::vector<double>> dRate(m + 1, std::vector<double>(ng, 0.0));
  for (int j = 0; j <= m; ++j) {
    if (j == 0 && column_is_zero(scheme_.S, 0)) continue;
    for (int q = 0; q < ng; ++q) {
      const int g = gDof[q];
      const double v = gPartner[q] < 0 ? state.u[j][g] : state.u[j][g] - state.u[j][gPartner[q]];
      double d = 0.0;
      problem_->gatingRate(v, state.w[j][g], rate[j][q], d);
      // A nonpositive rate derivative keeps the scalar solves well posed.
      dRate[j][q] = std::min(d, 0.0);
    }
  }
  std::vector<std::vector<double>> dw(m + 1, std::vector<double>(ng, 0.0));
  for (int i = 0; i < m; ++i)
    for (int q = 0; q < ng; ++q) {
      const int g = gDof[q];
      double r = -(state.w[i + 1][g] - state.w[i][g]) + dw[i][q];
      for (int j = 0; j <= m; ++j) r += t * scheme_.S(i, j) * rate[j][q];
      for (int j = 1; j <= i; ++j) r += t * scheme_.Shat(i, j) * dRate[j][q] * dw[j][q];
      dw[i + 1][q] = r / (1.0 - t * scheme_.shatDiagonal(i) * dRate[i + 1][q]);
    }
  for (int i = 1; i <= m; ++i)
    for (int q = 0; q < ng; ++q) state.w[i][gDof[q]] += dw[i][q];
}

double estimate_rho(std::span<const double> history) {
  if (history.size() < 2) return 0.05;
  const double prev = history[history.size() - 2];
  const double last = history.back();
  if (prev <= 0.0) return last <= 0.0 ? 0.01 : 0.95;
  return std::clamp(std::sqrt(std::max(last, 0.0) / prev), 0.01, 0.95);
}

bool check_termination(double sumSquares, double rho, double tol) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("check_termination: rho must lie in (0, 1)");
  const double bound = (1.0 - rho) / rho * tol;
  return sumSquares <= bound * bound;
}

}  // namespace cardiosdc
