#include "cardiosdc/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cardiosdc {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

int step_count(double endTime, double timeStep) {
  return static_cast<int>(std::floor(endTime / timeStep + 1e-9));
}

}  // namespace

void apply_stimulus(std::vector<double>& u, const Mesh& mesh, const DofMap& dofs,
                    const StimulusSpec& spec) {
  if (u.size() != static_cast<std::size_t>(dofs.totalDofs))
    throw std::invalid_argument("apply_stimulus: state size differs from the dof map");
  int hits = 0;
  switch (spec.kind) {
    case StimulusKind::none:
      return;
    case StimulusKind::ball: {
      if (!(spec.radius > 0.0)) throw std::invalid_argument("apply_stimulus: radius must be > 0");
      const double r2 = spec.radius * spec.radius;
      for (int d = 0; d < dofs.totalDofs; ++d) {
        const auto& p = mesh.vertices[dofs.dofVertex[d]];
        const double dx = p[0] - spec.center[0];
        const double dy = mesh.dim == 1 ? 0.0 : p[1] - spec.center[1];
        // A small relative slack keeps grid points on the sphere inside.
        if (dx * dx + dy * dy <= r2 * (1.0 + 1e-12)) {
          u[d] = spec.value;
          ++hits;
        }
      }
      break;
    }
    case StimulusKind::myocyte: {
      if (dofs.mode != DofMode::emi)
        throw std::invalid_argument("apply_stimulus: myocyte stimulus requires EMI dofs");
      const int target = spec.myocyte + 1;
      for (int d = 0; d < dofs.totalDofs; ++d)
        if (dofs.dofSubdomain[d] == target) {
          u[d] = spec.value;
          ++hits;
        }
      break;
    }
  }
  if (hits == 0) throw std::invalid_argument("apply_stimulus: stimulus region does not hit any dof");
}

Simulation::Simulation(SimulationConfig config) : config_(std::move(config)) {
  config_.drop.tol = config_.sdc.tol;
  config_.validate();
  const auto& ms = config_.mesh;
  if (config_.model == ModelKind::monodomain) {
    mesh_ = std::make_shared<const Mesh>(build_cartesian(ms.dim, ms.cells, ms.extent));
    // Dimensionless time: M = mass, A = D * stiffness.
    MonodomainCoefficients eff{config_.diffusionCoefficient(), 1.0, 1.0};
    ops_ = std::make_unique<ModelOperators>(ModelOperators::monodomain(
        mesh_, eff, config_.ionic, config_.reaction, config_.gating));
  } else {
    EmiLayout layout{ms.spacing, ms.myocytes, ms.bath};
    mesh_ = std::make_shared<const Mesh>(build_emi_layout(layout, ms.bathMargin));
    ops_ = std::make_unique<ModelOperators>(
        ModelOperators::emi(mesh_, config_.emi, config_.ionic, config_.gating));
  }
  integrator_ = std::make_unique<SdcIntegrator>(*ops_, make_radau_iia(config_.nodes), config_.sdc);
  rho_ = config_.sdc.initialRho;
}

std::pair<std::vector<double>, std::vector<double>> Simulation::initialCondition() const {
  std::vector<double> u(ops_->size(), 0.0);
  std::vector<double> w(ops_->size(), 0.0);
  apply_stimulus(u, *mesh_, ops_->dofMap(), config_.stimulus);
  return {std::move(u), std::move(w)};
}

StepLog Simulation::step(std::vector<double>& u, std::vector<double>& w, int stepIndex,
                         double time) {
  const auto start = Clock::now();
  const double t = config_.timeStep;
  SdcIntegrator& integ = *integrator_;
  SdcState state = integ.initialState(u, w, t);
  state.rhoEstimate = rho_;

  DropPolicy policy = config_.drop;
  policy.tol = config_.sdc.tol;
  policy.timeStep = t;
  policy.rho = rho_;
  if (policy.mode == DropMode::theoretical && !policy.absolute) {
    const auto gd = ops_->gatingDofs();
    std::vector<std::vector<double>> v(1), gw(1);
    for (std::size_t k = 0; k < gd.size(); ++k) {
      v[0].push_back(ops_->transmembrane(static_cast<int>(k), u));
      gw[0].push_back(ops_->hasGating() ? w[gd[k]] : 0.0);
    }
    const double cap = config_.model == ModelKind::emi ? config_.emi.capacitance : 1.0;
    policy.eta = compute_eta(v, gw, config_.ionic, 1.0, cap);
  }
  const double tolDrop = drop_tolerance(policy);
  const bool adaptive = policy.mode != DropMode::off;

  StepLog log;
  log.step = stepIndex;
  log.time = time + t;
  log.dropTolerance = tolDrop;
  ActiveSet active = ActiveSet::full(ops_->size());
  for (int k = 1; k <= config_.sdc.maxSweeps; ++k) {
    SweepResult res;
    try {
      res = integ.sweep(state, active);
    } catch (const std::exception& e) {
      throw std::runtime_error("step " + std::to_string(stepIndex) + ", sweep " +
                               std::to_string(k) + ": " + e.what());
    }
    log.sweeps = k;
    log.activeDofs.push_back(res.activeDofs);
    log.solverIterations.push_back(res.solverIterations);
    log.correctionNorms.push_back(res.normSquared);
    log.rho.push_back(state.rhoEstimate);
    log.sweepMs.push_back(res.wallMs);
    if (check_termination(res.normSquared, state.rhoEstimate, config_.sdc.tol)) {
      log.converged = true;
      break;
    }
    if (adaptive) {
      active = select_active(res.corrections, tolDrop, active);
    } else {
      ++active.sweep;
    }
  }
  if (state.correctionNormHistory.size() >= 2) rho_ = state.rhoEstimate;
  u = std::move(state.u.back());
  w = std::move(state.w.back());
  log.wallMs = elapsed_ms(start);
  return log;
}

std::vector<double> Simulation::myocyteVoltages(std::span<const double> u) const {
  if (config_.model != ModelKind::emi) return {};
  const int cells = static_cast<int>(config_.mesh.myocytes.size());
  std::vector<double> sum(cells, 0.0);
  std::vector<int> count(cells, 0);
  const auto& dofs = ops_->dofMap();
  for (std::size_t k = 0; k < dofs.gatingDofs.size(); ++k) {
    const int s = dofs.dofSubdomain[dofs.gatingDofs[k]] - 1;
    sum[s] += ops_->transmembrane(static_cast<int>(k), u);
    ++count[s];
  }
  for (int c = 0; c < cells; ++c) sum[c] = count[c] ? sum[c] / count[c] : 0.0;
  return sum;
}

RunResult Simulation::run(const SnapshotSink& sink) {
  const auto start = Clock::now();
  RunResult result;
  result.log.configHash = config_.hash();
  result.log.dofs = ops_->size();
  rho_ = config_.sdc.initialRho;
  auto [u, w] = initialCondition();
  const int steps = step_count(config_.endTime, config_.timeStep);
  const int every = config_.output.snapshotEvery;
  auto emit = [&](int k, double t) {
    Snapshot s{k, t, u, w};
    if (sink) {
      sink(s);
    } else {
      result.snapshots.push_back(std::move(s));
    }
  };
  if (every > 0) emit(0, 0.0);

  std::vector<double> voltage = myocyteVoltages(u);
  result.activationTimes.assign(voltage.size(), -1.0);
  for (std::size_t c = 0; c < voltage.size(); ++c)
    if (voltage[c] >= 0.5) result.activationTimes[c] = 0.0;

  double t = 0.0;
  for (int k = 1; k <= steps; ++k) {
    result.log.steps.push_back(step(u, w, k, t));
    const double tNew = k * config_.timeStep;
    if (!voltage.empty()) {
      const auto next = myocyteVoltages(u);
      for (std::size_t c = 0; c < next.size(); ++c)
        if (result.activationTimes[c] < 0.0 && next[c] >= 0.5) {
          const double theta = (0.5 - voltage[c]) / (next[c] - voltage[c]);
          result.activationTimes[c] = t + theta * (tNew - t);
        }
      voltage = next;
    }
    t = tNew;
    if (every > 0 && (k % every == 0 || k == steps)) emit(k, t);
  }
  result.u = std::move(u);
  result.w = std::move(w);
  result.time = t;
  result.log.totalWallMs = elapsed_ms(start);
  return result;
}

RunResult run(const SimulationConfig& config) {
  Simulation sim(config);
  return sim.run();
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

BenchReport benchmark(const SimulationConfig& config) {
  SimulationConfig base = config;
  base.drop.mode = DropMode::off;
  base.output.snapshotEvery = 0;
  SimulationConfig adapt = config;
  adapt.output.snapshotEvery = 0;
  BenchReport r;
  r.baseline = run(base);
  r.adaptive = run(adapt);
  r.wallBaselineMs = r.baseline.log.totalWallMs;
  r.wallAdaptiveMs = r.adaptive.log.totalWallMs;
  r.speedup = r.wallAdaptiveMs > 0.0 ? r.wallBaselineMs / r.wallAdaptiveMs : 0.0;
  r.finalStateMaxDiff = max_abs_diff(r.adaptive.u, r.baseline.u);
  return r;
}

}  // namespace cardiosdc
