#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "cardiosdc/assembly.hpp"
#include "cardiosdc/config.hpp"
#include "cardiosdc/sdc.hpp"

namespace cardiosdc {

struct StepLog {
  int step = 0;
  double time = 0.0;  ///< end of the step
  int sweeps = 0;
  bool converged = false;
  double dropTolerance = 0.0;
  std::vector<int> activeDofs;
  std::vector<int> solverIterations;
  std::vector<double> correctionNorms;  ///< normalized squared norms
  std::vector<double> rho;
  std::vector<double> sweepMs;
  double wallMs = 0.0;
};

struct RunLog {
  std::vector<StepLog> steps;
  double totalWallMs = 0.0;
  std::uint64_t configHash = 0;
  int dofs = 0;
};

struct Snapshot {
  int step = 0;
  double time = 0.0;
  std::vector<double> u;
  std::vector<double> w;
};

struct RunResult {
  std::vector<double> u;
  std::vector<double> w;
  double time = 0.0;
  std::vector<Snapshot> snapshots;
  RunLog log;
  /// EMI: per myocyte, first time the mean transmembrane voltage over its
  /// outer membrane reaches 0.5 (linear in time between steps); -1 if never.
  std::vector<double> activationTimes;
};

/// v = value on every dof whose vertex lies in the ball (monodomain), or on the
/// intracellular dofs of the chosen myocyte (EMI). Throws if nothing is hit.
void apply_stimulus(std::vector<double>& u, const Mesh& mesh, const DofMap& dofs,
                    const StimulusSpec& spec);

/// Mesh, operators and integrator of one configuration.
class Simulation {
 public:
  explicit Simulation(SimulationConfig config);

  const SimulationConfig& config() const { return config_; }
  const ModelOperators& operators() const { return *ops_; }
  const Mesh& mesh() const { return *mesh_; }
  SdcIntegrator& integrator() { return *integrator_; }

  /// Rest state with the configured stimulus applied.
  std::pair<std::vector<double>, std::vector<double>> initialCondition() const;

  /// Advances (u, w) by one time step.
  StepLog step(std::vector<double>& u, std::vector<double>& w, int stepIndex, double time);

  /// Mean transmembrane voltage on the outer membrane of each myocyte.
  std::vector<double> myocyteVoltages(std::span<const double> u) const;

  using SnapshotSink = std::function<void(const Snapshot&)>;
  /// Fixed-step march to the end time. Without a sink, snapshots are kept in
  /// the result.
  RunResult run(const SnapshotSink& sink = {});

 private:
  SimulationConfig config_;
  std::shared_ptr<const Mesh> mesh_;
  std::unique_ptr<ModelOperators> ops_;
  std::unique_ptr<SdcIntegrator> integrator_;
  double rho_ = 0.05;
};

RunResult run(const SimulationConfig& config);

struct BenchReport {
  double wallAdaptiveMs = 0.0;
  double wallBaselineMs = 0.0;
  double speedup = 0.0;
  double finalStateMaxDiff = 0.0;
  RunResult adaptive;
  RunResult baseline;
};

/// Runs the configuration with adaptivity off, then as configured.
BenchReport benchmark(const SimulationConfig& config);

double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace cardiosdc
