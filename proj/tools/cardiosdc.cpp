#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "cardiosdc/config.hpp"
#include "cardiosdc/driver.hpp"
#include "cardiosdc/output.hpp"

namespace fs = std::filesystem;
using namespace cardiosdc;

namespace {

struct Overrides {
  bool noAdapt = false;
  std::optional<double> tol;
  std::optional<double> alpha;
  std::optional<double> timeStep;
  std::optional<double> endTime;
  std::optional<std::string> out;
  std::optional<int> snapshots;
};

void add_flags(CLI::App* cmd, std::string& configPath, Overrides& o) {
  cmd->add_option("config", configPath, "configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_flag("--no-adapt", o.noAdapt, "disable algebraic adaptivity");
  cmd->add_option("--tol", o.tol, "SDC tolerance");
  cmd->add_option("--alpha", o.alpha, "empirical drop factor");
  cmd->add_option("--time-step", o.timeStep, "time step T");
  cmd->add_option("--end-time", o.endTime, "end time");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--snapshots", o.snapshots, "snapshot every n steps (0: none)");
}

SimulationConfig resolve(const std::string& path, const Overrides& o) {
  SimulationConfig c = load_config(path);
  if (o.noAdapt) c.drop.mode = DropMode::off;
  if (o.tol) c.sdc.tol = *o.tol;
  if (o.alpha) {
    c.drop.alpha = *o.alpha;
    if (c.drop.mode == DropMode::off && !o.noAdapt) c.drop.mode = DropMode::empirical;
  }
  if (o.timeStep) c.timeStep = *o.timeStep;
  if (o.endTime) c.endTime = *o.endTime;
  if (o.out) c.output.directory = *o.out;
  if (o.snapshots) c.output.snapshotEvery = *o.snapshots;
  c.drop.tol = c.sdc.tol;
  c.validate();
  return c;
}

void report_unconverged(const RunLog& log) {
  for (const auto& s : log.steps)
    if (!s.converged)
      std::cerr << "warning: step " << s.step << " accepted after " << s.sweeps
                << " sweeps without meeting the tolerance\n";
}

int cmd_run(const SimulationConfig& cfg) {
  const fs::path dir = cfg.output.directory;
  fs::create_directories(dir);
  Simulation sim(cfg);
  const auto& dofs = sim.operators().dofMap();
  const bool withW = sim.operators().hasGating();
  auto sink = [&](const Snapshot& s) {
    if (!cfg.output.vtk) return;
    char name[32];
    std::snprintf(name, sizeof name, "v_%06d.vtk", s.step);
    write_vtk(dir / name, sim.mesh(), dofs, s.u, withW ? std::span<const double>(s.w) : std::span<const double>{});
  };
  const RunResult r = sim.run(sink);
  write_run_files(dir, r.log);
  report_unconverged(r.log);
  std::cout << "steps " << r.log.steps.size() << ", dofs " << r.log.dofs << ", wall "
            << r.log.totalWallMs << " ms, output in " << dir.string() << '\n';
  for (std::size_t c = 0; c < r.activationTimes.size(); ++c)
    std::cout << "myocyte " << c + 1 << " activation " << r.activationTimes[c] << '\n';
  return 0;
}

int cmd_bench(const SimulationConfig& cfg) {
  const fs::path dir = cfg.output.directory;
  fs::create_directories(dir);
  const BenchReport r = benchmark(cfg);
  std::ofstream out(dir / "bench.json");
  if (!out) throw std::runtime_error("cannot write " + (dir / "bench.json").string());
  write_bench_json(out, r);
  write_run_files(dir, r.adaptive.log);
  report_unconverged(r.adaptive.log);
  write_bench_json(std::cout, r);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SDC time stepping with algebraic adaptivity for cardiac models"};
  app.require_subcommand(1);
  std::string runConfig, benchConfig;
  Overrides runFlags, benchFlags;
  auto* run = app.add_subcommand("run", "simulate a configuration");
  add_flags(run, runConfig, runFlags);
  auto* bench = app.add_subcommand("bench", "compare adaptive and non-adaptive runs");
  add_flags(bench, benchConfig, benchFlags);
  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(resolve(runConfig, runFlags));
    return cmd_bench(resolve(benchConfig, benchFlags));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
