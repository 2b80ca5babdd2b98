#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cardiosdc/adaptivity.hpp"
#include "cardiosdc/collocation.hpp"
#include "cardiosdc/driver.hpp"
#include "cardiosdc/ionic.hpp"
#include "cardiosdc/sdc.hpp"

namespace py = pybind11;
using namespace cardiosdc;

namespace {

py::dict step_dict(const StepLog& s) {
  py::dict d;
  d["step"] = s.step;
  d["t"] = s.time;
  d["sweeps"] = s.sweeps;
  d["converged"] = s.converged;
  d["drop_tolerance"] = s.dropTolerance;
  d["active_dofs"] = s.activeDofs;
  d["solver_iterations"] = s.solverIterations;
  d["correction_norms"] = s.correctionNorms;
  d["rho"] = s.rho;
  d["wall_ms"] = s.wallMs;
  return d;
}

py::dict result_dict(const RunResult& r) {
  py::dict d;
  d["u"] = r.u;
  d["w"] = r.w;
  d["t"] = r.time;
  d["activation_times"] = r.activationTimes;
  py::list steps;
  for (const auto& s : r.log.steps) steps.append(step_dict(s));
  d["steps"] = steps;
  d["dofs"] = r.log.dofs;
  d["wall_ms"] = r.log.totalWallMs;
  py::list snaps;
  for (const auto& s : r.snapshots) {
    py::dict e;
    e["step"] = s.step;
    e["t"] = s.time;
    e["u"] = s.u;
    e["w"] = s.w;
    snaps.append(e);
  }
  d["snapshots"] = snaps;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "SDC time stepping with algebraic adaptivity for cardiac models";

  py::enum_<ModelKind>(m, "ModelKind").value("monodomain", ModelKind::monodomain).value("emi", ModelKind::emi);
  py::enum_<DropMode>(m, "DropMode")
      .value("off", DropMode::off)
      .value("empirical", DropMode::empirical)
      .value("theoretical", DropMode::theoretical);

  py::class_<SimulationConfig>(m, "Config")
      .def_readwrite("model", &SimulationConfig::model)
      .def_readwrite("reaction", &SimulationConfig::reaction)
      .def_readwrite("gating", &SimulationConfig::gating)
      .def_readwrite("nodes", &SimulationConfig::nodes)
      .def_readwrite("time_step", &SimulationConfig::timeStep)
      .def_readwrite("end_time", &SimulationConfig::endTime)
      .def_property(
          "cells", [](const SimulationConfig& c) { return c.mesh.cells; },
          [](SimulationConfig& c, std::array<int, 2> v) { c.mesh.cells = v; })
      .def_property(
          "extent", [](const SimulationConfig& c) { return c.mesh.extent; },
          [](SimulationConfig& c, std::array<double, 2> v) { c.mesh.extent = v; })
      .def_property(
          "tol", [](const SimulationConfig& c) { return c.sdc.tol; },
          [](SimulationConfig& c, double v) { c.sdc.tol = v; })
      .def_property(
          "max_sweeps", [](const SimulationConfig& c) { return c.sdc.maxSweeps; },
          [](SimulationConfig& c, int v) { c.sdc.maxSweeps = v; })
      .def_property(
          "drop_mode", [](const SimulationConfig& c) { return c.drop.mode; },
          [](SimulationConfig& c, DropMode v) { c.drop.mode = v; })
      .def_property(
          "drop_alpha", [](const SimulationConfig& c) { return c.drop.alpha; },
          [](SimulationConfig& c, double v) { c.drop.alpha = v; })
      .def_property(
          "drop_absolute", [](const SimulationConfig& c) { return c.drop.absolute; },
          [](SimulationConfig& c, std::optional<double> v) { c.drop.absolute = v; })
      .def_property(
          "gap_resistance", [](const SimulationConfig& c) { return c.emi.gap.resistance; },
          [](SimulationConfig& c, double v) { c.emi.gap.resistance = v; })
      .def_property(
          "snapshot_every", [](const SimulationConfig& c) { return c.output.snapshotEvery; },
          [](SimulationConfig& c, int v) { c.output.snapshotEvery = v; })
      .def("validate", &SimulationConfig::validate)
      .def("to_text", &SimulationConfig::to_text)
      .def("hash", &SimulationConfig::hash)
      .def("copy", [](const SimulationConfig& c) { return c; });

  m.def("default_config", &default_config, py::arg("model") = ModelKind::monodomain);
  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));

  py::class_<Simulation>(m, "Simulation")
      .def(py::init<SimulationConfig>(), py::arg("config"))
      .def_property_readonly("dofs", [](const Simulation& s) { return s.operators().size(); })
      .def("initial_condition", &Simulation::initialCondition)
      .def(
          "step",
          [](Simulation& s, std::vector<double> u, std::vector<double> w, int k, double t) {
            const auto log = s.step(u, w, k, t);
            return py::make_tuple(u, w, step_dict(log));
          },
          py::arg("u"), py::arg("w"), py::arg("step"), py::arg("t"),
          "Advances one step; returns (u, w, log).")
      .def("myocyte_voltages", [](const Simulation& s, const std::vector<double>& u) {
        return s.myocyteVoltages(u);
      });

  m.def("run", [](const SimulationConfig& c) { return result_dict(run(c)); }, py::arg("config"));
  m.def(
      "benchmark",
      [](const SimulationConfig& c) {
        const auto b = benchmark(c);
        py::dict d;
        d["wall_adaptive_ms"] = b.wallAdaptiveMs;
        d["wall_baseline_ms"] = b.wallBaselineMs;
        d["speedup"] = b.speedup;
        d["final_state_max_diff"] = b.finalStateMaxDiff;
        d["adaptive"] = result_dict(b.adaptive);
        d["baseline"] = result_dict(b.baseline);
        return d;
      },
      py::arg("config"));

  m.def("radau_iia_nodes", &radau_iia_nodes, py::arg("m"));
  m.def(
      "collocation_matrices",
      [](int nodes) {
        const auto s = make_radau_iia(nodes);
        py::dict d;
        d["nodes"] = s.nodes;
        d["S"] = s.S;
        d["Q"] = s.Q;
        d["Shat"] = s.Shat;
        return d;
      },
      py::arg("m"));

  m.def(
      "drop_tolerance",
      [](DropMode mode, double tol, double alpha, double eta, double timeStep, int sweeps, double rho) {
        DropPolicy p;
        p.mode = mode;
        p.tol = tol;
        p.alpha = alpha;
        p.eta = eta;
        p.timeStep = timeStep;
        p.sweeps = sweeps;
        p.rho = rho;
        return drop_tolerance(p);
      },
      py::arg("mode"), py::arg("tol"), py::arg("alpha") = 0.1, py::arg("eta") = 0.0,
      py::arg("time_step") = 0.0, py::arg("sweeps") = 4, py::arg("rho") = 0.05);
  m.def("required_sweeps", &required_sweeps, py::arg("c"), py::arg("rho"), py::arg("tol"));
  m.def("estimate_rho", [](const std::vector<double>& h) { return estimate_rho(h); }, py::arg("history"));
  m.def("check_termination", &check_termination, py::arg("sum_squares"), py::arg("rho"), py::arg("tol"));

  m.def("i_ion", [](double v, double w) { return i_ion(v, w, AlievPanfilovParams{}); });
  m.def("r_gate", [](double v, double w) { return r_gate(v, w, AlievPanfilovParams{}); });
}
