#include "cardiosdc/output.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include "json.hpp"
#include <ostream>
#include <stdexcept>

namespace cardiosdc {

namespace {

std::ofstream open(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

}  // namespace

void write_vtk(std::ostream& os, const Mesh& mesh, const DofMap& dofs, std::span<const double> v,
               std::span<const double> w) {
  const int n = dofs.totalDofs;
  if (v.size() != static_cast<std::size_t>(n) || (!w.empty() && w.size() != v.size()))
    throw std::invalid_argument("write_vtk: field size differs from the dof count");
  const int nve = mesh.verticesPerElement();
  os << "# vtk DataFile Version 3.0\ncardiosdc\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << n << " double\n";
  for (int d = 0; d < n; ++d) {
    const auto& p = mesh.vertices[dofs.dofVertex[d]];
    os << p[0] << ' ' << p[1] << " 0\n";
  }
  os << "CELLS " << mesh.elementCount() << ' ' << mesh.elementCount() * (nve + 1) << '\n';
  for (int e = 0; e < mesh.elementCount(); ++e) {
    os << nve;
    const int s = mesh.elementSubdomain[e];
    for (int a = 0; a < nve; ++a) os << ' ' << dofs.dof(mesh.elements[e][a], s);
    os << '\n';
  }
  os << "CELL_TYPES " << mesh.elementCount() << '\n';
  const int type = mesh.dim == 1 ? 3 : 5;  // VTK_LINE, VTK_TRIANGLE
  for (int e = 0; e < mesh.elementCount(); ++e) os << type << '\n';
  os << "CELL_DATA " << mesh.elementCount() << "\nSCALARS subdomain int 1\nLOOKUP_TABLE default\n";
  for (int e = 0; e < mesh.elementCount(); ++e) os << mesh.elementSubdomain[e] << '\n';
  os << "POINT_DATA " << n << "\nSCALARS v double 1\nLOOKUP_TABLE default\n";
  for (double x : v) os << x << '\n';
  if (!w.empty()) {
    os << "SCALARS w double 1\nLOOKUP_TABLE default\n";
    for (double x : w) os << x << '\n';
  }
}

void write_vtk(const std::filesystem::path& path, const Mesh& mesh, const DofMap& dofs,
               std::span<const double> v, std::span<const double> w) {
  auto out = open(path);
  write_vtk(out, mesh, dofs, v, w);
}

void write_stats_csv(std::ostream& os, const RunLog& log) {
  std::size_t k = 0;
  for (const auto& s : log.steps) k = std::max(k, s.activeDofs.size());
  os << "step,t,sweeps";
  for (std::size_t i = 1; i <= k; ++i) os << ",dofs_sweep_" << i;
  os << ",wall_ms\n";
  for (const auto& s : log.steps) {
    os << s.step << ',' << s.time << ',' << s.sweeps;
    for (std::size_t i = 0; i < k; ++i) os << ',' << (i < s.activeDofs.size() ? s.activeDofs[i] : 0);
    os << ',' << s.wallMs << '\n';
  }
}

void write_run_jsonl(std::ostream& os, const RunLog& log) {
  for (const auto& s : log.steps) {
    nlohmann::json j{{"step", s.step},
                     {"t", s.time},
                     {"sweeps", s.sweeps},
                     {"converged", s.converged},
                     {"drop_tolerance", s.dropTolerance},
                     {"active_dofs", s.activeDofs},
                     {"solver_iterations", s.solverIterations},
                     {"correction_norms", s.correctionNorms},
                     {"rho", s.rho},
                     {"sweep_ms", s.sweepMs},
                     {"wall_ms", s.wallMs},
                     {"dofs", log.dofs},
                     {"config_hash", log.configHash}};
    os << j.dump() << '\n';
  }
}

void write_bench_json(std::ostream& os, const BenchReport& r) {
  nlohmann::json j{{"wall_adaptive_ms", r.wallAdaptiveMs},
                   {"wall_baseline_ms", r.wallBaselineMs},
                   {"speedup", r.speedup},
                   {"final_state_max_diff", r.finalStateMaxDiff}};
  os << j.dump(2) << '\n';
}

void write_run_files(const std::filesystem::path& dir, const RunLog& log) {
  auto stats = open(dir / "stats.csv");
  write_stats_csv(stats, log);
  auto jsonl = open(dir / "run.jsonl");
  write_run_jsonl(jsonl, log);
}

}  // namespace cardiosdc
