#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>

#include "cardiosdc/driver.hpp"
#include "cardiosdc/mesh.hpp"

namespace cardiosdc {

/// Legacy ASCII unstructured grid with point fields v (and w when given).
/// EMI dof maps produce one point per dof, so each subdomain carries its own
/// copy of shared vertices.
void write_vtk(std::ostream& os, const Mesh& mesh, const DofMap& dofs, std::span<const double> v,
               std::span<const double> w = {});
void write_vtk(const std::filesystem::path& path, const Mesh& mesh, const DofMap& dofs,
               std::span<const double> v, std::span<const double> w = {});

/// step, t, sweeps, dofs_sweep_1..K, wall_ms; missing sweeps are written as 0.
void write_stats_csv(std::ostream& os, const RunLog& log);
/// One JSON object per step.
void write_run_jsonl(std::ostream& os, const RunLog& log);
void write_bench_json(std::ostream& os, const BenchReport& report);

/// Writes stats.csv and run.jsonl into dir.
void write_run_files(const std::filesystem::path& dir, const RunLog& log);

}  // namespace cardiosdc
