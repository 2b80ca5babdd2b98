#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cardiosdc/adaptivity.hpp"
#include "cardiosdc/assembly.hpp"
#include "cardiosdc/ionic.hpp"
#include "cardiosdc/mesh.hpp"
#include "cardiosdc/sdc.hpp"

namespace cardiosdc {

struct MeshSpec {
  int dim = 2;
  // monodomain: structured grid
  std::array<int, 2> cells{64, 64};
  std::array<double, 2> extent{16.0, 16.0};
  // EMI: myocytes on a grid of the given spacing
  double spacing = 4e-6;
  std::vector<Rect> myocytes;
  double bathMargin = 2e-5;
  std::optional<Rect> bath;
};

enum class StimulusKind { none, ball, myocyte };

struct StimulusSpec {
  StimulusKind kind = StimulusKind::ball;
  std::array<double, 2> center{0.0, 0.0};
  double radius = 1.6;
  double value = 0.5;
  int myocyte = 0;  ///< index into MeshSpec::myocytes
};

struct OutputSpec {
  std::string directory = "out";
  int snapshotEvery = 10;  ///< 0 disables snapshots
  bool vtk = true;
};

/// Monodomain runs use the dimensionless Aliev-Panfilov time; the diffusion
/// coefficient is sigma_m / (chi C_m) unless given explicitly. EMI runs use
/// physical units.
struct SimulationConfig {
  ModelKind model = ModelKind::monodomain;
  bool reaction = true;
  bool gating = true;
  MeshSpec mesh;
  MonodomainCoefficients monodomain;
  std::optional<double> diffusion;
  EmiCoefficients emi;
  AlievPanfilovParams ionic;
  int nodes = 3;
  double timeStep = 0.1;
  double endTime = 10.0;
  SdcSettings sdc;
  DropPolicy drop;
  StimulusSpec stimulus;
  OutputSpec output;

  double diffusionCoefficient() const;
  void validate() const;
  /// Canonical key-value text; parse_config(to_text()) reproduces the config.
  std::string to_text() const;
  /// FNV-1a of the canonical text.
  std::uint64_t hash() const;
};

/// Defaults of the given model kind (EMI: physical units, gating off).
SimulationConfig default_config(ModelKind model);

/// INI text with sections model, mesh, physics, sdc, adaptivity, stimulus,
/// output. Unknown sections or keys throw std::invalid_argument.
SimulationConfig parse_config(const std::string& text);
SimulationConfig load_config(const std::filesystem::path& path);

}  // namespace cardiosdc
