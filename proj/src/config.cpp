#include "cardiosdc/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cardiosdc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size())
    throw std::invalid_argument("config: '" + key + "' expects a number, got '" + text + "'");
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  int v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size())
    throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + text + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw std::invalid_argument("config: '" + key + "' expects a boolean, got '" + text + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(to_double(key, tok));
  return out;
}

Rect to_rect(const std::string& key, const std::string& text) {
  const auto v = to_doubles(key, text);
  if (v.size() != 4) throw std::invalid_argument("config: '" + key + "' expects x0 y0 x1 y1");
  return {v[0], v[1], v[2], v[3]};
}

std::vector<Rect> to_rects(const std::string& key, const std::string& text) {
  std::vector<Rect> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ';'))
    if (!trim(part).empty()) out.push_back(to_rect(key, part));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const Rect& r) {
  return fmt(r.x0) + " " + fmt(r.y0) + " " + fmt(r.x1) + " " + fmt(r.y1);
}

ModelKind to_model(const std::string& text) {
  const std::string t = trim(text);
  if (t == "monodomain") return ModelKind::monodomain;
  if (t == "emi") return ModelKind::emi;
  throw std::invalid_argument("config: model.type must be monodomain or emi, got '" + text + "'");
}

DropMode to_drop_mode(const std::string& text) {
  const std::string t = trim(text);
  if (t == "off") return DropMode::off;
  if (t == "empirical") return DropMode::empirical;
  if (t == "theoretical") return DropMode::theoretical;
  throw std::invalid_argument("config: adaptivity.mode must be off, empirical or theoretical");
}

const char* name(DropMode m) {
  switch (m) {
    case DropMode::off: return "off";
    case DropMode::empirical: return "empirical";
    case DropMode::theoretical: return "theoretical";
  }
  return "off";
}

StimulusKind to_stimulus(const std::string& text) {
  const std::string t = trim(text);
  if (t == "none") return StimulusKind::none;
  if (t == "ball") return StimulusKind::ball;
  if (t == "myocyte") return StimulusKind::myocyte;
  throw std::invalid_argument("config: stimulus.kind must be none, ball or myocyte");
}

const char* name(StimulusKind k) {
  switch (k) {
    case StimulusKind::none: return "none";
    case StimulusKind::ball: return "ball";
    case StimulusKind::myocyte: return "myocyte";
  }
  return "none";
}

using Setter = std::function<void(SimulationConfig&, const std::string&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"model",
       {{"type", [](auto&, auto&, auto&) {}},  // consumed before the other keys
        {"reaction", [](auto& c, auto& k, auto& v) { c.reaction = to_bool(k, v); }},
        {"gating", [](auto& c, auto& k, auto& v) { c.gating = to_bool(k, v); }}}},
      {"mesh",
       {{"dim", [](auto& c, auto& k, auto& v) { c.mesh.dim = to_int(k, v); }},
        {"cells",
         [](auto& c, auto& k, auto& v) {
           const auto d = to_doubles(k, v);
           if (d.empty() || d.size() > 2) throw std::invalid_argument("config: mesh.cells expects 1 or 2 integers");
           c.mesh.cells = {static_cast<int>(d[0]), d.size() > 1 ? static_cast<int>(d[1]) : 1};
         }},
        {"extent",
         [](auto& c, auto& k, auto& v) {
           const auto d = to_doubles(k, v);
           if (d.empty() || d.size() > 2) throw std::invalid_argument("config: mesh.extent expects 1 or 2 numbers");
           c.mesh.extent = {d[0], d.size() > 1 ? d[1] : 1.0};
         }},
        {"spacing", [](auto& c, auto& k, auto& v) { c.mesh.spacing = to_double(k, v); }},
        {"myocytes", [](auto& c, auto& k, auto& v) { c.mesh.myocytes = to_rects(k, v); }},
        {"bath_margin", [](auto& c, auto& k, auto& v) { c.mesh.bathMargin = to_double(k, v); }},
        {"bath", [](auto& c, auto& k, auto& v) {
           if (trim(v).empty()) c.mesh.bath.reset(); else c.mesh.bath = to_rect(k, v);
         }}}},
      {"physics",
       {{"sigma_m", [](auto& c, auto& k, auto& v) { c.monodomain.conductivity = to_double(k, v); }},
        {"chi", [](auto& c, auto& k, auto& v) { c.monodomain.surfaceToVolume = to_double(k, v); }},
        {"capacitance",
         [](auto& c, auto& k, auto& v) {
           c.monodomain.capacitance = to_double(k, v);
           c.emi.capacitance = c.monodomain.capacitance;
         }},
        {"diffusion", [](auto& c, auto& k, auto& v) {
           if (trim(v).empty()) c.diffusion.reset(); else c.diffusion = to_double(k, v);
         }},
        {"sigma_extra", [](auto& c, auto& k, auto& v) { c.emi.sigmaExtra = to_double(k, v); }},
        {"sigma_intra", [](auto& c, auto& k, auto& v) { c.emi.sigmaIntra = to_double(k, v); }},
        {"gap_resistance", [](auto& c, auto& k, auto& v) { c.emi.gap.resistance = to_double(k, v); }},
        {"robin_eps", [](auto& c, auto& k, auto& v) { c.emi.robinEps = to_double(k, v); }},
        {"ap_a", [](auto& c, auto& k, auto& v) { c.ionic.a = to_double(k, v); }},
        {"ap_eps1", [](auto& c, auto& k, auto& v) { c.ionic.eps1 = to_double(k, v); }},
        {"ap_ga", [](auto& c, auto& k, auto& v) { c.ionic.ga = to_double(k, v); }},
        {"ap_gs", [](auto& c, auto& k, auto& v) { c.ionic.gs = to_double(k, v); }},
        {"ap_mu1", [](auto& c, auto& k, auto& v) { c.ionic.mu1 = to_double(k, v); }},
        {"ap_mu2", [](auto& c, auto& k, auto& v) { c.ionic.mu2 = to_double(k, v); }}}},
      {"sdc",
       {{"nodes", [](auto& c, auto& k, auto& v) { c.nodes = to_int(k, v); }},
        {"time_step", [](auto& c, auto& k, auto& v) { c.timeStep = to_double(k, v); }},
        {"end_time", [](auto& c, auto& k, auto& v) { c.endTime = to_double(k, v); }},
        {"tol", [](auto& c, auto& k, auto& v) { c.sdc.tol = to_double(k, v); }},
        {"max_sweeps", [](auto& c, auto& k, auto& v) { c.sdc.maxSweeps = to_int(k, v); }},
        {"initial_rho", [](auto& c, auto& k, auto& v) { c.sdc.initialRho = to_double(k, v); }},
        {"cg_reduction", [](auto& c, auto& k, auto& v) { c.sdc.cg.reductionTarget = to_double(k, v); }},
        {"cg_max_iterations", [](auto& c, auto& k, auto& v) { c.sdc.cg.maxIterations = to_int(k, v); }},
        {"cg_delay", [](auto& c, auto& k, auto& v) { c.sdc.cg.delay = to_int(k, v); }}}},
      {"adaptivity",
       {{"mode", [](auto& c, auto&, auto& v) { c.drop.mode = to_drop_mode(v); }},
        {"alpha", [](auto& c, auto& k, auto& v) { c.drop.alpha = to_double(k, v); }},
        {"drop_tolerance", [](auto& c, auto& k, auto& v) {
           if (trim(v).empty()) c.drop.absolute.reset(); else c.drop.absolute = to_double(k, v);
         }},
        {"planned_sweeps", [](auto& c, auto& k, auto& v) { c.drop.sweeps = to_int(k, v); }}}},
      {"stimulus",
       {{"kind", [](auto& c, auto&, auto& v) { c.stimulus.kind = to_stimulus(v); }},
        {"center",
         [](auto& c, auto& k, auto& v) {
           const auto d = to_doubles(k, v);
           if (d.empty() || d.size() > 2) throw std::invalid_argument("config: stimulus.center expects 1 or 2 numbers");
           c.stimulus.center = {d[0], d.size() > 1 ? d[1] : 0.0};
         }},
        {"radius", [](auto& c, auto& k, auto& v) { c.stimulus.radius = to_double(k, v); }},
        {"value", [](auto& c, auto& k, auto& v) { c.stimulus.value = to_double(k, v); }},
        {"myocyte", [](auto& c, auto& k, auto& v) { c.stimulus.myocyte = to_int(k, v); }}}},
      {"output",
       {{"directory", [](auto& c, auto&, auto& v) { c.output.directory = trim(v); }},
        {"snapshot_every", [](auto& c, auto& k, auto& v) { c.output.snapshotEvery = to_int(k, v); }},
        {"vtk", [](auto& c, auto& k, auto& v) { c.output.vtk = to_bool(k, v); }}}},
  };
  return table;
}

}  // namespace

double SimulationConfig::diffusionCoefficient() const {
  if (diffusion) return *diffusion;
  return monodomain.conductivity / (monodomain.surfaceToVolume * monodomain.capacitance);
}

void SimulationConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string("config: ") + what + " must be > 0");
  };
  positive(timeStep, "sdc.time_step");
  if (!(endTime >= timeStep)) throw std::invalid_argument("config: sdc.end_time must be >= time_step");
  positive(sdc.tol, "sdc.tol");
  if (sdc.maxSweeps < 1) throw std::invalid_argument("config: sdc.max_sweeps must be >= 1");
  if (nodes < 1 || nodes > 9) throw std::invalid_argument("config: sdc.nodes must lie in 1..9");
  positive(sdc.cg.reductionTarget, "sdc.cg_reduction");
  if (sdc.cg.maxIterations < 1 || sdc.cg.delay < 1)
    throw std::invalid_argument("config: cg_max_iterations and cg_delay must be >= 1");
  positive(monodomain.conductivity, "physics.sigma_m");
  positive(monodomain.surfaceToVolume, "physics.chi");
  positive(monodomain.capacitance, "physics.capacitance");
  positive(emi.sigmaExtra, "physics.sigma_extra");
  positive(emi.sigmaIntra, "physics.sigma_intra");
  positive(emi.gap.resistance, "physics.gap_resistance");
  positive(emi.robinEps, "physics.robin_eps");
  if (diffusion) positive(*diffusion, "physics.diffusion");
  ionic.validate();
  DropPolicy d = drop;
  d.tol = sdc.tol;
  d.validate();
  if (mesh.dim != 1 && mesh.dim != 2) throw std::invalid_argument("config: mesh.dim must be 1 or 2");
  if (model == ModelKind::monodomain) {
    if (mesh.cells[0] < 1 || (mesh.dim == 2 && mesh.cells[1] < 1))
      throw std::invalid_argument("config: mesh.cells must be >= 1");
    positive(mesh.extent[0], "mesh.extent");
    if (mesh.dim == 2) positive(mesh.extent[1], "mesh.extent");
  } else {
    if (mesh.dim != 2) throw std::invalid_argument("config: EMI meshes are two-dimensional");
    positive(mesh.spacing, "mesh.spacing");
    if (mesh.myocytes.empty()) throw std::invalid_argument("config: EMI needs at least one myocyte");
  }
  if (stimulus.kind == StimulusKind::ball) positive(stimulus.radius, "stimulus.radius");
  if (stimulus.kind == StimulusKind::myocyte) {
    if (model != ModelKind::emi)
      throw std::invalid_argument("config: myocyte stimulus requires the EMI model");
    if (stimulus.myocyte < 0 || stimulus.myocyte >= static_cast<int>(mesh.myocytes.size()))
      throw std::invalid_argument("config: stimulus.myocyte out of range");
  }
  if (output.snapshotEvery < 0) throw std::invalid_argument("config: output.snapshot_every must be >= 0");
}

std::string SimulationConfig::to_text() const {
  std::ostringstream o;
  o << "[model]\ntype = " << (model == ModelKind::monodomain ? "monodomain" : "emi")
    << "\nreaction = " << (reaction ? "true" : "false") << "\ngating = " << (gating ? "true" : "false")
    << "\n\n[mesh]\ndim = " << mesh.dim << "\ncells = " << mesh.cells[0] << " " << mesh.cells[1]
    << "\nextent = " << fmt(mesh.extent[0]) << " " << fmt(mesh.extent[1])
    << "\nspacing = " << fmt(mesh.spacing) << "\nmyocytes = ";
  for (std::size_t k = 0; k < mesh.myocytes.size(); ++k)
    o << (k ? "; " : "") << fmt(mesh.myocytes[k]);
  o << "\nbath_margin = " << fmt(mesh.bathMargin) << "\nbath = " << (mesh.bath ? fmt(*mesh.bath) : "")
    << "\n\n[physics]\nsigma_m = " << fmt(monodomain.conductivity)
    << "\nchi = " << fmt(monodomain.surfaceToVolume)
    << "\ncapacitance = " << fmt(model == ModelKind::emi ? emi.capacitance : monodomain.capacitance)
    << "\ndiffusion = " << (diffusion ? fmt(*diffusion) : "")
    << "\nsigma_extra = " << fmt(emi.sigmaExtra) << "\nsigma_intra = " << fmt(emi.sigmaIntra)
    << "\ngap_resistance = " << fmt(emi.gap.resistance) << "\nrobin_eps = " << fmt(emi.robinEps)
    << "\nap_a = " << fmt(ionic.a) << "\nap_eps1 = " << fmt(ionic.eps1) << "\nap_ga = " << fmt(ionic.ga)
    << "\nap_gs = " << fmt(ionic.gs) << "\nap_mu1 = " << fmt(ionic.mu1) << "\nap_mu2 = " << fmt(ionic.mu2)
    << "\n\n[sdc]\nnodes = " << nodes << "\ntime_step = " << fmt(timeStep)
    << "\nend_time = " << fmt(endTime) << "\ntol = " << fmt(sdc.tol) << "\nmax_sweeps = " << sdc.maxSweeps
    << "\ninitial_rho = " << fmt(sdc.initialRho) << "\ncg_reduction = " << fmt(sdc.cg.reductionTarget)
    << "\ncg_max_iterations = " << sdc.cg.maxIterations << "\ncg_delay = " << sdc.cg.delay
    << "\n\n[adaptivity]\nmode = " << name(drop.mode) << "\nalpha = " << fmt(drop.alpha)
    << "\ndrop_tolerance = " << (drop.absolute ? fmt(*drop.absolute) : "")
    << "\nplanned_sweeps = " << drop.sweeps
    << "\n\n[stimulus]\nkind = " << name(stimulus.kind) << "\ncenter = " << fmt(stimulus.center[0]) << " "
    << fmt(stimulus.center[1]) << "\nradius = " << fmt(stimulus.radius) << "\nvalue = " << fmt(stimulus.value)
    << "\nmyocyte = " << stimulus.myocyte << "\n\n[output]\ndirectory = " << output.directory
    << "\nsnapshot_every = " << output.snapshotEvery << "\nvtk = " << (output.vtk ? "true" : "false") << "\n";
  return o.str();
}

std::uint64_t SimulationConfig::hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : to_text()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

SimulationConfig default_config(ModelKind model) {
  SimulationConfig c;
  c.model = model;
  if (model == ModelKind::emi) {
    c.gating = false;
    c.timeStep = 2e-5;
    c.endTime = 4e-3;
    c.mesh.spacing = 4e-6;
    c.mesh.myocytes = {{0.0, 0.0, 1e-4, 2e-5}, {1e-4, 0.0, 2e-4, 2e-5}, {2e-4, 0.0, 3e-4, 2e-5}};
    c.mesh.bathMargin = 2e-5;
    c.stimulus.kind = StimulusKind::myocyte;
    c.stimulus.myocyte = 0;
    c.stimulus.value = 0.5;
  }
  return c;
}

SimulationConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  ModelKind model = ModelKind::monodomain;
  if (auto m = tree.get_optional<std::string>("model.type")) model = to_model(*m);
  SimulationConfig cfg = default_config(model);
  const auto& table = setters();
  for (const auto& [section, keys] : tree) {
    const auto s = table.find(section);
    if (s == table.end()) {
      if (keys.empty()) throw std::invalid_argument("config: key outside a section: '" + section + "'");
      throw std::invalid_argument("config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : keys) {
      const auto k = s->second.find(key);
      if (k == s->second.end())
        throw std::invalid_argument("config: unknown key '" + key + "' in [" + section + "]");
      k->second(cfg, section + "." + key, value.data());
    }
  }
  cfg.drop.tol = cfg.sdc.tol;
  cfg.validate();
  return cfg;
}

SimulationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace cardiosdc
