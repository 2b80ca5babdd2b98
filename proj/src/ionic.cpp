#include "cardiosdc/ionic.hpp"

#include <cmath>
#include <stdexcept>

namespace cardiosdc {

void AlievPanfilovParams::validate() const {
  if (!(mu2 > 0.0)) throw std::invalid_argument("AlievPanfilovParams: mu2 must be positive");
}

void GapJunctionParams::validate() const {
  if (!(resistance > 0.0))
    throw std::invalid_argument("GapJunctionParams: resistance must be positive");
}

double i_ion(double v, double w, const AlievPanfilovParams& p) {
  return p.ga * v * (v - p.a) * (v - 1.0) + v * w;
}

double di_ion_dv(double v, double w, const AlievPanfilovParams& p) {
  return p.ga * (3.0 * v * v - 2.0 * (1.0 + p.a) * v + p.a) + w;
}

double di_ion_dw(double v, double /*w*/, const AlievPanfilovParams& /*p*/) { return v; }

namespace {

double pole_guard(double v, const AlievPanfilovParams& p) {
  const double d = v + p.mu2;
  if (std::abs(d) < 1e-9)
    throw std::domain_error("Aliev-Panfilov gating rate: v + mu2 is at the pole");
  return d;
}

}  // namespace

double r_gate(double v, double w, const AlievPanfilovParams& p) {
  const double d = pole_guard(v, p);
  return 0.25 * (p.eps1 + p.mu1 * w / d) * (-w - p.gs * v * (v - p.a - 1.0));
}

double dr_dw(double v, double w, const AlievPanfilovParams& p) {
  const double d = pole_guard(v, p);
  const double rate = p.eps1 + p.mu1 * w / d;
  const double drive = -w - p.gs * v * (v - p.a - 1.0);
  return 0.25 * (p.mu1 / d * drive - rate);
}

}  // namespace cardiosdc
