#pragma once

namespace cardiosdc {

/// Aliev-Panfilov membrane kinetics in dimensionless voltage v in [0, 1].
struct AlievPanfilovParams {
  double a = 0.1;
  double eps1 = 0.01;
  double ga = 8.0;
  double gs = 8.0;
  double mu1 = 0.07;
  double mu2 = 0.3;

  void validate() const;
};

/// Ohmic gap junction between two myocytes.
struct GapJunctionParams {
  double resistance = 4.5e-4;  ///< ohm m^2

  void validate() const;
};

// I_ion(v, w) = ga v (v - a)(v - 1) + v w
double i_ion(double v, double w, const AlievPanfilovParams& p);
double di_ion_dv(double v, double w, const AlievPanfilovParams& p);
double di_ion_dw(double v, double w, const AlievPanfilovParams& p);

// R(v, w) = 1/4 (eps1 + mu1 w / (v + mu2)) (-w - gs v (v - a - 1))
// Throws std::domain_error when |v + mu2| < 1e-9.
double r_gate(double v, double w, const AlievPanfilovParams& p);
double dr_dw(double v, double w, const AlievPanfilovParams& p);

inline double gap_current(double v, const GapJunctionParams& p) { return v / p.resistance; }
inline double gap_conductance(const GapJunctionParams& p) { return 1.0 / p.resistance; }

}  // namespace cardiosdc
