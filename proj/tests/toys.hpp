// Small analytic systems shared by the unit tests.
#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "rovib/molecule.hpp"
#include "rovib/potential.hpp"
#include "rovib/units.hpp"

namespace toys {

using namespace rovib;

inline constexpr double kLightMu = 7.0 * K::amu_to_electron_mass;

struct MorseParams {
  double De, a, re, asym;
};

inline double morse_we(const MorseParams& p, double mu) { return p.a * std::sqrt(2.0 * p.De / mu); }
inline double morse_wexe(const MorseParams& p, double mu) { return p.a * p.a / (2.0 * mu); }

// E_v from the closed-form Morse spectrum (J = 0).
inline double morse_level(const MorseParams& p, double mu, int v) {
  const double x = v + 0.5;
  return p.asym - p.De + morse_we(p, mu) * x - morse_wexe(p, mu) * x * x;
}

// dE_v / dln(mu) for the Morse spectrum.
inline double morse_sensitivity(const MorseParams& p, double mu, int v) {
  const double x = v + 0.5;
  return -0.5 * morse_we(p, mu) * x + morse_wexe(p, mu) * x * x;
}

inline MorseParams ground_morse() { return {cm1_to_hartree(5000.0), 0.9, 5.0, 0.0}; }
inline MorseParams excited_morse() { return {cm1_to_hartree(4000.0), 0.8, 5.4, cm1_to_hartree(12000.0)}; }

inline PotentialCurve morse_curve(const std::string& label, int omega, Symmetry s, const MorseParams& p) {
  return PotentialCurve::morse(label, omega, s, p.De, p.a, p.re, p.asym);
}

// Ground X (g) and excited A (u, Omega' = omega) Morse wells with d(R) = d.
inline MoleculeSystem morse_pair(double d = 1.0, int omega = 0, MorseParams ex = excited_morse()) {
  MoleculeSystem s;
  s.reduced_mass = kLightMu;
  s.ground = morse_curve("X", 0, Symmetry::Gerade, ground_morse());
  s.excited.push_back(morse_curve("A", omega, Symmetry::Ungerade, ex));
  s.dipoles.push_back(DipoleFunction::constant("X", "A", d));
  return s;
}

// Excited well shallow enough to hold a single level: lambda = sqrt(2 mu De)/a < 1.5.
inline MorseParams single_level_morse(double asym_cm1) {
  return {cm1_to_hartree(10.0), 1.0, 6.0, cm1_to_hartree(asym_cm1)};
}

// Harmonic well 0.5 mu w^2 (R - re)^2 tabulated out to `sigmas` oscillator
// lengths on either side, joined to a shallow C6 shelf of height `shelf` above
// the last sample. Only low levels are used, far from the table edges.
inline PotentialCurve harmonic_curve(const std::string& label, Symmetry s, double mu, double w,
                                     double re, double offset, double sigmas = 8.0,
                                     double shelf_quanta = 2.0) {
  const double sigma = 1.0 / std::sqrt(mu * w);
  const double half = sigmas * sigma;
  const int n = 400;
  std::vector<double> r, v;
  for (int i = -n; i <= n; ++i) {
    const double x = re + half * i / n;
    r.push_back(x);
    v.push_back(offset + 0.5 * mu * w * w * (x - re) * (x - re));
  }
  const double shelf = shelf_quanta * w;
  return PotentialCurve::tabulated(label, 0, s, r, v, v.back() + shelf,
                                   {{6, shelf * std::pow(r.back(), 6)}});
}

// Deterministic generator for property tests.
inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240611ULL);
  return g;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

}  // namespace toys
