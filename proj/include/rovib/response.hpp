#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "rovib/molecule.hpp"

namespace rovib {

struct Resonance {
  double nu = 0.0;  // cm^-1
  RovibLevel intermediate;
};

struct PolarizabilityOptions {
  int M = 0;
  int eps = 0;  // spherical polarization component
  bool include_continuum = true;
  /// Natural widths from the decay module; false sets every width to zero.
  bool natural_widths = true;
  /// Overrides the width (A, s^-1) of every bound intermediate when set.
  std::function<double(const RovibLevel&)> width;
  /// Continuum cutoff above each threshold (Hartree); 0 chooses it by convergence.
  double continuum_eps_max = 0.0;
  /// Excited channels summed over; empty takes every coupled channel.
  std::vector<std::string> channels;
};

/// Complex dynamic polarizability of one ground level as a function of the
/// laser frequency. Built once per level; evaluation is cheap and thread-safe.
class PolarizabilityModel {
 public:
  PolarizabilityModel(const Molecule& m, const RovibLevel& level,
                      const PolarizabilityOptions& opts = {});

  /// alpha in MHz/(W/cm^2) at nu (cm^-1). Throws OnResonance when a
  /// zero-width term is hit.
  std::complex<double> operator()(double nu) const;

  const RovibLevel& level() const { return level_; }
  /// Bound-bound poles sorted by frequency.
  const std::vector<Resonance>& poles() const { return poles_; }
  std::vector<Resonance> resonances(double nu_lo, double nu_hi) const;
  /// Distance (cm^-1) from nu to the closest pole; infinity if none.
  double nearest_pole(double nu, const Resonance** which = nullptr) const;

 private:
  struct BoundTerm {
    double strength;  // |<f|d.e|i>|^2, atomic units
    std::complex<double> de;  // E_f - i Gamma/2 - E_i
  };
  struct ContinuumTerm {
    const ContinuumTable* table;
    std::size_t partner;
    double weight;   // angular factor squared
    double offset;   // asymptote - E_i
  };

  RovibLevel level_;
  std::vector<BoundTerm> bound_;
  std::vector<ContinuumTerm> continuum_;
  std::vector<Resonance> poles_;
};

std::complex<double> polarizability(const Molecule& m, const RovibLevel& level, double nu,
                                    const PolarizabilityOptions& opts = {});

struct PolarizabilitySpectrum {
  RovibLevel level;
  std::vector<double> nu;                    // cm^-1
  std::vector<std::complex<double>> alpha;   // MHz/(W/cm^2)
  std::vector<Resonance> resonances;         // poles inside the window
  /// Sample indices i with a sign change of Re alpha between i and i+1 that
  /// does not bracket a resonance.
  std::vector<std::size_t> zero_crossings;
};

/// Samples nu_min + k step for nu < nu_max (half-open window). A pole hit
/// exactly by a sample with zero width is stored as NaN.
PolarizabilitySpectrum scan(const PolarizabilityModel& model, double nu_min, double nu_max,
                            double step = 0.1);
PolarizabilitySpectrum scan(const Molecule& m, const RovibLevel& level, double nu_min,
                            double nu_max, double step = 0.1,
                            const PolarizabilityOptions& opts = {});

struct LevelPolarizability {
  RovibLevel level;
  std::complex<double> alpha;
};

/// One value per bound level of the ground channel at rotational J.
std::vector<LevelPolarizability> polarizability_vs_v(const Molecule& m, double nu, int J = 0,
                                                     const PolarizabilityOptions& opts = {});

/// -alpha I in MHz; alpha in MHz/(W/cm^2), I in W/cm^2.
std::complex<double> stark_shift(std::complex<double> alpha, double intensity);

/// Photon scattering rate (s^-1) from Im alpha.
double scattering_rate(std::complex<double> alpha, double intensity);
double scattering_rate(const Molecule& m, const RovibLevel& level, double nu, double intensity,
                       const PolarizabilityOptions& opts = {});

}  // namespace rovib
