#pragma once

#include <string>
#include <vector>

#include "rovib/molecule.hpp"

namespace rovib {

struct DecayPartial {
  std::string label;        // final level, or continuum bin
  bool continuum = false;
  RovibLevel final;         // bound finals only
  int J = 0;                // ground rotational quantum number
  double eps_lo = 0.0;      // continuum bins: energy range above threshold, cm^-1
  double eps_hi = 0.0;
  double omega = 0.0;       // s^-1 (angular); bins use the geometric-mean energy
  double rate = 0.0;        // s^-1
};

struct DecayReport {
  RovibLevel level;
  double a_total = 0.0;        // s^-1
  double linewidth_khz = 0.0;  // a_total / 2 pi
  double bound_rate = 0.0;
  double continuum_rate = 0.0;
  double bound_bound_fraction = 1.0;
  bool no_decay_channels = false;
  std::vector<DecayPartial> per_transition;
};

struct DecayOptions {
  bool include_continuum = true;
  /// Restricts the ground rotational levels; empty keeps every allowed J.
  std::vector<int> final_J;
  /// Continuum bins per decade of energy in the per-transition report.
  int bins_per_decade = 1;
};

/// Spontaneous decay of an excited level into bound and continuum states of
/// the ground channel. A level with nothing below it returns a zero report
/// with no_decay_channels set.
DecayReport einstein_a(const Molecule& m, const RovibLevel& excited, const DecayOptions& opts = {});

/// Bound partial rates over a_total; 1 when a_total = 0.
double bound_bound_fraction(const DecayReport& report);

/// Reports for every level of (channel, J').
std::vector<DecayReport> linewidth_map(const Molecule& m, const std::string& channel, int Jp = 1,
                                       const DecayOptions& opts = {});

/// Memoized natural width A (s^-1) of an excited level with default options.
double natural_width(const Molecule& m, const RovibLevel& excited);

}  // namespace rovib
