#pragma once

#include <numbers>
#include <string>
#include <string_view>

namespace rovib {

/// Fixed constant table. Everything internal runs in Hartree atomic units;
/// these literals are only used at the I/O boundary.
struct PhysicalConstants {
  static constexpr double h = 6.62607015e-34;         // J s
  static constexpr double c = 299792458.0;            // m / s
  static constexpr double eps0 = 8.8541878128e-12;    // F / m
  static constexpr double a0 = 5.29177210903e-11;     // m
  static constexpr double e_charge = 1.602176634e-19; // C
  static constexpr double hartree_to_wavenumber = 219474.6313632;  // cm^-1 per Hartree
  static constexpr double amu_to_electron_mass = 1822.888486;

  static constexpr double hbar = h / (2.0 * std::numbers::pi);
  static constexpr double hartree_hz = hartree_to_wavenumber * c * 100.0;
  static constexpr double hartree_joule = hartree_hz * h;
  /// Atomic unit of time, hbar / E_h.
  static constexpr double atomic_time = hbar / hartree_joule;
  /// Speed of light in atomic units (inverse fine-structure constant).
  static constexpr double c_atomic = c * atomic_time / a0;

  /// Version tag of this table; written into run manifests.
  static constexpr std::string_view table_version = "codata2018-fixed-1";
};

using K = PhysicalConstants;

/// Curated set of unit tags. Tags in the same dimension convert linearly.
enum class Unit {
  Hartree,
  Wavenumber,       // cm^-1
  THz,
  MHz,
  kHz,
  AngularRate,      // s^-1, E = hbar * omega
  DipoleAU,         // e a0
  Bohr,             // a0
  Nanometer,
  Amu,
  ElectronMass,
  PolarizabilityMHz,  // MHz / (W/cm^2), energy shift per intensity
  PolarizabilityAU,   // static-style dipole polarizability, e^2 a0^2 / E_h
  WattPerCm2,
  WattPerM2,
};

enum class Dimension { Energy, Dipole, Length, Mass, Polarizability, Intensity };

Dimension dimension_of(Unit u);
std::string_view unit_name(Unit u);
Unit parse_unit(std::string_view name);

/// Linear conversion between tags of the same dimension; throws
/// IncompatibleUnits otherwise.
double convert(double value, Unit from, Unit to);

inline double cm1_to_hartree(double x) { return x / K::hartree_to_wavenumber; }
inline double hartree_to_cm1(double x) { return x * K::hartree_to_wavenumber; }

/// Converts sum |d|^2 dE / (dE^2 - E^2) (atomic units) to the
/// shift-per-intensity in MHz/(W/cm^2).
double polarizability_sum_to_mhz(double sum_au);

}  // namespace rovib
