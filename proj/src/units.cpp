#include "rovib/units.hpp"

#include <array>

#include "rovib/errors.hpp"

namespace rovib {

namespace {

struct UnitInfo {
  Unit unit;
  std::string_view name;
  Dimension dim;
  double scale;  // value in the dimension's base unit per 1 of this unit
};

// Base units: Hartree, e a0, a0, m_e, MHz/(W/cm^2), W/cm^2.
constexpr double kPolAuToMHz =
    (K::e_charge * K::a0) * (K::e_charge * K::a0) / K::hartree_joule /
    (2.0 * K::eps0 * K::c) / K::h * 1e4 * 1e-6;

constexpr std::array<UnitInfo, 15> kUnits{{
    {Unit::Hartree, "Hartree", Dimension::Energy, 1.0},
    {Unit::Wavenumber, "cm-1", Dimension::Energy, 1.0 / K::hartree_to_wavenumber},
    {Unit::THz, "THz", Dimension::Energy, 1e12 / K::hartree_hz},
    {Unit::MHz, "MHz", Dimension::Energy, 1e6 / K::hartree_hz},
    {Unit::kHz, "kHz", Dimension::Energy, 1e3 / K::hartree_hz},
    {Unit::AngularRate, "s-1", Dimension::Energy, K::atomic_time},
    {Unit::DipoleAU, "ea0", Dimension::Dipole, 1.0},
    {Unit::Bohr, "a0", Dimension::Length, 1.0},
    {Unit::Nanometer, "nm", Dimension::Length, 1e-9 / K::a0},
    {Unit::Amu, "amu", Dimension::Mass, K::amu_to_electron_mass},
    {Unit::ElectronMass, "me", Dimension::Mass, 1.0},
    {Unit::PolarizabilityMHz, "MHz/(W/cm2)", Dimension::Polarizability, 1.0},
    {Unit::PolarizabilityAU, "au-polarizability", Dimension::Polarizability, kPolAuToMHz},
    {Unit::WattPerCm2, "W/cm2", Dimension::Intensity, 1.0},
    {Unit::WattPerM2, "W/m2", Dimension::Intensity, 1e-4},
}};

const UnitInfo& info(Unit u) {
  for (const auto& i : kUnits)
    if (i.unit == u) return i;
  throw IncompatibleUnits("unknown unit tag");
}

}  // namespace

Dimension dimension_of(Unit u) { return info(u).dim; }

std::string_view unit_name(Unit u) { return info(u).name; }

Unit parse_unit(std::string_view name) {
  for (const auto& i : kUnits)
    if (i.name == name) return i.unit;
  throw IncompatibleUnits("unsupported unit '" + std::string(name) + "'");
}

double convert(double value, Unit from, Unit to) {
  if (from == to) return value;
  const auto& a = info(from);
  const auto& b = info(to);
  if (a.dim != b.dim)
    throw IncompatibleUnits(std::string(a.name) + " -> " + std::string(b.name));
  return value * (a.scale / b.scale);
}

double polarizability_sum_to_mhz(double sum_au) {
  // alpha_au = 2 * sum for the conventional dipole polarizability.
  return 2.0 * sum_au * kPolAuToMHz;
}

}  // namespace rovib
