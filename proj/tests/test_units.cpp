#include <doctest.h>

#include <vector>

#include "rovib/errors.hpp"
#include "rovib/units.hpp"
#include "toys.hpp"

using namespace rovib;

TEST_CASE("hartree to wavenumber is the table constant") {
  CHECK(convert(1.0, Unit::Hartree, Unit::Wavenumber) == doctest::Approx(219474.6313632).epsilon(1e-15));
}

TEST_CASE("30 THz is the X well depth in wavenumbers") {
  // 30 THz / c
  CHECK(convert(30.0, Unit::THz, Unit::Wavenumber) == doctest::Approx(1000.69).epsilon(1e-5));
}

TEST_CASE("identity conversions") {
  const std::vector<Unit> all{Unit::Hartree, Unit::Wavenumber, Unit::THz, Unit::MHz, Unit::kHz,
                              Unit::AngularRate, Unit::DipoleAU, Unit::Bohr, Unit::Nanometer,
                              Unit::Amu, Unit::ElectronMass, Unit::PolarizabilityMHz,
                              Unit::PolarizabilityAU, Unit::WattPerCm2, Unit::WattPerM2};
  for (Unit u : all) CHECK(convert(3.25, u, u) == 3.25);
}

TEST_CASE("round trips within a dimension") {
  const std::vector<std::vector<Unit>> dims{
      {Unit::Hartree, Unit::Wavenumber, Unit::THz, Unit::MHz, Unit::kHz, Unit::AngularRate},
      {Unit::Bohr, Unit::Nanometer},
      {Unit::Amu, Unit::ElectronMass},
      {Unit::PolarizabilityMHz, Unit::PolarizabilityAU},
      {Unit::WattPerCm2, Unit::WattPerM2}};
  for (int trial = 0; trial < 200; ++trial) {
    const auto& d = dims[std::size_t(toys::uniform_int(0, int(dims.size()) - 1))];
    const Unit a = d[std::size_t(toys::uniform_int(0, int(d.size()) - 1))];
    const Unit b = d[std::size_t(toys::uniform_int(0, int(d.size()) - 1))];
    const double x = std::pow(10.0, toys::uniform(-8, 8)) * (trial % 2 ? -1 : 1);
    CHECK(convert(convert(x, a, b), b, a) == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("cross-dimension requests are rejected") {
  CHECK_THROWS_AS(convert(1.0, Unit::Hartree, Unit::Bohr), IncompatibleUnits);
  CHECK_THROWS_AS(convert(1.0, Unit::WattPerCm2, Unit::PolarizabilityMHz), IncompatibleUnits);
  CHECK_THROWS_AS(parse_unit("furlong"), IncompatibleUnits);
}

TEST_CASE("unit names parse back") {
  for (Unit u : {Unit::Hartree, Unit::Wavenumber, Unit::AngularRate, Unit::WattPerCm2})
    CHECK(parse_unit(unit_name(u)) == u);
}

TEST_CASE("Bohr radius") {
  CHECK(convert(1.0, Unit::Bohr, Unit::Nanometer) == doctest::Approx(0.0529177210903).epsilon(1e-12));
}

TEST_CASE("one atomic unit of polarizability") {
  // 1 au of polarizability gives a shift of 4.68645e-8 MHz per W/cm^2 (U = -alpha I / (2 eps0 c)).
  CHECK(convert(1.0, Unit::PolarizabilityAU, Unit::PolarizabilityMHz) ==
        doctest::Approx(4.68645e-8).epsilon(1e-5));
}
