#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rovib/angular.hpp"
#include "rovib/decay.hpp"
#include "rovib/errors.hpp"
#include "rovib/molecule.hpp"
#include "rovib/response.hpp"
#include "toys.hpp"

using namespace rovib;

namespace {

constexpr double kPi = std::numbers::pi;

// omega^3 d^2 / (3 pi eps0 hbar c^3) in SI, inputs in atomic units
double two_level_a(double de_au, double d_au) {
  const double w = de_au * K::hartree_joule / K::hbar;
  const double d = d_au * K::e_charge * K::a0;
  return w * w * w * d * d / (3 * kPi * K::eps0 * K::hbar * K::c * K::c * K::c);
}

// Sum of two-level rates over every lower bound level, independent of the module.
double bound_sum(const Molecule& m, const RovibLevel& f, int omega) {
  double a = 0.0;
  for (int J = std::max(0, f.J - 1); J <= f.J + 1; ++J) {
    const double w = rotational_weight(J, f.J, omega);
    if (w <= 0.0) continue;
    for (const auto& g : m.levels(m.system().ground.label(), J)) {
      if (g.energy >= f.energy) continue;
      a += w * two_level_a(f.energy - g.energy, m.reduced_dipole(f, g));
    }
  }
  return a;
}

MoleculeSystem single_ground_system(double d, int omega) {
  const auto g = toys::single_level_morse(0.0);
  MoleculeSystem sys = toys::morse_pair(d, omega);
  sys.ground = toys::morse_curve("X", 0, Symmetry::Gerade, g);
  return sys;
}

MoleculeSystem repulsive_ground_system() {
  MoleculeSystem sys = toys::morse_pair(1.0);
  std::vector<double> r, v;
  const double c = 200.0;
  for (double x = 3.0; x <= 40.0; x += 0.25) {
    r.push_back(x);
    v.push_back(c / std::pow(x, 6));
  }
  sys.ground = PotentialCurve::tabulated("X", 0, Symmetry::Gerade, r, v, 0.0, {{6, -c}});
  return sys;
}

}  // namespace

TEST_CASE("two-level Einstein A matches the closed form") {
  for (int omega : {0, 1}) {
    Molecule m(single_ground_system(0.9, omega));
    REQUIRE(m.levels("X", 0).size() == 1);
    DecayOptions o;
    o.include_continuum = false;
    o.final_J = {0};
    for (int v : {0, 4, 11}) {
      const auto f = m.select("A", 1, v);
      const auto g = m.select("X", 0, 0);
      const double ref = rotational_weight(0, 1, omega) * two_level_a(f.energy - g.energy, m.reduced_dipole(f, g));
      const auto rep = einstein_a(m, f, o);
      REQUIRE(rep.per_transition.size() == 1);
      CHECK(rep.a_total == doctest::Approx(ref).epsilon(1e-10));
      CHECK(rep.per_transition[0].omega == doctest::Approx((f.energy - g.energy) / K::atomic_time).epsilon(1e-14));
      CHECK(rep.linewidth_khz == doctest::Approx(ref / (2 * kPi) / 1e3).epsilon(1e-10));
    }
  }
  // branch weights over J = J'-1..J'+1 close to one
  for (int omega : {0, 1}) {
    double s = 0.0;
    for (int J = 0; J <= 2; ++J) s += rotational_weight(J, 1, omega);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("bound part equals the enumerated sum") {
  for (int omega : {0, 1}) {
    Molecule m(toys::morse_pair(1.0, omega));
    DecayOptions o;
    o.include_continuum = false;
    for (int v : {0, 3, 9}) {
      const auto f = m.select("A", 1, v);
      const auto rep = einstein_a(m, f, o);
      CHECK(rep.a_total == doctest::Approx(bound_sum(m, f, omega)).epsilon(1e-10));
      CHECK(bound_bound_fraction(rep) == 1.0);
      for (const auto& p : rep.per_transition) CHECK(p.rate >= 0.0);
    }
  }
}

TEST_CASE("linewidth ordering follows the summed omega^3 d^2") {
  // dipole rising with R makes the partial sums vary strongly with v'
  auto sys = toys::morse_pair(1.0);
  std::vector<double> r, d;
  for (double x = 1.0; x <= 60.0; x += 0.5) {
    r.push_back(x);
    d.push_back(0.05 * x * x);
  }
  sys.dipoles = {DipoleFunction("X", "A", r, d, d.back())};
  Molecule m(sys);
  DecayOptions o;
  o.include_continuum = false;
  const auto map = linewidth_map(m, "A", 1, o);
  REQUIRE(map.size() == m.levels("A", 1).size());
  std::vector<std::pair<double, double>> pairs;
  for (const auto& rep : map) pairs.emplace_back(bound_sum(m, rep.level, 0), rep.linewidth_khz);
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t k = 1; k < pairs.size(); ++k) CHECK(pairs[k].second >= pairs[k - 1].second);
}

TEST_CASE("vanishing dipole gives no decay") {
  Molecule m(toys::morse_pair(0.0));
  const auto rep = einstein_a(m, m.select("A", 1, 2));
  CHECK(rep.a_total == 0.0);
  CHECK(rep.linewidth_khz == 0.0);
  CHECK(bound_bound_fraction(rep) == 1.0);
}

TEST_CASE("level below the whole ground spectrum has no decay channels") {
  // excited well sitting entirely below the ground minimum
  auto ex = toys::excited_morse();
  ex.asym = -cm1_to_hartree(20000.0);
  Molecule m(toys::morse_pair(1.0, 0, ex));
  const auto rep = einstein_a(m, m.select("A", 1, 0));
  CHECK(rep.no_decay_channels);
  CHECK(rep.a_total == 0.0);
  CHECK(rep.per_transition.empty());
  CHECK(bound_bound_fraction(rep) == 1.0);
}

TEST_CASE("repulsive ground channel decays only into the continuum") {
  Molecule m(repulsive_ground_system());
  REQUIRE(m.levels("X", 0).empty());
  for (int v : {0, 5}) {
    const auto rep = einstein_a(m, m.select("A", 1, v));
    CHECK(rep.a_total > 0.0);
    CHECK(rep.bound_rate == 0.0);
    CHECK(bound_bound_fraction(rep) == 0.0);
    double s = 0.0;
    for (const auto& p : rep.per_transition) {
      CHECK(p.continuum);
      CHECK(p.rate >= 0.0);
      CHECK(p.eps_hi > p.eps_lo);
      s += p.rate;
    }
    CHECK(s == doctest::Approx(rep.a_total).epsilon(1e-12));
  }
}

TEST_CASE("continuum part: fractions, closure and convergence") {
  Molecule m(toys::morse_pair(1.0));
  ContinuumOptions fine;
  fine.tol = 1e-8;
  Molecule mf(toys::morse_pair(1.0), {}, fine);
  for (int v : {0, 6, 14}) {
    const auto f = m.select("A", 1, v);
    const auto rep = einstein_a(m, f);
    const double bb = bound_bound_fraction(rep);
    CHECK(bb > 0.0);
    CHECK(bb <= 1.0);
    CHECK(rep.a_total == doctest::Approx(rep.bound_rate + rep.continuum_rate).epsilon(1e-14));
    CHECK(rep.bound_rate == doctest::Approx(bound_sum(m, f, 0)).epsilon(1e-10));
    const auto repf = einstein_a(mf, mf.select("A", 1, v));
    CHECK(std::abs(repf.a_total - rep.a_total) < 1e-6 * rep.a_total);
    // finer reporting bins redistribute but keep the total
    DecayOptions o;
    o.bins_per_decade = 4;
    CHECK(einstein_a(m, f, o).a_total == doctest::Approx(rep.a_total).epsilon(1e-12));
  }
}

TEST_CASE("removing decay channels never increases the rate") {
  Molecule m(toys::morse_pair(1.0, 1));
  const auto f = m.select("A", 1, 4);
  const double all = einstein_a(m, f).a_total;
  DecayOptions no_cont;
  no_cont.include_continuum = false;
  const double bound = einstein_a(m, f, no_cont).a_total;
  CHECK(bound <= all);
  for (std::vector<int> js : {std::vector<int>{0}, {1}, {2}, {0, 2}}) {
    DecayOptions o;
    o.final_J = js;
    CHECK(einstein_a(m, f, o).a_total <= all);
    o.include_continuum = false;
    CHECK(einstein_a(m, f, o).a_total <= bound);
  }
}

TEST_CASE("single-level channel map and natural width memo") {
  Molecule m(toys::morse_pair(1.0, 0, toys::single_level_morse(12000.0)));
  const auto map = linewidth_map(m, "A");
  REQUIRE(map.size() == 1);
  const auto direct = einstein_a(m, m.select("A", 1, 0));
  CHECK(map[0].a_total == direct.a_total);
  CHECK(map[0].linewidth_khz == direct.linewidth_khz);
  CHECK(natural_width(m, direct.level) == direct.a_total);
  CHECK(natural_width(m, direct.level) == direct.a_total);
}

TEST_CASE("decay without a dipole function throws") {
  auto sys = toys::morse_pair(1.0);
  sys.dipoles.clear();
  Molecule m(sys);
  CHECK_THROWS_AS(einstein_a(m, m.select("A", 1, 0)), MissingDipole);
}
