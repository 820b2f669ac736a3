#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "rovib/decay.hpp"
#include "rovib/models.hpp"
#include "rovib/molecule.hpp"
#include "rovib/response.hpp"
#include "rovib/transitions.hpp"
#include "rovib/units.hpp"

using namespace rovib;

namespace {

const Molecule& sr2() {
  static const Molecule m(sr2_model());
  return m;
}

const std::string kX = "X1Sigma+";

}  // namespace

TEST_CASE("similar-shape wells give sharply peaked fcf rows") {
  // the default 0u+ well is deeper and sits inside X, so its rows are broad;
  // give it the ground-state shape to isolate the effect
  Sr2ModelParams p;
  p.zero_u_depth = 1.1 * p.x_depth;
  p.zero_u_a = p.x_a;
  p.zero_u_re = p.x_re - 0.05;
  p.include_singlets = false;
  const Molecule m(sr2_model(p));
  const auto f = fcf_matrix(m, "0u+", kX, 0, 0);
  for (std::size_t vp = 0; vp < 4; ++vp) {
    const auto& row = f.values[vp];
    const double top = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double x : row) sum += x;
    MESSAGE("0u+ v'=" << vp << " top fcf " << top << " row sum " << sum);
    CHECK(top > 0.5);
    CHECK(sum <= 1.0 + 1e-9);
  }
  const auto broad = fcf_matrix(sr2(), "0u+", kX, 0, 0);
  const auto& row0 = broad.values[0];
  CHECK(*std::max_element(row0.begin(), row0.end()) < 0.5);
}

TEST_CASE("deep levels couple more strongly through 0u+ than through 1u") {
  const auto& m = sr2();
  const auto ground = m.levels(kX, 0);
  const auto zero = m.levels("0u+", 1), one = m.levels("1u", 1);
  for (std::size_t vp = 0; vp < 6; ++vp) {
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t v = 0; v < 20; ++v) {
      s0 += std::pow(m.reduced_dipole(zero[vp], ground[v]), 2);
      s1 += std::pow(m.reduced_dipole(one[vp], ground[v]), 2);
    }
    CHECK(s0 > 10.0 * s1);
  }
}

TEST_CASE("Raman pathways from v=-3 to a mid-well level concentrate in one window") {
  const auto& m = sr2();
  const auto ground = m.levels(kX, 0);
  const auto paths = rank_intermediates(m, ground[ground.size() - 3], ground[27], {"0u+"});
  REQUIRE(paths.size() == m.levels("0u+", 1).size());
  // the strongest pathways sit in one contiguous band of v'
  std::vector<int> top;
  for (std::size_t k = 0; k < 5; ++k) top.push_back(paths[k].intermediate.v);
  std::sort(top.begin(), top.end());
  MESSAGE("top intermediates v'=" << top.front() << ".." << top.back());
  CHECK(top.back() - top.front() <= 12);
  const double median = std::abs(paths[paths.size() / 2].product);
  CHECK(std::abs(paths.front().product) > 10.0 * median);
  // exhaustive check of the ordering
  for (std::size_t k = 1; k < paths.size(); ++k)
    CHECK(std::abs(paths[k].product) <= std::abs(paths[k - 1].product));
}

TEST_CASE("baseline polarizability of deep levels") {
  const auto& m = sr2();
  const auto ground = m.levels(kX, 0);
  for (std::size_t v : {0, 10, 27}) {
    const auto a = polarizability(m, ground[v], 10600.0);
    MESSAGE("alpha(10600) v=" << v << " = " << a.real());
    CHECK(a.real() >= 1e-5);
    CHECK(a.real() <= 1e-4);
    CHECK(a.imag() >= 0.0);
  }
}

TEST_CASE("resonance strengths follow the dipole matrix elements") {
  const auto& m = sr2();
  const auto ground = m.levels(kX, 0);
  const auto& i = ground[27];
  PolarizabilityOptions o;
  o.natural_widths = false;
  o.include_continuum = false;
  PolarizabilityModel model(m, i, o);
  const auto res = model.resonances(10700.0, 11300.0);
  CHECK(res.size() >= 3);
  std::map<std::string, std::vector<double>> ratios;
  for (const auto& r : res) {
    // residue of alpha at the pole, from a symmetric pair of samples
    const double d = 1e-4;
    const double residue = 0.5 * d * (model(r.nu - d).real() - model(r.nu + d).real());
    const double s = std::pow(m.reduced_dipole(r.intermediate, i), 2);
    if (s < 1e-12) continue;
    ratios[r.intermediate.channel].push_back(residue / s);
  }
  for (const auto& [ch, v] : ratios) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    CHECK(*hi / *lo < 1.01);
  }
}

TEST_CASE("Sr2 linewidths") {
  const auto& m = sr2();
  const double asym = m.system().curve("0u+").asymptote();
  const auto zero = linewidth_map(m, "0u+");
  const auto one = linewidth_map(m, "1u");
  SUBCASE("1u widths stay below 1e-6 cm^-1") {
    for (const auto& r : one) CHECK(r.a_total / (2 * std::numbers::pi) / (100.0 * K::c) < 1e-6);
  }
  SUBCASE("deep 1u widths sit below 0u+ by about the short-range dipole ratio squared") {
    const double ratio = std::pow(0.12 / 1.2, 2);
    for (std::size_t v = 0; v < 5; ++v) {
      const double q = one[v].a_total / zero[v].a_total;
      MESSAGE("v'=" << v << " width ratio 1u/0u+ " << q);
      CHECK(q > 0.3 * ratio);
      CHECK(q < 3.0 * ratio);
    }
  }
  SUBCASE("bound-bound fraction: high at the extremes, dipping in between") {
    CHECK(zero.front().bound_bound_fraction > 0.9);
    double weak = 0.0, mid = 1.0;
    for (const auto& r : zero) {
      const double eb = hartree_to_cm1(asym - r.level.energy);
      CHECK(r.bound_bound_fraction >= 0.0);
      CHECK(r.bound_bound_fraction <= 1.0);
      if (eb < 1.0) weak = std::max(weak, r.bound_bound_fraction);
      if (eb > 10.0 && eb < 1000.0) mid = std::min(mid, r.bound_bound_fraction);
    }
    MESSAGE("bbf max weakly bound " << weak << ", min intermediate " << mid);
    CHECK(weak > 0.9);
    CHECK(mid < 0.5);
  }
  SUBCASE("0u+ widths approach twice the atomic width near threshold") {
    CHECK(zero.back().linewidth_khz == doctest::Approx(15.0).epsilon(0.1));
    CHECK(zero.front().linewidth_khz > zero.back().linewidth_khz);
  }
}
