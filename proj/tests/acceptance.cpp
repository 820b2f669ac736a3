// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "rovib/angular.hpp"
#include "rovib/decay.hpp"
#include "rovib/io.hpp"
#include "rovib/metrology.hpp"
#include "rovib/models.hpp"
#include "rovib/molecule.hpp"
#include "rovib/parallel.hpp"
#include "rovib/radial.hpp"
#include "rovib/response.hpp"
#include "rovib/transitions.hpp"
#include "toys.hpp"

using namespace rovib;
using cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;
int failures = 0;

void report(int n, bool ok, const std::string& what) {
  std::printf("criterion %2d: %s  %s\n", n, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Runs one criterion; an exception counts as a failure.
void run(int n, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(n, false, std::string("threw: ") + e.what());
  }
}

MoleculeSystem ground_only(PotentialCurve c, double mu) {
  MoleculeSystem s;
  s.reduced_mass = mu;
  s.ground = std::move(c);
  return s;
}

void morse_spectrum() {
  const auto p = toys::ground_morse();
  const auto sys = ground_only(toys::morse_curve("X", 0, Symmetry::Gerade, p), toys::kLightMu);
  set_threads(1);
  const auto t0 = std::chrono::steady_clock::now();
  const auto lv = bound_levels(sys, "X", 0);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  set_threads(0);
  double worst = 0.0;
  for (int v = 0; v < 20 && v < int(lv.size()); ++v) {
    const double exact = toys::morse_level(p, sys.reduced_mass, v);
    worst = std::max(worst, std::abs(lv[std::size_t(v)].energy - exact) / std::abs(exact));
  }
  report(1, lv.size() >= 20 && worst < 1e-8 && secs < 5.0,
         fmt("Morse v<20 max rel err %.2e (tol 1e-8), %.2f s single-threaded", worst, secs));
}

void wigner_suite() {
  double orth = 0.0, comp = 0.0, ls = 0.0;
  for (int j1 = 0; j1 <= 10; ++j1)
    for (int j2 = 0; j2 <= 10; ++j2)
      for (int m1 = -j1; m1 <= j1; ++m1)
        for (int m2 = -j2; m2 <= j2; ++m2) {
          // sum_{j3, m3} (2 j3 + 1) 3j 3j' = delta delta
          for (int m1p = -j1; m1p <= j1; ++m1p) {
            const int m2p = m1 + m2 - m1p;
            if (std::abs(m2p) > j2) continue;
            double s = 0.0;
            for (int j3 = std::abs(j1 - j2); j3 <= j1 + j2; ++j3) {
              const int m3 = -(m1 + m2);
              if (std::abs(m3) > j3) continue;
              s += (2 * j3 + 1) * wigner3j(j1, j2, j3, m1, m2, m3) * wigner3j(j1, j2, j3, m1p, m2p, m3);
            }
            comp = std::max(comp, std::abs(s - (m1 == m1p ? 1.0 : 0.0)));
          }
        }
  for (int j1 = 0; j1 <= 10; ++j1)
    for (int j2 = 0; j2 <= 10; ++j2)
      for (int j3 = std::abs(j1 - j2); j3 <= std::min(10, j1 + j2); ++j3)
        for (int j3p = std::abs(j1 - j2); j3p <= std::min(10, j1 + j2); ++j3p)
          for (int m3 = -std::min(j3, j3p); m3 <= std::min(j3, j3p); ++m3) {
            // (2 j3 + 1) sum_{m1 m2} 3j 3j' = delta_{j3 j3'}
            double s = 0.0;
            for (int m1 = -j1; m1 <= j1; ++m1) {
              const int m2 = -m1 - m3;
              if (std::abs(m2) > j2) continue;
              s += wigner3j(j1, j2, j3, m1, m2, m3) * wigner3j(j1, j2, j3p, m1, m2, m3);
            }
            orth = std::max(orth, std::abs((2 * j3 + 1) * s - (j3 == j3p ? 1.0 : 0.0)));
          }
  for (int Jp = 0; Jp <= 10; ++Jp)
    for (int op : {0, 1})
      if (Jp >= op)
        for (int Mp = -Jp; Mp <= Jp; ++Mp) ls = std::max(ls, std::abs(line_strength_sum(Jp, Mp, op) - 1.0));
  const bool rule = rotational_weight(1, 1, 0) == 0.0 && rotational_weight(0, 1, 0) > 0.0 &&
                    rotational_weight(2, 1, 0) > 0.0 &&
                    std::abs(rotational_weight(0, 1, 0) + rotational_weight(2, 1, 0) - 1.0) < 1e-15;
  report(2, orth < 1e-12 && comp < 1e-12 && ls < 1e-12 && rule,
         fmt("orthogonality %.1e, completeness %.1e, line strength %.1e (tol 1e-12)", orth, comp, ls) +
             (rule ? ", J'=1 Omega'=0 -> J in {0,2} exact" : ", selection rule broken"));
}

void harmonic_fcf() {
  const double mu = toys::kLightMu, w = cm1_to_hartree(1000.0), re = 5.0;
  const double sigma = 1.0 / std::sqrt(mu * w);
  double worst = 0.0;
  for (double delta = 0.0; delta <= 3.0 + 1e-9; delta += 0.5) {
    MoleculeSystem s;
    s.reduced_mass = mu;
    s.ground = toys::harmonic_curve("X", Symmetry::Gerade, mu, w, re, 0.0, 6.0);
    s.excited.push_back(toys::harmonic_curve("A", Symmetry::Ungerade, mu, w, re + delta * sigma, 0.05, 6.0));
    s.dipoles.push_back(DipoleFunction::constant("X", "A", 1.0));
    Molecule m(s);
    const auto t = transition_moment(m, m.select("A", 0, 0), m.select("X", 0, 0));
    const double exact = std::exp(-0.5 * delta * delta);
    worst = std::max(worst, std::abs(t.fcf - exact) / exact);
  }
  report(3, worst < 1e-6, fmt("displaced harmonic fcf max rel err %.2e over delta in [0,3] (tol 1e-6)", worst));
}

void two_level() {
  // polarizability: d^2/(eps0 c) dE/(dE^2 - (h nu)^2) in SI
  Molecule m(toys::morse_pair(0.8, 0, toys::single_level_morse(12000.0)));
  const auto i = m.select("X", 0, 3);
  const auto f = m.select("A", 1, 0);
  const double d = std::sqrt(1.0 / 3.0) * m.reduced_dipole(f, i) * K::e_charge * K::a0;
  const double de = f.energy - i.energy, nu_res = hartree_to_cm1(de);
  PolarizabilityOptions po;
  po.include_continuum = false;
  po.natural_widths = false;
  PolarizabilityModel model(m, i, po);
  double worst_a = 0.0;
  for (double nu : {0.0, 100.0, 5000.0, nu_res - 500.0, nu_res - 3.0, nu_res - 0.1, nu_res + 0.1,
                    nu_res + 7.0, nu_res + 2000.0, 2.5 * nu_res}) {
    const double dej = de * K::hartree_joule, e = nu * 100.0 * K::h * K::c;
    const double ref = d * d / (K::eps0 * K::c) * dej / (dej * dej - e * e) / K::h * 1e-6 * 1e4;
    worst_a = std::max(worst_a, std::abs(model(nu).real() - ref) / std::abs(ref));
  }
  // Einstein A: omega^3 d^2/(3 pi eps0 hbar c^3) into a single bound final
  double worst_e = 0.0;
  int sets = 0;
  for (double dd : {0.3, 2.0})
    for (int omega : {0, 1})
      for (int v : {0, 5, 10}) {
        if (sets == 10) break;
        auto sys = toys::morse_pair(dd, omega);
        sys.ground = toys::morse_curve("X", 0, Symmetry::Gerade, toys::single_level_morse(0.0));
        Molecule mm(sys);
        const auto fe = mm.select("A", 1, v), g = mm.select("X", 0, 0);
        DecayOptions o;
        o.include_continuum = false;
        o.final_J = {0};
        const double wv = (fe.energy - g.energy) * K::hartree_joule / K::hbar;
        const double dip = mm.reduced_dipole(fe, g) * K::e_charge * K::a0;
        const double ref = rotational_weight(0, 1, omega) * wv * wv * wv * dip * dip /
                           (3 * kPi * K::eps0 * K::hbar * K::c * K::c * K::c);
        worst_e = std::max(worst_e, std::abs(einstein_a(mm, fe, o).a_total - ref) / ref);
        ++sets;
      }
  report(4, worst_a < 1e-10 && worst_e < 1e-10,
         fmt("two-level alpha max rel err %.2e (10 freqs), Einstein A %.2e (%g sets), tol 1e-10", worst_a,
             worst_e, sets));
}

struct Sr2 {
  Sr2ModelParams params;
  MoleculeSystem sys = sr2_model(params);
  Molecule m{sys};
};

void near_threshold_width(const Sr2& s) {
  const auto lv = s.m.levels("0u+", 1);
  const auto rep = einstein_a(s.m, lv.back());
  const double w = cm1_to_hartree(s.params.p1_limit) * K::hartree_joule / K::hbar;
  // 0.151 e a0 is the reduced element of the 3P1 -> 1S0 line; 2J'+1 = 3
  const double d = 0.151 * K::e_charge * K::a0;
  const double a_atom = w * w * w * d * d / (3 * kPi * K::eps0 * K::hbar * K::c * K::c * K::c) / 3.0;
  const double atom_khz = a_atom / (2 * kPi) / 1e3;
  const double ratio = rep.linewidth_khz / (2.0 * atom_khz);
  report(5, std::abs(ratio - 1.0) < 0.10,
         fmt("least-bound 0u+ linewidth %.3f kHz vs 2 x atomic %.3f kHz (ratio %.4f, tol 10%%)",
             rep.linewidth_khz, 2.0 * atom_khz, ratio));
}

void mass_sensitivity(const Sr2& s) {
  const auto p = toys::ground_morse();
  const auto sys = ground_only(toys::morse_curve("X", 0, Symmetry::Gerade, p), toys::kLightMu);
  const auto all = mu_sensitivities(sys, "X");
  double worst = 0.0;
  for (const auto& r : all) {
    const double exact = hartree_to_cm1(toys::morse_sensitivity(p, sys.reduced_mass, r.level.v));
    // the top level sits near threshold, where the analytic value itself nears zero
    worst = std::max(worst, std::abs(r.dE_dlnmu - exact) / std::max(std::abs(exact), 1e-3));
  }
  const auto sel = select_anchor_sensor(s.sys, "X1Sigma+");
  const double best = std::abs(sel.sensor.dnu_dlnmu);
  report(6, worst < 1e-4 && std::abs(best / 270.0 - 1.0) < 0.25,
         fmt("Morse dE/dlnmu max rel err %.2e over all v (tol 1e-4); Sr2 max |dnu/dlnmu| %.1f cm-1 "
             "(270 +- 25%%)",
             worst, best) +
             " pair v=" + std::to_string(sel.sensor.a.level.v) + ",v=" + std::to_string(sel.sensor.b.level.v));
}

std::vector<MagicPoint> magic(const Sr2& s, std::vector<MagicPoint>& sr2_points,
                              std::vector<const PolarizabilityModel*>& models,
                              std::vector<PolarizabilityModel>& store) {
  // synthetic pair with a background on one level
  const double S = 40.0, B = 12.0, nu1 = 1000.0, nu2 = 1010.0;
  const AlphaFn fa = [&](double nu) { return cplx(S * nu1 / (nu1 * nu1 - nu * nu) + B, 0.0); };
  const AlphaFn fb = [&](double nu) { return cplx(S * nu2 / (nu2 * nu2 - nu * nu), 0.0); };
  const double qb = -(B * (nu1 * nu1 + nu2 * nu2) - S * (nu2 - nu1));
  const double qc = B * nu1 * nu1 * nu2 * nu2 + S * nu1 * nu2 * (nu2 - nu1);
  const double disc = std::sqrt(qb * qb - 4 * B * qc);
  const double roots[2] = {std::sqrt((-qb - disc) / (2 * B)), std::sqrt((-qb + disc) / (2 * B))};
  MagicOptions mo;
  mo.step = 0.01;
  const auto pts = find_crossings(fa, fb, {nu1, nu2}, 995.0, 1015.0, mo);
  double err = pts.size() == 2 ? 0.0 : HUGE_VAL;
  for (std::size_t k = 0; k < pts.size() && k < 2; ++k) err = std::max(err, std::abs(pts[k].nu_star - roots[k]));

  // Sr2: deep level v=27 against the third level from the top
  const auto lv = s.m.levels("X1Sigma+", 0);
  const auto a = lv[27], b = lv[lv.size() - 3];
  store.emplace_back(s.m, a);
  store.emplace_back(s.m, b);
  models = {&store[0], &store[1]};
  // window around the first 1u resonance of v=27 above 11000 cm^-1
  double center = 0.0;
  for (const auto& r : store[0].poles())
    if (r.intermediate.channel == "1u" && r.nu > 11000.0) {
      center = r.nu;
      break;
    }
  sr2_points = find_magic(store[0], store[1], center - 5.0, center + 5.0);
  int verified = 0;
  for (const auto& p : sr2_points) {
    const double dx = std::min(1e-5, 0.5 * p.nearest_pole);
    const double lo = (store[0](p.nu_star - dx) - store[1](p.nu_star - dx)).real();
    const double hi = (store[0](p.nu_star + dx) - store[1](p.nu_star + dx)).real();
    verified += lo * hi < 0.0 && std::abs(p.residual) < 1e-10 && std::isfinite(p.slope);
  }
  report(7, err < 1e-6 && center > 0.0 && verified >= 1,
         fmt("synthetic crossing err %.2e cm-1 (tol 1e-6); Sr2 1u resonance %.3f cm-1, %g crossings "
             "within 5 cm-1",
             err, center, double(sr2_points.size())) +
             ", " + std::to_string(verified) + " sign-verified");
  return pts;
}

void scattering(const std::vector<MagicPoint>& pts, const std::vector<const PolarizabilityModel*>& models) {
  if (pts.empty()) {
    report(8, false, "no model magic point");
    return;
  }
  const auto& p = pts.front();
  const double intensity = 1e4;
  const double ra = scattering_rate(p.alpha_a, intensity), rb = scattering_rate(p.alpha_b, intensity);
  const double rate = std::max(ra, rb);
  (void)models;
  report(8, rate >= 0.1 && rate <= 10.0,
         fmt("scattering rate at %.3f cm-1, 10 kW/cm^2: %.3g s^-1 (other level %.3g, window 0.1-10)", p.nu_star,
             rate, std::min(ra, rb)));
}

void budget(const Sr2& s) {
  const double nu_hz = s.params.x_depth * 100.0 * K::c;
  const auto b = precision_budget(nu_hz, 10.0, 100.0);
  const double r = b.fractional_instability_at_1s / 5e-15;
  report(9, r >= 0.5 && r <= 2.0,
         fmt("10 Hz, SNR 100, nu %.3g Hz: %.3g at 1 s (within x2 of 5e-15)", nu_hz, b.fractional_instability_at_1s));
}

void leroy_bernstein() {
  const double depth = cm1_to_hartree(400.0), rm = 7.0, r_last = 30.0;
  const double c6 = 2.0 * depth * std::pow(rm, 6), c12 = depth * std::pow(rm, 12);
  std::vector<double> r, v;
  for (double x = 0.7 * rm; x <= r_last + 1e-9; x += 0.05) {
    r.push_back(x);
    v.push_back(c12 / std::pow(x, 12) - c6 / std::pow(x, 6));
  }
  const double asym = v.back() + c6 / std::pow(r.back(), 6);
  const auto sys = ground_only(PotentialCurve::tabulated("LJ", 0, Symmetry::Gerade, r, v, asym, {{6, c6}}),
                               20.0 * K::amu_to_electron_mass);
  const auto lv = bound_levels(sys, "LJ", 0);
  const std::vector<RovibLevel> outer(lv.end() - 6, lv.end());
  const auto fit = near_dissociation_check(outer, 6);
  report(10, std::abs(fit.exponent / 3.0 - 1.0) < 0.02,
         fmt("C6 tail: fitted exponent %.4f vs 3 (tol 2%%), r^2 %.6f", fit.exponent, fit.r_squared));
}

void determinism(const Sr2& s) {
  const auto lv = s.m.levels("X1Sigma+", 0);
  auto table = [&](int threads) {
    set_threads(threads);
    Molecule fresh(s.sys);
    std::vector<PolarizabilityModel> ms;
    ms.emplace_back(fresh, lv[27]);
    ms.emplace_back(fresh, lv[lv.size() - 3]);
    std::vector<PolarizabilitySpectrum> sp{scan(ms[0], 11000.0, 11004.0), scan(ms[1], 11000.0, 11004.0)};
    const auto csv = spectrum_csv(sp, {"a", "b"}, {&ms[0], &ms[1]}).str() +
                     levels_csv(fresh.levels("0u+", 1), fresh.system().curve("0u+").asymptote(), true).str();
    set_threads(0);
    return csv;
  };
  RunManifest m1, m2;
  m1.args = m2.args = {"polar", "--window", "11000:11004"};
  m1.input_digest = m2.input_digest = sha256_hex(sr2_model_config(s.params));
  m1.timestamp = utc_timestamp();
  m2.timestamp = "2000-01-01T00:00:00Z";
  const std::string one = table(1), four = table(4);
  report(11, m1.same_run(m2) && one == four && !one.empty(),
         fmt("threads 1 vs 4: %g vs %g bytes, ", double(one.size()), double(four.size())) +
             (one == four ? "bit-identical" : "DIFFERENT"));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  run(1, morse_spectrum);
  run(2, wigner_suite);
  run(3, harmonic_fcf);
  run(4, two_level);
  const Sr2 sr2;
  run(5, [&] { near_threshold_width(sr2); });
  run(6, [&] { mass_sensitivity(sr2); });
  std::vector<MagicPoint> sr2_points;
  std::vector<const PolarizabilityModel*> models;
  std::vector<PolarizabilityModel> store;
  store.reserve(2);
  run(7, [&] { magic(sr2, sr2_points, models, store); });
  run(8, [&] { scattering(sr2_points, models); });
  run(9, [&] { budget(sr2); });
  run(10, leroy_bernstein);
  run(11, [&] { determinism(sr2); });
  std::printf("%d of 11 criteria failed (%.0f s)\n", failures,
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return failures ? 1 : 0;
}
