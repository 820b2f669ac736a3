#include "rovib/response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rovib/angular.hpp"
#include "rovib/decay.hpp"
#include "rovib/errors.hpp"
#include "rovib/parallel.hpp"
#include "rovib/transitions.hpp"
#include "rovib/units.hpp"

namespace rovib {

PolarizabilityModel::PolarizabilityModel(const Molecule& m, const RovibLevel& level,
                                         const PolarizabilityOptions& opts) {
  const std::string& ground = m.system().ground.label();
  if (level.channel != ground)
    throw InvalidParameter("polarizability is defined for ground-channel levels, got " + level.channel);
  level_ = m.state(level).level;
  const int J = level_.J;
  if (std::abs(opts.M) > J || std::abs(opts.eps) > 1)
    throw InvalidQuantumNumbers("polarizability needs |M| <= J and eps in {-1, 0, 1}");

  std::vector<const PotentialCurve*> chans;
  if (opts.channels.empty()) {
    chans = m.coupled_channels();
  } else {
    for (const auto& name : opts.channels) chans.push_back(&m.system().curve(name));
  }

  struct Pending {
    RovibLevel f;
    double weight;
  };
  std::vector<Pending> pending;
  for (const auto* c : chans) {
    const int om = c->omega();
    for (int Jp = std::max({0, J - 1, om}); Jp <= J + 1; ++Jp) {
      const int Mp = opts.M + opts.eps;
      if (std::abs(Mp) > Jp) continue;
      const double af = angular_factor(J, opts.M, Jp, Mp, om, opts.eps);
      const double w = af * af;
      if (!(w > 1e-15)) continue;
      for (const auto& f : m.levels(c->label(), Jp)) pending.push_back({f, w});
      if (opts.include_continuum) {
        const ContinuumTable& t = m.continuum(c->label(), Jp, ground, J, opts.continuum_eps_max);
        continuum_.push_back({&t, std::size_t(level_.v), w, t.asymptote - level_.energy});
      }
    }
  }

  bound_.resize(pending.size());
  parallel_for(pending.size(), [&](std::size_t i) {
    const auto& p = pending[i];
    const double d = m.reduced_dipole(p.f, level_);
    double a = 0.0;
    if (opts.width)
      a = opts.width(p.f);
    else if (opts.natural_widths)
      a = natural_width(m, p.f);
    const double gamma = a * K::atomic_time;
    bound_[i] = {p.weight * d * d, {p.f.energy - level_.energy, -0.5 * gamma}};
  });
  for (const auto& p : pending) {
    const double de = p.f.energy - level_.energy;
    if (de > 0.0) poles_.push_back({hartree_to_cm1(de), p.f});
  }
  std::stable_sort(poles_.begin(), poles_.end(),
                   [](const Resonance& a, const Resonance& b) { return a.nu < b.nu; });
}

std::complex<double> PolarizabilityModel::operator()(double nu) const {
  if (!(nu >= 0.0)) throw InvalidParameter("laser frequency must be non-negative");
  const double e = cm1_to_hartree(nu);
  std::complex<double> s = 0.0;
  for (const auto& t : bound_) {
    if (t.de.imag() == 0.0 && std::abs(t.de.real() - e) <= 1e-10 * std::abs(t.de.real()))
      throw OnResonance("laser frequency " + std::to_string(nu) +
                        " cm^-1 sits on a zero-width resonance");
    s += t.strength * t.de / (t.de * t.de - e * e);
  }
  for (const auto& c : continuum_) {
    const ContinuumTable& tb = *c.table;
    if (tb.eps.empty()) continue;
    // T = (1/(dE - E) + 1/(dE + E)) / 2 with dE = offset + eps.
    const double star = e - c.offset;
    const bool inside = star > tb.eps_lo && star < tb.eps_hi;
    const double gs = inside ? tb.interpolate(c.partner, star) : 0.0;
    double re = 0.0;
    for (std::size_t k = 0; k < tb.eps.size(); ++k) {
      const double g = tb.g[k][c.partner];
      const double wk = tb.weight[k];
      re += wk * g / (c.offset + tb.eps[k] + e);
      const double x = tb.eps[k] - star;
      if (!inside)
        re += wk * g / x;
      else if (x != 0.0)
        re += wk * (g - gs) / x;
    }
    double im = 0.0;
    if (inside) {
      re += gs * std::log((tb.eps_hi - star) / (star - tb.eps_lo));
      im = std::numbers::pi * gs;
    }
    s += c.weight * 0.5 * std::complex<double>(re, im);
  }
  return {polarizability_sum_to_mhz(s.real()), polarizability_sum_to_mhz(s.imag())};
}

std::vector<Resonance> PolarizabilityModel::resonances(double nu_lo, double nu_hi) const {
  std::vector<Resonance> out;
  for (const auto& p : poles_)
    if (p.nu >= nu_lo && p.nu < nu_hi) out.push_back(p);
  return out;
}

double PolarizabilityModel::nearest_pole(double nu, const Resonance** which) const {
  double best = std::numeric_limits<double>::infinity();
  auto it = std::lower_bound(poles_.begin(), poles_.end(), nu,
                             [](const Resonance& r, double x) { return r.nu < x; });
  for (auto j : {it, it == poles_.begin() ? it : std::prev(it)}) {
    if (j == poles_.end()) continue;
    const double d = std::abs(j->nu - nu);
    if (d < best) {
      best = d;
      if (which) *which = &*j;
    }
  }
  return best;
}

std::complex<double> polarizability(const Molecule& m, const RovibLevel& level, double nu,
                                    const PolarizabilityOptions& opts) {
  return PolarizabilityModel(m, level, opts)(nu);
}

PolarizabilitySpectrum scan(const PolarizabilityModel& model, double nu_min, double nu_max,
                            double step) {
  if (!(step > 0.0)) throw InvalidParameter("scan step must be positive");
  if (nu_max < nu_min) throw InvalidParameter("scan window must satisfy nu_min <= nu_max");
  PolarizabilitySpectrum sp;
  sp.level = model.level();
  for (std::size_t k = 0;; ++k) {
    const double nu = nu_min + double(k) * step;
    if (!(nu < nu_max - 1e-9 * step)) break;
    sp.nu.push_back(nu);
  }
  sp.alpha.resize(sp.nu.size());
  parallel_for(sp.nu.size(), [&](std::size_t k) {
    try {
      sp.alpha[k] = model(sp.nu[k]);
    } catch (const OnResonance&) {
      sp.alpha[k] = {std::nan(""), std::nan("")};
    }
  });
  sp.resonances = model.resonances(nu_min, nu_max);
  for (std::size_t k = 0; k + 1 < sp.nu.size(); ++k) {
    const double a = sp.alpha[k].real(), b = sp.alpha[k + 1].real();
    if (!(a * b < 0.0)) continue;
    const bool pole = !model.resonances(sp.nu[k], sp.nu[k + 1] + 1e-12).empty();
    if (!pole) sp.zero_crossings.push_back(k);
  }
  return sp;
}

PolarizabilitySpectrum scan(const Molecule& m, const RovibLevel& level, double nu_min,
                            double nu_max, double step, const PolarizabilityOptions& opts) {
  return scan(PolarizabilityModel(m, level, opts), nu_min, nu_max, step);
}

std::vector<LevelPolarizability> polarizability_vs_v(const Molecule& m, double nu, int J,
                                                     const PolarizabilityOptions& opts) {
  const auto levels = m.levels(m.system().ground.label(), J);
  std::vector<LevelPolarizability> out(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i)
    out[i] = {levels[i], PolarizabilityModel(m, levels[i], opts)(nu)};
  return out;
}

std::complex<double> stark_shift(std::complex<double> alpha, double intensity) {
  if (!(intensity >= 0.0)) throw InvalidParameter("intensity must be non-negative");
  return -alpha * intensity;
}

double scattering_rate(std::complex<double> alpha, double intensity) {
  if (!(intensity >= 0.0)) throw InvalidParameter("intensity must be non-negative");
  // Im alpha is an energy per intensity expressed in MHz.
  return 2.0 * 2.0 * std::numbers::pi * 1e6 * alpha.imag() * intensity;
}

double scattering_rate(const Molecule& m, const RovibLevel& level, double nu, double intensity,
                       const PolarizabilityOptions& opts) {
  return scattering_rate(polarizability(m, level, nu, opts), intensity);
}

}  // namespace rovib
