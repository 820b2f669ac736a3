#include "rovib/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rovib/errors.hpp"
#include "rovib/parallel.hpp"
#include "rovib/radial.hpp"
#include "rovib/units.hpp"

namespace rovib {

namespace {

SolverOptions frozen_grid(const MoleculeSystem& sys, const std::string& channel, int J,
                          SolverOptions o) {
  if (!o.step) o.step = channel_step(sys, channel, o);
  if (!o.r_min) o.r_min = inner_grid_edge(sys, channel, J, o);
  return o;
}

void check_step(double rel_step) {
  if (!(rel_step >= 1e-8 && rel_step <= 1e-3))
    throw InvalidParameter("rel_step must lie in [1e-8, 1e-3]");
}

SensitivityReport combine(const RovibLevel& base, const RovibLevel* plus, const RovibLevel* minus,
                          double h) {
  SensitivityReport r;
  r.level = base;
  r.rel_step = h;
  double de = 0.0;
  if (plus && minus) {
    de = (plus->energy - minus->energy) / (std::log1p(h) - std::log1p(-h));
  } else if (plus) {
    de = (plus->energy - base.energy) / std::log1p(h);
    r.level_lost = true;
  } else if (minus) {
    de = (base.energy - minus->energy) / -std::log1p(-h);
    r.level_lost = true;
  } else {
    throw ConvergenceError("level " + base.channel + " v=" + std::to_string(base.v) +
                           " unbinds at both perturbed masses");
  }
  r.dE_dlnmu = hartree_to_cm1(de);
  return r;
}

}  // namespace

SensitivityReport mu_sensitivity(const MoleculeSystem& sys, const RovibLevel& level,
                                 double rel_step, const SolverOptions& opts) {
  check_step(rel_step);
  const SolverOptions o = frozen_grid(sys, level.channel, level.J, opts);
  const auto base = solve_level(sys, level.channel, level.J, level.v, o);
  if (!base)
    throw InvalidQuantumNumbers("no bound level v=" + std::to_string(level.v) + " in " + level.channel);
  std::optional<BoundState> shifted[2];
  const double mu = sys.reduced_mass;
  parallel_for(2, [&](std::size_t i) {
    const double f = i == 0 ? 1.0 + rel_step : 1.0 - rel_step;
    shifted[i] = solve_level(sys.with_reduced_mass(mu * f), level.channel, level.J, level.v, o);
  });
  return combine(base->level, shifted[0] ? &shifted[0]->level : nullptr,
                 shifted[1] ? &shifted[1]->level : nullptr, rel_step);
}

std::vector<SensitivityReport> mu_sensitivities(const MoleculeSystem& sys,
                                                const std::string& channel, int J,
                                                double rel_step, const SolverOptions& opts) {
  check_step(rel_step);
  const SolverOptions o = frozen_grid(sys, channel, J, opts);
  const double mu = sys.reduced_mass;
  std::vector<RovibLevel> sets[3];
  parallel_for(3, [&](std::size_t i) {
    const double f = i == 0 ? 1.0 : i == 1 ? 1.0 + rel_step : 1.0 - rel_step;
    sets[i] = bound_levels(i == 0 ? sys : sys.with_reduced_mass(mu * f), channel, J, o);
  });
  std::vector<SensitivityReport> out;
  for (const auto& b : sets[0]) {
    const auto v = std::size_t(b.v);
    out.push_back(combine(b, v < sets[1].size() ? &sets[1][v] : nullptr,
                          v < sets[2].size() ? &sets[2][v] : nullptr, rel_step));
  }
  return out;
}

IntervalSensitivity interval_sensitivity(const SensitivityReport& a, const SensitivityReport& b) {
  if (a.level.channel != b.level.channel)
    throw InvalidParameter("interval levels must belong to the same channel");
  const double nu = std::abs(hartree_to_cm1(b.level.energy - a.level.energy));
  if ((a.level.v == b.level.v && a.level.J == b.level.J) || nu == 0.0)
    throw DegeneratePair("interval between identical levels");
  IntervalSensitivity r;
  r.a = a;
  r.b = b;
  r.nu = nu;
  r.dnu_dlnmu = b.dE_dlnmu - a.dE_dlnmu;
  r.kappa = r.dnu_dlnmu != 0.0 ? nu / r.dnu_dlnmu : std::numeric_limits<double>::infinity();
  return r;
}

IntervalSensitivity interval_sensitivity(const MoleculeSystem& sys, const RovibLevel& a,
                                         const RovibLevel& b, double rel_step,
                                         const SolverOptions& opts) {
  if (a.channel != b.channel) throw InvalidParameter("interval levels must belong to the same channel");
  if (a.v == b.v && a.J == b.J) throw DegeneratePair("interval between identical levels");
  return interval_sensitivity(mu_sensitivity(sys, a, rel_step, opts),
                              mu_sensitivity(sys, b, rel_step, opts));
}

AnchorSensor select_anchor_sensor(const std::vector<SensitivityReport>& reports) {
  if (reports.size() < 3) throw InsufficientLevels("anchor/sensor selection needs at least 3 levels");
  std::vector<const SensitivityReport*> by_v;
  for (const auto& r : reports) by_v.push_back(&r);
  std::stable_sort(by_v.begin(), by_v.end(),
                   [](auto* x, auto* y) { return x->level.v < y->level.v; });
  AnchorSensor out;
  const SensitivityReport* anchor = by_v.front();
  for (const auto* r : by_v)
    if (std::abs(r->dE_dlnmu) < std::abs(anchor->dE_dlnmu)) anchor = r;
  out.anchor = *anchor;
  double best = -1.0;
  for (std::size_t i = 0; i < by_v.size(); ++i)
    for (std::size_t j = i + 1; j < by_v.size(); ++j) {
      const double d = std::abs(by_v[j]->dE_dlnmu - by_v[i]->dE_dlnmu);
      if (d > best && by_v[i]->level.energy != by_v[j]->level.energy) {
        best = d;
        out.sensor = interval_sensitivity(*by_v[i], *by_v[j]);
      }
    }
  return out;
}

AnchorSensor select_anchor_sensor(const MoleculeSystem& sys, const std::string& channel, int J,
                                  double rel_step, const SolverOptions& opts) {
  return select_anchor_sensor(mu_sensitivities(sys, channel, J, rel_step, opts));
}

double ratio_sensitivity(double nu1, double s1, double nu2, double s2) {
  const double sum = nu1 + nu2;
  if (sum == 0.0) throw DegeneratePair("intervals sum to zero");
  return (s1 - s2) / sum - (nu1 - nu2) * (s1 + s2) / (sum * sum);
}

std::vector<MagicPoint> find_crossings(const AlphaFn& fa, const AlphaFn& fb,
                                       std::vector<double> poles, double lo, double hi,
                                       const MagicOptions& opts) {
  if (!(opts.step > 0.0) || !(opts.exclusion >= 0.0) || !(opts.tol_nu > 0.0))
    throw InvalidParameter("magic search needs positive step and tolerance");
  if (!(hi > lo)) throw InvalidParameter("magic window must satisfy lo < hi");
  std::sort(poles.begin(), poles.end());
  auto nearest = [&](double x) {
    double d = std::numeric_limits<double>::infinity();
    auto it = std::lower_bound(poles.begin(), poles.end(), x);
    if (it != poles.end()) d = std::min(d, *it - x);
    if (it != poles.begin()) d = std::min(d, x - *std::prev(it));
    return d;
  };
  auto pole_between = [&](double x0, double x1) {
    auto it = std::lower_bound(poles.begin(), poles.end(), x0);
    return it != poles.end() && *it <= x1;
  };
  auto diff = [&](double x) { return (fa(x) - fb(x)).real(); };

  std::vector<double> xs;
  for (std::size_t k = 0;; ++k) {
    const double x = lo + double(k) * opts.step;
    if (x > hi + 1e-9 * opts.step) break;
    xs.push_back(x);
  }
  std::vector<char> keep(xs.size());
  std::size_t kept = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    keep[k] = nearest(xs[k]) > opts.exclusion;
    kept += keep[k];
  }
  if (kept == 0) throw AllPoles("every sample of the window lies within the pole exclusion radius");
  std::vector<double> ys(xs.size(), 0.0);
  parallel_for(xs.size(), [&](std::size_t k) {
    if (keep[k]) ys[k] = diff(xs[k]);
  });

  std::vector<MagicPoint> out;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    if (!keep[k] || !keep[k + 1] || pole_between(xs[k], xs[k + 1])) continue;
    double x0 = xs[k], x1 = xs[k + 1], y0 = ys[k];
    if (y0 != 0.0 && !(y0 * ys[k + 1] < 0.0)) continue;
    if (y0 == 0.0) x1 = x0;
    double xm = 0.5 * (x0 + x1), ym = y0 == 0.0 ? 0.0 : diff(xm);
    for (int it = 0; it < 200 && y0 != 0.0; ++it) {
      if (x1 - x0 < opts.tol_nu && std::abs(ym) < opts.tol_alpha) break;
      if (x1 - x0 < 1e-14 * std::abs(xm)) break;
      if ((ym < 0.0) == (y0 < 0.0)) {
        x0 = xm;
        y0 = ym;
      } else {
        x1 = xm;
      }
      xm = 0.5 * (x0 + x1);
      ym = diff(xm);
      if (ym == 0.0) break;
    }
    MagicPoint p;
    p.nu_star = xm;
    p.residual = ym;
    p.alpha_a = fa(xm);
    p.alpha_b = fb(xm);
    const double dx = std::min(1e-4, 0.25 * nearest(xm));
    p.slope = (diff(xm + dx) - diff(xm - dx)) / (2.0 * dx);
    p.nearest_pole = nearest(xm);
    out.push_back(p);
  }
  return out;
}

std::vector<MagicPoint> find_magic(const PolarizabilityModel& a, const PolarizabilityModel& b,
                                   double lo, double hi, const MagicOptions& opts) {
  const RovibLevel& la = a.level();
  const RovibLevel& lb = b.level();
  if (la.channel == lb.channel && la.v == lb.v && la.J == lb.J)
    throw DegeneratePair("magic search between a level and itself");
  std::vector<double> poles;
  for (const auto* mdl : {&a, &b})
    for (const auto& r : mdl->poles()) poles.push_back(r.nu);
  auto pts = find_crossings([&](double x) { return a(x); }, [&](double x) { return b(x); },
                            std::move(poles), lo, hi, opts);
  for (auto& p : pts) {
    p.a = la;
    p.b = lb;
  }
  return pts;
}

std::vector<MagicPoint> find_magic(const Molecule& m, const RovibLevel& a, const RovibLevel& b,
                                   double lo, double hi, const MagicOptions& opts,
                                   const PolarizabilityOptions& popts) {
  if (a.channel == b.channel && a.v == b.v && a.J == b.J)
    throw DegeneratePair("magic search between a level and itself");
  return find_magic(PolarizabilityModel(m, a, popts), PolarizabilityModel(m, b, popts), lo, hi, opts);
}

double PrecisionBudget::at(double tau) const {
  if (!(tau > 0.0)) throw InvalidParameter("averaging time must be positive");
  return fractional_instability_at_1s / std::sqrt(tau);
}

PrecisionBudget precision_budget(double transition_nu, double linewidth, double snr) {
  if (!(transition_nu > 0.0) || !(linewidth > 0.0) || !(snr > 0.0))
    throw InvalidParameter("precision budget inputs must be positive");
  return {linewidth, snr, transition_nu, linewidth / (snr * transition_nu)};
}

}  // namespace rovib
