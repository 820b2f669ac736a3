#include "rovib/decay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "rovib/angular.hpp"
#include "rovib/parallel.hpp"
#include "rovib/transitions.hpp"
#include "rovib/units.hpp"

namespace rovib {

namespace {

std::string fmt_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

}  // namespace

DecayReport einstein_a(const Molecule& m, const RovibLevel& excited, const DecayOptions& opts) {
  DecayReport rep;
  rep.level = m.state(excited).level;
  const PotentialCurve& curve = m.system().curve(rep.level.channel);
  const PotentialCurve& ground = m.system().ground;
  const int Jp = rep.level.J;
  const int omega = curve.omega();
  const double c3 = std::pow(K::c_atomic, 3);
  const double pref = 4.0 / (3.0 * c3) / K::atomic_time;  // au -> s^-1
  m.dipole(rep.level.channel, ground.label());  // throws MissingDipole

  for (int J = std::max(0, Jp - 1); J <= Jp + 1; ++J) {
    if (!opts.final_J.empty() && std::find(opts.final_J.begin(), opts.final_J.end(), J) == opts.final_J.end())
      continue;
    const double w = rotational_weight(J, Jp, omega);
    if (!(w > 1e-14)) continue;
    for (const auto& g : m.states(ground.label(), J)) {
      const double de = rep.level.energy - g.level.energy;
      if (!(de > 0.0)) continue;
      const double dip = m.reduced_dipole(rep.level, g.level);
      DecayPartial p;
      p.label = level_label(g.level);
      p.final = g.level;
      p.J = J;
      p.omega = de / K::atomic_time;
      p.rate = pref * w * de * de * de * dip * dip;
      rep.per_transition.push_back(p);
    }
    const double top = rep.level.energy - ground.asymptote();
    if (!opts.include_continuum || !(top > m.continuum_options().eps_min)) continue;
    // One table per (ground J, excited channel, J') reaching the highest partner.
    double eps_max = 0.0;
    for (const auto& s : m.states(rep.level.channel, Jp))
      eps_max = std::max(eps_max, s.level.energy - ground.asymptote());
    const ContinuumTable& t = m.continuum(ground.label(), J, rep.level.channel, Jp, eps_max);
    const std::size_t p = std::size_t(rep.level.v);
    std::map<int, DecayPartial> bins;
    const double per = opts.bins_per_decade > 0 ? opts.bins_per_decade : 1;
    for (std::size_t k = 0; k < t.eps.size(); ++k) {
      const double de = top - t.eps[k];
      if (!(de > 0.0)) continue;
      const double r = pref * w * t.weight[k] * t.g[k][p] * de * de * de;
      const double e_cm = hartree_to_cm1(t.eps[k]);
      const int b = int(std::floor(std::log10(e_cm) * per));
      auto [it, fresh] = bins.try_emplace(b);
      DecayPartial& bin = it->second;
      if (fresh) {
        bin.continuum = true;
        bin.J = J;
        bin.eps_lo = std::pow(10.0, b / per);
        bin.eps_hi = std::pow(10.0, (b + 1) / per);
        bin.label = "continuum J=" + std::to_string(J) + " [" + fmt_g(bin.eps_lo) + "," +
                    fmt_g(bin.eps_hi) + ") cm-1";
        const double mid = cm1_to_hartree(std::sqrt(bin.eps_lo * bin.eps_hi));
        bin.omega = std::max(0.0, top - mid) / K::atomic_time;
      }
      bin.rate += r;
    }
    for (auto& [b, bin] : bins) rep.per_transition.push_back(bin);
  }

  for (const auto& p : rep.per_transition) (p.continuum ? rep.continuum_rate : rep.bound_rate) += p.rate;
  rep.a_total = 0.0;
  for (const auto& p : rep.per_transition) rep.a_total += p.rate;
  rep.no_decay_channels = rep.per_transition.empty();
  rep.linewidth_khz = rep.a_total / (2.0 * std::numbers::pi) / 1e3;
  rep.bound_bound_fraction = bound_bound_fraction(rep);
  return rep;
}

double bound_bound_fraction(const DecayReport& report) {
  if (!(report.a_total > 0.0)) return 1.0;
  return std::clamp(report.bound_rate / report.a_total, 0.0, 1.0);
}

std::vector<DecayReport> linewidth_map(const Molecule& m, const std::string& channel, int Jp,
                                       const DecayOptions& opts) {
  const auto levels = m.levels(channel, Jp);
  std::vector<DecayReport> out(levels.size());
  parallel_for(levels.size(), [&](std::size_t i) { out[i] = einstein_a(m, levels[i], opts); });
  return out;
}

double natural_width(const Molecule& m, const RovibLevel& excited) {
  return m.memo("A", excited, [&] { return einstein_a(m, excited).a_total; });
}

}  // namespace rovib
