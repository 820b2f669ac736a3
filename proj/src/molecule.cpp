#include "rovib/molecule.hpp"

#include <algorithm>
#include <cmath>

#include "rovib/continuum.hpp"
#include "rovib/errors.hpp"
#include "rovib/quadrature.hpp"

namespace rovib {

double ContinuumTable::interpolate(std::size_t partner, double e) const {
  if (eps.empty() || e < eps.front() || e > eps.back()) return 0.0;
  return std::max(0.0, splines.at(partner)(std::log(e)));
}

Molecule::Molecule(MoleculeSystem system, SolverOptions opts, ContinuumOptions copts)
    : system_(std::move(system)), opts_(opts), copts_(copts) {
  system_.validate();
}

const std::vector<BoundState>& Molecule::states(const std::string& channel, int J) const {
  Slot<std::vector<BoundState>>* slot;
  {
    std::lock_guard lock(mu_);
    auto& p = states_[{channel, J}];
    if (!p) p = std::make_unique<Slot<std::vector<BoundState>>>();
    slot = p.get();
  }
  std::call_once(slot->once, [&] { slot->value = bound_states(system_, channel, J, opts_); });
  return slot->value;
}

std::vector<RovibLevel> Molecule::levels(const std::string& channel, int J) const {
  std::vector<RovibLevel> out;
  for (const auto& s : states(channel, J)) out.push_back(s.level);
  return out;
}

const BoundState& Molecule::state(const std::string& channel, int J, int v) const {
  const auto& all = states(channel, J);
  if (v < 0 || v >= int(all.size()))
    throw InvalidQuantumNumbers("no bound level v=" + std::to_string(v) + " in " + channel +
                                " J=" + std::to_string(J) + " (" + std::to_string(all.size()) +
                                " bound)");
  return all[std::size_t(v)];
}

const BoundState& Molecule::state(const RovibLevel& level) const {
  return state(level.channel, level.J, level.v);
}

RovibLevel Molecule::select(const std::string& channel, int J, int v) const {
  const int n = int(states(channel, J).size());
  return state(channel, J, v < 0 ? n + v : v).level;
}

std::vector<const PotentialCurve*> Molecule::coupled_channels() const {
  std::vector<const PotentialCurve*> out;
  for (const auto& c : system_.excited)
    if (c.symmetry() != system_.ground.symmetry() && system_.dipole(c.label(), system_.ground.label()))
      out.push_back(&c);
  return out;
}

const DipoleFunction& Molecule::dipole(const std::string& a, const std::string& b) const {
  const auto* d = system_.dipole(a, b);
  if (!d) throw MissingDipole("no dipole function between " + a + " and " + b);
  return *d;
}

double Molecule::reduced_dipole(const RovibLevel& excited, const RovibLevel& ground) const {
  const auto& d = dipole(excited.channel, ground.channel);
  return overlap(state(excited).wave, state(ground).wave, d);
}

const ContinuumTable& Molecule::continuum(const std::string& channel, int J,
                                          const std::string& partner_channel, int partner_J,
                                          double eps_max) const {
  Slot<ContinuumTable>* slot;
  {
    std::lock_guard lock(mu_);
    auto& p = tables_[{channel, J, partner_channel, partner_J, eps_max}];
    if (!p) p = std::make_unique<Slot<ContinuumTable>>();
    slot = p.get();
  }
  std::call_once(slot->once, [&] {
    const auto& ps = states(partner_channel, partner_J);
    std::vector<const BoundState*> partners;
    for (const auto& s : ps) partners.push_back(&s);
    std::vector<const DipoleFunction*> dips(partners.size(), &dipole(channel, partner_channel));
    slot->value = build_continuum_table(system_, channel, J, partners, dips, eps_max, opts_, copts_);
  });
  return slot->value;
}

double Molecule::memo(const std::string& kind, const RovibLevel& level,
                      const std::function<double()>& compute) const {
  Slot<double>* slot;
  {
    std::lock_guard lock(mu_);
    auto& p = memo_[{kind, level.channel, level.J, level.v}];
    if (!p) p = std::make_unique<Slot<double>>();
    slot = p.get();
  }
  std::call_once(slot->once, [&] { slot->value = compute(); });
  return slot->value;
}

ContinuumTable build_continuum_table(const MoleculeSystem& system, const std::string& channel,
                                     int J, const std::vector<const BoundState*>& partners,
                                     const std::vector<const DipoleFunction*>& dipoles,
                                     double eps_max, const SolverOptions& opts,
                                     const ContinuumOptions& copts) {
  const PotentialCurve& curve = system.curve(channel);
  ContinuumTable t;
  t.channel = channel;
  t.J = J;
  t.asymptote = curve.asymptote();
  for (const auto* p : partners) t.partners.push_back(p->level);
  if (partners.empty()) return t;

  std::vector<std::vector<double>> weighted;
  double r_extent = 0.0;
  for (std::size_t i = 0; i < partners.size(); ++i) {
    weighted.push_back(weighted_samples(partners[i]->wave, *dipoles[i]));
    r_extent = std::max(r_extent, partners[i]->wave.grid.r_max());
  }

  // Integrate in u = ln(eps); the integrand carries the Jacobian eps.
  ContinuumPropagator prop(system, channel, J, partners, opts);
  auto f = [&](double u) {
    const double e = std::exp(u);
    std::vector<double> out(partners.size());
    if (prop.aligned()) {
      const auto w = prop.wave(e);
      for (std::size_t p = 0; p < partners.size(); ++p) {
        const double m = prop.overlap(w, partners[p]->wave.grid, weighted[p]);
        out[p] = m * m * e;
      }
      return out;
    }
    const auto w = continuum_wave(system, channel, t.asymptote + e, J, opts, r_extent);
    for (std::size_t p = 0; p < partners.size(); ++p) {
      const double m = grid_overlap(w.grid, w.psi, partners[p]->wave.grid, weighted[p]);
      out[p] = m * m * e;
    }
    return out;
  };

  const double depth = std::max(curve.depth(), 1e-3);
  bool automatic = !(eps_max > 0.0);
  if (!(copts.eps_max > 0.0) && automatic) eps_max = 4.0 * depth;
  if (copts.eps_max > 0.0 && automatic) eps_max = copts.eps_max;
  if (!(eps_max > copts.eps_min)) return t;

  auto edges_between = [](double a, double b) {
    std::vector<double> e{std::log(a)};
    const double step = std::log(10.0);
    while (e.back() + step < std::log(b) - 1e-9) e.push_back(e.back() + step);
    e.push_back(std::log(b));
    return e;
  };

  AdaptiveResult res = adaptive_gauss(f, edges_between(copts.eps_min, eps_max), copts.tol, copts.max_evals);
  t.converged = res.converged;
  t.evaluations = res.evaluations;
  // Automatic cutoff: extend by doublings until the added slice is negligible.
  while (automatic && eps_max < 1.0) {
    AdaptiveResult more = adaptive_gauss(f, {std::log(eps_max), std::log(2.0 * eps_max)}, copts.tol,
                                         copts.max_evals / 4);
    t.evaluations += more.evaluations;
    double rel = 0.0, mx = 0.0;
    for (double v : res.integral) mx = std::max(mx, std::abs(v));
    for (std::size_t p = 0; p < more.integral.size(); ++p)
      rel = std::max(rel, std::abs(more.integral[p]) / (std::abs(res.integral[p]) + 1e-8 * mx + 1e-300));
    res.nodes.insert(res.nodes.end(), more.nodes.begin(), more.nodes.end());
    res.values.insert(res.values.end(), more.values.begin(), more.values.end());
    for (std::size_t p = 0; p < more.integral.size(); ++p) res.integral[p] += more.integral[p];
    eps_max *= 2.0;
    if (rel < copts.tol) break;
  }

  t.eps_lo = copts.eps_min;
  t.eps_hi = eps_max;
  for (std::size_t k = 0; k < res.nodes.size(); ++k) {
    const double e = std::exp(res.nodes[k].x);
    t.eps.push_back(e);
    t.weight.push_back(res.nodes[k].w * e);
    std::vector<double> g(res.values[k]);
    for (double& x : g) x /= e;
    t.g.push_back(std::move(g));
  }
  std::vector<double> lx(t.eps.size()), ly(t.eps.size());
  for (std::size_t k = 0; k < t.eps.size(); ++k) lx[k] = std::log(t.eps[k]);
  for (std::size_t p = 0; p < partners.size(); ++p) {
    for (std::size_t k = 0; k < t.eps.size(); ++k) ly[k] = t.g[k][p];
    t.splines.emplace_back(lx, ly);
  }
  return t;
}

}  // namespace rovib
