#include "rovib/transitions.hpp"

#include <algorithm>
#include <cmath>

#include "rovib/errors.hpp"
#include "rovib/parallel.hpp"
#include "rovib/quadrature.hpp"
#include "rovib/units.hpp"

namespace rovib {

std::string level_label(const RovibLevel& level) {
  return level.channel + " v=" + std::to_string(level.v) + " J=" + std::to_string(level.J);
}

double reduced_dipole(const Molecule& m, const RovibLevel& excited, const RovibLevel& ground) {
  return m.reduced_dipole(excited, ground);
}

TransitionMoment transition_moment(const Molecule& m, const RovibLevel& excited,
                                   const RovibLevel& ground) {
  TransitionMoment t;
  t.bra = m.state(excited).level;
  t.ket = m.state(ground).level;
  t.reduced_dipole = m.reduced_dipole(excited, ground);
  const double s = overlap(m.state(excited).wave, m.state(ground).wave);
  t.fcf = std::clamp(s * s, 0.0, 1.0);
  return t;
}

namespace {

template <class F>
LevelMatrix fill(const Molecule& m, const std::string& a, const std::string& b, int Ja, int Jb,
                 F&& cell) {
  LevelMatrix out;
  out.rows = m.levels(a, Ja);
  out.cols = m.levels(b, Jb);
  out.values.assign(out.rows.size(), std::vector<double>(out.cols.size(), 0.0));
  const std::size_t nc = out.cols.size();
  parallel_for(out.rows.size() * nc, [&](std::size_t k) {
    const std::size_t i = k / nc, j = k % nc;
    out.values[i][j] = cell(m.state(out.rows[i]), m.state(out.cols[j]));
  });
  return out;
}

}  // namespace

LevelMatrix fcf_matrix(const Molecule& m, const std::string& excited_channel,
                       const std::string& ground_channel, int Jp, int J) {
  auto out = fill(m, excited_channel, ground_channel, Jp, J,
                  [](const BoundState& e, const BoundState& g) {
                    const double s = overlap(e.wave, g.wave);
                    return std::min(1.0, s * s);
                  });
  out.quantity = "fcf";
  return out;
}

LevelMatrix dipole_matrix(const Molecule& m, const std::string& excited_channel,
                          const std::string& ground_channel, int Jp, int J) {
  const DipoleFunction& d = m.dipole(excited_channel, ground_channel);
  auto out = fill(m, excited_channel, ground_channel, Jp, J,
                  [&](const BoundState& e, const BoundState& g) {
                    const double s = overlap(e.wave, g.wave, d);
                    return s * s;
                  });
  out.quantity = "d2_ea0^2";
  return out;
}

RamanPathway raman_product(const Molecule& m, const RovibLevel& initial, const RovibLevel& final,
                           const RovibLevel& intermediate) {
  if (initial.J != 0 || final.J != 0)
    throw SelectionRuleViolation("Raman initial and final levels must have J=0");
  if (intermediate.J != 1)
    throw SelectionRuleViolation("Raman intermediate level must have J'=1");
  RamanPathway p;
  p.initial = m.state(initial).level;
  p.final = m.state(final).level;
  p.intermediate = m.state(intermediate).level;
  p.d_initial = m.reduced_dipole(p.intermediate, p.initial);
  p.d_final = m.reduced_dipole(p.intermediate, p.final);
  p.product = p.d_initial * p.d_final;
  p.detuning_initial = hartree_to_cm1(p.intermediate.energy - p.initial.energy);
  p.detuning_final = hartree_to_cm1(p.intermediate.energy - p.final.energy);
  return p;
}

void sort_pathways(std::vector<RamanPathway>& paths) {
  std::stable_sort(paths.begin(), paths.end(), [](const RamanPathway& a, const RamanPathway& b) {
    const double pa = std::abs(a.product), pb = std::abs(b.product);
    if (pa != pb) return pa > pb;
    return a.intermediate.binding_energy < b.intermediate.binding_energy;
  });
}

std::vector<RamanPathway> rank_intermediates(const Molecule& m, const RovibLevel& initial,
                                             const RovibLevel& final,
                                             const std::vector<std::string>& channels) {
  std::vector<std::string> names = channels;
  if (names.empty())
    for (const auto* c : m.coupled_channels()) names.push_back(c->label());
  std::vector<RovibLevel> mids;
  for (const auto& name : names)
    for (const auto& l : m.levels(name, 1)) mids.push_back(l);
  std::vector<RamanPathway> out(mids.size());
  parallel_for(mids.size(), [&](std::size_t i) { out[i] = raman_product(m, initial, final, mids[i]); });
  sort_pathways(out);
  return out;
}

}  // namespace rovib
