#pragma once

#include <string>
#include <vector>

#include "rovib/molecule.hpp"

namespace rovib {

struct TransitionMoment {
  RovibLevel bra;  // excited
  RovibLevel ket;  // ground
  double reduced_dipole = 0.0;  // e a0
  double fcf = 0.0;
};

struct RamanPathway {
  RovibLevel initial;
  RovibLevel final;
  RovibLevel intermediate;
  double d_initial = 0.0;  // <intermediate|d|initial>, e a0
  double d_final = 0.0;
  double product = 0.0;    // (e a0)^2
  double detuning_initial = 0.0;  // E_int - E_initial, cm^-1
  double detuning_final = 0.0;
};

/// Rows follow the first channel's levels, columns the second's.
struct LevelMatrix {
  std::vector<RovibLevel> rows;
  std::vector<RovibLevel> cols;
  std::vector<std::vector<double>> values;
  std::string quantity;  // column header hint, e.g. "fcf" or "d2_ea0^2"
};

/// "0u+ v=3 J=1"
std::string level_label(const RovibLevel& level);

double reduced_dipole(const Molecule& m, const RovibLevel& excited, const RovibLevel& ground);
TransitionMoment transition_moment(const Molecule& m, const RovibLevel& excited,
                                   const RovibLevel& ground);

/// |<v'J'|vJ>|^2 over all bound levels of both channels.
LevelMatrix fcf_matrix(const Molecule& m, const std::string& excited_channel,
                       const std::string& ground_channel, int Jp, int J);

/// |<v'J'|d|vJ>|^2 in (e a0)^2.
LevelMatrix dipole_matrix(const Molecule& m, const std::string& excited_channel,
                          const std::string& ground_channel, int Jp, int J);

/// Throws SelectionRuleViolation unless initial and final have J = 0 and the
/// intermediate has J' = 1.
RamanPathway raman_product(const Molecule& m, const RovibLevel& initial, const RovibLevel& final,
                           const RovibLevel& intermediate);

/// Every J' = 1 level of `channels` (all coupled channels when empty), sorted
/// by descending |product|, ties by smaller binding energy.
std::vector<RamanPathway> rank_intermediates(const Molecule& m, const RovibLevel& initial,
                                             const RovibLevel& final,
                                             const std::vector<std::string>& channels = {});

/// Orders pathways as rank_intermediates does.
void sort_pathways(std::vector<RamanPathway>& paths);

}  // namespace rovib
