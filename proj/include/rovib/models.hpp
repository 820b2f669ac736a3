#pragma once

#include <string>

#include "rovib/potential.hpp"

namespace rovib {

/// Parameters of the illustrative Sr2-like model. The curves are Morse wells
/// joined smoothly to dispersion tails; none of the values come from ab initio
/// data. Energies in cm^-1, lengths in a0, dipoles in e a0, C_n in atomic units.
struct Sr2ModelParams {
  double mass_amu = kSr88ReducedMassAmu;

  // X 1Sigma+ (ground), depth 30 THz.
  double x_depth = 1000.69, x_a = 0.544, x_re = 8.83;
  double x_c6 = 3103.0, x_c8 = 3.8e5;

  // 1S0 + 3P1 limit.
  double p1_limit = 14504.35;
  double d_atom_3p1 = 0.151 / 1.7320508075688772;  // molecular-frame component of the 3P1 line
  double zero_u_depth = 2800.0, zero_u_a = 0.45, zero_u_re = 8.0, zero_u_c3 = 0.0152;
  double one_u_depth = 3800.0, one_u_a = 0.45, one_u_re = 7.6, one_u_c3 = 0.0076;
  double zero_u_d_short = 1.2, one_u_d_short = 0.12;

  // 1S0 + 1P1 limit, lumped far-detuned channels.
  double singlet_limit = 21698.45;
  double singlet_d = 4.28;
  double b_depth = 3000.0, b_a = 0.6, b_re = 7.5;
  double c_depth = 2500.0, c_a = 0.6, c_re = 7.3;
  bool include_singlets = true;
};

MoleculeSystem sr2_model(const Sr2ModelParams& p = {});

/// The same model in the structured-text configuration format.
std::string sr2_model_config(const Sr2ModelParams& p = {});

}  // namespace rovib
