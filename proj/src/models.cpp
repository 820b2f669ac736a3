#include "rovib/models.hpp"

#include <cmath>
#include <sstream>

#include "rovib/units.hpp"

namespace rovib {

namespace {

struct CurveSpec {
  std::string label;
  int omega;
  Symmetry sym;
  double limit_cm1, depth_cm1, a, re;
  std::vector<TailTerm> tail;
  double r_switch_in, r_switch_out;
  double r_first, r_last, dr;
};

// C2 smoothstep weight: 1 inside r1, 0 beyond r2.
double inner_weight(double r, double r1, double r2) {
  if (r <= r1) return 1.0;
  if (r >= r2) return 0.0;
  const double x = (r - r1) / (r2 - r1);
  return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

double model_value(const CurveSpec& c, double r) {
  const double de = cm1_to_hartree(c.depth_cm1);
  const double x = 1.0 - std::exp(-c.a * (r - c.re));
  const double morse = de * x * x - de;
  double lr = 0.0;
  for (const auto& t : c.tail) lr -= t.coefficient / std::pow(r, t.n);
  const double w = inner_weight(r, c.r_switch_in, c.r_switch_out);
  return cm1_to_hartree(c.limit_cm1) + w * morse + (1.0 - w) * lr;
}

std::vector<CurveSpec> curve_specs(const Sr2ModelParams& p) {
  std::vector<CurveSpec> out;
  out.push_back({"X1Sigma+", 0, Symmetry::Gerade, 0.0, p.x_depth, p.x_a, p.x_re,
                 {{6, p.x_c6}, {8, p.x_c8}}, 11.0, 16.0, 4.0, 40.0, 0.02});
  out.push_back({"0u+", 0, Symmetry::Ungerade, p.p1_limit, p.zero_u_depth, p.zero_u_a, p.zero_u_re,
                 {{3, p.zero_u_c3}}, 14.0, 22.0, 4.0, 40.0, 0.02});
  out.push_back({"1u", 1, Symmetry::Ungerade, p.p1_limit, p.one_u_depth, p.one_u_a, p.one_u_re,
                 {{3, p.one_u_c3}}, 14.0, 22.0, 4.0, 40.0, 0.02});
  return out;
}

struct DipoleSpec {
  std::string ket;
  double d_short, d_inf, r_mid, width;
};

std::vector<DipoleSpec> dipole_specs(const Sr2ModelParams& p) {
  const double d_inf = std::sqrt(2.0) * p.d_atom_3p1;
  return {{"0u+", p.zero_u_d_short, d_inf, 9.5, 0.7}, {"1u", p.one_u_d_short, d_inf, 9.5, 0.7}};
}

double dipole_value(const DipoleSpec& d, double r) {
  return d.d_inf + (d.d_short - d.d_inf) / (1.0 + std::exp((r - d.r_mid) / d.width));
}

}  // namespace

MoleculeSystem sr2_model(const Sr2ModelParams& p) {
  MoleculeSystem sys;
  sys.reduced_mass = p.mass_amu * K::amu_to_electron_mass;
  bool first = true;
  for (const auto& c : curve_specs(p)) {
    std::vector<double> r, v;
    for (double x = c.r_first; x <= c.r_last + 1e-9; x += c.dr) {
      r.push_back(x);
      v.push_back(model_value(c, x));
    }
    auto curve = PotentialCurve::tabulated(c.label, c.omega, c.sym, r, v,
                                           cm1_to_hartree(c.limit_cm1), c.tail);
    if (first) sys.ground = std::move(curve);
    else sys.excited.push_back(std::move(curve));
    first = false;
  }
  for (const auto& d : dipole_specs(p)) {
    std::vector<double> r, v;
    for (double x = 4.0; x <= 60.0 + 1e-9; x += 0.1) {
      r.push_back(x);
      v.push_back(dipole_value(d, x));
    }
    sys.dipoles.emplace_back("X1Sigma+", d.ket, r, v, d.d_inf);
  }
  if (p.include_singlets) {
    const double lim = cm1_to_hartree(p.singlet_limit);
    sys.excited.push_back(PotentialCurve::morse("B0u+", 0, Symmetry::Ungerade,
                                                cm1_to_hartree(p.b_depth), p.b_a, p.b_re, lim));
    sys.excited.push_back(PotentialCurve::morse("C1u", 1, Symmetry::Ungerade,
                                                cm1_to_hartree(p.c_depth), p.c_a, p.c_re, lim));
    sys.dipoles.push_back(DipoleFunction::constant("X1Sigma+", "B0u+", p.singlet_d));
    sys.dipoles.push_back(DipoleFunction::constant("X1Sigma+", "C1u", p.singlet_d));
  }
  sys.validate();
  return sys;
}

std::string sr2_model_config(const Sr2ModelParams& p) {
  std::ostringstream out;
  out.precision(17);
  out << "# Illustrative Sr2-like model: Morse wells joined to dispersion tails.\n"
         "# Well depths, C_n and dipole curves are model choices, not ab initio data.\n"
         "# R in a0, V in cm^-1, C_n in atomic units, d in e a0.\n\n";
  out << "[system]\nreduced_mass_amu = " << p.mass_amu << "\nground = X1Sigma+\n\n";
  for (const auto& c : curve_specs(p)) {
    out << "[curve." << c.label << "]\nomega = " << c.omega
        << "\nsymmetry = " << (c.sym == Symmetry::Gerade ? "g" : "u")
        << "\nasymptote_cm1 = " << c.limit_cm1 << "\n";
    for (const auto& t : c.tail) out << "C" << t.n << " = " << t.coefficient << "\n";
    for (double x = c.r_first; x <= c.r_last + 1e-9; x += c.dr)
      out << x << " " << hartree_to_cm1(model_value(c, x)) << "\n";
    out << "\n";
  }
  if (p.include_singlets) {
    out << "[curve.B0u+]\nomega = 0\nsymmetry = u\nform = morse\nasymptote_cm1 = " << p.singlet_limit
        << "\nDe_cm1 = " << p.b_depth << "\na = " << p.b_a << "\nRe = " << p.b_re << "\n\n";
    out << "[curve.C1u]\nomega = 1\nsymmetry = u\nform = morse\nasymptote_cm1 = " << p.singlet_limit
        << "\nDe_cm1 = " << p.c_depth << "\na = " << p.c_a << "\nRe = " << p.c_re << "\n\n";
  }
  for (const auto& d : dipole_specs(p)) {
    out << "[dipole.X1Sigma+." << d.ket << "]\nd_infinity_ea0 = " << d.d_inf << "\n";
    for (double x = 4.0; x <= 60.0 + 1e-9; x += 0.1) out << x << " " << dipole_value(d, x) << "\n";
    out << "\n";
  }
  if (p.include_singlets)
    for (const char* k : {"B0u+", "C1u"})
      out << "[dipole.X1Sigma+." << k << "]\nd_infinity_ea0 = " << p.singlet_d << "\n1 "
          << p.singlet_d << "\n2 " << p.singlet_d << "\n\n";
  return out.str();
}

}  // namespace rovib
