#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "rovib/molecule.hpp"
#include "rovib/response.hpp"

namespace rovib {

struct SensitivityReport {
  RovibLevel level;
  double dE_dlnmu = 0.0;  // cm^-1
  double rel_step = 0.0;
  /// The level is unbound at one of the perturbed masses; the value is then a
  /// one-sided difference.
  bool level_lost = false;
};

struct IntervalSensitivity {
  SensitivityReport a, b;
  double nu = 0.0;         // |E_b - E_a|, cm^-1
  double dnu_dlnmu = 0.0;  // s_b - s_a, cm^-1
  double kappa = 0.0;      // nu / dnu_dlnmu
};

struct AnchorSensor {
  SensitivityReport anchor;
  IntervalSensitivity sensor;
};

/// dE/dln(mu) of one level by re-solving at mu (1 +- rel_step) on the
/// unperturbed grid. rel_step must lie in [1e-8, 1e-3].
SensitivityReport mu_sensitivity(const MoleculeSystem& sys, const RovibLevel& level,
                                 double rel_step = 1e-6, const SolverOptions& opts = {});

/// All bound levels of (channel, J) at once; levels are matched by node count.
std::vector<SensitivityReport> mu_sensitivities(const MoleculeSystem& sys,
                                                const std::string& channel, int J = 0,
                                                double rel_step = 1e-6,
                                                const SolverOptions& opts = {});

/// Throws DegeneratePair for a = b or nu = 0 and InvalidParameter for levels
/// of different channels.
IntervalSensitivity interval_sensitivity(const SensitivityReport& a, const SensitivityReport& b);
IntervalSensitivity interval_sensitivity(const MoleculeSystem& sys, const RovibLevel& a,
                                         const RovibLevel& b, double rel_step = 1e-6,
                                         const SolverOptions& opts = {});

/// Anchor: smallest |dE/dlnmu|. Sensor: the pair with the largest
/// |dnu/dlnmu|. Ties go to the lower v. Needs at least three levels.
AnchorSensor select_anchor_sensor(const std::vector<SensitivityReport>& reports);
AnchorSensor select_anchor_sensor(const MoleculeSystem& sys, const std::string& channel, int J = 0,
                                  double rel_step = 1e-6, const SolverOptions& opts = {});

/// ln(mu) derivative of (nu1 - nu2) / (nu1 + nu2) given the two intervals and
/// their sensitivities.
double ratio_sensitivity(double nu1, double s1, double nu2, double s2);

struct MagicPoint {
  RovibLevel a, b;
  double nu_star = 0.0;       // cm^-1
  double slope = 0.0;         // d Re(alpha_a - alpha_b)/d nu, MHz/(W/cm^2) per cm^-1
  double residual = 0.0;      // Re(alpha_a - alpha_b) at nu_star
  std::complex<double> alpha_a, alpha_b;
  double nearest_pole = 0.0;  // cm^-1
};

struct MagicOptions {
  double step = 0.1;        // cm^-1
  double exclusion = 0.05;  // cm^-1 around every pole
  double tol_nu = 1e-6;     // cm^-1
  double tol_alpha = 1e-10; // MHz/(W/cm^2)
};

using AlphaFn = std::function<std::complex<double>(double)>;

/// Sign changes of Re(fa - fb) on the sampled window [lo, hi], away from the
/// poles, refined by bisection. Throws AllPoles when no sample survives the
/// exclusion. The returned points carry no level labels.
std::vector<MagicPoint> find_crossings(const AlphaFn& fa, const AlphaFn& fb,
                                       std::vector<double> poles, double lo, double hi,
                                       const MagicOptions& opts = {});

std::vector<MagicPoint> find_magic(const Molecule& m, const RovibLevel& a, const RovibLevel& b,
                                   double lo, double hi, const MagicOptions& opts = {},
                                   const PolarizabilityOptions& popts = {});
std::vector<MagicPoint> find_magic(const PolarizabilityModel& a, const PolarizabilityModel& b,
                                   double lo, double hi, const MagicOptions& opts = {});

struct PrecisionBudget {
  double probe_linewidth = 0.0;  // Hz
  double snr = 0.0;
  double transition_nu = 0.0;    // Hz
  double fractional_instability_at_1s = 0.0;

  /// Instability after averaging for tau seconds.
  double at(double tau) const;
};

PrecisionBudget precision_budget(double transition_nu, double linewidth = 10.0, double snr = 100.0);

}  // namespace rovib
