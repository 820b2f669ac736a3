#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "rovib/potential.hpp"
#include "rovib/radial.hpp"
#include "rovib/spline.hpp"

namespace rovib {

/// Bound-continuum dipole table for one (continuum channel, J) against a set
/// of bound partner states: g[k][p] = <eps_k, J | d | partner_p>^2 with the
/// continuum energy-normalized, so sum_k weight[k] g[k][p] integrates over eps.
struct ContinuumTable {
  std::string channel;
  int J = 0;
  double asymptote = 0.0;          // Hartree
  double eps_lo = 0.0;             // integration range above the asymptote
  double eps_hi = 0.0;
  std::vector<double> eps;         // energy above the asymptote, Hartree
  std::vector<double> weight;
  std::vector<std::vector<double>> g;
  std::vector<RovibLevel> partners;
  std::vector<CubicSpline> splines;  // per partner, in log(eps)
  std::size_t evaluations = 0;
  bool converged = false;

  /// g_p(eps) by cubic interpolation in log(eps); 0 outside the table.
  double interpolate(std::size_t partner, double e) const;
};

struct ContinuumOptions {
  double eps_min = 1e-16;   // Hartree above threshold
  double eps_max = 0.0;     // 0: choose automatically
  double tol = 1e-6;
  std::size_t max_evals = 3000;
};

/// Immutable system plus lazily solved, thread-safe caches of bound states,
/// continuum tables and natural widths.
class Molecule {
 public:
  explicit Molecule(MoleculeSystem system, SolverOptions opts = {},
                    ContinuumOptions copts = {});

  const MoleculeSystem& system() const { return system_; }
  const SolverOptions& options() const { return opts_; }
  const ContinuumOptions& continuum_options() const { return copts_; }

  const std::vector<BoundState>& states(const std::string& channel, int J) const;
  std::vector<RovibLevel> levels(const std::string& channel, int J) const;
  const BoundState& state(const std::string& channel, int J, int v) const;
  const BoundState& state(const RovibLevel& level) const;

  /// Level by index: v >= 0 counts from the bottom, v < 0 from dissociation.
  RovibLevel select(const std::string& channel, int J, int v) const;

  /// Channels with a dipole to the ground channel and opposite g/u symmetry.
  std::vector<const PotentialCurve*> coupled_channels() const;

  /// Dipole between channels; throws MissingDipole.
  const DipoleFunction& dipole(const std::string& a, const std::string& b) const;

  /// <excited| d(R) |ground> radial integral (e a0).
  double reduced_dipole(const RovibLevel& excited, const RovibLevel& ground) const;

  /// Continuum of `channel` at rotational J against all bound levels of
  /// (partner_channel, partner_J). eps_max defaults to covering the partner
  /// energies (decay) or to a convergence-driven cutoff (polarizability).
  const ContinuumTable& continuum(const std::string& channel, int J,
                                  const std::string& partner_channel, int partner_J,
                                  double eps_max = 0.0) const;

  /// Memoized per-level scalar (used for Einstein A coefficients).
  double memo(const std::string& kind, const RovibLevel& level,
              const std::function<double()>& compute) const;

 private:
  template <class T>
  struct Slot {
    std::once_flag once;
    T value;
  };

  MoleculeSystem system_;
  SolverOptions opts_;
  ContinuumOptions copts_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<std::string, int>, std::unique_ptr<Slot<std::vector<BoundState>>>> states_;
  mutable std::map<std::tuple<std::string, int, std::string, int, double>,
                   std::unique_ptr<Slot<ContinuumTable>>>
      tables_;
  mutable std::map<std::tuple<std::string, std::string, int, int>, std::unique_ptr<Slot<double>>> memo_;
};

/// Builds a continuum table directly (used by Molecule, exposed for tests).
ContinuumTable build_continuum_table(const MoleculeSystem& system, const std::string& channel,
                                     int J, const std::vector<const BoundState*>& partners,
                                     const std::vector<const DipoleFunction*>& dipoles,
                                     double eps_max, const SolverOptions& opts,
                                     const ContinuumOptions& copts);

}  // namespace rovib
