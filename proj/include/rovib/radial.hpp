#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rovib/potential.hpp"

namespace rovib {

/// Knobs of the radial solver. Defaults are the production settings.
struct SolverOptions {
  /// Coarse step = local de Broglie wavelength at the well bottom / this.
  double points_per_wavelength = 80.0;
  /// Solve on the coarse step and on half of it, and extrapolate energies.
  bool richardson = true;
  /// Outer grid cap (a0).
  double r_cap = 2500.0;
  /// Inner wall: first R where V_eff - asymptote reaches this many well depths.
  double wall_depths = 10.0;
  /// Hard floor for the inner grid edge, as a fraction of R_e.
  double r_min_fraction = 0.05;
  /// Bound grids stop where the integral of kappa past the outer turning
  /// point reaches this value (amplitude ~ exp(-value)).
  double decay_integral = 28.0;
  /// Fixed coarse step (a0); replaces the automatic choice when set.
  std::optional<double> step;
  /// Fixed inner grid edge (a0), used as a hard wall.
  std::optional<double> r_min;
};

struct RovibLevel {
  std::string channel;
  int v = 0;
  int v_from_top = -1;
  int J = 0;
  double energy = 0.0;          // Hartree
  double binding_energy = 0.0;  // Hartree, asymptote - energy
};

/// Uniform mesh R_i = r0 + i h, i = 0 .. n-1.
struct RadialGrid {
  double r0 = 0.0;
  double h = 0.0;
  std::size_t n = 0;
  double r(std::size_t i) const { return r0 + double(i) * h; }
  double r_max() const { return n ? r(n - 1) : r0; }
};

struct RadialWavefunction {
  RadialGrid grid;
  std::vector<double> psi;
  bool continuum = false;
  std::optional<RovibLevel> level;
  double energy = 0.0;  // Hartree
  int J = 0;
  /// Continuum only: phase shift modulo pi, in [0, pi).
  double phase_shift = 0.0;

  /// Trapezoid integral of psi^2 (endpoints vanish for bound states).
  double norm() const;
  /// Number of sign changes, ignoring samples below 1e-9 of max |psi|.
  int nodes() const;
  /// Linear interpolation; zero outside the grid.
  double operator()(double r) const;
};

struct BoundState {
  RovibLevel level;
  RadialWavefunction wave;
};

/// Reduced mass used for a channel (electron masses).
double reduced_mass(const MoleculeSystem& system);

/// V(R) + centrifugal term, with J(J+1) - Omega^2 for the rotational factor.
double effective_potential(const MoleculeSystem& system, const PotentialCurve& curve, int J,
                           double r);

/// Coarse Numerov step for a channel. Steps of all channels of a system are
/// H / 2^m for a common H, so their grids nest.
double channel_step(const MoleculeSystem& system, const std::string& channel,
                    const SolverOptions& opts = {});

/// Common alignment unit H of all channel grids of a system.
double grid_alignment(const MoleculeSystem& system, const SolverOptions& opts = {});

/// Inner edge of the grid used for (channel, J); a multiple of H.
double inner_grid_edge(const MoleculeSystem& system, const std::string& channel, int J,
                       const SolverOptions& opts = {});

std::vector<RovibLevel> bound_levels(const MoleculeSystem& system, const std::string& channel,
                                     int J, const SolverOptions& opts = {});

std::vector<BoundState> bound_states(const MoleculeSystem& system, const std::string& channel,
                                     int J, const SolverOptions& opts = {});

/// Solves the level with v nodes only. Returns nullopt if the channel holds
/// fewer than v + 1 bound levels.
std::optional<BoundState> solve_level(const MoleculeSystem& system, const std::string& channel,
                                      int J, int v, const SolverOptions& opts = {});

RadialWavefunction wavefunction(const MoleculeSystem& system, const RovibLevel& level,
                                const SolverOptions& opts = {});

/// Energy-normalized scattering state at `energy` (Hartree, absolute) above
/// the channel asymptote. The grid reaches at least `r_extent`.
RadialWavefunction continuum_wave(const MoleculeSystem& system, const std::string& channel,
                                  double energy, int J, const SolverOptions& opts = {},
                                  double r_extent = 0.0);

struct NearDissociationFit {
  int n = 6;
  std::size_t levels_used = 0;
  double v_d = 0.0;             // fitted dissociation index, linear law
  double slope = 0.0;           // of E_b^((n-2)/2n) against v
  double r_squared = 0.0;       // linearity of that fit
  double exponent = 0.0;        // free power-law exponent of E_b vs (v_D - v)
  double expected_exponent = 0.0;  // 2n / (n - 2)
  bool power_law = false;
};

/// LeRoy-Bernstein check on the outermost levels. `exponent_tolerance` is
/// relative to 2n/(n-2).
NearDissociationFit near_dissociation_check(const std::vector<RovibLevel>& levels, int n,
                                            double exponent_tolerance = 0.05);

namespace detail {

struct MatchPair {
  double r1, psi1, r2, psi2;
};

/// Factor that energy-normalizes a regular solution from point pairs taken
/// over the last asymptotic oscillation. ek is the energy above threshold.
double continuum_scale(const PotentialCurve& curve, double mu, double ek, double l,
                       const std::vector<MatchPair>& pairs);

/// Partial-wave order l with l(l+1) = J(J+1) - Omega^2.
double partial_wave_order(int J, int omega);

}  // namespace detail

}  // namespace rovib
