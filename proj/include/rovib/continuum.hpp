#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rovib/potential.hpp"
#include "rovib/radial.hpp"

namespace rovib {

/// Energy-normalized continuum wave on a piecewise-uniform grid. Sample
/// positions are integers in units of `unit`; each segment starts on the last
/// sample of the previous one.
struct SegmentedWave {
  struct Segment {
    std::int64_t start = 0;
    std::int64_t step = 1;
    std::size_t offset = 0;
    std::size_t count = 0;
  };
  double unit = 0.0;
  double energy = 0.0;  // above threshold, Hartree
  std::vector<Segment> segments;
  std::vector<double> psi;
  std::vector<double> tapered;  // psi * taper(R), used by overlaps
  /// Overlaps are tapered to zero over [r_cut, r_cut + window].
  double r_cut = std::numeric_limits<double>::infinity();
  double window = 0.0;

  double taper(double r) const;
  double r_max() const;
};

/// Continuum waves of one (channel, J) for overlaps against a fixed set of
/// bound partners. The step doubles wherever the local momenta of the wave and
/// of every partner allow it, and the wave is tapered off past the last radius
/// at which any partner can still be phase-matched to it.
class ContinuumPropagator {
 public:
  ContinuumPropagator(const MoleculeSystem& system, const std::string& channel, int J,
                      const std::vector<const BoundState*>& partners,
                      const SolverOptions& opts = {});

  /// False when the partner grids do not share the lattice of this channel;
  /// callers then fall back to continuum_wave.
  bool aligned() const { return aligned_; }

  SegmentedWave wave(double eps) const;

  /// Integral of psi(R) b(R) taper(R) with b sampled on grid g.
  double overlap(const SegmentedWave& w, const RadialGrid& g, std::span<const double> b) const;

 private:
  std::size_t index(double r) const;

  const MoleculeSystem& system_;
  const PotentialCurve& curve_;
  SolverOptions opts_;
  int J_;
  double mu_, cent_, l_;
  double unit_ = 0.0;
  std::int64_t align_ = 1, base_step_ = 1, n0_ = 0;
  bool aligned_ = true;
  double r_extent_ = 0.0, v_floor_ = 0.0;
  // Log-spaced radial samples with suffix bounds over [R_j, infinity).
  double log_r0_ = 0.0, dlog_ = 0.0;
  std::vector<double> r_;
  std::vector<double> v_min_, v_max_, residual_, kp2_, phase_match_;
};

}  // namespace rovib
