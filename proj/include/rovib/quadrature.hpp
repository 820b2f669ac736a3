#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rovib/potential.hpp"
#include "rovib/radial.hpp"

namespace rovib {

/// Trapezoid integral of a(R) b(R) w(R) over the common range of two grids.
/// Grids whose steps differ by a power of two and share sample points are
/// combined on the coarser one; other pairs fall back to spline resampling
/// of the finer function. `w` may be empty (w = 1) or be sampled on grid a.
double grid_overlap(const RadialGrid& ga, std::span<const double> a, const RadialGrid& gb,
                    std::span<const double> b);

/// <a|b> and <a|d(R)|b> for radial wavefunctions.
double overlap(const RadialWavefunction& a, const RadialWavefunction& b);
double overlap(const RadialWavefunction& a, const RadialWavefunction& b, const DipoleFunction& d);

/// psi(R_i) d(R_i) on the wavefunction's own grid.
std::vector<double> weighted_samples(const RadialWavefunction& w, const DipoleFunction& d);

/// Gauss-Legendre node with its weight.
struct QuadNode {
  double x;
  double w;
};

struct AdaptiveResult {
  std::vector<QuadNode> nodes;           // sorted by x
  std::vector<std::vector<double>> values;  // values[k] = f(nodes[k].x)
  std::vector<double> integral;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Adaptive Gauss-Legendre integration of a vector-valued integrand over the
/// panels delimited by `edges`. A panel is split while its 10-point estimate
/// differs from the sum of its halves by more than `tol` relative to the
/// running totals, component-wise.
AdaptiveResult adaptive_gauss(const std::function<std::vector<double>(double)>& f,
                              std::vector<double> edges, double tol, std::size_t max_evals = 4000);

}  // namespace rovib
