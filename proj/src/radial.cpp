#include "rovib/radial.hpp"

#include <algorithm>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "rovib/errors.hpp"

namespace rovib {

namespace {

constexpr double kDepthFloor = 1e-4;  // Hartree, step scale for shallow or repulsive curves
constexpr double kThresholdTie = 1e-10;  // Hartree; levels this close to the asymptote count as bound

struct Channel {
  const PotentialCurve* curve;
  double mu;
  double cent;  // (J(J+1) - Omega^2) / (2 mu)
  int J;

  double veff(double r) const { return (*curve)(r) + cent / (r * r); }
  double asym() const { return curve->asymptote(); }
};

Channel make_channel(const MoleculeSystem& sys, const PotentialCurve& curve, int J) {
  if (J < 0 || J < curve.omega())
    throw InvalidQuantumNumbers("J=" + std::to_string(J) + " not allowed for Omega=" +
                                std::to_string(curve.omega()) + " channel " + curve.label());
  const double mu = reduced_mass(sys);
  const double l2 = double(J) * (J + 1) - double(curve.omega()) * curve.omega();
  return Channel{&curve, mu, l2 / (2.0 * mu), J};
}

double reference_depth(const PotentialCurve& c) { return std::max(c.depth(), kDepthFloor); }

double raw_step(const PotentialCurve& c, double mu, const SolverOptions& o) {
  const double k = std::sqrt(2.0 * mu * reference_depth(c));
  return 2.0 * std::numbers::pi / k / o.points_per_wavelength;
}

struct Steps {
  double H;  // alignment unit for r0
  double h;  // coarse step of this channel
};

Steps steps_for(const MoleculeSystem& sys, const PotentialCurve& curve, const SolverOptions& o) {
  if (o.step) {
    if (!(*o.step > 0.0)) throw InvalidParameter("grid step must be positive");
    return {*o.step, *o.step};
  }
  const double mu = reduced_mass(sys);
  double H = 0.0;
  for (const auto* c : sys.channels()) H = std::max(H, raw_step(*c, mu, o));
  H = std::max(H, raw_step(curve, mu, o));
  const double target = raw_step(curve, mu, o);
  double h = H;
  while (h > target * (1.0 + 1e-12)) h *= 0.5;
  return {H, h};
}

// Inner grid edge, a multiple of H unless fixed by the options.
double inner_edge(const Channel& ch, const Steps& st, const SolverOptions& o) {
  if (o.r_min) return *o.r_min;
  const auto well = ch.curve->well();
  const double r_start = well ? well->r_e : 10.0;
  const double floor_r = o.r_min_fraction * r_start;
  const double target = o.wall_depths * reference_depth(*ch.curve);
  double r = r_start;
  while (r > floor_r && ch.veff(r) - ch.asym() < target) r *= 0.995;
  r = std::max(r, floor_r);
  double r0 = std::floor(r / st.H) * st.H;
  if (r0 < floor_r) r0 = std::ceil(floor_r / st.H) * st.H;
  return r0;
}

// Tabulates w_i = (h^2 2mu / 12) V_eff(R_i) on the fine grid, growing on demand.
class ChannelSolver {
 public:
  ChannelSolver(const MoleculeSystem& sys, const PotentialCurve& curve, int J,
                const SolverOptions& o)
      : ch_(make_channel(sys, curve, J)), opts_(o) {
    st_ = steps_for(sys, curve, o);
    hf_ = o.richardson ? 0.5 * st_.h : st_.h;
    r0_ = inner_edge(ch_, st_, o);
    c_ = hf_ * hf_ * 2.0 * ch_.mu / 12.0;
    if (!(r0_ > 0.0)) throw InvalidParameter("inner grid edge must be positive");
    if (c_ * (ch_.veff(r0_) - ch_.curve->well().value_or(PotentialCurve::Well{0, ch_.asym()}).v_min) >= 0.9)
      throw ConvergenceError("grid step too coarse for the inner wall of " + curve.label());
  }

  const Channel& channel() const { return ch_; }
  double fine_step() const { return hf_; }
  double r0() const { return r0_; }
  double r(std::size_t i) const { return r0_ + double(i) * hf_; }

  // Fine-grid index (even) of the outer edge used for energy E.
  std::size_t end_index(double e) const {
    const double r_stop = e >= ch_.asym() ? opts_.r_cap : outer_extent(e);
    std::size_t n = std::size_t(std::ceil((r_stop - r0_) / hf_));
    n = std::max<std::size_t>(n, 16);
    if (n % 2) ++n;
    return n;
  }

  void ensure(std::size_t n) {
    if (w_.size() > n) return;
    const std::size_t old = w_.size();
    const std::size_t target = std::max(n + 1, old + old / 2);
    w_.resize(target);
    for (std::size_t i = old; i < target; ++i) w_[i] = c_ * ch_.veff(r(i));
  }

  // u - 2 of the Numerov recursion y_{i+1} = u_i y_i - y_{i-1}.
  static double q(double t) { return 12.0 * t / (1.0 - t); }

  // Sturm count of eigenvalues below e on points 0..nend (Dirichlet ends).
  int count(double e, std::size_t nend, int stride) {
    ensure(nend);
    const double s2 = double(stride) * stride;
    const double ce = c_ * e;
    // Riccati ratios r_i = 1 + d_i; carrying d keeps the small potential
    // term accurate where u_i is close to 2.
    double d = 0.0;
    bool first = true;
    int nodes = 0;
    for (std::size_t i = stride; i < nend; i += stride) {
      const double t = s2 * (w_[i] - ce);
      d = first ? 1.0 + q(t) : q(t) + d / (1.0 + d);
      first = false;
      if (d < -1.0) ++nodes;
      if (d == -1.0) d = -1.0 + 1e-300;
    }
    return nodes;
  }

  std::size_t match_index(double e, std::size_t nend, int stride) const {
    std::size_t m = 0;
    for (std::size_t i = stride; i < nend; i += stride)
      if (w_[i] <= c_ * e) m = i;
    const std::size_t lo = 2 * stride, hi = nend - 2 * stride;
    if (m == 0) m = (nend / 2 / stride) * stride;
    return std::clamp(m, lo, hi);
  }

  // Matching function at the outer turning point.
  double mismatch(double e, std::size_t nend, int stride) {
    ensure(nend);
    const std::size_t m = match_index(e, nend, stride);
    const double s2 = double(stride) * stride;
    const double ce = c_ * e;
    auto Q = [&](std::size_t i) { return q(s2 * (w_[i] - ce)); };
    double dr = 0.0;
    for (std::size_t i = stride; i < m; i += stride) {
      dr = i == std::size_t(stride) ? 1.0 + Q(i) : Q(i) + dr / (1.0 + dr);
      if (dr == -1.0) dr = -1.0 + 1e-300;
    }
    double ds = 0.0;
    for (std::size_t i = nend - stride; i > m; i -= stride) {
      ds = i == nend - stride ? 1.0 + Q(i) : Q(i) + ds / (1.0 + ds);
      if (ds == -1.0) ds = -1.0 + 1e-300;
    }
    // 1/r_in + 1/r_out - u_m, written to avoid cancellation near u = 2
    return -dr / (1.0 + dr) - ds / (1.0 + ds) - Q(m);
  }

  // Eigenvector on points 0, stride, ..., nend (nend a multiple of stride).
  std::vector<double> eigenvector(double e, std::size_t nend, int stride = 1) {
    ensure(nend);
    const std::size_t st = std::size_t(stride);
    const std::size_t n = nend / st;
    const std::size_t m = match_index(e, nend, stride) / st;
    const double s2 = double(stride) * stride;
    const double ce = c_ * e;
    std::vector<double> t(n + 1), y(n + 1, 0.0), rr(n + 1, 0.0), ss(n + 1, 0.0);
    for (std::size_t k = 0; k <= n; ++k) t[k] = s2 * (w_[k * st] - ce);
    double d = 0.0;
    for (std::size_t i = 1; i < m; ++i) {
      d = i == 1 ? 1.0 + q(t[i]) : q(t[i]) + d / (1.0 + d);
      if (d == -1.0) d = -1.0 + 1e-300;
      rr[i] = 1.0 + d;
    }
    d = 0.0;
    for (std::size_t i = n - 1; i > m; --i) {
      d = i == n - 1 ? 1.0 + q(t[i]) : q(t[i]) + d / (1.0 + d);
      if (d == -1.0) d = -1.0 + 1e-300;
      ss[i] = 1.0 + d;
    }
    y[m] = 1.0;
    for (std::size_t i = m; i > 1; --i) y[i - 1] = y[i] / rr[i - 1];
    for (std::size_t i = m; i + 1 < n; ++i) y[i + 1] = y[i] / ss[i + 1];
    std::vector<double> psi(n + 1);
    for (std::size_t i = 0; i <= n; ++i) psi[i] = y[i] / (1.0 - t[i]);
    return psi;
  }

  // s-wave scattering length from the zero-energy regular solution on
  // points 0..nend.
  double scattering_length(std::size_t nend) {
    ensure(nend);
    const double ce = c_ * ch_.asym();
    double y0 = 0.0, y1 = 1e-30;
    for (std::size_t i = 1; i + 1 <= nend; ++i) {
      const double u = (2.0 + 10.0 * (w_[i] - ce)) / (1.0 - (w_[i] - ce));
      const double y2 = u * y1 - y0;
      y0 = y1;
      y1 = y2;
      if (std::abs(y1) > 1e200) {
        y0 *= 1e-200;
        y1 *= 1e-200;
      }
    }
    const double p0 = y0 / (1.0 - (w_[nend - 1] - ce)), p1 = y1 / (1.0 - (w_[nend] - ce));
    const double slope = (p1 - p0) / hf_;
    const double rm = r(nend) - 0.5 * hf_;
    if (slope == 0.0) return std::numeric_limits<double>::infinity();
    return rm - 0.5 * (p0 + p1) / slope;
  }

  // Outer classical turning point and decay length for a bound energy.
  double outer_extent(double e) const {
    const auto well = ch_.curve->well();
    double r = well ? well->r_e : r0_;
    const double cap = opts_.r_cap;
    // March out to the first R beyond the well with V_eff > E.
    double prev = r;
    bool found = false;
    while (r < cap) {
      prev = r;
      r = std::min(cap, r * 1.02 + hf_);
      if (ch_.veff(r) > e) {
        found = true;
        break;
      }
    }
    if (!found) return cap;
    double a = prev, b = r;
    for (int it = 0; it < 60 && b - a > 1e-9 * b; ++it) {
      const double mid = 0.5 * (a + b);
      (ch_.veff(mid) > e ? b : a) = mid;
    }
    double acc = 0.0;
    double x = b;
    while (acc < opts_.decay_integral && x < cap) {
      const double dx = std::min(0.01 * x + hf_, cap - x);
      const double vm = ch_.veff(x + 0.5 * dx) - e;
      acc += std::sqrt(2.0 * ch_.mu * std::max(vm, 0.0)) * dx;
      x += dx;
    }
    return std::min(x, cap);
  }

 private:
  Channel ch_;
  SolverOptions opts_;
  Steps st_{};
  double hf_ = 0.0, r0_ = 0.0, c_ = 0.0;
  std::vector<double> w_;
};

// Eigenvalue with exactly v nodes on a fixed grid, inside [lo, hi] where
// count(lo) <= v < count(hi).
double refine_level(ChannelSolver& s, int v, double lo, double hi, std::size_t nend, int stride) {
  auto bisect_counts = [&](int iters) {
    for (int k = 0; k < iters; ++k) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) return;
      (s.count(mid, nend, stride) <= v ? lo : hi) = mid;
    }
  };
  // Isolate level v on this grid.
  for (int guard = 0; guard < 200; ++guard) {
    if (s.count(lo, nend, stride) == v && s.count(hi, nend, stride) == v + 1) break;
    bisect_counts(1);
  }
  bisect_counts(12);
  for (int attempt = 0; attempt < 4; ++attempt) {
    const double flo = s.mismatch(lo, nend, stride);
    const double fhi = s.mismatch(hi, nend, stride);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) != (fhi < 0.0)) {
      std::uintmax_t iters = 200;
      auto f = [&](double e) { return s.mismatch(e, nend, stride); };
      const auto br = boost::math::tools::toms748_solve(
          f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), iters);
      // Sturm counts confirm the root is the eigenvalue and not a pole.
      const double a = std::nextafter(br.first, -1e300), b = std::nextafter(br.second, 1e300);
      if (s.count(a, nend, stride) == v && s.count(b, nend, stride) == v + 1)
        return 0.5 * (br.first + br.second);
    }
    bisect_counts(8);
  }
  bisect_counts(200);
  return 0.5 * (lo + hi);
}

struct Search {
  std::vector<double> lo, hi;
  std::vector<int> clo, chi;
};

void record(Search& s, double e, int c) {
  for (std::size_t k = 0; k < s.lo.size(); ++k) {
    if (c <= int(k)) {
      if (e > s.lo[k]) {
        s.lo[k] = e;
        s.clo[k] = c;
      }
    } else if (e < s.hi[k]) {
      s.hi[k] = e;
      s.chi[k] = c;
    }
  }
}

void normalize_and_fix_sign(std::vector<double>& psi, double h) {
  double s = 0.0, mx = 0.0;
  for (double x : psi) {
    s += x * x;
    mx = std::max(mx, std::abs(x));
  }
  const double scale = 1.0 / std::sqrt(s * h);
  double sign = 1.0;
  for (double x : psi)
    if (std::abs(x) > 1e-3 * mx) {
      sign = x > 0.0 ? 1.0 : -1.0;
      break;
    }
  for (double& x : psi) x *= sign * scale;
}

class LevelFinder {
 public:
  LevelFinder(const MoleculeSystem& sys, const std::string& channel, int J, const SolverOptions& o)
      : sys_(sys), curve_(sys.curve(channel)), solver_(sys, curve_, J, o), opts_(o), J_(J) {
    const auto well = curve_.well();
    if (!well) return;
    const double asym = curve_.asymptote();
    const std::size_t nend = solver_.end_index(asym);
    n_bound_ = solver_.count(asym, nend, 1);
    threshold_level_ = has_threshold_level(nend);
    const int boxed = n_bound_;
    if (threshold_level_) ++n_bound_;
    search_.lo.assign(boxed, well->v_min);
    search_.hi.assign(boxed, asym);
    search_.clo.assign(boxed, 0);
    search_.chi.assign(boxed, boxed);
  }

  int n_bound() const { return n_bound_; }

  BoundState solve(int v) {
    if (threshold_level_ && v == n_bound_ - 1) return solve_threshold(v);
    auto& s = search_;
    while (!(s.clo[v] == v && s.chi[v] == v + 1)) {
      const double mid = 0.5 * (s.lo[v] + s.hi[v]);
      if (mid <= s.lo[v] || mid >= s.hi[v]) break;
      record(s, mid, solver_.count(mid, solver_.end_index(mid), 1));
    }
    const double lo = s.lo[v], hi = s.hi[v];
    std::size_t nend = solver_.end_index(hi);
    double e_fine = refine_level(solver_, v, lo, hi, nend, 1);
    // The bracket top can sit at threshold; size the grid for the level itself.
    const std::size_t tight = solver_.end_index(e_fine);
    if (tight < nend) {
      nend = tight;
      const auto [a, b] = bracket(e_fine, hi - lo, v, nend, 1);
      e_fine = refine_level(solver_, v, a, b, nend, 1);
    }
    double energy = e_fine;
    auto psi = solver_.eigenvector(e_fine, nend);
    normalize_and_fix_sign(psi, solver_.fine_step());
    double step = solver_.fine_step();
    if (opts_.richardson) {
      const auto [a, b] = bracket(e_fine, hi - lo, v, nend, 2);
      const double e_coarse = refine_level(solver_, v, a, b, nend, 2);
      energy = e_fine + (e_fine - e_coarse) / 15.0;
      // The wavefunction error is O(h^4) pointwise as well; extrapolate on the
      // coarse points.
      auto coarse = solver_.eigenvector(e_coarse, nend, 2);
      normalize_and_fix_sign(coarse, 2.0 * step);
      for (std::size_t k = 0; k < coarse.size(); ++k)
        coarse[k] = psi[2 * k] + (psi[2 * k] - coarse[k]) / 15.0;
      step *= 2.0;
      normalize_and_fix_sign(coarse, step);
      psi = std::move(coarse);
    }
    BoundState out;
    out.level.channel = curve_.label();
    out.level.v = v;
    out.level.v_from_top = v - n_bound_;
    out.level.J = J_;
    out.level.energy = energy;
    out.level.binding_energy = curve_.asymptote() - energy;
    out.wave.grid = RadialGrid{solver_.r0(), step, psi.size()};
    out.wave.psi = std::move(psi);
    out.wave.energy = energy;
    out.wave.J = J_;
    out.wave.level = out.level;
    return out;
  }

  // A level within kThresholdTie of the asymptote is pushed above it by the
  // outer wall. For s-waves on short-range tails it shows up as a zero-energy
  // scattering length beyond the grid (or large and negative); such a level
  // counts as bound.
  bool has_threshold_level(std::size_t nend) {
    const auto& ch = solver_.channel();
    if (ch.cent != 0.0) return false;
    for (const auto& t : curve_.tail())
      if (t.n <= 3) return false;
    const double a = solver_.scattering_length(nend);
    const double a_tie = 1.0 / std::sqrt(2.0 * ch.mu * kThresholdTie);
    if (!std::isfinite(a)) return true;
    if (a > solver_.r(nend)) return true;
    return a < 0.0 && -a > a_tie;
  }

  // Threshold level: lowest box state above the asymptote with v nodes,
  // reported at the asymptote.
  BoundState solve_threshold(int v) {
    const double asym = curve_.asymptote();
    const std::size_t nend = solver_.end_index(asym);
    double hi = asym + kThresholdTie;
    while (solver_.count(hi, nend, 1) < v + 1) hi = asym + 2.0 * (hi - asym);
    const double e = refine_level(solver_, v, asym, hi, nend, 1);
    BoundState out;
    out.level.channel = curve_.label();
    out.level.v = v;
    out.level.v_from_top = v - n_bound_;
    out.level.J = J_;
    out.level.energy = asym;
    out.level.binding_energy = 0.0;
    auto psi = solver_.eigenvector(e, nend);
    normalize_and_fix_sign(psi, solver_.fine_step());
    out.wave.grid = RadialGrid{solver_.r0(), solver_.fine_step(), psi.size()};
    out.wave.psi = std::move(psi);
    out.wave.energy = asym;
    out.wave.J = J_;
    out.wave.level = out.level;
    return out;
  }

  // Interval around e holding exactly level v on the given grid.
  std::pair<double, double> bracket(double e, double span, int v, std::size_t nend, int stride) {
    double width = std::max(1e-6 * span, 1e-14);
    double a = e - width, b = e + width;
    for (int k = 0; k < 60; ++k) {
      const bool ok_a = solver_.count(a, nend, stride) <= v;
      const bool ok_b = solver_.count(b, nend, stride) >= v + 1;
      if (ok_a && ok_b) break;
      width *= 4.0;
      if (!ok_a) a = e - width;
      if (!ok_b) b = e + width;
    }
    return {a, b};
  }

 private:
  const MoleculeSystem& sys_;
  const PotentialCurve& curve_;
  ChannelSolver solver_;
  SolverOptions opts_;
  int J_;
  int n_bound_ = 0;
  bool threshold_level_ = false;
  Search search_;
};

}  // namespace

double reduced_mass(const MoleculeSystem& system) {
  if (!(system.reduced_mass > 0.0)) throw ValidationError("reduced mass must be positive");
  return system.reduced_mass;
}

double effective_potential(const MoleculeSystem& system, const PotentialCurve& curve, int J,
                           double r) {
  return make_channel(system, curve, J).veff(r);
}

double channel_step(const MoleculeSystem& system, const std::string& channel,
                    const SolverOptions& opts) {
  return steps_for(system, system.curve(channel), opts).h;
}

double RadialWavefunction::norm() const {
  if (psi.empty()) return 0.0;
  double s = 0.0;
  for (double x : psi) s += x * x;
  s -= 0.5 * (psi.front() * psi.front() + psi.back() * psi.back());
  return s * grid.h;
}

int RadialWavefunction::nodes() const {
  double mx = 0.0;
  for (double x : psi) mx = std::max(mx, std::abs(x));
  int n = 0;
  double last = 0.0;
  for (double x : psi) {
    if (std::abs(x) < 1e-9 * mx) continue;
    if (last != 0.0 && (x < 0.0) != (last < 0.0)) ++n;
    last = x;
  }
  return n;
}

double RadialWavefunction::operator()(double r) const {
  if (psi.empty() || r < grid.r0 || r > grid.r_max()) return 0.0;
  const double t = (r - grid.r0) / grid.h;
  const std::size_t i = std::min<std::size_t>(std::size_t(t), psi.size() - 2);
  const double f = t - double(i);
  return psi[i] * (1.0 - f) + psi[i + 1] * f;
}

std::vector<BoundState> bound_states(const MoleculeSystem& system, const std::string& channel,
                                     int J, const SolverOptions& opts) {
  LevelFinder finder(system, channel, J, opts);
  std::vector<BoundState> out;
  out.reserve(std::size_t(finder.n_bound()));
  for (int v = 0; v < finder.n_bound(); ++v) out.push_back(finder.solve(v));
  return out;
}

std::vector<RovibLevel> bound_levels(const MoleculeSystem& system, const std::string& channel,
                                     int J, const SolverOptions& opts) {
  LevelFinder finder(system, channel, J, opts);
  std::vector<RovibLevel> out;
  for (int v = 0; v < finder.n_bound(); ++v) out.push_back(finder.solve(v).level);
  return out;
}

std::optional<BoundState> solve_level(const MoleculeSystem& system, const std::string& channel,
                                      int J, int v, const SolverOptions& opts) {
  if (v < 0) throw InvalidQuantumNumbers("v must be >= 0");
  LevelFinder finder(system, channel, J, opts);
  if (v >= finder.n_bound()) return std::nullopt;
  return finder.solve(v);
}

RadialWavefunction wavefunction(const MoleculeSystem& system, const RovibLevel& level,
                                const SolverOptions& opts) {
  auto s = solve_level(system, level.channel, level.J, level.v, opts);
  if (!s) throw ConvergenceError("level v=" + std::to_string(level.v) + " no longer bound");
  return s->wave;
}

// ---------------------------------------------------------------------------

namespace {

// Riccati-Bessel pair for real order l: jhat ~ sin(x - l pi/2), nhat ~ -cos(...).
std::pair<double, double> riccati(double l, double x) {
  const double nu = l + 0.5;
  const double f = std::sqrt(0.5 * std::numbers::pi * x);
  return {f * boost::math::cyl_bessel_j(nu, x), f * boost::math::cyl_neumann(nu, x)};
}

}  // namespace

namespace detail {

double continuum_scale(const PotentialCurve& curve, double mu, double ek, double l,
                       const std::vector<MatchPair>& pairs) {
  // Two-point matching to Riccati-Bessel functions; local momentum absorbs
  // any residual tail.
  const double asym = curve.asymptote();
  double amp2 = 0.0;
  for (const auto& m : pairs) {
    const double vloc = curve(0.5 * (m.r1 + m.r2)) - asym;
    const double kl = std::sqrt(2.0 * mu * std::max(ek - vloc, 0.25 * ek));
    const auto [j1, n1] = riccati(l, kl * m.r1);
    const auto [j2, n2] = riccati(l, kl * m.r2);
    const double det = j1 * n2 - j2 * n1;
    const double a = (m.psi1 * n2 - m.psi2 * n1) / det;
    const double b = (j1 * m.psi2 - j2 * m.psi1) / det;
    amp2 += (a * a + b * b) / (2.0 * mu / (std::numbers::pi * kl));
  }
  return 1.0 / std::sqrt(amp2 / double(pairs.size()));
}

double partial_wave_order(int J, int omega) {
  const double l2 = double(J) * (J + 1) - double(omega) * omega;
  return 0.5 * (std::sqrt(1.0 + 4.0 * l2) - 1.0);
}

}  // namespace detail

double grid_alignment(const MoleculeSystem& system, const SolverOptions& opts) {
  return steps_for(system, system.ground, opts).H;
}

double inner_grid_edge(const MoleculeSystem& system, const std::string& channel, int J,
                       const SolverOptions& opts) {
  const PotentialCurve& curve = system.curve(channel);
  return inner_edge(make_channel(system, curve, J), steps_for(system, curve, opts), opts);
}

RadialWavefunction continuum_wave(const MoleculeSystem& system, const std::string& channel,
                                  double energy, int J, const SolverOptions& opts,
                                  double r_extent) {
  const PotentialCurve& curve = system.curve(channel);
  const double asym = curve.asymptote();
  const double ek = energy - asym;
  if (!(ek > 0.0)) throw InvalidEnergy("continuum energy must lie above the channel asymptote");
  const Channel ch = make_channel(system, curve, J);
  const double mu = ch.mu;
  const Steps st = steps_for(system, curve, opts);
  const double r0 = inner_edge(ch, st, opts);

  // Fine step, halved until the fastest local oscillation is resolved.
  double h = opts.richardson ? 0.5 * st.h : st.h;
  const double vmin = curve.well() ? curve.well()->v_min : asym;
  const double kmax = std::sqrt(2.0 * mu * (energy - std::min(vmin, asym)));
  const double ppw = opts.richardson ? 2.0 * opts.points_per_wavelength : opts.points_per_wavelength;
  while (h > 2.0 * std::numbers::pi / kmax / ppw) h *= 0.5;

  const double k_inf = std::sqrt(2.0 * mu * ek);
  const double lambda = 2.0 * std::numbers::pi / k_inf;
  // Past r_asym the residual potential phase is below ~1e-4 rad.
  double r_asym = std::max(curve.well() ? curve.well()->r_e : r0, r0 + lambda);
  while (r_asym < opts.r_cap) {
    const double dv = std::abs(curve(r_asym) - asym);
    if (dv * r_asym * mu / k_inf < 1e-4) break;
    r_asym *= 1.05;
  }
  r_asym = std::min(r_asym, opts.r_cap);
  const double r_end = std::max(r_extent, r_asym) + 1.25 * lambda;
  std::size_t n = std::size_t(std::ceil((r_end - r0) / h)) + 1;
  n = std::max<std::size_t>(n, 32);

  const double c = h * h * 2.0 * mu / 12.0;
  std::vector<double> t(n), y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) t[i] = c * (ch.veff(r0 + double(i) * h) - energy);
  if (t[0] >= 0.9) throw ConvergenceError("grid step too coarse for the inner wall of " + channel);
  y[1] = 1e-30;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double u = (2.0 + 10.0 * t[i]) / (1.0 - t[i]);
    y[i + 1] = u * y[i] - y[i - 1];
    if (std::abs(y[i + 1]) > 1e200)
      for (std::size_t j = 0; j <= i + 1; ++j) y[j] *= 1e-200;
  }
  std::vector<double> psi(n);
  for (std::size_t i = 0; i < n; ++i) psi[i] = y[i] / (1.0 - t[i]);

  // Match over the last wavelength.
  const double l = detail::partial_wave_order(J, curve.omega());
  const std::size_t q = std::max<std::size_t>(2, std::size_t(0.25 * lambda / h));
  const std::size_t span = std::size_t(lambda / h);
  std::vector<detail::MatchPair> pairs;
  for (int s = 0; s < 8; ++s) {
    const std::size_t i2 = n - 1 - std::size_t(s) * span / 8;
    const std::size_t i1 = i2 - q;
    pairs.push_back({r0 + double(i1) * h, psi[i1], r0 + double(i2) * h, psi[i2]});
  }
  const double scale = detail::continuum_scale(curve, mu, ek, l, pairs);
  double phase = 0.0;
  {
    const auto& m = pairs.front();
    const auto [jj1, nn1] = riccati(l, k_inf * m.r1);
    const auto [jj2, nn2] = riccati(l, k_inf * m.r2);
    const double d2 = jj1 * nn2 - jj2 * nn1;
    const double a2 = (m.psi1 * nn2 - m.psi2 * nn1) / d2;
    const double b2 = (jj1 * m.psi2 - jj2 * m.psi1) / d2;
    phase = std::atan2(-b2, a2);
  }
  for (double& x : psi) x *= scale;
  phase = std::fmod(phase, std::numbers::pi);
  if (phase < 0.0) phase += std::numbers::pi;

  RadialWavefunction w;
  w.grid = RadialGrid{r0, h, n};
  w.psi = std::move(psi);
  w.continuum = true;
  w.energy = energy;
  w.J = J;
  w.phase_shift = phase;
  return w;
}

// ---------------------------------------------------------------------------

namespace {

struct LineFit {
  double slope, intercept, r2;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return {slope, my - slope * mx, r2};
}

}  // namespace

NearDissociationFit near_dissociation_check(const std::vector<RovibLevel>& levels, int n,
                                            double exponent_tolerance) {
  if (levels.size() < 4) throw InsufficientLevels("need at least 4 levels for the fit");
  if (n <= 2) throw InvalidParameter("tail power must exceed 2");
  std::vector<RovibLevel> sorted = levels;
  std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.v < b.v; });
  std::vector<double> v, y;
  const double p = double(n - 2) / (2.0 * n);
  for (const auto& l : sorted) {
    if (!(l.binding_energy > 0.0)) throw InvalidParameter("binding energies must be positive");
    v.push_back(double(l.v));
    y.push_back(std::pow(l.binding_energy, p));
  }
  NearDissociationFit out;
  out.n = n;
  out.levels_used = sorted.size();
  const auto lin = fit_line(v, y);
  out.slope = lin.slope;
  out.r_squared = lin.r2;
  out.v_d = -lin.intercept / lin.slope;
  out.expected_exponent = 2.0 * n / double(n - 2);

  // Free exponent: best log-log line over a scan of the dissociation index.
  const double vmax = v.back();
  auto loglog = [&](double vd) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < v.size(); ++i) {
      lx.push_back(std::log(vd - v[i]));
      ly.push_back(std::log(sorted[i].binding_energy));
    }
    return fit_line(lx, ly);
  };
  // Scan well past the linear-law estimate of v_D.
  const double span = std::max(4.0, 4.0 * (out.v_d - vmax));
  const double dv = span / 4000.0;
  double best_vd = vmax + 0.5, best_r2 = -1.0;
  for (int k = 1; k <= 4000; ++k) {
    const double vd = vmax + dv * k;
    const double r2 = loglog(vd).r2;
    if (r2 > best_r2) {
      best_r2 = r2;
      best_vd = vd;
    }
  }
  double a = std::max(vmax + 1e-6, best_vd - dv), b = best_vd + dv;
  constexpr double g = 0.6180339887498949;
  for (int it = 0; it < 80; ++it) {
    const double x1 = b - g * (b - a), x2 = a + g * (b - a);
    (loglog(x1).r2 > loglog(x2).r2 ? b : a) = (loglog(x1).r2 > loglog(x2).r2 ? x2 : x1);
  }
  out.exponent = loglog(0.5 * (a + b)).slope;
  const double rel = std::abs(out.exponent - out.expected_exponent) / out.expected_exponent;
  out.power_law = out.r_squared > 0.999 && rel <= exponent_tolerance;
  return out;
}

}  // namespace rovib
