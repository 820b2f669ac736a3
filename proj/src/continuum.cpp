#include "rovib/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "rovib/errors.hpp"

namespace rovib {

namespace {

constexpr int kLatticeBits = 20;
constexpr std::size_t kLogSamples = 3000;
constexpr double kWindowCycles = 20.0;
constexpr double kResidualFraction = 1e-3;

bool on_lattice(double x, double unit, std::int64_t& n) {
  const double q = x / unit;
  n = std::llround(q);
  return std::abs(q - double(n)) <= 1e-6;
}

bool power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

double SegmentedWave::taper(double r) const {
  if (r <= r_cut) return 1.0;
  const double x = (r - r_cut) / window;
  if (x >= 1.0) return 0.0;
  return 0.5 * std::erfc(6.0 * (2.0 * x - 1.0));
}

double SegmentedWave::r_max() const {
  if (segments.empty()) return 0.0;
  const auto& s = segments.back();
  return double(s.start + std::int64_t(s.count - 1) * s.step) * unit;
}

ContinuumPropagator::ContinuumPropagator(const MoleculeSystem& system, const std::string& channel,
                                         int J, const std::vector<const BoundState*>& partners,
                                         const SolverOptions& opts)
    : system_(system), curve_(system.curve(channel)), opts_(opts), J_(J) {
  mu_ = reduced_mass(system);
  if (J < curve_.omega()) throw InvalidQuantumNumbers("J below Omega for channel " + channel);
  cent_ = (double(J) * (J + 1) - double(curve_.omega()) * curve_.omega()) / (2.0 * mu_);
  l_ = detail::partial_wave_order(J, curve_.omega());

  const double H = grid_alignment(system, opts);
  unit_ = H / double(std::int64_t(1) << kLatticeBits);
  align_ = std::int64_t(1) << kLatticeBits;
  // Start no further out than any partner, so a soft or missing wall cannot
  // cut off the region the overlaps live in.
  double r0 = inner_grid_edge(system, channel, J, opts);
  if (!opts.r_min)
    for (const auto* p : partners) r0 = std::min(r0, p->wave.grid.r0);
  const double step = channel_step(system, channel, opts) * (opts.richardson ? 0.5 : 1.0);
  aligned_ = on_lattice(r0, unit_, n0_) && on_lattice(step, unit_, base_step_) &&
             power_of_two(base_step_) && base_step_ <= align_;
  for (const auto* p : partners) {
    std::int64_t a = 0, b = 0;
    const bool ok = on_lattice(p->wave.grid.r0, unit_, a) && on_lattice(p->wave.grid.h, unit_, b) &&
                    power_of_two(b) && b <= align_;
    aligned_ = aligned_ && ok;
    r_extent_ = std::max(r_extent_, p->wave.grid.r_max());
  }
  const auto well = curve_.well();
  v_floor_ = well ? well->v_min : curve_.asymptote();

  // Suffix bounds on a log grid.
  const double r_top = std::max({r_extent_, opts.r_cap, 2.0 * r0});
  log_r0_ = std::log(r0);
  dlog_ = (std::log(r_top) - log_r0_) / double(kLogSamples - 1);
  const std::size_t G = kLogSamples;
  r_.resize(G);
  for (std::size_t j = 0; j < G; ++j) r_[j] = std::exp(log_r0_ + dlog_ * double(j));

  std::vector<double> v(G), res(G), kp(G, 0.0), pm(G, -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < G; ++j) {
    v[j] = curve_(r_[j]) + cent_ / (r_[j] * r_[j]);
    res[j] = std::abs(curve_(r_[j]) - curve_.asymptote());
  }
  // Partners grouped by potential; only the highest energy in a group matters.
  std::map<std::pair<std::string, int>, double> top;
  for (const auto* p : partners) {
    auto key = std::make_pair(p->level.channel, p->level.J);
    auto it = top.find(key);
    if (it == top.end() || p->level.energy > it->second) top[key] = p->level.energy;
  }
  for (const auto& [key, e] : top) {
    const PotentialCurve& c = system.curve(key.first);
    for (std::size_t j = 0; j < G; ++j) {
      const double kin = e - effective_potential(system, c, key.second, r_[j]);
      kp[j] = std::max(kp[j], 2.0 * mu_ * std::max(kin, 0.0));
      // A partner with local momentum above half the wave's cannot be
      // dismissed as non-stationary: 4 kin_p > E - V  <=>  E < 4 kin_p + V.
      pm[j] = std::max(pm[j], 4.0 * kin + v[j]);
    }
  }
  v_min_ = v;
  v_max_ = v;
  residual_ = res;
  kp2_ = kp;
  phase_match_ = pm;
  for (std::size_t j = G - 1; j-- > 0;) {
    v_min_[j] = std::min(v_min_[j], v_min_[j + 1]);
    v_max_[j] = std::max(v_max_[j], v_max_[j + 1]);
    residual_[j] = std::max(residual_[j], residual_[j + 1]);
    kp2_[j] = std::max(kp2_[j], kp2_[j + 1]);
    phase_match_[j] = std::max(phase_match_[j], phase_match_[j + 1]);
  }
}

std::size_t ContinuumPropagator::index(double r) const {
  if (r <= r_.front()) return 0;
  const double q = (std::log(r) - log_r0_) / dlog_;
  return std::min(r_.size() - 1, std::size_t(q));
}

SegmentedWave ContinuumPropagator::wave(double eps) const {
  if (!(eps > 0.0)) throw InvalidEnergy("continuum energy must lie above the channel asymptote");
  const double asym = curve_.asymptote();
  const double E = asym + eps;
  const double k_inf = std::sqrt(2.0 * mu_ * eps);
  const double lambda = 2.0 * std::numbers::pi / k_inf;
  const double ppw = opts_.richardson ? 2.0 * opts_.points_per_wavelength : opts_.points_per_wavelength;
  const std::size_t G = r_.size();

  SegmentedWave out;
  out.unit = unit_;
  out.energy = eps;

  // Starting step resolves the fastest oscillation anywhere.
  std::int64_t S = base_step_;
  const double kmax = std::sqrt(2.0 * mu_ * (E - std::min(v_floor_, v_min_.front())));
  while (S > 1 && double(S) * unit_ > 2.0 * std::numbers::pi / kmax / ppw) S /= 2;

  // Taper start: beyond the last radius where a partner can phase-match.
  std::size_t jc = G;
  for (std::size_t j = 0; j < G; ++j)
    if (phase_match_[j] <= E) {
      jc = j;
      break;
    }
  // Past the inner wall, so the window length follows the asymptotic momentum.
  while (jc < G && E - v_max_[jc] < 0.25 * eps) ++jc;
  bool truncated = false;
  if (jc < G) {
    const double k_lo = std::sqrt(2.0 * mu_ * std::max(E - v_max_[jc], 0.0));
    if (k_lo > 0.0) {
      const double window = kWindowCycles * 2.0 * std::numbers::pi / (0.5 * k_lo);
      if (r_[jc] + window < r_extent_) {
        truncated = true;
        out.r_cut = r_[jc];
        out.window = window;
      }
    }
  }
  // Matching radius: residual potential small against the kinetic energy.
  double r_match = opts_.r_cap;
  for (std::size_t j = 0; j < G; ++j)
    if (residual_[j] <= kResidualFraction * eps) {
      r_match = std::min(r_[j], opts_.r_cap);
      break;
    }
  const auto well = curve_.well();
  if (well) r_match = std::max(r_match, well->r_e);
  const double r_end =
      std::max(truncated ? out.r_cut + out.window : r_extent_, r_match) + 1.25 * lambda;

  auto veff = [&](std::int64_t n) {
    const double r = double(n) * unit_;
    return curve_(r) + cent_ / (r * r);
  };
  auto allowed = [&](double r) {
    const std::size_t j = index(r);
    const double kn = std::sqrt(2.0 * mu_ * std::max({E - v_min_[j], v_max_[j] - E, 0.0}));
    const double kp = std::sqrt(kp2_[j]);
    double h = std::numeric_limits<double>::infinity();
    if (kn > 0.0) h = 2.0 * std::numbers::pi / (ppw * kn);
    if (kn + kp > 0.0) h = std::min(h, 2.0 * std::numbers::pi / (8.0 * (kn + kp)));
    return h;
  };

  std::vector<double>& psi = out.psi;
  psi.reserve(1 << 16);
  SegmentedWave::Segment seg{n0_, S, 0, 0};
  double c = std::pow(double(S) * unit_, 2) * 2.0 * mu_ / 12.0;
  std::int64_t n = n0_;
  double t_prev = c * (veff(n) - E);
  double y_prev = 0.0;
  psi.push_back(0.0);
  seg.count = 1;
  n += S;
  double t_cur = c * (veff(n) - E);
  double y_cur = 1e-30;
  psi.push_back(y_cur / (1.0 - t_cur));
  seg.count = 2;
  if (t_prev >= 0.9) throw ConvergenceError("grid step too coarse for the inner wall of " + curve_.label());

  for (;;) {
    const double r = double(n) * unit_;
    const std::int64_t coarse = std::max(S, align_);
    // The final segment must hold a full wavelength for the matching.
    if (r >= r_end && n % coarse == 0 && double(n - seg.start) * unit_ >= 1.25 * lambda) break;
    const std::int64_t next = std::max(2 * S, align_);
    if (n - seg.start >= 16 * coarse && n % next == 0 && double(2 * S) * unit_ <= allowed(r)) {
      // Continue with twice the step from samples n - 2S and n.
      const double psi_back = psi[psi.size() - 3];
      const double psi_here = psi.back();
      out.segments.push_back(seg);
      seg = SegmentedWave::Segment{n, 2 * S, psi.size(), 1};
      psi.push_back(psi_here);
      S *= 2;
      c *= 4.0;
      t_prev = c * (veff(n - S) - E);
      t_cur = c * (veff(n) - E);
      y_prev = (1.0 - t_prev) * psi_back;
      y_cur = (1.0 - t_cur) * psi_here;
    }
    const double u = (2.0 + 10.0 * t_cur) / (1.0 - t_cur);
    const double y_next = u * y_cur - y_prev;
    n += S;
    const double t_next = c * (veff(n) - E);
    psi.push_back(y_next / (1.0 - t_next));
    ++seg.count;
    y_prev = y_cur;
    y_cur = y_next;
    t_cur = t_next;
    if (std::abs(y_cur) > 1e200) {
      for (double& x : psi) x *= 1e-200;
      y_prev *= 1e-200;
      y_cur *= 1e-200;
    }
  }
  out.segments.push_back(seg);

  // Normalize over the last wavelength of the final segment.
  const auto& last = out.segments.back();
  const double h = double(last.step) * unit_;
  const std::size_t q = std::max<std::size_t>(2, std::size_t(0.25 * lambda / h));
  const std::size_t span = std::min(std::size_t(lambda / h), last.count > q + 9 ? last.count - q - 9 : 0);
  std::vector<detail::MatchPair> pairs;
  for (int s = 0; s < 8; ++s) {
    const std::size_t i2 = last.count - 1 - std::size_t(s) * span / 8;
    const std::size_t i1 = i2 - q;
    pairs.push_back({double(last.start + std::int64_t(i1) * last.step) * unit_, psi[last.offset + i1],
                     double(last.start + std::int64_t(i2) * last.step) * unit_, psi[last.offset + i2]});
  }
  const double scale = detail::continuum_scale(curve_, mu_, eps, l_, pairs);
  for (double& x : psi) x *= scale;
  out.tapered = psi;
  if (std::isfinite(out.r_cut))
    for (const auto& sg : out.segments)
      for (std::size_t i = 0; i < sg.count; ++i)
        out.tapered[sg.offset + i] *= out.taper(double(sg.start + std::int64_t(i) * sg.step) * unit_);
  return out;
}

double ContinuumPropagator::overlap(const SegmentedWave& w, const RadialGrid& g,
                                    std::span<const double> b) const {
  if (b.empty() || w.tapered.empty()) return 0.0;
  std::int64_t np0 = 0, hp = 0;
  on_lattice(g.r0, w.unit, np0);
  on_lattice(g.h, w.unit, hp);
  std::int64_t np1 = np0 + std::int64_t(b.size() - 1) * hp;
  if (std::isfinite(w.r_cut))
    np1 = std::min<std::int64_t>(np1, std::int64_t(std::ceil((w.r_cut + w.window) / w.unit)));
  double total = 0.0;
  for (const auto& seg : w.segments) {
    const std::int64_t S = seg.step;
    const std::int64_t coarse = std::max(S, hp);
    const std::int64_t a = seg.start;
    const std::int64_t e = seg.start + std::int64_t(seg.count - 1) * S;
    if (e < np0 || a > np1) continue;
    // Coarse points k = 0..K of this segment; Gregory end weights keep the
    // junctions between segments fourth-order.
    const std::int64_t K = (e - a) / coarse;
    auto weight = [K](std::int64_t k) {
      static constexpr double g[4] = {17.0 / 48, 59.0 / 48, 43.0 / 48, 49.0 / 48};
      if (K < 8) return (k == 0 || k == K) ? 0.5 : 1.0;
      if (k < 4) return g[k];
      if (K - k < 4) return g[K - k];
      return 1.0;
    };
    std::int64_t klo = (std::max(a, np0) - a + coarse - 1) / coarse;
    const std::int64_t khi = (std::min(e, np1) - a) / coarse;
    // Both lattices contain every coarse point once the first one is aligned.
    while (klo <= khi && (a + klo * coarse - np0) % hp) ++klo;
    if (klo > khi) continue;
    const double* pw = w.tapered.data() + seg.offset + (klo * coarse) / S;
    const double* pb = b.data() + (a + klo * coarse - np0) / hp;
    const std::ptrdiff_t dw = coarse / S, db = coarse / hp;
    double s = 0.0;
    for (std::int64_t k = klo; k <= khi; ++k, pw += dw, pb += db) {
      double v = *pw * *pb;
      if (k < 4 || K - k < 4) v *= weight(k);
      s += v;
    }
    total += s * double(coarse) * w.unit;
  }
  return total;
}

}  // namespace rovib
