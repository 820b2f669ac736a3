#include "rovib/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <list>

#include "rovib/errors.hpp"
#include "rovib/spline.hpp"

namespace rovib {

namespace {

bool is_integer(double x, double tol = 1e-6) { return std::abs(x - std::round(x)) <= tol; }

}  // namespace

double grid_overlap(const RadialGrid& ga, std::span<const double> a, const RadialGrid& gb,
                    std::span<const double> b) {
  if (a.empty() || b.empty()) return 0.0;
  const bool a_coarse = ga.h >= gb.h;
  const RadialGrid& gc = a_coarse ? ga : gb;
  const RadialGrid& gf = a_coarse ? gb : ga;
  std::span<const double> vc = a_coarse ? a : b;
  std::span<const double> vf = a_coarse ? b : a;

  const double lo = std::max(gc.r0, gf.r0);
  const double hi = std::min(gc.r(vc.size() - 1), gf.r(vf.size() - 1));
  if (!(hi > lo)) return 0.0;

  const double ratio = gc.h / gf.h;
  const double offset = (gc.r0 - gf.r0) / gf.h;
  if (is_integer(ratio) && is_integer(offset)) {
    const long stride = std::lround(ratio);
    const long off = std::lround(offset);
    // Coarse indices whose fine partner exists.
    long i0 = long(std::ceil((lo - gc.r0) / gc.h - 1e-9));
    long i1 = long(std::floor((hi - gc.r0) / gc.h + 1e-9));
    i0 = std::max(i0, 0L);
    i1 = std::min(i1, long(vc.size()) - 1);
    double s = 0.0;
    for (long i = i0; i <= i1; ++i) {
      const long j = off + i * stride;
      if (j < 0 || j >= long(vf.size())) continue;
      const double wgt = (i == i0 || i == i1) ? 0.5 : 1.0;
      s += wgt * vc[std::size_t(i)] * vf[std::size_t(j)];
    }
    return s * gc.h;
  }
  // Non-nested grids: resample the finer function with a spline.
  std::vector<double> xf(vf.size());
  for (std::size_t j = 0; j < vf.size(); ++j) xf[j] = gf.r(j);
  CubicSpline sp(xf, vf);
  long i0 = std::max(0L, long(std::ceil((lo - gc.r0) / gc.h)));
  long i1 = std::min(long(vc.size()) - 1, long(std::floor((hi - gc.r0) / gc.h)));
  double s = 0.0;
  for (long i = i0; i <= i1; ++i) {
    const double wgt = (i == i0 || i == i1) ? 0.5 : 1.0;
    s += wgt * vc[std::size_t(i)] * sp(gc.r(std::size_t(i)));
  }
  return s * gc.h;
}

double overlap(const RadialWavefunction& a, const RadialWavefunction& b) {
  return grid_overlap(a.grid, a.psi, b.grid, b.psi);
}

std::vector<double> weighted_samples(const RadialWavefunction& w, const DipoleFunction& d) {
  std::vector<double> out(w.psi.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = w.psi[i] * d(w.grid.r(i));
  return out;
}

double overlap(const RadialWavefunction& a, const RadialWavefunction& b, const DipoleFunction& d) {
  // Weight the coarser function so the dipole is sampled once per used point.
  if (a.grid.h >= b.grid.h) return grid_overlap(a.grid, weighted_samples(a, d), b.grid, b.psi);
  return grid_overlap(a.grid, a.psi, b.grid, weighted_samples(b, d));
}

AdaptiveResult adaptive_gauss(const std::function<std::vector<double>(double)>& f,
                              std::vector<double> edges, double tol, std::size_t max_evals) {
  using GL = boost::math::quadrature::gauss<double, 10>;
  if (edges.size() < 2) throw InvalidParameter("adaptive_gauss needs at least one panel");
  std::sort(edges.begin(), edges.end());

  struct Rule {
    double a, b;
    std::vector<QuadNode> nodes;
    std::vector<std::vector<double>> values;
    std::vector<double> sum;
  };
  AdaptiveResult out;
  auto apply = [&](double a, double b) {
    Rule r{a, b, {}, {}, {}};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const auto& x = GL::abscissa();
    const auto& w = GL::weights();
    for (std::size_t k = 0; k < x.size(); ++k) {
      for (int sgn : {-1, 1}) {
        if (x[k] == 0.0 && sgn > 0) continue;
        const double xx = c + sgn * h * x[k];
        r.nodes.push_back({xx, h * w[k]});
        r.values.push_back(f(xx));
        ++out.evaluations;
      }
    }
    r.sum.assign(r.values.front().size(), 0.0);
    for (std::size_t k = 0; k < r.nodes.size(); ++k)
      for (std::size_t c2 = 0; c2 < r.sum.size(); ++c2) r.sum[c2] += r.nodes[k].w * r.values[k][c2];
    return r;
  };
  struct Panel {
    Rule whole, left, right;
    double err = 0.0;
  };
  auto split = [&](Rule whole) {
    const double m = 0.5 * (whole.a + whole.b);
    Panel p;
    p.left = apply(whole.a, m);
    p.right = apply(m, whole.b);
    p.whole = std::move(whole);
    return p;
  };

  std::list<Panel> panels;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i], b = edges[i + 1];
    if (b > a) panels.push_back(split(apply(a, b)));
  }
  if (panels.empty()) throw InvalidParameter("adaptive_gauss: empty integration range");
  const std::size_t dim = panels.front().whole.sum.size();

  auto totals = [&]() {
    std::vector<double> t(dim, 0.0);
    for (const auto& p : panels)
      for (std::size_t c = 0; c < dim; ++c) t[c] += p.left.sum[c] + p.right.sum[c];
    return t;
  };
  auto panel_error = [&](const Panel& p, const std::vector<double>& tot, double scale_floor) {
    double e = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double d = std::abs(p.whole.sum[c] - p.left.sum[c] - p.right.sum[c]);
      e = std::max(e, d / (std::abs(tot[c]) + scale_floor));
    }
    return e;
  };

  while (true) {
    const auto tot = totals();
    double mx = 0.0;
    for (double t : tot) mx = std::max(mx, std::abs(t));
    const double floor_scale = 1e-8 * mx + 1e-300;
    double err_sum = 0.0;
    Panel* worst = nullptr;
    for (auto& p : panels) {
      p.err = panel_error(p, tot, floor_scale);
      err_sum += p.err;
      if (!worst || p.err > worst->err) worst = &p;
    }
    if (err_sum <= tol) {
      out.converged = true;
      break;
    }
    if (out.evaluations + 40 > max_evals) break;
    // Split the worst panel; its halves become whole rules of two new panels.
    auto it = std::find_if(panels.begin(), panels.end(), [&](const Panel& p) { return &p == worst; });
    Panel pl = split(std::move(it->left));
    Panel pr = split(std::move(it->right));
    it = panels.erase(it);
    panels.insert(it, std::move(pl));
    panels.insert(it, std::move(pr));
  }

  // Report the refined halves as the final rule.
  for (const auto& p : panels)
    for (const Rule* r : {&p.left, &p.right})
      for (std::size_t k = 0; k < r->nodes.size(); ++k) {
        out.nodes.push_back(r->nodes[k]);
        out.values.push_back(r->values[k]);
      }
  std::vector<std::size_t> idx(out.nodes.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return out.nodes[i].x < out.nodes[j].x; });
  AdaptiveResult sorted;
  sorted.evaluations = out.evaluations;
  sorted.converged = out.converged;
  for (auto i : idx) {
    sorted.nodes.push_back(out.nodes[i]);
    sorted.values.push_back(std::move(out.values[i]));
  }
  sorted.integral.assign(dim, 0.0);
  for (std::size_t k = 0; k < sorted.nodes.size(); ++k)
    for (std::size_t c = 0; c < dim; ++c) sorted.integral[c] += sorted.nodes[k].w * sorted.values[k][c];
  return sorted;
}

}  // namespace rovib
