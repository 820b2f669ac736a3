#include "rovib/spline.hpp"

#include <algorithm>
#include <cmath>

#include "rovib/errors.hpp"

namespace rovib {

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), m_(x.size(), 0.0) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw ValidationError("spline needs >= 2 matching samples");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw ValidationError("spline abscissae must increase strictly");

  dx_ = (x_.back() - x_.front()) / double(n - 1);
  uniform_ = true;
  for (std::size_t i = 1; i < n && uniform_; ++i)
    uniform_ = std::abs((x_[i] - x_[i - 1]) - dx_) <= 1e-10 * dx_;

  if (n == 2) return;
  // Tridiagonal solve for second derivatives, natural end conditions.
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1];
    const double h1 = x_[i + 1] - x_[i];
    const double a = h0 / 6.0, b = (h0 + h1) / 3.0, cc = h1 / 6.0;
    const double rhs = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    const double denom = b - a * c[i - 1];
    c[i] = cc / denom;
    d[i] = (rhs - a * d[i - 1]) / denom;
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m_[i] = d[i] - c[i] * m_[i + 1];
  }
}

std::size_t CubicSpline::interval(double x) const {
  const std::size_t n = x_.size();
  std::size_t i;
  if (uniform_) {
    const double t = (x - x_.front()) / dx_;
    i = t <= 0.0 ? 0 : std::min<std::size_t>(static_cast<std::size_t>(t), n - 2);
    // Guard against rounding at interval edges.
    if (i + 1 < n - 1 && x >= x_[i + 1]) ++i;
    if (i > 0 && x < x_[i]) --i;
  } else {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    i = it == x_.begin() ? 0 : std::min<std::size_t>(std::size_t(it - x_.begin()) - 1, n - 2);
  }
  return i;
}

double CubicSpline::operator()(double x) const {
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double x) const {
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h +
         (-(3.0 * a * a - 1.0) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
}

}  // namespace rovib
