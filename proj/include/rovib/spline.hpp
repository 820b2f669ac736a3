#pragma once

#include <span>
#include <vector>

namespace rovib {

/// Natural cubic spline through (x_i, y_i), x strictly increasing.
/// Evaluation is O(1) when the abscissae are uniformly spaced.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::span<const double> x, std::span<const double> y);

  double operator()(double x) const;
  double derivative(double x) const;

  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }
  bool empty() const { return x_.empty(); }
  std::span<const double> x() const { return x_; }
  std::span<const double> y() const { return y_; }

 private:
  std::size_t interval(double x) const;

  std::vector<double> x_, y_, m_;
  bool uniform_ = false;
  double dx_ = 0.0;
};

}  // namespace rovib
