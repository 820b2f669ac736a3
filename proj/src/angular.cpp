#include "rovib/angular.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "rovib/errors.hpp"

namespace rovib {

namespace {

// Twice the argument, validated to be a (half-)integer.
int twice(double x) {
  const double t = 2.0 * x;
  const double r = std::round(t);
  if (std::abs(t - r) > 1e-9) throw InvalidQuantumNumbers("quantum numbers must be (half-)integers");
  return int(r);
}

double log_fact(int n) { return std::lgamma(double(n) + 1.0); }

}  // namespace

double wigner3j(double j1d, double j2d, double j3d, double m1d, double m2d, double m3d) {
  const int j1 = twice(j1d), j2 = twice(j2d), j3 = twice(j3d);
  const int m1 = twice(m1d), m2 = twice(m2d), m3 = twice(m3d);
  if (j1 < 0 || j2 < 0 || j3 < 0) throw InvalidQuantumNumbers("negative j");
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3)
    throw InvalidQuantumNumbers("|m| exceeds j");
  if ((j1 + m1) % 2 || (j2 + m2) % 2 || (j3 + m3) % 2)
    throw InvalidQuantumNumbers("j and m must both be integer or both half-integer");
  if (m1 + m2 + m3 != 0) return 0.0;
  if (j3 > j1 + j2 || j3 < std::abs(j1 - j2)) return 0.0;
  if ((j1 + j2 + j3) % 2) return 0.0;  // j1 + j2 + j3 must be an integer

  // Everything below in ordinary (not doubled) integers.
  const int a = (j1 + j2 - j3) / 2, b = (j1 - j2 + j3) / 2, c = (-j1 + j2 + j3) / 2;
  const int J = (j1 + j2 + j3) / 2;
  const int p1 = (j1 + m1) / 2, q1 = (j1 - m1) / 2;
  const int p2 = (j2 + m2) / 2, q2 = (j2 - m2) / 2;
  const int p3 = (j3 + m3) / 2, q3 = (j3 - m3) / 2;

  const double log_pref = 0.5 * (log_fact(a) + log_fact(b) + log_fact(c) - log_fact(J + 1) +
                                 log_fact(p1) + log_fact(q1) + log_fact(p2) + log_fact(q2) +
                                 log_fact(p3) + log_fact(q3));
  // Racah sum over k with all factorial arguments non-negative.
  const int t1 = (j3 - j2 + m1) / 2;   // k + t1 >= 0
  const int t2 = (j3 - j1 - m2) / 2;   // k + t2 >= 0
  const int kmin = std::max({0, -t1, -t2});
  const int kmax = std::min({a, q1, p2});
  // Neumaier summation keeps the alternating series accurate.
  double sum = 0.0, comp = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    const double lt = log_pref - (log_fact(k) + log_fact(a - k) + log_fact(q1 - k) +
                                  log_fact(p2 - k) + log_fact(t1 + k) + log_fact(t2 + k));
    const double term = (k % 2 ? -1.0 : 1.0) * std::exp(lt);
    const double s = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - s) + term : (term - s) + sum;
    sum = s;
  }
  const int phase = (j1 - j2 - m3) / 2;
  return (std::abs(phase) % 2 ? -1.0 : 1.0) * (sum + comp);
}

double angular_factor(int J, int M, int Jp, int Mp, int omega_p, int eps) {
  if (J < 0 || Jp < 0 || std::abs(M) > J || std::abs(Mp) > Jp || std::abs(eps) > 1 ||
      omega_p < 0 || omega_p > Jp)
    throw InvalidQuantumNumbers("invalid (J, M, J', M', Omega', eps)");
  if (Mp != M + eps) return 0.0;
  const double w1 = wigner3j(1, J, Jp, -eps, -M, Mp);
  if (w1 == 0.0) return 0.0;
  const double w2 = wigner3j(1, J, Jp, -omega_p, 0, omega_p);
  const int ph = eps - omega_p + M;
  return std::sqrt(double((2 * Jp + 1) * (2 * J + 1))) * (std::abs(ph) % 2 ? -1.0 : 1.0) * w1 * w2;
}

double rotational_weight(int J, int Jp, int omega_p) {
  if (J < 0 || Jp < 0 || omega_p < 0 || omega_p > Jp)
    throw InvalidQuantumNumbers("invalid (J, J', Omega')");
  if (std::abs(J - Jp) > 1) return 0.0;
  const double w = wigner3j(1, J, Jp, -omega_p, 0, omega_p);
  return double(2 * J + 1) * w * w;
}

double line_strength_sum(int Jp, int Mp, int omega_p) {
  double s = 0.0;
  for (int J = std::max(0, Jp - 1); J <= Jp + 1; ++J)
    for (int M = -J; M <= J; ++M)
      for (int eps = -1; eps <= 1; ++eps) {
        const double f = angular_factor(J, M, Jp, Mp, omega_p, eps);
        s += f * f;
      }
  return s;
}

}  // namespace rovib
