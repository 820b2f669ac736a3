#pragma once

namespace rovib {

/// Wigner 3j symbol. Arguments may be integers or half-integers; returns 0
/// when the triangle or projection-sum rules fail. Throws
/// InvalidQuantumNumbers for |m| > j, negative j, or mixed integer parity.
double wigner3j(double j1, double j2, double j3, double m1, double m2, double m3);

/// sqrt((2J'+1)(2J+1)) (-1)^(eps - Omega' + M) (1 J J'; -eps -M M') (1 J J'; -Omega' 0 Omega').
double angular_factor(int J, int M, int Jp, int Mp, int omega_p, int eps);

/// Sum over J in {J'-1, J', J'+1}, M and eps of angular_factor^2. Equal to 1.
double line_strength_sum(int Jp, int Mp, int omega_p);

/// Rotational branch weight (2J+1) (1 J J'; -Omega' 0 Omega')^2: the share of
/// the line strength of an upper J' level that goes to ground J.
double rotational_weight(int J, int Jp, int omega_p);

}  // namespace rovib
