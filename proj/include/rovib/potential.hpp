#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rovib/spline.hpp"

namespace rovib {

enum class Symmetry { Gerade, Ungerade };

/// One dispersion term C_n / R^n of the long-range tail (Hartree a0^n).
struct TailTerm {
  int n = 6;
  double coefficient = 0.0;
};

/// Marks a tail power whose coefficient should be fitted from the table.
struct AutoTail {
  int n = 6;
};

/// Adiabatic potential-energy curve in Hartree atomic units.
///
/// Tabulated curves use a natural cubic spline between the first and last
/// sample, a straight line through the two innermost samples below the
/// table, and asymptote - sum C_n / R^n beyond the last sample (r_tail).
/// Morse curves are evaluated analytically everywhere.
class PotentialCurve {
 public:
  struct Well {
    double r_e;
    double v_min;
  };

  static PotentialCurve tabulated(std::string label, int omega, Symmetry symmetry,
                                  std::vector<double> r, std::vector<double> v, double asymptote,
                                  std::vector<TailTerm> tail, std::vector<AutoTail> auto_tail = {});

  static PotentialCurve morse(std::string label, int omega, Symmetry symmetry, double depth,
                              double a, double r_e, double asymptote);

  double operator()(double r) const;
  double tail_value(double r) const;

  const std::string& label() const { return label_; }
  int omega() const { return omega_; }
  Symmetry symmetry() const { return symmetry_; }
  double asymptote() const { return asymptote_; }
  std::span<const TailTerm> tail() const { return tail_; }
  /// Switch radius to the analytic tail; +inf for analytic curves.
  double r_tail() const { return r_tail_; }
  bool is_analytic() const { return analytic_; }
  std::span<const double> sample_r() const { return r_; }
  std::span<const double> sample_v() const { return v_; }

  /// Global minimum below the asymptote, if any.
  std::optional<Well> well() const { return well_; }
  double depth() const { return well_ ? asymptote_ - well_->v_min : 0.0; }

  /// Same curve shifted so that its asymptote sits at `asymptote`.
  PotentialCurve with_asymptote(double asymptote) const;

  PotentialCurve() = default;

 private:
  void locate_well();

  std::string label_;
  int omega_ = 0;
  Symmetry symmetry_ = Symmetry::Gerade;
  double asymptote_ = 0.0;
  std::vector<TailTerm> tail_;
  double r_tail_ = 0.0;
  std::vector<double> r_, v_;
  CubicSpline spline_;
  bool analytic_ = false;
  double morse_depth_ = 0.0, morse_a_ = 0.0, morse_re_ = 0.0;
  std::optional<Well> well_;
};

/// Analytic Morse curve V = asymptote + D_e (1 - exp(-a (R - R_e)))^2 - D_e.
PotentialCurve make_morse(double depth, double a, double r_e, double asymptote,
                          std::string label = "morse");

/// Electronic transition dipole d(R) between two channels, in e a0.
class DipoleFunction {
 public:
  DipoleFunction(std::string bra, std::string ket, std::vector<double> r, std::vector<double> d,
                 double d_infinity);
  static DipoleFunction constant(std::string bra, std::string ket, double d);

  double operator()(double r) const;

  const std::string& bra() const { return bra_; }
  const std::string& ket() const { return ket_; }
  double d_infinity() const { return d_inf_; }
  std::span<const double> sample_r() const { return r_; }
  std::span<const double> sample_d() const { return d_; }
  bool connects(std::string_view a, std::string_view b) const {
    return (bra_ == a && ket_ == b) || (bra_ == b && ket_ == a);
  }

 private:
  std::string bra_, ket_;
  std::vector<double> r_, d_;
  double d_inf_;
  CubicSpline spline_;
};

/// Reduced mass of 88Sr2 in amu (half the 88Sr isotope mass).
inline constexpr double kSr88ReducedMassAmu = 87.9056 / 2.0;

struct MoleculeSystem {
  double reduced_mass = 0.0;  // electron masses
  PotentialCurve ground;
  std::vector<PotentialCurve> excited;
  std::vector<DipoleFunction> dipoles;

  const PotentialCurve& curve(std::string_view label) const;
  bool has_curve(std::string_view label) const;
  const DipoleFunction* dipole(std::string_view a, std::string_view b) const;
  std::vector<const PotentialCurve*> channels() const;
  MoleculeSystem with_reduced_mass(double mu) const;

  /// Throws ValidationError on a dangling dipole reference or mu <= 0.
  void validate() const;
};

/// Parses the structured-text system description. Relative table_file
/// references resolve against `base_dir`.
MoleculeSystem parse_system(std::string_view text, const std::filesystem::path& base_dir = ".");
MoleculeSystem load_system(const std::filesystem::path& path);

}  // namespace rovib
