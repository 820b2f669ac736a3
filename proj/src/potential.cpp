#include "rovib/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "rovib/errors.hpp"
#include "rovib/units.hpp"

namespace rovib {

namespace {

constexpr double kTailContinuity = 1e-8;  // Hartree

bool allowed_tail_power(int n) { return n == 3 || n == 5 || n == 6 || n == 8; }

double tail_sum(std::span<const TailTerm> tail, double r) {
  double s = 0.0;
  for (const auto& t : tail) s += t.coefficient / std::pow(r, t.n);
  return s;
}

// Solves the k x k system from chord differences of the last k+1 samples.
std::vector<TailTerm> fit_auto_terms(std::span<const double> r, std::span<const double> v,
                                     std::span<const TailTerm> known,
                                     std::span<const AutoTail> autos) {
  const std::size_t k = autos.size();
  const std::size_t n = r.size();
  if (n < k + 1) throw ValidationError("not enough samples to fit the tail");
  std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
  for (std::size_t row = 0; row < k; ++row) {
    const std::size_t j1 = n - 1 - row, j0 = j1 - 1;
    // v1 - v0 = -(K1 - K0) - sum_m C_m (r1^-m - r0^-m)
    const double dv = v[j1] - v[j0];
    const double dk = tail_sum(known, r[j1]) - tail_sum(known, r[j0]);
    for (std::size_t col = 0; col < k; ++col) {
      const int m = autos[col].n;
      a[row][col] = std::pow(r[j1], -m) - std::pow(r[j0], -m);
    }
    a[row][k] = -(dv + dk);
  }
  // Gaussian elimination with partial pivoting; k is at most 4.
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < k; ++i)
      if (std::abs(a[i][c]) > std::abs(a[piv][c])) piv = i;
    std::swap(a[c], a[piv]);
    if (a[c][c] == 0.0) throw ValidationError("singular tail fit");
    for (std::size_t i = 0; i < k; ++i) {
      if (i == c) continue;
      const double f = a[i][c] / a[c][c];
      for (std::size_t j = c; j <= k; ++j) a[i][j] -= f * a[c][j];
    }
  }
  std::vector<TailTerm> out;
  for (std::size_t c = 0; c < k; ++c) out.push_back({autos[c].n, a[c][k] / a[c][c]});
  return out;
}

}  // namespace

PotentialCurve PotentialCurve::tabulated(std::string label, int omega, Symmetry symmetry,
                                         std::vector<double> r, std::vector<double> v,
                                         double asymptote, std::vector<TailTerm> tail,
                                         std::vector<AutoTail> auto_tail) {
  if (r.size() != v.size()) throw ValidationError(label + ": R and V column lengths differ");
  if (r.size() < 8) throw ValidationError(label + ": tabulated curves need at least 8 samples");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1]))
      throw ValidationError(label + ": R values must be strictly increasing (at R=" +
                            std::to_string(r[i]) + ")");
  if (r.front() <= 0.0) throw ValidationError(label + ": R must be positive");
  if (tail.empty() && auto_tail.empty())
    throw ValidationError(label + ": missing long-range tail");
  for (const auto& t : tail)
    if (!allowed_tail_power(t.n)) throw ValidationError(label + ": tail power must be 3, 5, 6 or 8");
  for (const auto& t : auto_tail)
    if (!allowed_tail_power(t.n)) throw ValidationError(label + ": tail power must be 3, 5, 6 or 8");

  if (!auto_tail.empty()) {
    auto fitted = fit_auto_terms(r, v, tail, auto_tail);
    tail.insert(tail.end(), fitted.begin(), fitted.end());
  }
  std::sort(tail.begin(), tail.end(), [](const TailTerm& a, const TailTerm& b) { return a.n < b.n; });

  PotentialCurve c;
  c.label_ = std::move(label);
  c.omega_ = omega;
  c.symmetry_ = symmetry;
  c.asymptote_ = asymptote;
  c.tail_ = std::move(tail);
  c.r_ = std::move(r);
  c.v_ = std::move(v);
  c.r_tail_ = c.r_.back();
  c.spline_ = CubicSpline(c.r_, c.v_);

  const double mismatch = std::abs(c.tail_value(c.r_tail_) - c.v_.back());
  if (mismatch > kTailContinuity)
    throw ValidationError(c.label_ + ": tail does not join the table at R=" +
                          std::to_string(c.r_tail_) + " (mismatch " + std::to_string(mismatch) +
                          " Hartree)");

  // Only one well below the asymptote is supported.
  int minima = 0;
  for (std::size_t i = 1; i + 1 < c.v_.size(); ++i)
    if (c.v_[i] < c.v_[i - 1] && c.v_[i] <= c.v_[i + 1] && c.v_[i] < asymptote) ++minima;
  if (minima > 1) throw ValidationError(c.label_ + ": more than one local minimum below the asymptote");

  c.locate_well();
  return c;
}

PotentialCurve PotentialCurve::morse(std::string label, int omega, Symmetry symmetry, double depth,
                                     double a, double r_e, double asymptote) {
  if (!(depth > 0.0) || !(a > 0.0) || !(r_e > 0.0))
    throw InvalidParameter("Morse parameters D_e, a, R_e must be positive");
  PotentialCurve c;
  c.label_ = std::move(label);
  c.omega_ = omega;
  c.symmetry_ = symmetry;
  c.asymptote_ = asymptote;
  c.analytic_ = true;
  c.morse_depth_ = depth;
  c.morse_a_ = a;
  c.morse_re_ = r_e;
  c.r_tail_ = std::numeric_limits<double>::infinity();
  c.well_ = Well{r_e, asymptote - depth};
  return c;
}

PotentialCurve make_morse(double depth, double a, double r_e, double asymptote, std::string label) {
  return PotentialCurve::morse(std::move(label), 0, Symmetry::Gerade, depth, a, r_e, asymptote);
}

double PotentialCurve::tail_value(double r) const { return asymptote_ - tail_sum(tail_, r); }

double PotentialCurve::operator()(double r) const {
  if (analytic_) {
    const double x = 1.0 - std::exp(-morse_a_ * (r - morse_re_));
    return asymptote_ + morse_depth_ * x * x - morse_depth_;
  }
  if (r > r_tail_) return tail_value(r);
  if (r < r_.front()) {
    const double slope = (v_[1] - v_[0]) / (r_[1] - r_[0]);
    return v_[0] + slope * (r - r_[0]);
  }
  return spline_(r);
}

void PotentialCurve::locate_well() {
  well_.reset();
  if (analytic_) {
    well_ = Well{morse_re_, asymptote_ - morse_depth_};
    return;
  }
  const auto it = std::min_element(v_.begin(), v_.end());
  const std::size_t i = std::size_t(it - v_.begin());
  if (!(*it < asymptote_)) return;
  // Golden-section refinement on the spline around the lowest sample.
  double lo = r_[i == 0 ? 0 : i - 1];
  double hi = r_[std::min(i + 1, r_.size() - 1)];
  constexpr double g = 0.6180339887498949;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = (*this)(x1), f2 = (*this)(x2);
  for (int iter = 0; iter < 200 && hi - lo > 1e-12 * hi; ++iter) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = (*this)(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = (*this)(x2);
    }
  }
  const double re = 0.5 * (lo + hi);
  const double vmin = std::min((*this)(re), *it);
  well_ = Well{(*this)(re) <= *it ? re : r_[i], vmin};
}

PotentialCurve PotentialCurve::with_asymptote(double asymptote) const {
  PotentialCurve c = *this;
  const double shift = asymptote - asymptote_;
  c.asymptote_ = asymptote;
  if (!analytic_) {
    for (double& x : c.v_) x += shift;
    c.spline_ = CubicSpline(c.r_, c.v_);
  }
  c.locate_well();
  return c;
}

DipoleFunction::DipoleFunction(std::string bra, std::string ket, std::vector<double> r,
                               std::vector<double> d, double d_infinity)
    : bra_(std::move(bra)), ket_(std::move(ket)), r_(std::move(r)), d_(std::move(d)),
      d_inf_(d_infinity) {
  if (r_.size() != d_.size() || r_.size() < 2)
    throw ValidationError("dipole " + bra_ + "-" + ket_ + ": need >= 2 (R, d) samples");
  const double last = d_.back();
  const bool ok = d_inf_ == 0.0 ? std::abs(last) <= 1e-12
                                : std::abs(last - d_inf_) <= 0.05 * std::abs(d_inf_);
  if (!ok)
    throw ValidationError("dipole " + bra_ + "-" + ket_ +
                          ": last sample deviates from d_infinity by more than 5%");
  spline_ = CubicSpline(r_, d_);
}

DipoleFunction DipoleFunction::constant(std::string bra, std::string ket, double d) {
  return DipoleFunction(std::move(bra), std::move(ket), {1.0, 2.0}, {d, d}, d);
}

double DipoleFunction::operator()(double r) const {
  if (r <= r_.front()) return d_.front();
  if (r > r_.back()) return d_inf_;
  return spline_(r);
}

const PotentialCurve& MoleculeSystem::curve(std::string_view label) const {
  if (ground.label() == label) return ground;
  for (const auto& c : excited)
    if (c.label() == label) return c;
  throw InvalidParameter("unknown channel '" + std::string(label) + "'");
}

bool MoleculeSystem::has_curve(std::string_view label) const {
  if (ground.label() == label) return true;
  return std::any_of(excited.begin(), excited.end(),
                     [&](const PotentialCurve& c) { return c.label() == label; });
}

const DipoleFunction* MoleculeSystem::dipole(std::string_view a, std::string_view b) const {
  for (const auto& d : dipoles)
    if (d.connects(a, b)) return &d;
  return nullptr;
}

std::vector<const PotentialCurve*> MoleculeSystem::channels() const {
  std::vector<const PotentialCurve*> out{&ground};
  for (const auto& c : excited) out.push_back(&c);
  return out;
}

MoleculeSystem MoleculeSystem::with_reduced_mass(double mu) const {
  MoleculeSystem s = *this;
  s.reduced_mass = mu;
  return s;
}

void MoleculeSystem::validate() const {
  if (!(reduced_mass > 0.0)) throw ValidationError("reduced mass must be positive");
  for (const auto& d : dipoles) {
    if (!has_curve(d.bra())) throw ValidationError("dipole references unknown channel '" + d.bra() + "'");
    if (!has_curve(d.ket())) throw ValidationError("dipole references unknown channel '" + d.ket() + "'");
  }
  std::map<std::string, int> seen;
  for (const auto* c : channels())
    if (++seen[c->label()] > 1) throw ValidationError("duplicate channel '" + c->label() + "'");
}

// ---------------------------------------------------------------------------
// Structured-text loader

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

struct Section {
  std::string kind;                 // system | curve | dipole
  std::vector<std::string> names;   // label parts
  std::map<std::string, std::string> keys;
  std::vector<std::pair<double, double>> rows;
  int line = 0;
};

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw ParseError("line " + std::to_string(line) + ": " + msg);
}

std::vector<std::pair<double, double>> read_table_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ParseError("cannot open table file " + p.string());
  std::vector<std::pair<double, double>> rows;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ss(line);
    double a, b;
    if (!(ss >> a)) continue;
    if (!(ss >> b)) throw ParseError(p.string() + ":" + std::to_string(n) + ": expected two columns");
    rows.emplace_back(a, b);
  }
  return rows;
}

double key_double(const Section& s, const std::string& key) {
  auto it = s.keys.find(key);
  if (it == s.keys.end()) parse_fail(s.line, "missing key '" + key + "'");
  double v;
  if (!parse_double(it->second, v)) parse_fail(s.line, "key '" + key + "' is not a number");
  return v;
}

std::vector<std::pair<double, double>> section_rows(const Section& s,
                                                    const std::filesystem::path& base) {
  auto rows = s.rows;
  if (auto it = s.keys.find("table_file"); it != s.keys.end()) {
    if (!rows.empty()) parse_fail(s.line, "both inline rows and table_file given");
    std::filesystem::path p(it->second);
    rows = read_table_file(p.is_absolute() ? p : base / p);
  }
  return rows;
}

PotentialCurve build_curve(const Section& s, const std::filesystem::path& base) {
  static const std::vector<std::string> allowed = {"omega", "symmetry", "asymptote_cm1", "form",
                                                   "De_cm1", "a", "Re", "table_file",
                                                   "C3", "C5", "C6", "C8"};
  for (const auto& [k, v] : s.keys)
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      parse_fail(s.line, "unknown key '" + k + "' in curve section");
  const std::string& label = s.names.at(0);
  int omega = 0;
  if (s.keys.count("omega")) omega = int(key_double(s, "omega"));
  Symmetry sym = Symmetry::Gerade;
  if (auto it = s.keys.find("symmetry"); it != s.keys.end()) {
    if (it->second == "g" || it->second == "gerade") sym = Symmetry::Gerade;
    else if (it->second == "u" || it->second == "ungerade") sym = Symmetry::Ungerade;
    else parse_fail(s.line, "symmetry must be g or u");
  }
  const double asym = s.keys.count("asymptote_cm1") ? cm1_to_hartree(key_double(s, "asymptote_cm1")) : 0.0;
  const std::string form = s.keys.count("form") ? s.keys.at("form") : "table";
  if (form == "morse") {
    return PotentialCurve::morse(label, omega, sym, cm1_to_hartree(key_double(s, "De_cm1")),
                                 key_double(s, "a"), key_double(s, "Re"), asym);
  }
  if (form != "table") parse_fail(s.line, "form must be table or morse");

  std::vector<TailTerm> tail;
  std::vector<AutoTail> autos;
  for (int n : {3, 5, 6, 8}) {
    const std::string key = "C" + std::to_string(n);
    auto it = s.keys.find(key);
    if (it == s.keys.end()) continue;
    if (it->second == "auto") {
      autos.push_back({n});
    } else {
      double c;
      if (!parse_double(it->second, c)) parse_fail(s.line, key + " must be a number or 'auto'");
      tail.push_back({n, c});
    }
  }
  std::vector<double> r, v;
  for (const auto& [x, y] : section_rows(s, base)) {
    r.push_back(x);
    v.push_back(cm1_to_hartree(y));
  }
  return PotentialCurve::tabulated(label, omega, sym, std::move(r), std::move(v), asym,
                                   std::move(tail), std::move(autos));
}

DipoleFunction build_dipole(const Section& s, const std::filesystem::path& base) {
  for (const auto& [k, v] : s.keys)
    if (k != "d_infinity_ea0" && k != "table_file")
      parse_fail(s.line, "unknown key '" + k + "' in dipole section");
  std::vector<double> r, d;
  for (const auto& [x, y] : section_rows(s, base)) {
    r.push_back(x);
    d.push_back(y);
  }
  const double dinf = key_double(s, "d_infinity_ea0");
  return DipoleFunction(s.names.at(0), s.names.at(1), std::move(r), std::move(d), dinf);
}

}  // namespace

MoleculeSystem parse_system(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<Section> sections;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto h = raw.find('#'); h != std::string::npos) raw.resize(h);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') parse_fail(lineno, "unterminated section header");
      const std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
      std::vector<std::string> parts;
      std::size_t start = 0;
      while (true) {
        const auto dot = name.find('.', start);
        parts.push_back(name.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
      }
      Section s;
      s.kind = parts.front();
      s.names.assign(parts.begin() + 1, parts.end());
      s.line = lineno;
      const bool ok = (s.kind == "system" && s.names.empty()) ||
                      (s.kind == "curve" && s.names.size() == 1 && !s.names[0].empty()) ||
                      (s.kind == "dipole" && s.names.size() == 2 && !s.names[0].empty() &&
                       !s.names[1].empty());
      if (!ok) parse_fail(lineno, "unknown section [" + name + "]");
      sections.push_back(std::move(s));
      continue;
    }
    if (sections.empty()) parse_fail(lineno, "content before the first section");
    Section& cur = sections.back();
    if (auto eq = line.find('='); eq != std::string::npos) {
      const std::string key = trim(std::string_view(line).substr(0, eq));
      const std::string val = trim(std::string_view(line).substr(eq + 1));
      if (key.empty() || val.empty()) parse_fail(lineno, "malformed key = value");
      if (!cur.keys.emplace(key, val).second) parse_fail(lineno, "duplicate key '" + key + "'");
      continue;
    }
    std::istringstream ss(line);
    std::string a, b, extra;
    ss >> a >> b;
    double x, y;
    if (!parse_double(a, x) || !parse_double(b, y) || (ss >> extra))
      parse_fail(lineno, "expected 'key = value' or two numeric columns");
    if (cur.kind == "system") parse_fail(lineno, "table rows are not allowed in [system]");
    cur.rows.emplace_back(x, y);
  }

  MoleculeSystem sys;
  sys.reduced_mass = kSr88ReducedMassAmu * K::amu_to_electron_mass;
  std::string ground_label;
  std::vector<PotentialCurve> curves;
  for (const auto& s : sections) {
    if (s.kind == "system") {
      for (const auto& [k, v] : s.keys)
        if (k != "reduced_mass_amu" && k != "ground")
          parse_fail(s.line, "unknown key '" + k + "' in [system]");
      if (s.keys.count("reduced_mass_amu"))
        sys.reduced_mass = key_double(s, "reduced_mass_amu") * K::amu_to_electron_mass;
      if (s.keys.count("ground")) ground_label = s.keys.at("ground");
    } else if (s.kind == "curve") {
      curves.push_back(build_curve(s, base_dir));
    } else {
      sys.dipoles.push_back(build_dipole(s, base_dir));
    }
  }
  if (curves.empty()) throw ValidationError("no [curve.*] sections");
  if (ground_label.empty()) ground_label = curves.front().label();
  bool found = false;
  for (auto& c : curves) {
    if (!found && c.label() == ground_label) {
      sys.ground = std::move(c);
      found = true;
    } else {
      sys.excited.push_back(std::move(c));
    }
  }
  if (!found) throw ValidationError("ground channel '" + ground_label + "' not defined");
  sys.validate();
  return sys;
}

MoleculeSystem load_system(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_system(buf.str(), path.parent_path());
}

}  // namespace rovib
