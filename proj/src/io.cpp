#include "rovib/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iterator>
#include <sstream>

#include "rovib/errors.hpp"
#include "rovib/units.hpp"

namespace rovib {

using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double x = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || end != text.data() + text.size())
    throw ParseError("not a number: '" + std::string(text) + "'");
  return x;
}

void CsvTable::add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }

namespace {

void put_cell(std::ostream& os, const std::string& c) {
  if (c.find_first_of(",\"\n\r") == std::string::npos) {
    os << c;
    return;
  }
  os << '"';
  for (char ch : c) {
    if (ch == '"') os << '"';
    os << ch;
  }
  os << '"';
}

void put_row(std::ostream& os, const std::vector<std::string>& r) {
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i) os << ',';
    put_cell(os, r[i]);
  }
  os << '\n';
}

}  // namespace

void write_csv(std::ostream& os, const CsvTable& t) {
  put_row(os, t.header);
  for (const auto& r : t.rows) put_row(os, r);
}

std::string CsvTable::str() const {
  std::ostringstream os;
  write_csv(os, *this);
  return os.str();
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      rec.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !cell.empty()) {
        rec.push_back(std::move(cell));
        records.push_back(std::move(rec));
      }
      rec.clear();
      cell.clear();
      any = false;
    } else {
      cell += ch;
      any = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted CSV cell");
  if (any || !cell.empty()) {
    rec.push_back(std::move(cell));
    records.push_back(std::move(rec));
  }
  CsvTable t;
  if (records.empty()) return t;
  t.header = std::move(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) t.rows.push_back(std::move(records[i]));
  return t;
}

CsvTable read_csv(std::istream& is) {
  std::string s((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return parse_csv(s);
}

CsvTable levels_csv(const std::vector<RovibLevel>& levels, double asymptote, bool from_top) {
  CsvTable t;
  t.header = {"channel", "v", "J", "energy_cm-1", "binding_cm-1"};
  for (const auto& l : levels)
    t.add_row({l.channel, std::to_string(from_top ? l.v_from_top : l.v), std::to_string(l.J),
               format_double(hartree_to_cm1(l.energy - asymptote)),
               format_double(hartree_to_cm1(l.binding_energy))});
  return t;
}

CsvTable matrix_csv(const LevelMatrix& m) {
  CsvTable t;
  t.header.push_back(m.quantity);
  for (const auto& c : m.cols) t.header.push_back(level_label(c));
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    std::vector<std::string> r{level_label(m.rows[i])};
    for (double x : m.values[i]) r.push_back(format_double(x));
    t.add_row(std::move(r));
  }
  return t;
}

CsvTable pathways_csv(const std::vector<RamanPathway>& paths) {
  CsvTable t;
  t.header = {"intermediate", "binding_cm-1", "d_initial_ea0", "d_final_ea0", "product_ea0^2",
              "detuning_initial_cm-1", "detuning_final_cm-1"};
  for (const auto& p : paths)
    t.add_row({level_label(p.intermediate), format_double(hartree_to_cm1(p.intermediate.binding_energy)),
               format_double(p.d_initial), format_double(p.d_final), format_double(p.product),
               format_double(p.detuning_initial), format_double(p.detuning_final)});
  return t;
}

CsvTable spectrum_csv(const std::vector<PolarizabilitySpectrum>& spectra,
                      const std::vector<std::string>& names,
                      const std::vector<const PolarizabilityModel*>& models) {
  CsvTable t;
  t.header = {"nu_cm-1"};
  for (const auto& n : names) {
    t.header.push_back("re_alpha_" + n);
    t.header.push_back("im_alpha_" + n);
  }
  t.header.push_back("nearest_resonance");
  if (spectra.empty()) return t;
  for (std::size_t k = 0; k < spectra.front().nu.size(); ++k) {
    const double nu = spectra.front().nu[k];
    std::vector<std::string> r{format_double(nu)};
    for (const auto& s : spectra) {
      r.push_back(format_double(s.alpha.at(k).real()));
      r.push_back(format_double(s.alpha.at(k).imag()));
    }
    const Resonance* best = nullptr;
    double dist = HUGE_VAL;
    for (const auto* m : models) {
      const Resonance* w = nullptr;
      const double d = m->nearest_pole(nu, &w);
      if (w && d < dist) {
        dist = d;
        best = w;
      }
    }
    r.push_back(best ? level_label(best->intermediate) : "");
    t.add_row(std::move(r));
  }
  return t;
}

CsvTable decay_csv(const std::vector<DecayReport>& reports, double asymptote) {
  CsvTable t;
  t.header = {"level", "energy_cm-1", "linewidth_kHz", "a_total_s-1", "bound_bound_fraction"};
  for (const auto& r : reports)
    t.add_row({level_label(r.level), format_double(hartree_to_cm1(r.level.energy - asymptote)),
               format_double(r.linewidth_khz), format_double(r.a_total),
               format_double(r.bound_bound_fraction)});
  return t;
}

CsvTable magic_csv(const std::vector<MagicPoint>& points) {
  CsvTable t;
  t.header = {"nu_star_cm-1", "slope", "re_alpha", "im_alpha_a", "im_alpha_b", "nearest_pole_cm-1"};
  for (const auto& p : points)
    t.add_row({format_double(p.nu_star), format_double(p.slope), format_double(p.alpha_a.real()),
               format_double(p.alpha_a.imag()), format_double(p.alpha_b.imag()),
               format_double(p.nearest_pole)});
  return t;
}

CsvTable sensitivity_csv(const std::vector<SensitivityReport>& reports) {
  CsvTable t;
  t.header = {"level", "energy_cm-1", "dE_dlnmu_cm-1", "level_lost"};
  for (const auto& r : reports)
    t.add_row({level_label(r.level), format_double(hartree_to_cm1(r.level.energy)),
               format_double(r.dE_dlnmu), r.level_lost ? "1" : "0"});
  return t;
}

json to_json(const RovibLevel& l) {
  return {{"channel", l.channel},
          {"v", l.v},
          {"v_from_top", l.v_from_top},
          {"J", l.J},
          {"energy_cm-1", hartree_to_cm1(l.energy)},
          {"binding_cm-1", hartree_to_cm1(l.binding_energy)}};
}

json to_json(const Resonance& r) { return {{"nu_cm-1", r.nu}, {"intermediate", to_json(r.intermediate)}}; }

json to_json(const DecayReport& r) {
  json parts = json::array();
  for (const auto& p : r.per_transition)
    parts.push_back({{"label", p.label}, {"continuum", p.continuum}, {"omega_s-1", p.omega}, {"rate_s-1", p.rate}});
  return {{"level", to_json(r.level)},
          {"a_total_s-1", r.a_total},
          {"linewidth_kHz", r.linewidth_khz},
          {"bound_bound_fraction", r.bound_bound_fraction},
          {"no_decay_channels", r.no_decay_channels},
          {"per_transition", parts}};
}

json to_json(const SensitivityReport& r) {
  return {{"level", to_json(r.level)}, {"dE_dlnmu_cm-1", r.dE_dlnmu}, {"rel_step", r.rel_step},
          {"level_lost", r.level_lost}};
}

json to_json(const IntervalSensitivity& r) {
  return {{"a", to_json(r.a)}, {"b", to_json(r.b)}, {"nu_cm-1", r.nu},
          {"dnu_dlnmu_cm-1", r.dnu_dlnmu}, {"kappa", r.kappa}};
}

json to_json(const MagicPoint& p) {
  return {{"a", to_json(p.a)},
          {"b", to_json(p.b)},
          {"nu_star_cm-1", p.nu_star},
          {"slope", p.slope},
          {"residual", p.residual},
          {"alpha_a", {p.alpha_a.real(), p.alpha_a.imag()}},
          {"alpha_b", {p.alpha_b.real(), p.alpha_b.imag()}},
          {"nearest_pole_cm-1", p.nearest_pole}};
}

json to_json(const PrecisionBudget& b) {
  return {{"probe_linewidth_Hz", b.probe_linewidth},
          {"snr", b.snr},
          {"transition_nu_Hz", b.transition_nu},
          {"fractional_instability_at_1s", b.fractional_instability_at_1s}};
}

json to_json(const RamanPathway& p) {
  return {{"initial", to_json(p.initial)},       {"final", to_json(p.final)},
          {"intermediate", to_json(p.intermediate)}, {"d_initial_ea0", p.d_initial},
          {"d_final_ea0", p.d_final},            {"product_ea0^2", p.product},
          {"detuning_initial_cm-1", p.detuning_initial}, {"detuning_final_cm-1", p.detuning_final}};
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
    throw Error("SHA-256 digest failed", false);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(s);
}

json RunManifest::to_json() const {
  return {{"input_path", input_path},           {"input_sha256", input_digest},
          {"args", args},                       {"tool_version", tool_version},
          {"constants_version", constants_version}, {"timestamp", timestamp}};
}

RunManifest RunManifest::from_json(const json& j) {
  try {
    RunManifest m;
    m.input_path = j.at("input_path").get<std::string>();
    m.input_digest = j.at("input_sha256").get<std::string>();
    m.args = j.at("args").get<std::vector<std::string>>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.constants_version = j.at("constants_version").get<std::string>();
    m.timestamp = j.value("timestamp", "");
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed run manifest: ") + e.what());
  }
}

bool RunManifest::same_run(const RunManifest& o) const {
  return input_path == o.input_path && input_digest == o.input_digest && args == o.args &&
         tool_version == o.tool_version && constants_version == o.constants_version;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace rovib
