#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rovib/decay.hpp"
#include "rovib/metrology.hpp"
#include "rovib/response.hpp"
#include "rovib/transitions.hpp"

namespace rovib {

inline constexpr std::string_view kToolVersion = "0.3.0";

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);
/// Inverse of format_double; accepts "nan", "inf", "-inf". Throws ParseError.
double parse_double(std::string_view text);

/// In-memory CSV table. Cells holding commas, quotes or newlines are quoted.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells);
  std::string str() const;
};

void write_csv(std::ostream& os, const CsvTable& t);
CsvTable read_csv(std::istream& is);
CsvTable parse_csv(std::string_view text);

// Report tables.
CsvTable levels_csv(const std::vector<RovibLevel>& levels, double asymptote, bool from_top);
CsvTable matrix_csv(const LevelMatrix& m);
CsvTable pathways_csv(const std::vector<RamanPathway>& paths);
/// Spectra must share the frequency grid; columns are re/im alpha per level,
/// then the nearest registered resonance.
CsvTable spectrum_csv(const std::vector<PolarizabilitySpectrum>& spectra,
                      const std::vector<std::string>& names,
                      const std::vector<const PolarizabilityModel*>& models);
CsvTable decay_csv(const std::vector<DecayReport>& reports, double asymptote);
CsvTable magic_csv(const std::vector<MagicPoint>& points);
CsvTable sensitivity_csv(const std::vector<SensitivityReport>& reports);

nlohmann::json to_json(const RovibLevel& l);
nlohmann::json to_json(const Resonance& r);
nlohmann::json to_json(const DecayReport& r);
nlohmann::json to_json(const SensitivityReport& r);
nlohmann::json to_json(const IntervalSensitivity& r);
nlohmann::json to_json(const MagicPoint& p);
nlohmann::json to_json(const PrecisionBudget& b);
nlohmann::json to_json(const RamanPathway& p);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Provenance sidecar of one CLI run.
struct RunManifest {
  std::string input_path;
  std::string input_digest;
  std::vector<std::string> args;  // subcommand and flags, without the program name
  std::string tool_version{kToolVersion};
  std::string constants_version;
  std::string timestamp;          // UTC, ISO 8601

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
  /// Equality ignoring the timestamp.
  bool same_run(const RunManifest& other) const;
};

std::string utc_timestamp();

}  // namespace rovib
