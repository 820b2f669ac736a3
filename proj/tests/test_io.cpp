#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "rovib/errors.hpp"
#include "rovib/io.hpp"
#include "rovib/radial.hpp"
#include "toys.hpp"

using namespace rovib;

TEST_CASE("format_double round trips exactly") {
  for (double x : {0.0, -0.0, 1.0, -2.5, 1e-300, 5e-324, 1.7976931348623157e308, 0.1, 1.0 / 3.0})
    CHECK(std::bit_cast<std::uint64_t>(parse_double(format_double(x))) == std::bit_cast<std::uint64_t>(x));
  for (int k = 0; k < 2000; ++k) {
    const auto bits = std::uniform_int_distribution<std::uint64_t>()(toys::rng());
    const double x = std::bit_cast<double>(bits);
    if (std::isnan(x)) continue;
    CHECK(std::bit_cast<std::uint64_t>(parse_double(format_double(x))) == bits);
  }
  CHECK(std::isnan(parse_double(format_double(std::nan("")))));
  CHECK(parse_double("inf") == std::numeric_limits<double>::infinity());
  CHECK(parse_double("-inf") == -std::numeric_limits<double>::infinity());
  for (const char* bad : {"", "1.0x", "abc", " 1", "1,5"}) CHECK_THROWS_AS(parse_double(bad), ParseError);
}

TEST_CASE("CSV quoting and round trip") {
  CsvTable t;
  t.header = {"a", "b,c", "quote\"d"};
  t.add_row({"1", "", "multi\nline"});
  t.add_row({"x,y", "\"", "plain"});
  const std::string text = t.str();
  CHECK(text.rfind("a,\"b,c\",\"quote\"\"d\"\n", 0) == 0);
  const auto back = parse_csv(text);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  std::istringstream is(text);
  CHECK(read_csv(is).rows == t.rows);
  CHECK(parse_csv("h1,h2\r\n1,2\r\n").rows == std::vector<std::vector<std::string>>{{"1", "2"}});
  CHECK(parse_csv("").header.empty());
  CHECK_THROWS_AS(parse_csv("a,\"open\n"), ParseError);
}

TEST_CASE("report tables read back to the written values") {
  const auto sys = toys::morse_pair();
  const auto levels = bound_levels(sys, "X", 0);
  for (bool from_top : {false, true}) {
    const auto t = levels_csv(levels, sys.ground.asymptote(), from_top);
    const auto back = parse_csv(t.str());
    REQUIRE(back.rows.size() == levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) {
      CHECK(std::stoi(back.rows[i][1]) == (from_top ? levels[i].v_from_top : levels[i].v));
      CHECK(parse_double(back.rows[i][3]) == hartree_to_cm1(levels[i].energy - sys.ground.asymptote()));
      CHECK(parse_double(back.rows[i][4]) == hartree_to_cm1(levels[i].binding_energy));
    }
    if (from_top) CHECK(back.rows.back()[1] == "-1");
  }
  std::vector<MagicPoint> pts(2);
  pts[0].nu_star = 9123.456789012345;
  pts[0].slope = -1.25e-7;
  pts[0].alpha_a = {1.5e-5, 2e-12};
  pts[1].nearest_pole = std::nan("");
  const auto mt = parse_csv(magic_csv(pts).str());
  CHECK(mt.header.size() == 6);
  CHECK(parse_double(mt.rows[0][0]) == pts[0].nu_star);
  CHECK(parse_double(mt.rows[0][1]) == pts[0].slope);
  CHECK(parse_double(mt.rows[0][3]) == pts[0].alpha_a.imag());
  CHECK(std::isnan(parse_double(mt.rows[1][5])));
}

TEST_CASE("JSON reports") {
  PrecisionBudget b{10.0, 100.0, 3e13, 10.0 / (100.0 * 3e13)};
  const auto j = to_json(b);
  CHECK(j.at("fractional_instability_at_1s").get<double>() == b.fractional_instability_at_1s);
  RovibLevel l;
  l.channel = "X";
  l.v = 3;
  l.v_from_top = -7;
  l.energy = cm1_to_hartree(-123.5);
  const auto jl = to_json(l);
  CHECK(jl.at("v_from_top") == -7);
  CHECK(jl.at("energy_cm-1").get<double>() == doctest::Approx(-123.5).epsilon(1e-14));
  IntervalSensitivity s;
  s.nu = 100.0;
  s.dnu_dlnmu = 50.0;
  s.kappa = 2.0;
  CHECK(to_json(s).at("kappa") == 2.0);
}

TEST_CASE("SHA-256 digests") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto path = std::filesystem::temp_directory_path() / "rovib_sha_test.txt";
  {
    std::ofstream out(path, std::ios::binary);
    out << "abc";
  }
  CHECK(sha256_file(path) == sha256_hex("abc"));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(sha256_file(path), ValidationError);
}

TEST_CASE("run manifest identity ignores the timestamp") {
  RunManifest a;
  a.input_path = "examples/sr2.sys";
  a.input_digest = sha256_hex("input");
  a.args = {"levels", "--channel", "X", "--J", "0"};
  a.constants_version = "CODATA2018";
  a.timestamp = utc_timestamp();
  const auto b = RunManifest::from_json(nlohmann::json::parse(a.to_json().dump()));
  CHECK(b.same_run(a));
  CHECK(b.timestamp == a.timestamp);
  auto c = b;
  c.timestamp = "2000-01-01T00:00:00Z";
  CHECK(c.same_run(a));
  c.args.push_back("--from-top");
  CHECK_FALSE(c.same_run(a));
  auto d = b;
  d.input_digest = sha256_hex("other");
  CHECK_FALSE(d.same_run(a));
  CHECK(a.timestamp.size() == 20);
  CHECK(a.timestamp.back() == 'Z');
  CHECK_THROWS_AS(RunManifest::from_json(nlohmann::json{{"args", 3}}), ParseError);
}
