// rovib command-line front end.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rovib/decay.hpp"
#include "rovib/errors.hpp"
#include "rovib/io.hpp"
#include "rovib/metrology.hpp"
#include "rovib/parallel.hpp"
#include "rovib/response.hpp"
#include "rovib/transitions.hpp"
#include "rovib/units.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rovib;

namespace {

struct Common {
  std::string config;
  int threads = 1;
  std::string out;
  std::string format = "csv";
  std::string manifest;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

// "v=27", "v=-3" or a bare integer.
int parse_selector(const std::string& s) {
  std::string t = s.rfind("v=", 0) == 0 ? s.substr(2) : s;
  try {
    std::size_t used = 0;
    const int v = std::stoi(t, &used);
    if (used == t.size()) return v;
  } catch (const std::exception&) {
  }
  throw InvalidParameter("bad level selector '" + s + "' (expected v=<n> or v=-<n>)");
}

// "[channel:]v=<n>" with a default channel.
RovibLevel resolve(const Molecule& m, const std::string& sel, const std::string& channel, int J) {
  std::string ch = channel, rest = sel;
  if (auto c = sel.rfind(':'); c != std::string::npos) {
    ch = sel.substr(0, c);
    rest = sel.substr(c + 1);
  }
  if (!m.system().has_curve(ch)) throw ValidationError("unknown channel '" + ch + "'");
  return m.select(ch, J, parse_selector(rest));
}

std::pair<double, double> parse_window(const std::string& w) {
  const auto c = w.find(':');
  if (c == std::string::npos) throw InvalidParameter("window must be a:b, got '" + w + "'");
  try {
    return {std::stod(w.substr(0, c)), std::stod(w.substr(c + 1))};
  } catch (const std::exception&) {
    throw InvalidParameter("window must be a:b, got '" + w + "'");
  }
}

struct Output {
  std::string text;
};

using Runner = std::function<Output(const Molecule&)>;

void emit(const Common& c, const Output& o) {
  if (c.out.empty()) {
    std::cout << o.text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + c.out);
  f << o.text;
}

std::string render(const Common& c, const CsvTable& t, const json& j) {
  if (c.format == "json") return j.dump(2) + "\n";
  return t.str();
}

json csv_as_json(const CsvTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json o;
    for (std::size_t i = 0; i < r.size() && i < t.header.size(); ++i) o[t.header[i]] = r[i];
    rows.push_back(o);
  }
  return rows;
}

int run(std::vector<std::string> args);

int replay(const std::string& path, const std::string& out, int threads) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read manifest " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest is not JSON: ") + e.what());
  }
  const RunManifest m = RunManifest::from_json(j);
  if (m.tool_version != kToolVersion)
    throw ValidationError("manifest was written by rovib " + m.tool_version);
  if (m.constants_version != K::table_version)
    throw ValidationError("manifest constant table " + m.constants_version + " differs from " +
                          std::string(K::table_version));
  if (sha256_file(m.input_path) != m.input_digest)
    throw ValidationError("input file " + m.input_path + " changed since the recorded run");
  std::vector<std::string> args = m.args;
  auto set_flag = [&](const std::string& flag, const std::string& value) {
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
      if (args[i] == flag) {
        args[i + 1] = value;
        return;
      }
    args.push_back(flag);
    args.push_back(value);
  };
  if (!out.empty()) set_flag("--out", out);
  if (threads > 0) set_flag("--threads", std::to_string(threads));
  return run(args);
}

int run(std::vector<std::string> args) {
  CLI::App app{"Rovibrational structure, transition strengths and polarizabilities of diatomics"};
  app.require_subcommand(1);
  Common c;
  Runner runner;
  std::string replay_path;

  auto common = [&](CLI::App* s) {
    s->add_option("--config", c.config, "System description file")->required();
    s->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
    s->add_option("--out", c.out, "Output file (default stdout)");
    s->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--manifest", c.manifest, "Run manifest path (default <out>.manifest.json)");
  };

  // levels
  std::string channel, ground_channel, excited_channel;
  int J = 0, Jp = 1;
  bool from_top = false;
  std::string wave_sel;
  {
    auto* s = app.add_subcommand("levels", "Bound levels of one channel");
    common(s);
    s->add_option("--channel", channel)->required();
    s->add_option("--J", J);
    s->add_flag("--from-top", from_top, "Label levels from dissociation (-1 = least bound)");
    s->add_option("--wavefunction", wave_sel, "Emit R, psi(R) of one level v=<n> instead");
    s->callback([&] {
      runner = [&](const Molecule& m) {
        if (!m.system().has_curve(channel)) throw ValidationError("unknown channel '" + channel + "'");
        if (!wave_sel.empty()) {
          const auto& st = m.state(resolve(m, wave_sel, channel, J));
          CsvTable t;
          t.header = {"R_a0", "psi"};
          json r = json::array(), p = json::array();
          for (std::size_t i = 0; i < st.wave.psi.size(); ++i) {
            const double x = st.wave.grid.r(i);
            t.add_row({format_double(x), format_double(st.wave.psi[i])});
            r.push_back(x);
            p.push_back(st.wave.psi[i]);
          }
          return Output{render(c, t, {{"level", to_json(st.level)}, {"R_a0", r}, {"psi", p}})};
        }
        const auto lv = m.levels(channel, J);
        const auto t = levels_csv(lv, m.system().curve(channel).asymptote(), from_top);
        json j = json::array();
        for (const auto& l : lv) j.push_back(to_json(l));
        return Output{render(c, t, j)};
      };
    });
  }

  // tdm
  std::string excited_sel, ground_sel;
  bool fcf = false;
  {
    auto* s = app.add_subcommand("tdm", "Vibrationally averaged dipoles and Franck-Condon factors");
    common(s);
    s->add_option("--excited-channel", excited_channel)->required();
    s->add_option("--ground-channel", ground_channel);
    s->add_option("--Jp", Jp);
    s->add_option("--J", J);
    s->add_option("--excited", excited_sel, "Single excited level v=<n>");
    s->add_option("--ground", ground_sel, "Single ground level v=<n>");
    s->add_flag("--fcf", fcf, "Franck-Condon factors instead of squared dipoles");
    s->callback([&] {
      runner = [&](const Molecule& m) {
        const std::string g = ground_channel.empty() ? m.system().ground.label() : ground_channel;
        if (!m.system().has_curve(excited_channel))
          throw ValidationError("unknown channel '" + excited_channel + "'");
        if (!excited_sel.empty() || !ground_sel.empty()) {
          if (excited_sel.empty() || ground_sel.empty())
            throw InvalidParameter("--excited and --ground must be given together");
          const auto e = resolve(m, excited_sel, excited_channel, Jp);
          const auto gl = resolve(m, ground_sel, g, J);
          const auto tm = transition_moment(m, e, gl);
          CsvTable t;
          t.header = {"excited", "ground", "reduced_dipole_ea0", "d2_ea0^2", "fcf"};
          t.add_row({level_label(tm.bra), level_label(tm.ket), format_double(tm.reduced_dipole),
                     format_double(tm.reduced_dipole * tm.reduced_dipole), format_double(tm.fcf)});
          return Output{render(c, t, csv_as_json(t))};
        }
        const auto mat = fcf ? fcf_matrix(m, excited_channel, g, Jp, J)
                             : dipole_matrix(m, excited_channel, g, Jp, J);
        const auto t = matrix_csv(mat);
        return Output{render(c, t, csv_as_json(t))};
      };
    });
  }

  // raman
  std::string initial_sel, final_sel, mid_sel, channels_arg;
  bool rank = false;
  {
    auto* s = app.add_subcommand("raman", "Two-photon Raman pathway strengths");
    common(s);
    s->add_option("--initial", initial_sel)->required();
    s->add_option("--final", final_sel)->required();
    s->add_option("--intermediate", mid_sel, "Single intermediate <channel>:v=<n>");
    s->add_option("--channels", channels_arg, "Comma-separated excited channels");
    s->add_flag("--rank", rank, "Sort by descending |product|");
    s->callback([&] {
      runner = [&](const Molecule& m) {
        const std::string g = m.system().ground.label();
        const auto a = resolve(m, initial_sel, g, 0);
        const auto b = resolve(m, final_sel, g, 0);
        std::vector<RamanPathway> paths;
        if (!mid_sel.empty()) {
          if (mid_sel.find(':') == std::string::npos)
            throw InvalidParameter("--intermediate needs <channel>:v=<n>");
          paths.push_back(raman_product(m, a, b, resolve(m, mid_sel, "", 1)));
        } else {
          paths = rank_intermediates(m, a, b, split(channels_arg, ','));
          if (!rank)
            std::stable_sort(paths.begin(), paths.end(), [](const auto& x, const auto& y) {
              if (x.intermediate.channel != y.intermediate.channel)
                return x.intermediate.channel < y.intermediate.channel;
              return x.intermediate.v < y.intermediate.v;
            });
        }
        json j = json::array();
        for (const auto& p : paths) j.push_back(to_json(p));
        return Output{render(c, pathways_csv(paths), j)};
      };
    });
  }

  // polar
  std::string levels_arg = "v=0", window, registry;
  double step = 0.1;
  int M = 0, eps = 0;
  bool no_widths = false, no_continuum = false;
  {
    auto* s = app.add_subcommand("polar", "Dynamic polarizability scan");
    common(s);
    s->add_option("--levels", levels_arg, "Comma-separated ground levels");
    s->add_option("--J", J);
    s->add_option("--window", window, "a:b in cm^-1, half-open")->required();
    s->add_option("--step", step);
    s->add_option("--M", M);
    s->add_option("--eps", eps, "Spherical polarization component");
    s->add_option("--channels", channels_arg);
    s->add_flag("--no-widths", no_widths, "Zero natural widths");
    s->add_flag("--no-continuum", no_continuum);
    s->add_option("--registry", registry, "Write the resonance registry as JSON here");
    s->callback([&] {
      runner = [&](const Molecule& m) {
        const auto [lo, hi] = parse_window(window);
        PolarizabilityOptions po;
        po.M = M;
        po.eps = eps;
        po.natural_widths = !no_widths;
        po.include_continuum = !no_continuum;
        po.channels = split(channels_arg, ',');
        const auto sels = split(levels_arg, ',');
        std::vector<PolarizabilityModel> models;
        for (const auto& sel : sels) models.emplace_back(m, resolve(m, sel, m.system().ground.label(), J), po);
        std::vector<PolarizabilitySpectrum> spectra;
        std::vector<const PolarizabilityModel*> ptrs;
        for (const auto& md : models) {
          spectra.push_back(scan(md, lo, hi, step));
          ptrs.push_back(&md);
        }
        std::vector<std::string> names;
        for (const auto& sel : sels) names.push_back(sel);
        json reg = json::array();
        for (const auto& sp : spectra)
          for (const auto& r : sp.resonances) {
            json e = to_json(r);
            e["level"] = to_json(sp.level);
            reg.push_back(e);
          }
        if (!registry.empty()) {
          std::ofstream f(registry);
          if (!f) throw ValidationError("cannot write " + registry);
          f << reg.dump(2) << "\n";
        }
        const auto t = spectrum_csv(spectra, names, ptrs);
        json j{{"levels", json::array()}, {"resonances", reg}, {"samples", csv_as_json(t)}};
        for (const auto& sp : spectra) j["levels"].push_back(to_json(sp.level));
        return Output{render(c, t, j)};
      };
    });
  }

  // linewidths
  bool lw_no_continuum = false;
  {
    auto* s = app.add_subcommand("linewidths", "Natural linewidths of an excited channel");
    common(s);
    s->add_option("--channel", channel)->required();
    s->add_option("--Jp", Jp);
    s->add_flag("--no-continuum", lw_no_continuum);
    s->callback([&] {
      runner = [&](const Molecule& m) {
        if (!m.system().has_curve(channel)) throw ValidationError("unknown channel '" + channel + "'");
        DecayOptions o;
        o.include_continuum = !lw_no_continuum;
        const auto reps = linewidth_map(m, channel, Jp, o);
        json j = json::array();
        for (const auto& r : reps) j.push_back(to_json(r));
        return Output{render(c, decay_csv(reps, m.system().curve(channel).asymptote()), j)};
      };
    });
  }

  // magic
  std::string a_sel, b_sel;
  double exclusion = 0.05, tol = 1e-6;
  {
    auto* s = app.add_subcommand("magic", "Stark-cancellation frequencies of two ground levels");
    common(s);
    s->add_option("--a", a_sel)->required();
    s->add_option("--b", b_sel)->required();
    s->add_option("--J", J);
    s->add_option("--window", window)->required();
    s->add_option("--step", step);
    s->add_option("--exclusion", exclusion, "Pole exclusion radius (cm^-1)");
    s->add_option("--tol", tol, "Crossing tolerance (cm^-1)");
    s->add_option("--channels", channels_arg);
    s->add_flag("--no-widths", no_widths);
    s->add_flag("--no-continuum", no_continuum);
    s->callback([&] {
      runner = [&](const Molecule& m) {
        const auto [lo, hi] = parse_window(window);
        const std::string g = m.system().ground.label();
        const auto a = resolve(m, a_sel, g, J);
        const auto b = resolve(m, b_sel, g, J);
        if (a.v == b.v) throw DegeneratePair("magic search between a level and itself");
        PolarizabilityOptions po;
        po.natural_widths = !no_widths;
        po.include_continuum = !no_continuum;
        po.channels = split(channels_arg, ',');
        MagicOptions mo;
        mo.step = step;
        mo.exclusion = exclusion;
        mo.tol_nu = tol;
        const auto pts = find_magic(m, a, b, lo, hi, mo, po);
        json j = json::array();
        for (const auto& p : pts) j.push_back(to_json(p));
        return Output{render(c, magic_csv(pts), j)};
      };
    });
  }

  // sensitivity
  std::string level_sel, pair_sel;
  bool select = false;
  double rel_step = 1e-6, budget_linewidth = 10.0, budget_snr = 100.0;
  {
    auto* s = app.add_subcommand("sensitivity", "Proton-to-electron mass-ratio sensitivities");
    common(s);
    s->add_option("--channel", channel);
    s->add_option("--J", J);
    s->add_option("--level", level_sel, "Single level v=<n>");
    s->add_option("--pair", pair_sel, "Interval v=<a>,v=<b>");
    s->add_flag("--select", select, "Pick anchor level and sensor interval");
    s->add_option("--rel-step", rel_step);
    s->add_option("--linewidth", budget_linewidth, "Probe linewidth (Hz) for the precision budget");
    s->add_option("--snr", budget_snr, "Signal-to-noise ratio for the precision budget");
    s->callback([&] {
      runner = [&](const Molecule& m) {
        const auto& sys = m.system();
        const std::string ch = channel.empty() ? sys.ground.label() : channel;
        if (!sys.has_curve(ch)) throw ValidationError("unknown channel '" + ch + "'");
        auto budget = [&](double nu_cm1) {
          return to_json(precision_budget(nu_cm1 * K::c * 100.0, budget_linewidth, budget_snr));
        };
        if (!pair_sel.empty()) {
          const auto parts = split(pair_sel, ',');
          if (parts.size() != 2) throw InvalidParameter("--pair needs two selectors");
          const auto r = interval_sensitivity(sys, resolve(m, parts[0], ch, J), resolve(m, parts[1], ch, J),
                                              rel_step, m.options());
          CsvTable t;
          t.header = {"a", "b", "nu_cm-1", "dnu_dlnmu_cm-1", "kappa"};
          t.add_row({level_label(r.a.level), level_label(r.b.level), format_double(r.nu),
                     format_double(r.dnu_dlnmu), format_double(r.kappa)});
          json j = to_json(r);
          j["budget"] = budget(r.nu);
          return Output{render(c, t, j)};
        }
        if (!level_sel.empty()) {
          const auto r = mu_sensitivity(sys, resolve(m, level_sel, ch, J), rel_step, m.options());
          return Output{render(c, sensitivity_csv({r}), to_json(r))};
        }
        const auto reps = mu_sensitivities(sys, ch, J, rel_step, m.options());
        if (select) {
          const auto as = select_anchor_sensor(reps);
          CsvTable t;
          t.header = {"anchor", "anchor_dE_dlnmu_cm-1", "sensor_a", "sensor_b", "nu_cm-1",
                      "dnu_dlnmu_cm-1", "kappa"};
          t.add_row({level_label(as.anchor.level), format_double(as.anchor.dE_dlnmu),
                     level_label(as.sensor.a.level), level_label(as.sensor.b.level),
                     format_double(as.sensor.nu), format_double(as.sensor.dnu_dlnmu),
                     format_double(as.sensor.kappa)});
          json j{{"anchor", to_json(as.anchor)}, {"sensor", to_json(as.sensor)},
                 {"budget", budget(as.sensor.nu)}};
          return Output{render(c, t, j)};
        }
        json j = json::array();
        for (const auto& r : reps) j.push_back(to_json(r));
        return Output{render(c, sensitivity_csv(reps), j)};
      };
    });
  }

  // replay
  std::string replay_out;
  int replay_threads = -1;
  {
    auto* s = app.add_subcommand("replay", "Re-run a command from its manifest");
    s->add_option("manifest", replay_path)->required();
    s->add_option("--out", replay_out, "Override the recorded output path");
    s->add_option("--threads", replay_threads, "Override the recorded thread count");
  }

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (!replay_path.empty()) return replay(replay_path, replay_out, replay_threads);

  set_threads(c.threads);
  const fs::path cfg = fs::absolute(c.config);
  const Molecule m(load_system(cfg));
  const Output o = runner(m);
  emit(c, o);

  RunManifest man;
  man.input_path = cfg.string();
  man.input_digest = sha256_file(cfg);
  man.args = args;
  for (std::size_t i = 0; i + 1 < man.args.size(); ++i)
    if (man.args[i] == "--config") man.args[i + 1] = cfg.string();
  man.constants_version = std::string(K::table_version);
  man.timestamp = utc_timestamp();
  std::string mpath = c.manifest;
  if (mpath.empty()) mpath = c.out.empty() ? "rovib.manifest.json" : c.out + ".manifest.json";
  std::ofstream mf(mpath);
  if (!mf) throw ValidationError("cannot write manifest " + mpath);
  mf << man.to_json().dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args);
  } catch (const rovib::Error& e) {
    std::cerr << "rovib: " << e.what() << "\n";
    return e.is_usage() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "rovib: " << e.what() << "\n";
    return 1;
  }
}
