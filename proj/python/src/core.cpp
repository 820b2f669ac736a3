#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rovib/angular.hpp"
#include "rovib/decay.hpp"
#include "rovib/errors.hpp"
#include "rovib/io.hpp"
#include "rovib/metrology.hpp"
#include "rovib/models.hpp"
#include "rovib/molecule.hpp"
#include "rovib/parallel.hpp"
#include "rovib/response.hpp"
#include "rovib/transitions.hpp"
#include "rovib/units.hpp"

namespace py = pybind11;
using namespace rovib;

namespace {

template <class E>
void bind_error(py::module_& m, const char* name, py::handle base) {
  py::register_exception<E>(m, name, base);
}

std::string repr_level(const RovibLevel& l) {
  return "<RovibLevel " + level_label(l) + " E=" + format_double(hartree_to_cm1(l.energy)) + " cm-1>";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rovibrational structure, transition strengths and polarizabilities of diatomics";
  m.attr("__version__") = std::string(kToolVersion);

  auto base = py::register_exception<Error>(m, "RovibError", PyExc_RuntimeError);
  bind_error<IncompatibleUnits>(m, "IncompatibleUnits", base);
  bind_error<ParseError>(m, "ParseError", base);
  bind_error<ValidationError>(m, "ValidationError", base);
  bind_error<InvalidParameter>(m, "InvalidParameter", base);
  bind_error<InvalidQuantumNumbers>(m, "InvalidQuantumNumbers", base);
  bind_error<InvalidEnergy>(m, "InvalidEnergy", base);
  bind_error<InsufficientLevels>(m, "InsufficientLevels", base);
  bind_error<MissingDipole>(m, "MissingDipole", base);
  bind_error<SelectionRuleViolation>(m, "SelectionRuleViolation", base);
  bind_error<DegeneratePair>(m, "DegeneratePair", base);
  bind_error<AllPoles>(m, "AllPoles", base);
  bind_error<ConvergenceError>(m, "ConvergenceError", base);
  bind_error<OnResonance>(m, "OnResonance", base);

  m.def("cm1_to_hartree", &cm1_to_hartree);
  m.def("hartree_to_cm1", &hartree_to_cm1);
  m.def("set_threads", &set_threads, py::arg("n"));
  m.def("wigner3j", &wigner3j, py::arg("j1"), py::arg("j2"), py::arg("j3"), py::arg("m1"), py::arg("m2"),
        py::arg("m3"));
  m.def("rotational_weight", &rotational_weight, py::arg("J"), py::arg("Jp"), py::arg("omega_p"));

  py::class_<RovibLevel>(m, "RovibLevel")
      .def_readonly("channel", &RovibLevel::channel)
      .def_readonly("v", &RovibLevel::v)
      .def_readonly("v_from_top", &RovibLevel::v_from_top)
      .def_readonly("J", &RovibLevel::J)
      .def_property_readonly("energy_cm1", [](const RovibLevel& l) { return hartree_to_cm1(l.energy); })
      .def_property_readonly("binding_cm1", [](const RovibLevel& l) { return hartree_to_cm1(l.binding_energy); })
      .def("__repr__", &repr_level);

  py::class_<MoleculeSystem>(m, "MoleculeSystem")
      .def_readonly("reduced_mass", &MoleculeSystem::reduced_mass)
      .def("channels", [](const MoleculeSystem& s) {
        std::vector<std::string> out;
        for (const auto* c : s.channels()) out.push_back(c->label());
        return out;
      })
      .def("with_reduced_mass", &MoleculeSystem::with_reduced_mass, py::arg("mu"));

  m.def("load_system", &load_system, py::arg("path"));
  m.def("parse_system", &parse_system, py::arg("text"), py::arg("base_dir") = std::filesystem::path("."));
  m.def("sr2_model", [] { return sr2_model(); });
  m.def("sr2_model_config", [] { return sr2_model_config(); });

  py::class_<Molecule, std::shared_ptr<Molecule>>(m, "Molecule")
      .def(py::init([](const MoleculeSystem& s) { return std::make_shared<Molecule>(s); }), py::arg("system"))
      .def_property_readonly("system", &Molecule::system, py::return_value_policy::reference_internal)
      .def("levels", &Molecule::levels, py::arg("channel"), py::arg("J") = 0,
           py::call_guard<py::gil_scoped_release>())
      .def("select", &Molecule::select, py::arg("channel"), py::arg("J"), py::arg("v"))
      .def("reduced_dipole", &Molecule::reduced_dipole, py::arg("excited"), py::arg("ground"))
      .def("wavefunction", [](const Molecule& self, const RovibLevel& l) {
        const auto& st = self.state(l);
        std::vector<double> r(st.wave.psi.size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = st.wave.grid.r(i);
        return py::make_tuple(r, st.wave.psi);
      }, py::arg("level"));

  py::class_<LevelMatrix>(m, "LevelMatrix")
      .def_readonly("rows", &LevelMatrix::rows)
      .def_readonly("cols", &LevelMatrix::cols)
      .def_readonly("values", &LevelMatrix::values)
      .def_readonly("quantity", &LevelMatrix::quantity);
  m.def("fcf_matrix", &fcf_matrix, py::arg("molecule"), py::arg("excited_channel"), py::arg("ground_channel"),
        py::arg("Jp") = 0, py::arg("J") = 0, py::call_guard<py::gil_scoped_release>());
  m.def("dipole_matrix", &dipole_matrix, py::arg("molecule"), py::arg("excited_channel"),
        py::arg("ground_channel"), py::arg("Jp") = 1, py::arg("J") = 0, py::call_guard<py::gil_scoped_release>());

  py::class_<RamanPathway>(m, "RamanPathway")
      .def_readonly("intermediate", &RamanPathway::intermediate)
      .def_readonly("d_initial", &RamanPathway::d_initial)
      .def_readonly("d_final", &RamanPathway::d_final)
      .def_readonly("product", &RamanPathway::product);
  m.def("rank_intermediates", &rank_intermediates, py::arg("molecule"), py::arg("initial"), py::arg("final"),
        py::arg("channels") = std::vector<std::string>{}, py::call_guard<py::gil_scoped_release>());

  py::class_<PolarizabilityOptions>(m, "PolarizabilityOptions")
      .def(py::init<>())
      .def_readwrite("M", &PolarizabilityOptions::M)
      .def_readwrite("eps", &PolarizabilityOptions::eps)
      .def_readwrite("include_continuum", &PolarizabilityOptions::include_continuum)
      .def_readwrite("natural_widths", &PolarizabilityOptions::natural_widths)
      .def_readwrite("continuum_eps_max", &PolarizabilityOptions::continuum_eps_max)
      .def_readwrite("channels", &PolarizabilityOptions::channels);

  py::class_<Resonance>(m, "Resonance")
      .def_readonly("nu", &Resonance::nu)
      .def_readonly("intermediate", &Resonance::intermediate);

  py::class_<PolarizabilityModel>(m, "PolarizabilityModel")
      .def(py::init<const Molecule&, const RovibLevel&, const PolarizabilityOptions&>(), py::arg("molecule"),
           py::arg("level"), py::arg("options") = PolarizabilityOptions{}, py::keep_alive<1, 2>(),
           py::call_guard<py::gil_scoped_release>())
      .def("__call__", &PolarizabilityModel::operator(), py::arg("nu"))
      .def_property_readonly("level", &PolarizabilityModel::level)
      .def_property_readonly("poles", &PolarizabilityModel::poles)
      .def("resonances", &PolarizabilityModel::resonances, py::arg("nu_lo"), py::arg("nu_hi"));

  py::class_<PolarizabilitySpectrum>(m, "PolarizabilitySpectrum")
      .def_readonly("nu", &PolarizabilitySpectrum::nu)
      .def_readonly("alpha", &PolarizabilitySpectrum::alpha)
      .def_readonly("resonances", &PolarizabilitySpectrum::resonances)
      .def_readonly("zero_crossings", &PolarizabilitySpectrum::zero_crossings);
  m.def("scan", py::overload_cast<const PolarizabilityModel&, double, double, double>(&scan), py::arg("model"),
        py::arg("nu_min"), py::arg("nu_max"), py::arg("step") = 0.1, py::call_guard<py::gil_scoped_release>());
  m.def("polarizability", &polarizability, py::arg("molecule"), py::arg("level"), py::arg("nu"),
        py::arg("options") = PolarizabilityOptions{}, py::call_guard<py::gil_scoped_release>());
  m.def("stark_shift", &stark_shift, py::arg("alpha"), py::arg("intensity"));
  m.def("scattering_rate", py::overload_cast<std::complex<double>, double>(&scattering_rate), py::arg("alpha"),
        py::arg("intensity"));

  py::class_<DecayReport>(m, "DecayReport")
      .def_readonly("level", &DecayReport::level)
      .def_readonly("a_total", &DecayReport::a_total)
      .def_readonly("linewidth_khz", &DecayReport::linewidth_khz)
      .def_readonly("bound_rate", &DecayReport::bound_rate)
      .def_readonly("continuum_rate", &DecayReport::continuum_rate)
      .def_readonly("bound_bound_fraction", &DecayReport::bound_bound_fraction)
      .def_readonly("no_decay_channels", &DecayReport::no_decay_channels);
  m.def("einstein_a", [](const Molecule& mol, const RovibLevel& l) { return einstein_a(mol, l); },
        py::arg("molecule"), py::arg("level"), py::call_guard<py::gil_scoped_release>());
  m.def("linewidth_map", [](const Molecule& mol, const std::string& ch, int Jp) { return linewidth_map(mol, ch, Jp); },
        py::arg("molecule"), py::arg("channel"), py::arg("Jp") = 1, py::call_guard<py::gil_scoped_release>());

  py::class_<SensitivityReport>(m, "SensitivityReport")
      .def_readonly("level", &SensitivityReport::level)
      .def_readonly("dE_dlnmu", &SensitivityReport::dE_dlnmu)
      .def_readonly("rel_step", &SensitivityReport::rel_step)
      .def_readonly("level_lost", &SensitivityReport::level_lost);
  py::class_<IntervalSensitivity>(m, "IntervalSensitivity")
      .def_readonly("a", &IntervalSensitivity::a)
      .def_readonly("b", &IntervalSensitivity::b)
      .def_readonly("nu", &IntervalSensitivity::nu)
      .def_readonly("dnu_dlnmu", &IntervalSensitivity::dnu_dlnmu)
      .def_readonly("kappa", &IntervalSensitivity::kappa);
  py::class_<AnchorSensor>(m, "AnchorSensor")
      .def_readonly("anchor", &AnchorSensor::anchor)
      .def_readonly("sensor", &AnchorSensor::sensor);
  m.def("mu_sensitivities",
        [](const MoleculeSystem& s, const std::string& ch, int J, double h) { return mu_sensitivities(s, ch, J, h); },
        py::arg("system"), py::arg("channel"), py::arg("J") = 0, py::arg("rel_step") = 1e-6,
        py::call_guard<py::gil_scoped_release>());
  m.def("interval_sensitivity",
        py::overload_cast<const SensitivityReport&, const SensitivityReport&>(&interval_sensitivity), py::arg("a"),
        py::arg("b"));
  m.def("select_anchor_sensor",
        py::overload_cast<const std::vector<SensitivityReport>&>(&select_anchor_sensor), py::arg("reports"));

  py::class_<MagicPoint>(m, "MagicPoint")
      .def_readonly("a", &MagicPoint::a)
      .def_readonly("b", &MagicPoint::b)
      .def_readonly("nu_star", &MagicPoint::nu_star)
      .def_readonly("slope", &MagicPoint::slope)
      .def_readonly("residual", &MagicPoint::residual)
      .def_readonly("alpha_a", &MagicPoint::alpha_a)
      .def_readonly("alpha_b", &MagicPoint::alpha_b)
      .def_readonly("nearest_pole", &MagicPoint::nearest_pole);
  py::class_<MagicOptions>(m, "MagicOptions")
      .def(py::init<>())
      .def_readwrite("step", &MagicOptions::step)
      .def_readwrite("exclusion", &MagicOptions::exclusion)
      .def_readwrite("tol_nu", &MagicOptions::tol_nu)
      .def_readwrite("tol_alpha", &MagicOptions::tol_alpha);
  m.def("find_magic",
        py::overload_cast<const PolarizabilityModel&, const PolarizabilityModel&, double, double,
                          const MagicOptions&>(&find_magic),
        py::arg("a"), py::arg("b"), py::arg("lo"), py::arg("hi"), py::arg("options") = MagicOptions{},
        py::call_guard<py::gil_scoped_release>());

  py::class_<PrecisionBudget>(m, "PrecisionBudget")
      .def_readonly("probe_linewidth", &PrecisionBudget::probe_linewidth)
      .def_readonly("snr", &PrecisionBudget::snr)
      .def_readonly("transition_nu", &PrecisionBudget::transition_nu)
      .def_readonly("fractional_instability_at_1s", &PrecisionBudget::fractional_instability_at_1s)
      .def("at", &PrecisionBudget::at, py::arg("tau"));
  m.def("precision_budget", &precision_budget, py::arg("transition_nu"), py::arg("linewidth") = 10.0,
        py::arg("snr") = 100.0);
}
