// Python bindings for the tdisim core: model builders, correlation functions,
// interferometric phase scans, the classicality discriminator, classical
// jump-process estimators, and model (de)serialization.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "tdi/classical.hpp"
#include "tdi/correlations.hpp"
#include "tdi/doublewell_analytic.hpp"
#include "tdi/model_io.hpp"
#include "tdi/operator_algebra.hpp"
#include "tdi/target_model.hpp"
#include "tdi/tdi_signal.hpp"
#include "tdi/version.hpp"

namespace py = pybind11;
using namespace tdi;

PYBIND11_MODULE(_tdisim, m) {
  m.doc() =
      "Time-domain interferometry toolkit: discrete-site quantum targets, "
      "classical jump-process comparators, pair correlations, two-branch "
      "interference signals, and the classicality discriminator.";

  m.attr("__version__") = kToolVersion;
  m.attr("TOOL_NAME") = kToolName;
  m.attr("MAX_DIM") = kMaxDim;
  m.attr("POSITION_TOL") = kPositionTol;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  // ---- shared numerics -----------------------------------------------------

  py::class_<Tolerances>(m, "Tolerances",
                         "Shared numerical tolerances: algebraic_tol bounds exact identities "
                         "evaluated in floating point, statistical_sigma is the number of "
                         "standard errors for Monte Carlo comparisons.")
      .def(py::init<>())
      .def(py::init([](double algebraic_tol, double statistical_sigma) {
             Tolerances t;
             t.algebraic_tol = algebraic_tol;
             t.statistical_sigma = statistical_sigma;
             t.validate();
             return t;
           }),
           py::arg("algebraic_tol"), py::arg("statistical_sigma"))
      .def_readwrite("algebraic_tol", &Tolerances::algebraic_tol)
      .def_readwrite("statistical_sigma", &Tolerances::statistical_sigma)
      .def("validate", &Tolerances::validate);

  m.def("max_abs", &max_abs, py::arg("a"), "Max-entry absolute value of a complex matrix.");
  m.def("hermiticity_defect", &hermiticity_defect, py::arg("a"), "||A - A^dag||_max.");
  m.def("unitarity_defect", &unitarity_defect, py::arg("u"), "||U^dag U - 1||_max.");
  m.def("is_hermitian", &is_hermitian, py::arg("a"), py::arg("tol") = 1e-10);
  m.def("is_unitary", &is_unitary, py::arg("u"), py::arg("tol") = 1e-10);
  m.def("is_density", &is_density, py::arg("mu"), py::arg("tol") = 1e-10,
        "Hermitian, unit trace within tol, eigenvalues >= -tol.");
  m.def("min_eigenvalue", &min_eigenvalue, py::arg("a"),
        "Smallest eigenvalue of a Hermitian matrix (symmetrized first).");
  m.def("expm_hermitian", &expm_hermitian, py::arg("h"), py::arg("t"), py::arg("tol") = 1e-10,
        "U(t) = exp(-i H t) for Hermitian H, unitary by construction.");
  m.def("evolve_density", &evolve_density, py::arg("mu"), py::arg("u"), py::arg("tol") = 1e-10,
        "Schroedinger step for a density matrix: U mu U^dag.");
  m.def("heisenberg", &heisenberg, py::arg("a"), py::arg("u"),
        "Conjugation of an observable by a propagator: U^dag A U.");
  m.def("trace_product", &trace_product, py::arg("mu"), py::arg("a"), py::arg("b"),
        "Tr[mu A B].");
  m.def("pure_state_density", &pure_state_density, py::arg("psi"), py::arg("tol") = 1e-10,
        "|psi><psi| for a unit-norm state vector.");

  // ---- quantum targets -----------------------------------------------------

  py::class_<SiteLattice>(m, "SiteLattice",
                          "Scattering sites: positions and matching site density operators "
                          "acting on one Hilbert space.")
      .def(py::init<>())
      .def_readwrite("sites", &SiteLattice::sites)
      .def_readwrite("site_ops", &SiteLattice::site_ops)
      .def("dim", &SiteLattice::dim)
      .def("n_sites", &SiteLattice::n_sites)
      .def("validate", &SiteLattice::validate, py::arg("tol") = Tolerances{});

  py::class_<TargetModel>(m, "TargetModel",
                          "A concrete quantum target: lattice, Hamiltonian and initial "
                          "density matrix.")
      .def(py::init<>())
      .def_readwrite("lattice", &TargetModel::lattice)
      .def_readwrite("hamiltonian", &TargetModel::hamiltonian)
      .def_readwrite("initial", &TargetModel::initial)
      .def_readwrite("id", &TargetModel::id)
      .def("dim", &TargetModel::dim)
      .def("validate", &TargetModel::validate, py::arg("tol") = Tolerances{});

  m.def("build_double_well", &build_double_well, py::arg("omega"), py::arg("d"),
        py::arg("p_left"), py::arg("gamma"),
        "Two-site double well: |L> at -d/2, |R> at +d/2, tunneling frequency omega, "
        "initial state [[p_left, gamma], [conj(gamma), 1 - p_left]].");
  m.def("build_chain", &build_chain, py::arg("n_sites"), py::arg("hop"), py::arg("spacing"),
        "Open nearest-neighbour chain along x, initial state localized on site 0.");
  m.def("with_initial", &with_initial, py::arg("model"), py::arg("mu"),
        "Copy of a model with a replacement initial density matrix.");
  m.def("propagator", &propagator, py::arg("hamiltonian"), py::arg("t"), py::arg("tol") = 1e-10,
        "The propagator W(t) driving every correlation and signal evaluation.");
  m.def("state_at", &state_at, py::arg("model"), py::arg("t"),
        "State at time t: W(t) mu W(t)^dag.");
  m.def("density_fourier", &density_fourier, py::arg("model"), py::arg("p"), py::arg("t"),
        "Site-density Fourier transform D(p, t); D(0, t) is the conserved total density.");

  // ---- correlation functions -----------------------------------------------

  py::class_<ISFValue>(m, "ISFValue",
                       "One evaluated intermediate-scattering-function point; real and "
                       "nonnegative at equal times.")
      .def(py::init<>())
      .def_readwrite("value", &ISFValue::value)
      .def_readwrite("p", &ISFValue::p)
      .def_readwrite("t1", &ISFValue::t1)
      .def_readwrite("t2", &ISFValue::t2)
      .def("validate", &ISFValue::validate, py::arg("tol") = 1e-10);

  py::class_<SeparationValue>(m, "SeparationValue")
      .def_readonly("r", &SeparationValue::r)
      .def_readonly("value", &SeparationValue::value);

  m.def("lattice_separations", &lattice_separations, py::arg("model"),
        "All distinct pair-difference vectors of the lattice, deduplicated and sorted.");
  m.def("dcf", &dcf, py::arg("model"), py::arg("r"), py::arg("t1"), py::arg("t2"),
        "Couple correlation G(r, t1, t2) over ordered site pairs at separation r.");
  m.def("dcf_all", &dcf_all, py::arg("model"), py::arg("t1"), py::arg("t2"),
        "G at every lattice separation in one pass.");
  m.def("isf", &isf, py::arg("model"), py::arg("p"), py::arg("t1"), py::arg("t2"),
        "Intermediate scattering function S(p, t1, t2) = Tr[mu D(p,t1)^dag D(p,t2)].");
  m.def("isf_from_dcf", &isf_from_dcf, py::arg("model"), py::arg("p"), py::arg("t1"),
        py::arg("t2"), "The explicit Fourier-sum route over dcf_all; cross-check for isf.");

  py::class_<SymmetryCheck>(m, "SymmetryCheck")
      .def_readonly("ok", &SymmetryCheck::ok)
      .def_readonly("residual", &SymmetryCheck::residual)
      .def_readonly("threshold", &SymmetryCheck::threshold);

  m.def("check_quantum_symmetry", &check_quantum_symmetry, py::arg("model"), py::arg("p"),
        py::arg("t1"), py::arg("t2"), py::arg("tol") = 1e-10,
        "Residual |S(p,t1,t2)* - S(p,t2,t1)|; vanishes for unitary dynamics.");
  m.def("check_classical_symmetry",
        py::overload_cast<const TargetModel&, const Vec3&, double, double, double>(
            &check_classical_symmetry),
        py::arg("model"), py::arg("p"), py::arg("t1"), py::arg("t2"), py::arg("tol") = 1e-10,
        "Residual |S(p,t1,t2)* - S(-p,t1,t2)| on a quantum target; classical statistics "
        "forces it to vanish.");
  m.def("check_classical_symmetry",
        py::overload_cast<const ClassicalModel&, const Vec3&, double, double, double>(
            &check_classical_symmetry),
        py::arg("model"), py::arg("p"), py::arg("t1"), py::arg("t2"), py::arg("tol") = 1e-10,
        "Same residual evaluated exactly on a classical jump model.");
  m.def("check_classical_symmetry",
        py::overload_cast<const MCEstimate&, const MCEstimate&, const Tolerances&>(
            &check_classical_symmetry),
        py::arg("s_plus_p"), py::arg("s_minus_p"), py::arg("tol") = Tolerances{},
        "Monte Carlo variant on two independently estimated channels.");

  // ---- classical jump process ----------------------------------------------

  py::class_<ClassicalModel>(m, "ClassicalModel",
                             "A single particle hopping between discrete sites as a "
                             "continuous-time Markov jump process.")
      .def(py::init<>())
      .def_readwrite("positions", &ClassicalModel::positions)
      .def_readwrite("rates", &ClassicalModel::rates)
      .def_readwrite("initial", &ClassicalModel::initial)
      .def_readwrite("seed", &ClassicalModel::seed)
      .def_readwrite("id", &ClassicalModel::id)
      .def("n_sites", &ClassicalModel::n_sites)
      .def("validate", &ClassicalModel::validate, py::arg("tol") = 1e-10);

  m.def("build_classical_hopper", &build_classical_hopper, py::arg("rate"), py::arg("d"),
        py::arg("p_left"), py::arg("seed") = 1,
        "Two-site symmetric hopper: sites at -d/2 and +d/2, rate both ways, initial "
        "occupation p_left on the left site.");

  py::class_<MCEstimate>(m, "MCEstimate",
                         "Monte Carlo estimate of a complex mean with per-component "
                         "standard errors.")
      .def_readonly("mean", &MCEstimate::mean)
      .def_readonly("std_error_re", &MCEstimate::std_error_re)
      .def_readonly("std_error_im", &MCEstimate::std_error_im)
      .def_readonly("n_traj", &MCEstimate::n_traj)
      .def("std_error", &MCEstimate::std_error,
           "Combined scalar standard error (conservative bound for either component).");

  m.def("substream_seed", &substream_seed, py::arg("seed"), py::arg("index"), py::arg("salt"),
        "Deterministic mix of (seed, index, salt) for independent sampling streams.");
  m.def("classical_isf", &classical_isf, py::arg("model"), py::arg("p"), py::arg("t1"),
        py::arg("t2"), py::arg("n_traj"),
        "Trajectory estimate of the classical intermediate scattering function; "
        "deterministic for a fixed model.seed.");
  m.def("classical_isf_salted", &classical_isf_salted, py::arg("model"), py::arg("p"),
        py::arg("t1"), py::arg("t2"), py::arg("n_traj"), py::arg("salt"),
        "Same estimator with an explicit stream salt for statistically independent "
        "batches of the same quantity.");
  m.def("classical_isf_exact", &classical_isf_exact, py::arg("model"), py::arg("p"),
        py::arg("t1"), py::arg("t2"),
        "Exact S_cl(p, t1, t2) via the matrix exponential of the rate generator.");
  m.def("sample_path", &sample_path, py::arg("model"), py::arg("times"),
        py::arg("stream_seed"),
        "Site occupied at each requested (nondecreasing, nonnegative) time along one "
        "sampled path.");
  m.def("sample_site_pairs", &sample_site_pairs, py::arg("model"), py::arg("t1"),
        py::arg("t2"), py::arg("n_traj"), py::arg("salt") = 0,
        "(site at t1, site at t2) samples drawn sequentially from one salted stream.");

  // ---- interference signals ------------------------------------------------

  py::class_<EnvelopeModel> envelope(m, "EnvelopeModel",
                                     "Temporal envelope of the probe pulse; detection "
                                     "probabilities scale with its square.");
  py::enum_<EnvelopeModel::Kind>(envelope, "Kind")
      .value("unit", EnvelopeModel::Kind::unit)
      .value("gaussian", EnvelopeModel::Kind::gaussian)
      .value("exponential", EnvelopeModel::Kind::exponential);
  envelope.def(py::init<>())
      .def_readwrite("kind", &EnvelopeModel::kind)
      .def_readwrite("width", &EnvelopeModel::width)
      .def_readwrite("lifetime", &EnvelopeModel::lifetime)
      .def("validate", &EnvelopeModel::validate)
      .def("__call__", &EnvelopeModel::operator(), py::arg("t"));

  py::class_<TDIConfig>(m, "TDIConfig",
                        "Two-branch interferometric probe: one scattering channel at t1, "
                        "a second at t2 >= t1, with relative phase phi.")
      .def(py::init<>())
      .def_readwrite("p", &TDIConfig::p)
      .def_readwrite("t1", &TDIConfig::t1)
      .def_readwrite("t2", &TDIConfig::t2)
      .def_readwrite("phi", &TDIConfig::phi)
      .def_readwrite("envelope", &TDIConfig::envelope)
      .def("validate", &TDIConfig::validate);

  m.def("detection_probability", &detection_probability, py::arg("model"), py::arg("cfg"),
        py::arg("t") = 0.0,
        "Detection probability of the two-branch amplitude: "
        "f(t)^2 [S(p,t1,t1) + S(p,t2,t2) + 2 Re(e^{i phi} S(p,t1,t2))].");

  py::class_<ProbabilityFormula>(m, "ProbabilityFormula",
                                 "The interference term assembled two ways; difference = "
                                 "literal - derived = sin(phi) Im S.")
      .def_readonly("derived", &ProbabilityFormula::derived)
      .def_readonly("literal", &ProbabilityFormula::literal)
      .def_readonly("difference", &ProbabilityFormula::difference);

  m.def("detection_probability_formula", &detection_probability_formula, py::arg("model"),
        py::arg("cfg"));

  py::class_<IntensityPair>(m, "IntensityPair",
                            "Sum and difference of the detection intensities at opposite "
                            "momentum transfers.")
      .def_readonly("i_sum", &IntensityPair::i_sum)
      .def_readonly("i_diff", &IntensityPair::i_diff);

  m.def("intensity_pm", &intensity_pm, py::arg("model"), py::arg("cfg"),
        "i_sum = P(+p) + P(-p), i_diff = P(+p) - P(-p) with a unit envelope.");
  m.def("classical_intensity_pm", &classical_intensity_pm, py::arg("model"), py::arg("cfg"),
        "The classical predictions from the exact jump-process S, in the same "
        "normalization as intensity_pm.");

  py::class_<PhaseScanRow>(m, "PhaseScanRow")
      .def_readonly("phi", &PhaseScanRow::phi)
      .def_readonly("i_sum", &PhaseScanRow::i_sum)
      .def_readonly("i_diff", &PhaseScanRow::i_diff)
      .def_readonly("std_error_sum", &PhaseScanRow::std_error_sum)
      .def_readonly("std_error_diff", &PhaseScanRow::std_error_diff);

  py::class_<PhaseScan>(m, "PhaseScan")
      .def_readonly("rows", &PhaseScan::rows)
      .def_readonly("p", &PhaseScan::p)
      .def_readonly("t1", &PhaseScan::t1)
      .def_readonly("t2", &PhaseScan::t2)
      .def_readonly("model_id", &PhaseScan::model_id)
      .def_readonly("statistical", &PhaseScan::statistical)
      .def_readonly("averaged", &PhaseScan::averaged);

  m.def("make_phase_grid", &make_phase_grid, py::arg("n"),
        "n equally spaced phases covering [0, 2 pi), starting at 0.");
  m.def("phase_scan", &phase_scan, py::arg("model"), py::arg("p"), py::arg("t1"),
        py::arg("t2"), py::arg("phi_grid"),
        "Exact quantum phase scan of (i_sum, i_diff) over a strictly increasing grid.");
  m.def("averaged_phase_scan", &averaged_phase_scan, py::arg("model"), py::arg("p"),
        py::arg("dt"), py::arg("phi_grid"), py::arg("n_t1") = 64,
        "Phase scan with the first scattering time averaged uniformly over one "
        "oscillation period of the two-site target, at fixed delay dt.");
  m.def("classical_phase_scan", &classical_phase_scan, py::arg("model"), py::arg("p"),
        py::arg("t1"), py::arg("t2"), py::arg("phi_grid"),
        "Exact classical scan via the rate-generator S; std errors are zero.");
  m.def("classical_phase_scan_mc", &classical_phase_scan_mc, py::arg("model"), py::arg("p"),
        py::arg("t1"), py::arg("t2"), py::arg("phi_grid"), py::arg("n_traj"),
        "Trajectory-sampled classical scan; every (row, sign) cell draws an independent "
        "stream so fitted-coefficient errors propagate exactly.");

  py::class_<HarmonicFit>(m, "HarmonicFit",
                          "Least-squares coefficients of c0 + c_cos cos(phi) + c_sin "
                          "sin(phi) with exactly propagated standard errors.")
      .def_readonly("c0", &HarmonicFit::c0)
      .def_readonly("c_cos", &HarmonicFit::c_cos)
      .def_readonly("c_sin", &HarmonicFit::c_sin)
      .def_readonly("err_c0", &HarmonicFit::err_c0)
      .def_readonly("err_cos", &HarmonicFit::err_cos)
      .def_readonly("err_sin", &HarmonicFit::err_sin);

  m.def("fit_harmonic", &fit_harmonic, py::arg("phi"), py::arg("y"),
        py::arg("std_error") = std::vector<double>{},
        "Fit y(phi) to c0 + c_cos cos(phi) + c_sin sin(phi).");

  py::class_<Verdict>(m, "Verdict",
                      "Outcome of the classicality test on a phase scan: a resolved "
                      "sin(phi) component in the sum channel, or a nonzero difference "
                      "channel at phi = 0 or pi, excludes every classical jump model.")
      .def_readonly("classical_excluded", &Verdict::classical_excluded)
      .def_readonly("a_sin", &Verdict::a_sin)
      .def_readonly("a_sin_error", &Verdict::a_sin_error)
      .def_readonly("a_sin_threshold", &Verdict::a_sin_threshold)
      .def_readonly("max_i_diff_npi", &Verdict::max_i_diff_npi)
      .def_readonly("i_diff_error", &Verdict::i_diff_error)
      .def_readonly("i_diff_threshold", &Verdict::i_diff_threshold)
      .def_readonly("detail", &Verdict::detail);

  m.def("discriminate", &discriminate, py::arg("scan"), py::arg("tol") = Tolerances{},
        "Fit the scan and decide; requires rows at phi = 0 and pi and at least six rows.");

  m.def("moessbauer_signal", &moessbauer_signal, py::arg("model"), py::arg("p"),
        py::arg("times"), py::arg("lifetime"), py::arg("omega_doppler"), py::arg("phi"),
        "Resonant-filter beat signal of an undelayed branch against a delayed, "
        "frequency-shifted branch under a causal exponential envelope.");

  // ---- two-site closed forms -----------------------------------------------

  py::class_<DoubleWellState>(m, "DoubleWellState",
                              "Two-site target in closed-form notation: occupation p_left, "
                              "coherence gamma, tunneling frequency omega, separation d.")
      .def(py::init<>())
      .def_readwrite("p_left", &DoubleWellState::p_left)
      .def_readwrite("gamma", &DoubleWellState::gamma)
      .def_readwrite("omega", &DoubleWellState::omega)
      .def_readwrite("d", &DoubleWellState::d)
      .def("validate", &DoubleWellState::validate, py::arg("tol") = 1e-10)
      .def("to_model", &DoubleWellState::to_model);

  py::class_<TrigFactors>(m, "TrigFactors",
                          "s = sin(omega dt / 2), c = cos(omega dt / 2), "
                          "s_full = sin(omega dt).")
      .def_readonly("s", &TrigFactors::s)
      .def_readonly("c", &TrigFactors::c)
      .def_readonly("s_full", &TrigFactors::s_full)
      .def_static("at", &TrigFactors::at, py::arg("omega"), py::arg("dt"));

  py::enum_<Separation>(m, "Separation", "The three separations of the two-site lattice.")
      .value("minus_d", Separation::minus_d)
      .value("zero", Separation::zero)
      .value("plus_d", Separation::plus_d);

  py::class_<AnalyticComparison>(m, "AnalyticComparison",
                                 "A closed-form expression (literal, and with first-power "
                                 "trig factors squared) next to the numeric oracle.")
      .def_readonly("literal", &AnalyticComparison::literal)
      .def_readonly("literal_squared", &AnalyticComparison::literal_squared)
      .def_readonly("oracle", &AnalyticComparison::oracle)
      .def_readonly("abs_diff", &AnalyticComparison::abs_diff);

  m.def("dcf_analytic", &dcf_analytic, py::arg("state"), py::arg("dt"), py::arg("r"),
        "Closed-form couple correlation of the two-site target vs the numeric engine.");
  m.def("isf_analytic", &isf_analytic, py::arg("state"), py::arg("dt"), py::arg("p"),
        "Closed-form two-site scattering function vs the numeric engine.");
  m.def("averaged_isf", &averaged_isf, py::arg("state"), py::arg("dt"), py::arg("p"),
        "Closed-form scattering function averaged over the first scattering time.");
  m.def("averaged_dcf", &averaged_dcf, py::arg("state"), py::arg("dt"), py::arg("r"),
        "Closed-form averaged couple correlation vs the numeric average.");
  m.def("gamma_r_invariant", &gamma_r_invariant, py::arg("state"), py::arg("t_grid"),
        "Maximum drift of Re(gamma) over the grid; a constant of motion, so ~0.");

  // ---- model descriptions ----------------------------------------------------

  py::class_<LoadedModel>(m, "LoadedModel",
                          "A model parsed from JSON or built from a named preset; exactly "
                          "one of quantum / classical is set.")
      .def_readonly("kind", &LoadedModel::kind)
      .def_readonly("quantum", &LoadedModel::quantum)
      .def_readonly("classical", &LoadedModel::classical)
      .def("is_classical", &LoadedModel::is_classical)
      .def("unit_separation", &LoadedModel::unit_separation,
           "Characteristic separation vector used to translate the scalar scan "
           "coordinate p.d into a momentum vector.")
      .def_property_readonly(
          "canonical_json",
          [](const LoadedModel& model) { return model.canonical.dump(); },
          "Normalized JSON description; parsing it reproduces the model exactly.");

  m.def(
      "parse_model_json",
      [](const std::string& text) {
        nlohmann::json desc;
        try {
          desc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
          throw ConfigError(std::string("unparsable model description: ") + e.what());
        }
        return parse_model(desc);
      },
      py::arg("text"), "Parse a JSON model description (see LoadedModel).");
  m.def("load_model_file", &load_model_file, py::arg("path"),
        "Parse a model description from a JSON file.");
  m.def(
      "serialize_model_json",
      [](const LoadedModel& model) { return serialize_model(model).dump(); },
      py::arg("model"),
      "Canonical JSON form (sorted keys, full field set); parsing it reproduces the "
      "model exactly.");
  m.def("builtin_model", &builtin_model, py::arg("name"),
        py::arg("params") = std::map<std::string, std::string>{},
        "Build a named preset ('doublewell', 'chain', 'classical-ctmc') with key=value "
        "parameter overrides.");
  m.def("format_double", &format_double, py::arg("x"),
        "Round-trippable decimal rendering used in all CSV output.");
}
