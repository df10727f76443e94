// tdisim command-line front end: loads a model (JSON file or built-in name),
// runs the requested scan, and writes plot-ready CSV plus a JSON sidecar that
// records tool version, seed and the fully resolved configuration.
//
// Exit codes: 0 success / classical-compatible, 1 numeric failure (non-finite
// value in results), 2 configuration error, 3 classical statistics excluded.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdi/classical.hpp"
#include "tdi/correlations.hpp"
#include "tdi/doublewell_analytic.hpp"
#include "tdi/model_io.hpp"
#include "tdi/operator_algebra.hpp"
#include "tdi/target_model.hpp"
#include "tdi/tdi_signal.hpp"
#include "tdi/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tdi;

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Raised when a computed result contains a non-finite value; mapped to exit 1.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOpts {
  std::string model_source = "doublewell";
  std::vector<std::string> params;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  bool seed_given = false;
  double tol = 1e-10;
  double sigma = 5.0;
  bool average_t1 = false;
  int t1_samples = 64;
  bool allow_sparse = false;
  bool exact = false;
  std::uint64_t n_traj = 100000;
  int n_phi = 8;
};

struct TimeOpts {
  double t1 = 0.0;
  double t2 = 0.0;
  std::optional<double> dt;
  bool t2_given = false;

  double delay() const { return dt ? *dt : t2 - t1; }
  double second() const { return dt ? t1 + *dt : t2; }
  void resolve() {
    if (dt && t2_given) throw ConfigError("give either --t2 or --dt, not both");
  }
};

double require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericError(std::string("non-finite value in ") + what);
  return v;
}

LoadedModel resolve_model(const GlobalOpts& g) {
  std::map<std::string, std::string> kv;
  for (const std::string& s : g.params) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("--param expects key=value, got '" + s + "'");
    }
    kv[s.substr(0, eq)] = s.substr(eq + 1);
  }
  const bool looks_like_file =
      g.model_source.find('/') != std::string::npos ||
      (g.model_source.size() > 5 &&
       g.model_source.substr(g.model_source.size() - 5) == ".json");
  LoadedModel model;
  if (looks_like_file || fs::exists(g.model_source)) {
    if (!kv.empty()) {
      throw ConfigError("--param overrides apply to built-in models, not model files");
    }
    model = load_model_file(g.model_source);
  } else {
    model = builtin_model(g.model_source, kv);
  }
  if (model.classical && g.seed_given) {
    model.classical->seed = g.seed;
    model.canonical["seed"] = g.seed;
  }
  return model;
}

std::uint64_t resolved_seed(const LoadedModel& model, const GlobalOpts& g) {
  return model.classical ? model.classical->seed : g.seed;
}

Vec3 momentum_from_pd(const LoadedModel& model, double pd) {
  const Vec3 u = model.unit_separation();
  const double n2 = u.squaredNorm();
  if (!(n2 > 0.0)) throw ConfigError("model has no usable site separation for p.d scans");
  return (pd / n2) * u;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file: " + path.string());
  out << content;
  if (!out) throw ConfigError("failed while writing: " + path.string());
}

fs::path prepare_out_dir(const GlobalOpts& g) {
  fs::path dir(g.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir)) {
    throw ConfigError("cannot create output directory: " + dir.string());
  }
  return dir;
}

json make_meta(const GlobalOpts& g, const LoadedModel& model, const std::string& subcommand,
               json config) {
  config["tol"] = g.tol;
  config["sigma"] = g.sigma;
  return json{{"tool", kToolName},
              {"version", kToolVersion},
              {"subcommand", subcommand},
              {"seed", resolved_seed(model, g)},
              {"model", model.canonical},
              {"config", std::move(config)}};
}

/// Grid acceptable to the classicality discriminator: >= 6 rows including
/// phi = 0 and phi = pi (within 1e-9).
bool grid_fits_discriminator(const std::vector<double>& grid) {
  if (grid.size() < 6) return false;
  bool has_zero = false, has_pi = false;
  for (double phi : grid) {
    if (std::abs(phi) < 1e-9) has_zero = true;
    if (std::abs(phi - kPi) < 1e-9) has_pi = true;
  }
  return has_zero && has_pi;
}

PhaseScan run_scan(const LoadedModel& model, const GlobalOpts& g, const Vec3& p, double t1,
                   double dt, const std::vector<double>& grid) {
  if (dt < 0.0) throw ConfigError("scan delay must be nonnegative (t2 >= t1)");
  if (model.classical) {
    if (g.average_t1) {
      throw ConfigError("--average-t1 applies to two-site quantum targets only");
    }
    if (g.exact) return classical_phase_scan(*model.classical, p, t1, t1 + dt, grid);
    return classical_phase_scan_mc(*model.classical, p, t1, t1 + dt, grid, g.n_traj);
  }
  if (g.average_t1) {
    return averaged_phase_scan(*model.quantum, p, dt, grid, g.t1_samples);
  }
  return phase_scan(*model.quantum, p, t1, t1 + dt, grid);
}

std::string scan_csv(const PhaseScan& scan, bool with_errors) {
  std::ostringstream csv;
  csv << (with_errors ? "phi,i_plus,i_minus,stderr_plus,stderr_minus\n" : "phi,i_plus,i_minus\n");
  for (const PhaseScanRow& row : scan.rows) {
    require_finite(row.i_sum, "phase scan");
    require_finite(row.i_diff, "phase scan");
    csv << format_double(row.phi) << ',' << format_double(row.i_sum) << ','
        << format_double(row.i_diff);
    if (with_errors) {
      csv << ',' << format_double(row.std_error_sum) << ',' << format_double(row.std_error_diff);
    }
    csv << '\n';
  }
  return csv.str();
}

json fit_block(const PhaseScan& scan) {
  std::vector<double> phi, i_sum, i_diff, err_sum, err_diff;
  for (const PhaseScanRow& row : scan.rows) {
    phi.push_back(row.phi);
    i_sum.push_back(row.i_sum);
    i_diff.push_back(row.i_diff);
    err_sum.push_back(row.std_error_sum);
    err_diff.push_back(row.std_error_diff);
  }
  const HarmonicFit sum_fit = fit_harmonic(phi, i_sum, err_sum);
  const HarmonicFit diff_fit = fit_harmonic(phi, i_diff, err_diff);
  const auto pack = [](const HarmonicFit& f) {
    return json{{"c0", f.c0},         {"c_cos", f.c_cos},     {"c_sin", f.c_sin},
                {"err_c0", f.err_c0}, {"err_cos", f.err_cos}, {"err_sin", f.err_sin}};
  };
  return json{{"i_plus", pack(sum_fit)}, {"i_minus", pack(diff_fit)}};
}

json verdict_to_json(const Verdict& v) {
  return json{{"classical_excluded", v.classical_excluded},
              {"a_sin", v.a_sin},
              {"a_sin_error", v.a_sin_error},
              {"a_sin_threshold", v.a_sin_threshold},
              {"max_i_diff_npi", v.max_i_diff_npi},
              {"i_diff_error", v.i_diff_error},
              {"i_diff_threshold", v.i_diff_threshold},
              {"detail", v.detail}};
}

// ----------------------------------------------------------------- subcommands

int cmd_isf(const GlobalOpts& g, const std::vector<double>& pds, TimeOpts times) {
  times.resolve();
  const LoadedModel model = resolve_model(g);
  const double t1 = times.t1;
  const double t2 = times.second();

  std::ostringstream csv;
  csv << "p_dot_d,t1,t2,s_re,s_im\n";
  for (double pd : pds) {
    const Vec3 p = momentum_from_pd(model, pd);
    Complex value;
    if (model.classical) {
      value = classical_isf_exact(*model.classical, p, t1, t2);
    } else {
      value = isf(*model.quantum, p, t1, t2).value;
    }
    require_finite(value.real(), "isf");
    require_finite(value.imag(), "isf");
    csv << format_double(pd) << ',' << format_double(t1) << ',' << format_double(t2) << ','
        << format_double(value.real()) << ',' << format_double(value.imag()) << '\n';
  }

  const fs::path dir = prepare_out_dir(g);
  write_file(dir / "isf.csv", csv.str());
  const json meta = make_meta(g, model, "isf",
                              json{{"p_dot_d", pds}, {"t1", t1}, {"t2", t2}});
  write_file(dir / "isf_meta.json", meta.dump(2) + "\n");
  return 0;
}

int cmd_dcf(const GlobalOpts& g, TimeOpts times) {
  times.resolve();
  const LoadedModel model = resolve_model(g);
  if (!model.quantum) {
    throw ConfigError("dcf requires a quantum target model (site operators)");
  }
  const double t1 = times.t1;
  const double t2 = times.second();

  std::ostringstream csv;
  csv << "r_x,r_y,r_z,t1,t2,g_re,g_im\n";
  for (const SeparationValue& sv : dcf_all(*model.quantum, t1, t2)) {
    require_finite(sv.value.real(), "dcf");
    require_finite(sv.value.imag(), "dcf");
    csv << format_double(sv.r[0]) << ',' << format_double(sv.r[1]) << ','
        << format_double(sv.r[2]) << ',' << format_double(t1) << ',' << format_double(t2) << ','
        << format_double(sv.value.real()) << ',' << format_double(sv.value.imag()) << '\n';
  }

  const fs::path dir = prepare_out_dir(g);
  write_file(dir / "dcf.csv", csv.str());
  const json meta = make_meta(g, model, "dcf", json{{"t1", t1}, {"t2", t2}});
  write_file(dir / "dcf_meta.json", meta.dump(2) + "\n");
  return 0;
}

int cmd_tdi_scan(const GlobalOpts& g, double pd, TimeOpts times) {
  times.resolve();
  const LoadedModel model = resolve_model(g);
  const std::vector<double> grid = make_phase_grid(g.n_phi);
  if (!grid_fits_discriminator(grid) && !g.allow_sparse) {
    throw ConfigError(
        "phi grid too sparse for the classicality discriminator (need >= 6 points "
        "including 0 and pi); pass --allow-sparse to scan anyway");
  }
  const Vec3 p = momentum_from_pd(model, pd);
  const PhaseScan scan = run_scan(model, g, p, times.t1, times.delay(), grid);
  const std::string csv = scan_csv(scan, scan.statistical || model.is_classical());

  json config{{"p_dot_d", pd},   {"t1", times.t1},          {"t2", times.t1 + times.delay()},
              {"n_phi", g.n_phi}, {"average_t1", g.average_t1}};
  if (g.average_t1) config["t1_samples"] = g.t1_samples;
  if (model.is_classical()) {
    config["n_traj"] = g.n_traj;
    config["exact"] = g.exact;
  }
  json meta = make_meta(g, model, "tdi-scan", config);
  if (grid.size() >= 3) meta["fit"] = fit_block(scan);

  const fs::path dir = prepare_out_dir(g);
  write_file(dir / "scan.csv", csv);
  write_file(dir / "scan_meta.json", meta.dump(2) + "\n");
  return 0;
}

int cmd_discriminate(const GlobalOpts& g, double pd, TimeOpts times) {
  times.resolve();
  const LoadedModel model = resolve_model(g);
  const std::vector<double> grid = make_phase_grid(g.n_phi);
  if (!grid_fits_discriminator(grid)) {
    throw ConfigError(
        "the discriminator needs a phi grid with >= 6 points including 0 and pi; "
        "raise --n-phi");
  }
  const Vec3 p = momentum_from_pd(model, pd);
  const PhaseScan scan = run_scan(model, g, p, times.t1, times.delay(), grid);
  for (const PhaseScanRow& row : scan.rows) {
    require_finite(row.i_sum, "phase scan");
    require_finite(row.i_diff, "phase scan");
  }
  const Verdict verdict = discriminate(scan, Tolerances{g.tol, g.sigma});

  json config{{"p_dot_d", pd},   {"t1", times.t1},          {"t2", times.t1 + times.delay()},
              {"n_phi", g.n_phi}, {"average_t1", g.average_t1}};
  if (g.average_t1) config["t1_samples"] = g.t1_samples;
  if (model.is_classical()) {
    config["n_traj"] = g.n_traj;
    config["exact"] = g.exact;
  }
  json out = make_meta(g, model, "discriminate", config);
  out["verdict"] = verdict_to_json(verdict);

  const fs::path dir = prepare_out_dir(g);
  write_file(dir / "verdict.json", out.dump(2) + "\n");
  return verdict.classical_excluded ? 3 : 0;
}

int cmd_moessbauer(const GlobalOpts& g, double pd, double lifetime, double omega_d, double phi,
                   double t_max, int n_t) {
  const LoadedModel model = resolve_model(g);
  if (!model.quantum) throw ConfigError("moessbauer requires a quantum target model");
  if (n_t < 2) throw ConfigError("--n-t must be at least 2");
  if (!(t_max > 0.0)) throw ConfigError("--t-max must be positive");
  const Vec3 p = momentum_from_pd(model, pd);

  std::vector<double> times(static_cast<std::size_t>(n_t));
  for (int j = 0; j < n_t; ++j) times[j] = t_max * j / (n_t - 1);
  const std::vector<double> intensity =
      moessbauer_signal(*model.quantum, p, times, lifetime, omega_d, phi);

  std::ostringstream csv;
  csv << "t,intensity\n";
  for (std::size_t j = 0; j < times.size(); ++j) {
    require_finite(intensity[j], "moessbauer signal");
    csv << format_double(times[j]) << ',' << format_double(intensity[j]) << '\n';
  }

  const fs::path dir = prepare_out_dir(g);
  write_file(dir / "moessbauer.csv", csv.str());
  const json meta = make_meta(g, model, "moessbauer",
                              json{{"p_dot_d", pd},
                                   {"lifetime", lifetime},
                                   {"omega_d", omega_d},
                                   {"phi", phi},
                                   {"t_max", t_max},
                                   {"n_t", n_t},
                                   {"time_units", "lifetime units of the resonant filter"}});
  write_file(dir / "moessbauer_meta.json", meta.dump(2) + "\n");
  return 0;
}

int cmd_classical(const GlobalOpts& g, const std::vector<double>& pds, TimeOpts times) {
  times.resolve();
  const LoadedModel model = resolve_model(g);
  if (!model.classical) throw ConfigError("classical requires a classical-ctmc model");
  const double t1 = times.t1;
  const double t2 = times.second();

  std::ostringstream csv;
  csv << "p_dot_d,t1,t2,s_re,s_im,stderr\n";
  for (std::size_t j = 0; j < pds.size(); ++j) {
    const Vec3 p = momentum_from_pd(model, pds[j]);
    Complex value;
    double err = 0.0;
    if (g.exact) {
      value = classical_isf_exact(*model.classical, p, t1, t2);
    } else {
      const MCEstimate est = classical_isf_salted(*model.classical, p, t1, t2, g.n_traj, j);
      value = est.mean;
      err = est.std_error();
    }
    require_finite(value.real(), "classical isf");
    require_finite(value.imag(), "classical isf");
    csv << format_double(pds[j]) << ',' << format_double(t1) << ',' << format_double(t2) << ','
        << format_double(value.real()) << ',' << format_double(value.imag()) << ','
        << format_double(err) << '\n';
  }

  const fs::path dir = prepare_out_dir(g);
  write_file(dir / "classical.csv", csv.str());
  const json meta = make_meta(g, model, "classical",
                              json{{"p_dot_d", pds},
                                   {"t1", t1},
                                   {"t2", t2},
                                   {"n_traj", g.n_traj},
                                   {"exact", g.exact},
                                   {"substream_salt", "row index"}});
  write_file(dir / "classical_meta.json", meta.dump(2) + "\n");
  return 0;
}

json comparison_row(json coords, const AnalyticComparison& c) {
  coords["literal_re"] = c.literal.real();
  coords["literal_im"] = c.literal.imag();
  coords["literal_squared_re"] = c.literal_squared.real();
  coords["literal_squared_im"] = c.literal_squared.imag();
  coords["oracle_re"] = require_finite(c.oracle.real(), "report oracle");
  coords["oracle_im"] = require_finite(c.oracle.imag(), "report oracle");
  coords["abs_diff"] = c.abs_diff;
  coords["abs_diff_squared"] = std::abs(c.literal_squared - c.oracle);
  return coords;
}

int cmd_doublewell_report(const GlobalOpts& g, int grid_n) {
  const LoadedModel model = resolve_model(g);
  if (model.kind != "doublewell") {
    throw ConfigError("doublewell-report requires the two-site doublewell model");
  }
  if (grid_n < 2) throw ConfigError("--grid must be at least 2");

  DoubleWellState state;
  state.p_left = model.canonical.at("p_left").get<double>();
  state.gamma = Complex(model.canonical.at("gamma_re").get<double>(),
                        model.canonical.at("gamma_im").get<double>());
  state.omega = model.canonical.at("omega").get<double>();
  state.d = model.unit_separation();
  state.validate();
  if (state.omega == 0.0) {
    throw ConfigError("doublewell-report needs omega != 0 to span an oscillation period");
  }

  const double period = 2.0 * kPi / std::abs(state.omega);
  std::vector<double> dts(static_cast<std::size_t>(grid_n));
  for (int j = 0; j < grid_n; ++j) dts[j] = period * j / (grid_n - 1);
  std::vector<double> pds(static_cast<std::size_t>(grid_n));
  for (int j = 0; j < grid_n; ++j) pds[j] = 2.0 * kPi * j / (grid_n - 1);

  const std::vector<std::pair<std::string, Separation>> separations = {
      {"minus_d", Separation::minus_d}, {"zero", Separation::zero}, {"plus_d", Separation::plus_d}};

  json quantities = json::array();
  const auto add_quantity = [&quantities](const std::string& name, json rows, double max_diff) {
    quantities.push_back(
        json{{"name", name}, {"max_abs_diff", max_diff}, {"rows", std::move(rows)}});
  };

  for (const auto& [sep_name, sep] : separations) {
    json rows = json::array();
    double max_diff = 0.0;
    for (double dt : dts) {
      const AnalyticComparison c = dcf_analytic(state, dt, sep);
      max_diff = std::max(max_diff, c.abs_diff);
      rows.push_back(comparison_row(json{{"dt", dt}}, c));
    }
    add_quantity("dcf_" + sep_name, std::move(rows), max_diff);
  }
  for (const auto& [sep_name, sep] : separations) {
    json rows = json::array();
    double max_diff = 0.0;
    for (double dt : dts) {
      const AnalyticComparison c = averaged_dcf(state, dt, sep);
      max_diff = std::max(max_diff, c.abs_diff);
      rows.push_back(comparison_row(json{{"dt", dt}}, c));
    }
    add_quantity("dcf_averaged_" + sep_name, std::move(rows), max_diff);
  }
  {
    json rows = json::array();
    double max_diff = 0.0;
    for (double dt : dts) {
      for (double pd : pds) {
        const Vec3 p = momentum_from_pd(model, pd);
        const AnalyticComparison c = isf_analytic(state, dt, p);
        max_diff = std::max(max_diff, c.abs_diff);
        rows.push_back(comparison_row(json{{"dt", dt}, {"p_dot_d", pd}}, c));
      }
    }
    add_quantity("isf", std::move(rows), max_diff);
  }
  {
    json rows = json::array();
    double max_diff = 0.0;
    for (double dt : dts) {
      for (double pd : pds) {
        const Vec3 p = momentum_from_pd(model, pd);
        const AnalyticComparison c = averaged_isf(state, dt, p);
        max_diff = std::max(max_diff, c.abs_diff);
        rows.push_back(comparison_row(json{{"dt", dt}, {"p_dot_d", pd}}, c));
      }
    }
    add_quantity("isf_averaged", std::move(rows), max_diff);
  }

  std::vector<double> drift_grid(static_cast<std::size_t>(4 * grid_n));
  for (std::size_t j = 0; j < drift_grid.size(); ++j) {
    drift_grid[j] = 2.0 * period * static_cast<double>(j) / (drift_grid.size() - 1);
  }

  json report = make_meta(g, model, "doublewell-report", json{{"grid", grid_n}});
  report["quantities"] = std::move(quantities);
  report["gamma_re_max_drift"] = require_finite(gamma_r_invariant(state, drift_grid), "report");

  const fs::path dir = prepare_out_dir(g);
  write_file(dir / "report.json", report.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  GlobalOpts g;
  CLI::App app{"time-domain interferometry simulation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--model", g.model_source,
                 "model JSON file or built-in name (doublewell, chain, classical-ctmc)")
      ->capture_default_str();
  app.add_option("--param", g.params, "built-in model parameter override key=value (repeatable)");
  app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", g.seed, "seed override for classical models");
  app.add_option("--tol", g.tol, "algebraic tolerance")->capture_default_str();
  app.add_option("--sigma", g.sigma, "statistical significance threshold in standard errors")
      ->capture_default_str();
  app.add_flag("--average-t1", g.average_t1,
               "average the first scattering time over one oscillation period (two-site "
               "quantum targets)");
  app.add_option("--t1-samples", g.t1_samples, "samples for --average-t1 (>= 16)")
      ->capture_default_str();
  app.add_flag("--allow-sparse", g.allow_sparse,
               "allow phi grids too sparse for the discriminator in tdi-scan");
  app.add_flag("--exact", g.exact,
               "use the exact rate-generator evaluation instead of Monte Carlo for "
               "classical models");
  app.add_option("--n-traj", g.n_traj, "Monte Carlo trajectories per estimate")
      ->capture_default_str();
  app.add_option("--n-phi", g.n_phi, "phase grid size (equally spaced on [0, 2 pi))")
      ->capture_default_str();

  std::vector<double> pds{0.0};
  double scan_pd = kPi / 2.0;
  TimeOpts times;
  double lifetime = 141.0;
  double omega_d = 0.0;
  double phi = 0.0;
  double t_max = 564.0;
  int n_t = 1024;
  int grid_n = 20;

  const auto add_time_flags = [&times](CLI::App* cmd, bool with_dt) {
    cmd->add_option("--t1", times.t1, "first scattering time")->capture_default_str();
    auto* t2 = cmd->add_option("--t2", times.t2, "second scattering time")->capture_default_str();
    if (with_dt) {
      cmd->add_option("--dt", [&times](const std::vector<std::string>& vals) {
          times.dt = std::stod(vals[0]);
          return true;
        },
        "delay t2 - t1 (alternative to --t2)");
    }
    cmd->callback([&times, t2] { times.t2_given = t2->count() > 0; });
  };

  CLI::App* isf_cmd = app.add_subcommand("isf", "intermediate scattering function on a p.d grid");
  isf_cmd->add_option("--pd", pds, "p.d values (repeatable)")->capture_default_str();
  add_time_flags(isf_cmd, true);

  CLI::App* dcf_cmd = app.add_subcommand("dcf", "couple correlations at all site separations");
  add_time_flags(dcf_cmd, true);

  CLI::App* scan_cmd = app.add_subcommand("tdi-scan", "phase scan of the sum/difference channels");
  scan_cmd->add_option("--pd", scan_pd, "p.d value of the scan")->capture_default_str();
  add_time_flags(scan_cmd, true);

  CLI::App* disc_cmd =
      app.add_subcommand("discriminate", "phase scan plus classicality verdict (exit 3 = excluded)");
  disc_cmd->add_option("--pd", scan_pd, "p.d value of the scan")->capture_default_str();
  add_time_flags(disc_cmd, true);

  CLI::App* moss_cmd =
      app.add_subcommand("moessbauer", "resonant-filter beat signal over a time grid");
  moss_cmd->add_option("--pd", scan_pd, "p.d value probed")->capture_default_str();
  moss_cmd->add_option("--lifetime", lifetime, "filter lifetime T (> 0)")->capture_default_str();
  moss_cmd->add_option("--omega-d", omega_d, "frequency shift of the delayed branch")
      ->capture_default_str();
  moss_cmd->add_option("--phi", phi, "relative phase of the delayed branch")
      ->capture_default_str();
  moss_cmd->add_option("--t-max", t_max, "end of the time grid")->capture_default_str();
  moss_cmd->add_option("--n-t", n_t, "number of time samples")->capture_default_str();

  CLI::App* report_cmd = app.add_subcommand(
      "doublewell-report", "closed-form vs numeric comparison tables for the two-site target");
  report_cmd->add_option("--grid", grid_n, "points per grid axis")->capture_default_str();

  CLI::App* classical_cmd =
      app.add_subcommand("classical", "trajectory-sampled classical ISF on a p.d grid");
  classical_cmd->add_option("--pd", pds, "p.d values (repeatable)")->capture_default_str();
  add_time_flags(classical_cmd, true);

  try {
    app.parse(argc, argv);
    g.seed_given = seed_opt->count() > 0;

    if (isf_cmd->parsed()) return cmd_isf(g, pds, times);
    if (dcf_cmd->parsed()) return cmd_dcf(g, times);
    if (scan_cmd->parsed()) return cmd_tdi_scan(g, scan_pd, times);
    if (disc_cmd->parsed()) return cmd_discriminate(g, scan_pd, times);
    if (moss_cmd->parsed()) return cmd_moessbauer(g, scan_pd, lifetime, omega_d, phi, t_max, n_t);
    if (report_cmd->parsed()) return cmd_doublewell_report(g, grid_n);
    if (classical_cmd->parsed()) return cmd_classical(g, pds, times);
    std::fprintf(stderr, "error: no subcommand selected\n");
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 1;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
