#include "tdi/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace tdi {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& message) { throw ConfigError(message); }

void check_keys(const json& j, std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) bad("model description: unknown field '" + item.key() + "'");
  }
}

double get_number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) bad(std::string("model description: '") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::string get_string(const json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) bad(std::string("model description: '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

std::uint64_t get_seed(const json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    bad(std::string("model description: '") + key + "' must be a nonnegative integer");
  }
  if (v.is_number_integer() && v.get<long long>() < 0) {
    bad(std::string("model description: '") + key + "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

Vec3 parse_vec3(const json& v, const char* what) {
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
      !v[2].is_number()) {
    bad(std::string("model description: ") + what + " must be an array of 3 numbers");
  }
  return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

json vec3_to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

Eigen::MatrixXd parse_real_matrix(const json& v, const char* what) {
  if (!v.is_array() || v.empty()) {
    bad(std::string("model description: ") + what + " must be a nonempty array of rows");
  }
  const std::size_t n = v.size();
  Eigen::MatrixXd m(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    const json& row = v[a];
    if (!row.is_array() || row.size() != n) {
      bad(std::string("model description: ") + what + " must be square");
    }
    for (std::size_t b = 0; b < n; ++b) {
      if (!row[b].is_number()) {
        bad(std::string("model description: ") + what + " entries must be numbers");
      }
      m(a, b) = row[b].get<double>();
    }
  }
  return m;
}

Operator parse_initial_matrix(const json& j, Eigen::Index dim) {
  const Eigen::MatrixXd re = parse_real_matrix(j.at("initial_re"), "'initial_re'");
  Eigen::MatrixXd im = Eigen::MatrixXd::Zero(re.rows(), re.cols());
  if (j.contains("initial_im")) {
    im = parse_real_matrix(j.at("initial_im"), "'initial_im'");
    if (im.rows() != re.rows()) bad("model description: initial_re and initial_im sizes differ");
  }
  if (re.rows() != dim) bad("model description: explicit initial state has the wrong dimension");
  return re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
}

json matrix_part_to_json(const Operator& m, bool imaginary) {
  json rows = json::array();
  for (Eigen::Index a = 0; a < m.rows(); ++a) {
    json row = json::array();
    for (Eigen::Index b = 0; b < m.cols(); ++b) {
      row.push_back(imaginary ? m(a, b).imag() : m(a, b).real());
    }
    rows.push_back(row);
  }
  return rows;
}

LoadedModel parse_doublewell(const json& j) {
  check_keys(j, {"kind", "id", "omega", "d", "p_left", "gamma_re", "gamma_im", "initial_re",
                 "initial_im"});
  const double omega = get_number(j, "omega", 1.0);
  const Vec3 d = j.contains("d") ? parse_vec3(j.at("d"), "'d'") : Vec3::UnitX().eval();
  const bool explicit_initial = j.contains("initial_re") || j.contains("initial_im");
  const bool parametric_initial =
      j.contains("p_left") || j.contains("gamma_re") || j.contains("gamma_im");
  if (explicit_initial && parametric_initial) {
    bad("model description: give either p_left/gamma_re/gamma_im or initial_re/initial_im");
  }

  double p_left = 0.5;
  Complex gamma = 0.0;
  if (explicit_initial) {
    if (!j.contains("initial_re")) bad("model description: initial_im without initial_re");
    const Operator mu = parse_initial_matrix(j, 2);
    try {
      require_density(mu, 1e-9, "explicit initial state");
    } catch (const std::invalid_argument& e) {
      bad(e.what());
    }
    p_left = mu(0, 0).real();
    gamma = mu(0, 1);
  } else {
    p_left = get_number(j, "p_left", 0.5);
    gamma = Complex(get_number(j, "gamma_re", 0.0), get_number(j, "gamma_im", 0.0));
  }

  LoadedModel out;
  out.kind = "doublewell";
  try {
    out.quantum = build_double_well(omega, d, p_left, gamma);
  } catch (const std::invalid_argument& e) {
    bad(e.what());
  }
  out.quantum->id = get_string(j, "id", "doublewell");
  out.canonical = json{{"kind", "doublewell"},
                       {"id", out.quantum->id},
                       {"omega", omega},
                       {"d", vec3_to_json(d)},
                       {"p_left", p_left},
                       {"gamma_re", gamma.real()},
                       {"gamma_im", gamma.imag()}};
  return out;
}

LoadedModel parse_chain(const json& j) {
  check_keys(j, {"kind", "id", "n_sites", "hop", "spacing", "initial_re", "initial_im"});
  int n_sites = 4;
  if (j.contains("n_sites")) {
    const json& v = j.at("n_sites");
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
      bad("model description: 'n_sites' must be an integer");
    }
    n_sites = v.get<int>();
  }
  const double hop = get_number(j, "hop", 1.0);
  const double spacing = get_number(j, "spacing", 1.0);

  LoadedModel out;
  out.kind = "chain";
  try {
    out.quantum = build_chain(n_sites, hop, spacing);
    if (j.contains("initial_re") || j.contains("initial_im")) {
      if (!j.contains("initial_re")) bad("model description: initial_im without initial_re");
      *out.quantum = with_initial(*out.quantum, parse_initial_matrix(j, n_sites));
    }
  } catch (const std::invalid_argument& e) {
    bad(e.what());
  }
  out.quantum->id = get_string(j, "id", "chain");

  out.canonical = json{{"kind", "chain"},
                       {"id", out.quantum->id},
                       {"n_sites", n_sites},
                       {"hop", hop},
                       {"spacing", spacing}};
  Operator default_initial = Operator::Zero(n_sites, n_sites);
  default_initial(0, 0) = 1.0;
  if (max_abs(out.quantum->initial - default_initial) != 0.0) {
    out.canonical["initial_re"] = matrix_part_to_json(out.quantum->initial, false);
    out.canonical["initial_im"] = matrix_part_to_json(out.quantum->initial, true);
  }
  return out;
}

LoadedModel parse_classical(const json& j) {
  check_keys(j, {"kind", "id", "positions", "rates", "initial", "seed"});
  if (!j.contains("positions") || !j.contains("rates") || !j.contains("initial")) {
    bad("model description: classical-ctmc needs 'positions', 'rates' and 'initial'");
  }
  const json& pos = j.at("positions");
  if (!pos.is_array() || pos.empty()) {
    bad("model description: 'positions' must be a nonempty array");
  }
  ClassicalModel model;
  for (const json& r : pos) model.positions.push_back(parse_vec3(r, "'positions' entry"));

  const Eigen::MatrixXd rates = parse_real_matrix(j.at("rates"), "'rates'");
  if (static_cast<std::size_t>(rates.rows()) != model.positions.size()) {
    bad("model description: 'rates' size does not match 'positions'");
  }
  model.rates.assign(model.positions.size(), std::vector<double>(model.positions.size(), 0.0));
  for (Eigen::Index a = 0; a < rates.rows(); ++a) {
    for (Eigen::Index b = 0; b < rates.cols(); ++b) model.rates[a][b] = rates(a, b);
  }

  const json& init = j.at("initial");
  if (!init.is_array() || init.size() != model.positions.size()) {
    bad("model description: 'initial' must list one probability per site");
  }
  for (const json& w : init) {
    if (!w.is_number()) bad("model description: 'initial' entries must be numbers");
    model.initial.push_back(w.get<double>());
  }
  model.seed = get_seed(j, "seed", 1);
  model.id = get_string(j, "id", "classical-ctmc");
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    bad(e.what());
  }

  LoadedModel out;
  out.kind = "classical-ctmc";
  out.classical = model;

  json positions = json::array();
  for (const Vec3& r : model.positions) positions.push_back(vec3_to_json(r));
  json rate_rows = json::array();
  for (const auto& row : model.rates) rate_rows.push_back(row);
  out.canonical = json{{"kind", "classical-ctmc"}, {"id", model.id},
                       {"positions", positions},  {"rates", rate_rows},
                       {"initial", model.initial}, {"seed", model.seed}};
  return out;
}

double parse_double_string(const std::string& text, const std::string& key) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || !std::isfinite(value)) {
    bad("parameter '" + key + "': cannot parse number from '" + text + "'");
  }
  return value;
}

std::uint64_t parse_seed_string(const std::string& text, const std::string& key) {
  char* end = nullptr;
  const unsigned long long value = std::strtoull(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0') {
    bad("parameter '" + key + "': cannot parse nonnegative integer from '" + text + "'");
  }
  return value;
}

long parse_int_string(const std::string& text, const std::string& key) {
  char* end = nullptr;
  const long value = std::strtol(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0') {
    bad("parameter '" + key + "': cannot parse integer from '" + text + "'");
  }
  return value;
}

}  // namespace

Vec3 LoadedModel::unit_separation() const {
  if (quantum && quantum->lattice.n_sites() >= 2) {
    return quantum->lattice.sites[1] - quantum->lattice.sites[0];
  }
  if (classical && classical->positions.size() >= 2) {
    return classical->positions[1] - classical->positions[0];
  }
  return Vec3::UnitX();
}

LoadedModel parse_model(const nlohmann::json& description) {
  if (!description.is_object()) bad("model description must be a JSON object");
  const std::string kind = get_string(description, "kind", "");
  if (kind == "doublewell") return parse_doublewell(description);
  if (kind == "chain") return parse_chain(description);
  if (kind == "classical-ctmc") return parse_classical(description);
  bad("model description: unknown kind '" + kind +
      "' (expected doublewell, chain or classical-ctmc)");
}

LoadedModel load_model_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) bad("cannot open model file: " + path);
  json parsed;
  try {
    parsed = json::parse(file);
  } catch (const json::parse_error& e) {
    bad("cannot parse model file " + path + ": " + e.what());
  }
  return parse_model(parsed);
}

nlohmann::json serialize_model(const LoadedModel& model) { return model.canonical; }

LoadedModel builtin_model(const std::string& name,
                          const std::map<std::string, std::string>& params) {
  json desc;
  if (name == "doublewell") {
    desc["kind"] = "doublewell";
    double dx = 1.0;
    for (const auto& [key, value] : params) {
      if (key == "omega" || key == "p_left" || key == "gamma_re" || key == "gamma_im") {
        desc[key] = parse_double_string(value, key);
      } else if (key == "d") {
        dx = parse_double_string(value, key);
      } else {
        bad("unknown doublewell parameter '" + key +
            "' (expected omega, d, p_left, gamma_re, gamma_im)");
      }
    }
    desc["d"] = json::array({dx, 0.0, 0.0});
  } else if (name == "chain") {
    desc["kind"] = "chain";
    for (const auto& [key, value] : params) {
      if (key == "n_sites") {
        desc[key] = parse_int_string(value, key);
      } else if (key == "hop" || key == "spacing") {
        desc[key] = parse_double_string(value, key);
      } else {
        bad("unknown chain parameter '" + key + "' (expected n_sites, hop, spacing)");
      }
    }
  } else if (name == "classical-ctmc") {
    double rate = 1.0, dx = 1.0, p_left = 0.5;
    std::uint64_t seed = 1;
    for (const auto& [key, value] : params) {
      if (key == "rate") {
        rate = parse_double_string(value, key);
      } else if (key == "d") {
        dx = parse_double_string(value, key);
      } else if (key == "p_left") {
        p_left = parse_double_string(value, key);
      } else if (key == "seed") {
        seed = parse_seed_string(value, key);
      } else {
        bad("unknown classical-ctmc parameter '" + key + "' (expected rate, d, p_left, seed)");
      }
    }
    if (rate < 0.0) bad("parameter 'rate': must be nonnegative");
    desc["kind"] = "classical-ctmc";
    desc["positions"] = json::array({json::array({-0.5 * dx, 0.0, 0.0}),
                                     json::array({0.5 * dx, 0.0, 0.0})});
    desc["rates"] = json::array({json::array({0.0, rate}), json::array({rate, 0.0})});
    desc["initial"] = json::array({p_left, 1.0 - p_left});
    desc["seed"] = seed;
  } else {
    bad("unknown built-in model '" + name +
        "' (expected doublewell, chain or classical-ctmc)");
  }
  return parse_model(desc);
}

std::string format_double(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

}  // namespace tdi
