#pragma once

#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "tdi/classical.hpp"
#include "tdi/target_model.hpp"

namespace tdi {

/// Raised for malformed model descriptions and invalid parameter overrides;
/// the command-line front end maps it to the configuration-error exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A model parsed from JSON or built from a named preset: exactly one of
/// `quantum` / `classical` is set. `canonical` is the normalized description
/// that serialize_model returns; parsing it again reproduces the same model.
struct LoadedModel {
  std::string kind;  // "doublewell" | "chain" | "classical-ctmc"
  std::optional<TargetModel> quantum;
  std::optional<ClassicalModel> classical;
  nlohmann::json canonical;

  bool is_classical() const { return classical.has_value(); }
  /// Characteristic separation vector used to translate the scalar scan
  /// coordinate p.d into a momentum vector (site separation of two-site
  /// models, lattice spacing along x for chains).
  Vec3 unit_separation() const;
};

/// Parse a model description. Schema (all numbers IEEE doubles):
///   {"kind":"doublewell","id":...,"omega":...,"d":[x,y,z],
///    "p_left":...,"gamma_re":...,"gamma_im":...}
///   {"kind":"chain","id":...,"n_sites":...,"hop":...,"spacing":...}
///   {"kind":"classical-ctmc","id":...,"positions":[[x,y,z],...],
///    "rates":[[...],...],"initial":[...],"seed":...}
/// Quantum kinds also accept "initial_re"/"initial_im" (square matrices) as
/// an explicit initial state; for two-site models that is canonicalized back
/// to p_left/gamma. Unknown fields are rejected.
LoadedModel parse_model(const nlohmann::json& description);

LoadedModel load_model_file(const std::string& path);

/// Canonical JSON form (sorted keys, full field set); parse_model of the
/// result reproduces the model exactly.
nlohmann::json serialize_model(const LoadedModel& model);

/// Build one of the named presets ("doublewell", "chain", "classical-ctmc"),
/// applying `key=value` parameter overrides. Unknown names/keys or unparsable
/// values raise ConfigError.
LoadedModel builtin_model(const std::string& name,
                          const std::map<std::string, std::string>& params = {});

/// Fixed-format decimal rendering used in all CSV output: 17 significant
/// digits via "%.17g" (round-trippable), '.' decimal point, no locale.
std::string format_double(double x);

}  // namespace tdi
