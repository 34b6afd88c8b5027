#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "herm/bundle.hpp"
#include "herm/errors.hpp"
#include "herm/metric.hpp"

namespace herm::cli {

inline constexpr int kSchemaVersion = 1;

/// Schema violation in a run configuration; the message names the key path and line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class FieldFormat { csv, json };

struct BundleConfig {
  std::optional<int> canonical;  // m for the shortcut {canonical: m}
  BundleSpec spec;
};

struct Tolerances {
  double gauduchon = 1e-10;     // solver: max |Delta*_c f0|
  double poisson = 1e-10;       // solver: max |Delta_c u - f|
  double berger = 1e-8;         // quadrature vs (S + S_hat) prediction, relative
  double berger_sigma = 3.0;    // Monte-Carlo agreement in standard errors
  double curvature = 1e-9;      // curvature symmetry and trace identities, relative
  double conformal = 1e-8;      // conformal scalar-curvature law, max-norm
  double structure = 1e-7;      // Gauduchon residual of the Gauduchon representative
  double idempotence = 1e-8;    // factor of the Gauduchon representative minus 1
  double flatness = 1e-6;       // (max - min) / |C| of S~ e^u
  double flatness_abs = 1e-8;   // absolute bound when C is in the zero band
  double bundle = 1e-7;         // mean-curvature identities
  double weitzenbock = 1e-7;
  double identity = 1e-6;       // default for the identity suite entries
};

struct Seeds {
  std::uint64_t berger = 3;
  std::uint64_t hsc = 1;
  std::uint64_t identities = 7;
  std::uint64_t conformal = 11;
};

struct Sampling {
  int berger_points = 20;
  std::size_t berger_samples = 100000;  // 0 disables the Monte-Carlo path
  std::size_t hsc_points = 64;
  std::size_t hsc_directions = 32;
  int hsc_refine = 20;
  int random_functions = 10;
  std::vector<int> weitzenbock_m{1, 2};
  bool estimate_spectrum = true;
};

struct OutputConfig {
  std::string dir = "out";
  bool emit_fields = false;
  FieldFormat format = FieldFormat::csv;
  std::vector<int> slice_axes;  // 0-based axes for 1-D CSV slices through the origin
};

struct RunConfig {
  int version = kSchemaVersion;
  std::string command;
  int n = 2;
  int N = 32;
  MetricSpec metric;
  std::optional<BundleConfig> bundle;
  Tolerances tol;
  Seeds seeds;
  Sampling sampling;
  OutputConfig output;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"curvature", "gauduchon", "normalize", "bundle-cert",
                                              "identities"};
  return names;
}

/// YAML or JSON text. Unknown keys, wrong types and out-of-range values raise ConfigError.
/// With check = false the cross-field validation is left to apply_overrides, so that a
/// command given only on the command line is accepted.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>", bool check = true);
RunConfig load_config(const std::string& path, bool check = true);

struct Overrides {
  std::optional<std::string> command;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;  // replaces every seed
  std::optional<double> tol;          // replaces both solver tolerances
  std::optional<int> grid;            // replaces N
  bool emit_fields = false;
};

void apply_overrides(RunConfig& cfg, const Overrides& o);
/// Re-checks cross-field constraints (command known, grid valid, spec sizes).
void validate(const RunConfig& cfg);

/// Canonical JSON encoding of the effective configuration (sorted keys).
std::string canonical_json(const RunConfig& cfg);
/// FNV-1a 64-bit hash of canonical_json, as 16 hex digits.
std::string config_digest(const RunConfig& cfg);

std::string to_string(FieldFormat f);

}  // namespace herm::cli
