#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace herm::cli {

inline constexpr const char* kToolVersion = "1.0.0";

enum class ExitCode : int {
  ok = 0,
  check_failed = 2,
  hypothesis_failed = 3,
  config_error = 4,
  solver_failed = 5,
};

struct Check {
  std::string name;
  std::string identity;  // the identity or statement being checked
  double value = 0.0;
  double tolerance = 0.0;
  std::string relation;  // "<=" or ">="
  bool passed = false;
};

/// Machine-readable result of one command. Serialization is deterministic: keys are
/// sorted and wall-clock timings live in a separate sidecar.
struct Report {
  std::string command;
  std::string digest;
  std::string version = kToolVersion;
  std::vector<Check> checks;
  nlohmann::json values = nlohmann::json::object();
  std::vector<std::string> fields;
  std::string status = "ok";  // ok, hypothesis_failed, config_error, solver_failed
  std::string error;
  std::map<std::string, double> timings;

  Check& at_most(std::string name, std::string identity, double value, double tolerance);
  Check& at_least(std::string name, std::string identity, double value, double tolerance);
  const Check* find(const std::string& name) const;
  bool all_passed() const;
  ExitCode exit_code() const;

  std::string to_json() const;
  std::string timings_json() const;
};

/// Writes report.json and timings.json into dir (created if missing). Throws IoError.
void write_report(const Report& report, const std::string& dir);

}  // namespace herm::cli
