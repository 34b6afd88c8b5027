#include "herm/cli/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "herm/errors.hpp"

namespace herm::cli {

using json = nlohmann::json;

Check& Report::at_most(std::string name, std::string identity, double value, double tolerance) {
  checks.push_back({std::move(name), std::move(identity), value, tolerance, "<=", value <= tolerance});
  return checks.back();
}

Check& Report::at_least(std::string name, std::string identity, double value, double tolerance) {
  checks.push_back({std::move(name), std::move(identity), value, tolerance, ">=", value >= tolerance});
  return checks.back();
}

const Check* Report::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool Report::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

ExitCode Report::exit_code() const {
  if (status == "config_error") return ExitCode::config_error;
  if (status == "solver_failed") return ExitCode::solver_failed;
  if (status == "hypothesis_failed") return ExitCode::hypothesis_failed;
  return all_passed() ? ExitCode::ok : ExitCode::check_failed;
}

std::string Report::to_json() const {
  json j;
  j["command"] = command;
  j["config_digest"] = digest;
  j["version"] = version;
  j["status"] = status;
  if (!error.empty()) j["error"] = error;
  json cs = json::array();
  for (const auto& c : checks) {
    cs.push_back({{"name", c.name},
                  {"identity", c.identity},
                  {"value", c.value},
                  {"tolerance", c.tolerance},
                  {"relation", c.relation},
                  {"passed", c.passed}});
  }
  j["checks"] = std::move(cs);
  j["all_passed"] = all_passed();
  j["exit_code"] = static_cast<int>(exit_code());
  j["values"] = values;
  j["fields"] = fields;
  return j.dump(2) + "\n";
}

std::string Report::timings_json() const {
  json j = json::object();
  double total = 0.0;
  for (const auto& [k, v] : timings) {
    j["stages"][k] = v;
    total += v;
  }
  j["total_seconds"] = total;
  return j.dump(2) + "\n";
}

void write_report(const Report& report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& text) {
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path + "'");
  };
  write("report.json", report.to_json());
  write("timings.json", report.timings_json());
}

}  // namespace herm::cli
