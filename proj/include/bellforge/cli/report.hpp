#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace bellforge::cli {

struct Check {
  std::string name;
  double value = 0;
  double threshold = 0;
  bool pass = false;
  std::string note;  // optional, e.g. "VIOLATION"
};

/// Machine-readable result of one CLI command.
struct RunReport {
  std::string command;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::vector<Check> checks;
  double wall_time_ms = 0;

  bool passed() const;
  int failed_count() const;
};

/// The "results" object: one entry per check in insertion order, then "overall".
nlohmann::ordered_json results_json(const RunReport& report);

/// Full report with the stable top-level field order
/// command, parameters, results, wall_time_ms, artifact_version.
nlohmann::ordered_json report_json(const RunReport& report);

/// Serializes with two-space indentation; floating-point numbers use 17 significant digits.
std::string dump_json(const nlohmann::ordered_json& j);

const char* artifact_version();

}  // namespace bellforge::cli
