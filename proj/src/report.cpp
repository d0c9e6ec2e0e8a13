#include "bellforge/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#ifndef BELLFORGE_VERSION
#define BELLFORGE_VERSION "0.0.0"
#endif

namespace bellforge::cli {

using json = nlohmann::ordered_json;

bool RunReport::passed() const { return failed_count() == 0; }

int RunReport::failed_count() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.pass; }));
}

const char* artifact_version() { return BELLFORGE_VERSION; }

json results_json(const RunReport& report) {
  json results = json::object();
  for (const auto& c : report.checks) {
    json entry = {{"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}};
    if (!c.note.empty()) entry["note"] = c.note;
    results[c.name] = std::move(entry);
  }
  results["overall"] = {{"value", report.failed_count()}, {"threshold", 0}, {"pass", report.passed()}};
  return results;
}

json report_json(const RunReport& report) {
  json out = json::object();
  out["command"] = report.command;
  out["parameters"] = report.parameters;
  out["results"] = results_json(report);
  out["wall_time_ms"] = report.wall_time_ms;
  out["artifact_version"] = artifact_version();
  return out;
}

namespace {

void write(std::string& out, const json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(key).dump() + ": ";
        write(out, value, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write(out, j[i], depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const json& j) {
  std::string out;
  write(out, j, 0);
  out += '\n';
  return out;
}

}  // namespace bellforge::cli
