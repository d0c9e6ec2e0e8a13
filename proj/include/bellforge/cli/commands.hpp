#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "bellforge/cli/report.hpp"

namespace bellforge::cli {

/// Bad flags or flag combinations; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data that parses but violates the density-operator contract; maps to exit code 3.
class InvalidInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VerifyOptions {
  int d = 3;
  double tol = 1e-10;
};

struct BellOptions {
  int d = 3;
  std::string functional = "original";  // original | chsh
  std::string state = "werner";         // werner | singlet | mixed | file:PATH
  int restarts = 50;
  std::uint64_t seed = 1;
  double tol = 1e-7;
  int max_sweeps = 200;
  std::string observables = "any";  // any | spin
  int threads = 1;
};

struct DsoFindOptions {
  int d = 3;
  std::string state = "werner";
  std::string pattern = "sym3";  // sym3 | right2
  int iters = 5000;
  double tol = 1e-5;
  std::string dump;  // path for the candidate operator, empty for none
};

RunReport cmd_verify(const VerifyOptions& opts);
RunReport cmd_bell(const BellOptions& opts);
RunReport cmd_dso_find(const DsoFindOptions& opts);

/// 0 when every check passes, 1 otherwise.
inline int exit_code(const RunReport& report) { return report.passed() ? 0 : 1; }

}  // namespace bellforge::cli
