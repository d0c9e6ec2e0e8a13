// bellforge: verify the Werner-state operator identities, maximize Bell/CHSH functionals and
// search for tripartite source operators. Reports are JSON on stdout.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage error, 3 invalid input data.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "bellforge/cli/commands.hpp"
#include "bellforge/cli/report.hpp"
#include "bellforge/tensor_operator.hpp"

namespace {

using namespace bellforge::cli;

int thread_budget(int restarts) {
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("BELLFORGE_THREADS")) {
    try {
      threads = std::min(threads, std::max(1, std::stoi(env)));
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring malformed BELLFORGE_THREADS='" << env << "'\n";
    }
  }
  return std::min(threads, restarts);
}

void print_summary(const RunReport& report) {
  for (const auto& c : report.checks) {
    std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value << " (threshold " << c.threshold << ")";
    if (!c.note.empty()) std::cerr << "  " << c.note;
    std::cerr << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Werner-state source operators and Bell/CHSH see-saw optimization"};
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false;
  app.add_flag("--quiet,-q", quiet, "Print only the JSON report");

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check the algebraic identities for one dimension");
  verify_cmd->add_option("--d", verify.d, "Local dimension (2..6)")->required();
  verify_cmd->add_option("--tol", verify.tol, "Frobenius tolerance");

  BellOptions bell;
  auto* bell_cmd = app.add_subcommand("bell", "Maximize a Bell functional by see-saw");
  bell_cmd->add_option("--d", bell.d, "Local dimension (2..6)");
  bell_cmd->add_option("--functional", bell.functional, "original | chsh");
  bell_cmd->add_option("--state", bell.state, "werner | singlet | mixed | file:PATH");
  bell_cmd->add_option("--restarts", bell.restarts, "Random restarts");
  bell_cmd->add_option("--seed", bell.seed, "Base seed; restart r uses seed + r");
  bell_cmd->add_option("--tol", bell.tol, "Tolerance added to the classical bound");
  bell_cmd->add_option("--max-sweeps", bell.max_sweeps, "Sweeps per restart");
  bell_cmd->add_option("--observables", bell.observables, "any (norm <= 1) | spin (traceless, spectrum +-1)");

  DsoFindOptions dso;
  auto* dso_cmd = app.add_subcommand("dso-find", "Search for a tripartite source operator by Dykstra projections");
  dso_cmd->add_option("--d", dso.d, "Local dimension (2..6)");
  dso_cmd->add_option("--state", dso.state, "werner | singlet | mixed | file:PATH");
  dso_cmd->add_option("--pattern", dso.pattern, "sym3 (all three marginals) | right2 (marginals 2 and 3)");
  dso_cmd->add_option("--iters", dso.iters, "Maximum iterations");
  dso_cmd->add_option("--tol", dso.tol, "Residual tolerance");
  dso_cmd->add_option("--dump", dso.dump, "Write the candidate operator to PATH");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunReport report;
    if (*verify_cmd) {
      report = cmd_verify(verify);
    } else if (*bell_cmd) {
      bell.threads = thread_budget(bell.restarts);
      report = cmd_bell(bell);
    } else {
      report = cmd_dso_find(dso);
    }
    std::cout << dump_json(report_json(report));
    if (!quiet) print_summary(report);
    return exit_code(report);
  } catch (const UsageError& e) {
    if (!quiet) std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidInputError& e) {
    if (!quiet) std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const bellforge::ContractError& e) {
    if (!quiet) std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
