#include "bellforge/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "bellforge/bellforge.hpp"

namespace bellforge::cli {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// value <= threshold passes.
Check at_most(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, value <= threshold, {}};
}

// value >= threshold passes.
Check at_least(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, value >= threshold, {}};
}

void require_dimension(int d, int lo, int hi) {
  if (d < lo || d > hi) {
    throw UsageError("--d must be in " + std::to_string(lo) + ".." + std::to_string(hi) + ", got " +
                     std::to_string(d));
  }
}

constexpr const char* kFilePrefix = "file:";

Density resolve_state(const std::string& state, int d) {
  if (state == "werner") {
    require_dimension(d, 2, 6);
    return werner<double>(d);
  }
  if (state == "singlet") {
    if (d != 2) throw UsageError("--state singlet requires --d 2");
    return singlet<double>();
  }
  if (state == "mixed") {
    require_dimension(d, 2, 6);
    return maximally_mixed<double>(d);
  }
  if (state.rfind(kFilePrefix, 0) == 0) {
    const std::string path = state.substr(std::char_traits<char>::length(kFilePrefix));
    Operator op = [&] {
      try {
        return load_matrix<double>(path);
      } catch (const FormatError& e) {
        throw UsageError(std::string("cannot read state file: ") + e.what());
      }
    }();
    if (op.dims().size() != 2 || op.dims()[0] != op.dims()[1] || op.dims()[0] < 2 || op.dims()[0] > 6) {
      throw InvalidInputError("state file must hold an operator on C^d (x) C^d with 2 <= d <= 6");
    }
    try {
      return Density(op);
    } catch (const ContractError& e) {
      throw InvalidInputError(std::string("state file is not a density operator: ") + e.what());
    }
  }
  throw UsageError("unknown --state '" + state + "' (expected werner, singlet, mixed or file:PATH)");
}

}  // namespace

RunReport cmd_verify(const VerifyOptions& opts) {
  require_dimension(opts.d, 2, 6);
  if (!(opts.tol > 0)) throw UsageError("--tol must be positive");
  const auto start = Clock::now();
  const Index d = opts.d;
  const double tol = opts.tol;
  const double dd = static_cast<double>(d);

  RunReport report;
  report.command = "verify";
  report.parameters["d"] = opts.d;
  report.parameters["tol"] = opts.tol;
  auto& checks = report.checks;

  const Operator id2 = Operator::identity({d, d});
  const Operator v = flip<double>(d);
  checks.push_back(at_most("flip_hermitian", hermitian_defect(v), tol));
  checks.push_back(at_most("flip_squares_to_identity", frobenius_distance(v * v, id2), tol));
  checks.push_back(at_most("flip_trace", std::abs(trace(v).real() - dd) + std::abs(trace(v).imag()), tol));

  const Operator p = antisym_projector<double>(d);
  checks.push_back(at_most("antisym_projector_idempotent", frobenius_distance(p * p, p), tol));

  const Operator q = antisymmetrizer3<double>(d);
  checks.push_back(at_most("antisymmetrizer3_hermitian", hermitian_defect(q), tol));
  checks.push_back(at_most("antisymmetrizer3_idempotent", frobenius_distance(q * q, q), tol));
  checks.push_back(
      at_most("antisymmetrizer3_trace", std::abs(trace(q).real() - dd * (dd - 1) * (dd - 2) / 6.0), tol));
  const Operator expected_marginal = (dd - 2) / 3.0 * p;
  for (std::size_t j = 1; j <= 3; ++j) {
    checks.push_back(at_most("antisymmetrizer3_marginal_" + std::to_string(j),
                             frobenius_distance(partial_trace(q, j), expected_marginal), tol));
  }

  const Density rho = werner<double>(d);
  const Operator rho_flip_form = (dd + 1) / (dd * dd * dd) * id2 - 1.0 / (dd * dd) * v;
  checks.push_back(at_most("werner_forms_agree", frobenius_distance(rho.op(), rho_flip_form), tol));
  checks.push_back(at_most("werner_trace", std::abs(trace(rho.op()).real() - 1.0), tol));

  if (d == 2) {
    const Density t = dso_two_qubit<double>();
    const auto marginals = verify_marginals(t.op(), MarginalPattern<double>::right2(rho), tol);
    checks.push_back(at_most("dso_two_qubit_marginal_2", marginals.residuals[0], tol));
    checks.push_back(at_most("dso_two_qubit_marginal_3", marginals.residuals[1], tol));
    checks.push_back(at_most("dso_two_qubit_trace", std::abs(trace(t.op()).real() - 1.0), tol));
    const auto spectrum = eigenvalues(t.op());
    checks.push_back(at_least("dso_two_qubit_min_eigenvalue", spectrum.minCoeff(), -tol));
    Eigen::VectorXd expected(8);
    expected << 3.0 / 8, 3.0 / 8, 1.0 / 8, 1.0 / 8, 0, 0, 0, 0;
    checks.push_back(at_most("dso_two_qubit_spectrum", (spectrum - expected).norm(), tol));
  } else {
    const Density t = dso_general<double>(d);
    const auto marginals = verify_marginals(t.op(), MarginalPattern<double>::symmetric3(rho), tol);
    checks.push_back(at_most("dso_general_trace", std::abs(trace(t.op()).real() - 1.0), tol));
    checks.push_back(at_least("dso_general_min_eigenvalue", min_eigenvalue(t.op()), -tol));
    for (std::size_t j = 1; j <= 3; ++j) {
      checks.push_back(at_most("dso_general_marginal_" + std::to_string(j), marginals.residuals[j - 1], tol));
    }
  }

  report.wall_time_ms = elapsed_ms(start);
  return report;
}

RunReport cmd_bell(const BellOptions& opts) {
  if (opts.functional != "original" && opts.functional != "chsh") {
    throw UsageError("--functional must be 'original' or 'chsh'");
  }
  if (opts.observables != "any" && opts.observables != "spin") {
    throw UsageError("--observables must be 'any' or 'spin'");
  }
  if (opts.restarts < 1) throw UsageError("--restarts must be >= 1");
  if (opts.max_sweeps < 1) throw UsageError("--max-sweeps must be >= 1");
  if (!(opts.tol >= 0)) throw UsageError("--tol must be non-negative");
  const auto start = Clock::now();
  const Density rho = resolve_state(opts.state, opts.d);
  const Index d = rho.dims()[0];

  SeeSawConfig cfg;
  cfg.restarts = opts.restarts;
  cfg.max_sweeps = opts.max_sweeps;
  cfg.base_seed = opts.seed;
  cfg.threads = opts.threads;
  cfg.observables = opts.observables == "spin" ? ObservableClass::TracelessDichotomic : ObservableClass::NormBall;
  if (cfg.observables == ObservableClass::TracelessDichotomic && d % 2 != 0) {
    throw UsageError("--observables spin requires an even dimension");
  }

  RunReport report;
  report.command = "bell";
  report.parameters["d"] = d;
  report.parameters["functional"] = opts.functional;
  report.parameters["state"] = opts.state;
  report.parameters["observables"] = opts.observables;
  report.parameters["restarts"] = opts.restarts;
  report.parameters["seed"] = opts.seed;
  report.parameters["max_sweeps"] = opts.max_sweeps;
  report.parameters["convergence_eps"] = cfg.convergence_eps;
  report.parameters["tol"] = opts.tol;

  const bool original = opts.functional == "original";
  const auto result = original ? seesaw_original_bell(rho, cfg) : seesaw_chsh(rho, cfg);
  Check check = original ? at_most("original_bell_gap", result.best_value, opts.tol)
                         : at_most("chsh_value", result.best_value, 2.0 + opts.tol);
  if (!check.pass) check.note = "VIOLATION";
  report.checks.push_back(std::move(check));

  report.wall_time_ms = elapsed_ms(start);
  return report;
}

RunReport cmd_dso_find(const DsoFindOptions& opts) {
  if (opts.pattern != "sym3" && opts.pattern != "right2") throw UsageError("--pattern must be 'sym3' or 'right2'");
  if (opts.iters < 0) throw UsageError("--iters must be non-negative");
  if (!(opts.tol > 0)) throw UsageError("--tol must be positive");
  const auto start = Clock::now();
  const Density rho = resolve_state(opts.state, opts.d);

  RunReport report;
  report.command = "dso-find";
  report.parameters["d"] = rho.dims()[0];
  report.parameters["state"] = opts.state;
  report.parameters["pattern"] = opts.pattern;
  report.parameters["iters"] = opts.iters;
  report.parameters["tol"] = opts.tol;
  report.parameters["dump"] = opts.dump;

  const auto pattern =
      opts.pattern == "sym3" ? MarginalPattern<double>::symmetric3(rho) : MarginalPattern<double>::right2(rho);
  const auto result = dykstra_find_extension(rho, pattern, opts.iters, opts.tol);
  Check check = at_most("residual", result.residual, opts.tol);
  check.pass = result.converged;
  if (!result.converged) check.note = "no extension found";
  report.checks.push_back(std::move(check));
  report.checks.push_back({"iterations", static_cast<double>(result.iterations), static_cast<double>(opts.iters),
                           result.iterations <= opts.iters, {}});

  if (!opts.dump.empty()) {
    try {
      save_matrix(opts.dump, result.candidate);
    } catch (const FormatError& e) {
      throw UsageError(e.what());
    }
  }
  report.wall_time_ms = elapsed_ms(start);
  return report;
}

}  // namespace bellforge::cli
