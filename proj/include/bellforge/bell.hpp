#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "bellforge/states.hpp"
#include "bellforge/tensor_operator.hpp"

namespace bellforge {

/// Feasible set for each observable in the see-saw.
enum class ObservableClass {
  /// Every Hermitian W with ||W|| <= 1; optimizers are +-1-spectrum (includes +-I).
  NormBall,
  /// Traceless +-1-spectrum observables (spin measurements); requires even d.
  TracelessDichotomic,
};

/// A Hermitian operator on a single factor with operator norm <= 1.
template <typename Real = double>
class Observable {
 public:
  Observable(const TensorOperator<Real>& op, std::string label = {}, double tol = kHermitianTol)
      : op_(validate(op, tol)), label_(std::move(label)) {}

  const TensorOperator<Real>& op() const noexcept { return op_; }
  const std::string& label() const noexcept { return label_; }
  Index d() const noexcept { return op_.side(); }

 private:
  static TensorOperator<Real> validate(const TensorOperator<Real>& op, double tol) {
    if (op.factor_count() != 1) throw ContractError("Observable: must act on a single factor");
    TensorOperator<Real> h = require_hermitian(op, tol);
    if (op.side() > 0 && operator_norm(h, tol) > Real(1) + Real(tol)) {
      throw ContractError("Observable: operator norm exceeds 1");
    }
    return h;
  }

  TensorOperator<Real> op_;
  std::string label_;
};

namespace detail {

template <typename Real>
void require_bipartite(const DensityOperator<Real>& rho, Index d, const char* what) {
  if (rho.dims().size() != 2 || rho.dims()[0] != d || rho.dims()[1] != d) {
    throw ContractError(std::string(what) + ": state must live on C^d (x) C^d matching the observables");
  }
}

}  // namespace detail

/// <A (x) B>_rho = tr[rho (A (x) B)].
template <typename Real>
Real correlation(const DensityOperator<Real>& rho, const Observable<Real>& a, const Observable<Real>& b) {
  if (a.d() != b.d()) throw ContractError("correlation: observable dimensions differ");
  detail::require_bipartite(rho, a.d(), "correlation");
  const std::complex<Real> value = (rho.op().matrix() * kron(a.op(), b.op()).matrix()).trace();
  if (std::abs(value.imag()) > 1e-10) throw std::logic_error("correlation: expectation has an imaginary part");
  return value.real();
}

/// Operator X on factor 1 with tr[rho (A (x) B)] = tr[X A]: tr_2[rho (I (x) B)].
template <typename Real>
TensorOperator<Real> contract_second(const DensityOperator<Real>& rho, const TensorOperator<Real>& b) {
  const Index d = b.side();
  const auto x = partial_trace(rho.op() * kron(TensorOperator<Real>::identity({d}), b), 2);
  return {x.dims(), (x.matrix() + x.matrix().adjoint()) * Real(0.5)};
}

/// Operator Y on factor 2 with tr[rho (A (x) B)] = tr[Y B]: tr_1[rho (A (x) I)].
template <typename Real>
TensorOperator<Real> contract_first(const DensityOperator<Real>& rho, const TensorOperator<Real>& a) {
  const Index d = a.side();
  const auto y = partial_trace(rho.op() * kron(a, TensorOperator<Real>::identity({d})), 1);
  return {y.dims(), (y.matrix() + y.matrix().adjoint()) * Real(0.5)};
}

/// Signed gap |E(a,b1) - E(a,b2)| - (1 - E(b1,b2)) of the perfect-correlation Bell inequality.
/// `jb1` is Bob's observable in E(a,b1) and Alice's observable in E(b1,b2).
/// A value <= 0 means the inequality holds for this triple.
template <typename Real>
Real original_bell_gap(const DensityOperator<Real>& rho, const Observable<Real>& ja, const Observable<Real>& jb1,
                       const Observable<Real>& jb2) {
  if (ja.d() != jb1.d() || ja.d() != jb2.d()) throw ContractError("original_bell_gap: observable dimensions differ");
  return std::abs(correlation(rho, ja, jb1) - correlation(rho, ja, jb2)) - (Real(1) - correlation(rho, jb1, jb2));
}

/// |E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2)|.
template <typename Real>
Real chsh_value(const DensityOperator<Real>& rho, const Observable<Real>& a1, const Observable<Real>& a2,
                const Observable<Real>& b1, const Observable<Real>& b2) {
  return std::abs(correlation(rho, a1, b1) + correlation(rho, a1, b2) + correlation(rho, a2, b1) -
                  correlation(rho, a2, b2));
}

/// Maximum CHSH value of a two-qubit state over spin observables n.sigma (traceless, spectrum +-1):
/// 2 sqrt(u1 + u2), u1, u2 the two largest eigenvalues of T^T T, T_ij = tr[rho sigma_i (x) sigma_j].
/// Over the full norm ball the maximum is max(2, this value), since W = I for every setting gives 2.
template <typename Real>
Real horodecki_chsh_oracle(const DensityOperator<Real>& rho) {
  if (rho.dims() != Dims{2, 2}) throw ContractError("horodecki_chsh_oracle: requires a two-qubit state");
  using C = std::complex<Real>;
  using Op = TensorOperator<Real>;
  typename Op::Matrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, C(0, -1), C(0, 1), 0;
  sz << 1, 0, 0, -1;
  const Op paulis[3] = {Op({2}, sx), Op({2}, sy), Op({2}, sz)};
  Eigen::Matrix<Real, 3, 3> t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = (rho.op().matrix() * kron(paulis[i], paulis[j]).matrix()).trace().real();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Real, 3, 3>> solver(t.transpose() * t, Eigen::EigenvaluesOnly);
  const auto u = solver.eigenvalues();  // ascending
  return Real(2) * std::sqrt(std::max(Real(0), u(1) + u(2)));
}

/// Maximizer of tr[X W] over traceless W with spectrum {+1, -1} (each with multiplicity d/2):
/// +1 on the eigenvectors of the d/2 largest eigenvalues of X, -1 on the rest.
template <typename Real>
TensorOperator<Real> balanced_sign(const TensorOperator<Real>& t, double tol = kHermitianTol) {
  if (t.side() % 2 != 0) throw ContractError("balanced_sign: dimension must be even");
  const Spectrum<Real> s = eig_hermitian(t, tol);
  const Index half = t.side() / 2;
  Index k = 0;
  return spectral_map(t, s, [&](Real) { return k++ < half ? Real(1) : Real(-1); });
}

/// Random observable: Hermitian part of a complex Gaussian matrix, eigenvalues clamped to [-1, 1].
template <typename Real = double, typename Engine>
Observable<Real> random_observable(Index d, Engine& rng, std::string label = {}) {
  detail::require_dimension(d, "random_observable");
  using Op = TensorOperator<Real>;
  std::normal_distribution<Real> normal(Real(0), Real(1));
  typename Op::Matrix g(d, d);
  for (Index r = 0; r < d; ++r)
    for (Index c = 0; c < d; ++c) g(r, c) = {normal(rng), normal(rng)};
  const Op h({d}, (g + g.adjoint()) * Real(0.5));
  const Spectrum<Real> s = eig_hermitian(h);
  return Observable<Real>(spectral_map(h, s, [](Real l) { return std::clamp(l, Real(-1), Real(1)); }),
                          std::move(label));
}

/// Deterministic per seed.
template <typename Real = double>
Observable<Real> random_observable(Index d, std::uint64_t seed, std::string label = {}) {
  std::mt19937_64 rng(seed);
  return random_observable<Real>(d, rng, std::move(label));
}

namespace detail {

template <typename Real, typename Engine>
Observable<Real> initial_observable(Index d, Engine& rng, std::string label, ObservableClass cls) {
  auto w = random_observable<Real>(d, rng, label);
  if (cls == ObservableClass::NormBall) return w;
  return Observable<Real>(balanced_sign(w.op()), std::move(label));
}

}  // namespace detail

struct SeeSawConfig {
  int restarts = 50;
  int max_sweeps = 200;
  double convergence_eps = 1e-12;
  std::uint64_t base_seed = 1;
  /// Upper bound on concurrently running restarts; results do not depend on it.
  int threads = 1;
  ObservableClass observables = ObservableClass::NormBall;
};

template <typename Real = double>
struct OptimizationResult {
  Real best_value;
  std::vector<Observable<Real>> observables;
  int sweeps_used = 0;
  int restart_index = 0;
  int branch = 1;  // sign s of the winning branch
  /// Branch objective before the first sweep and after each sweep, for the winning run.
  std::vector<Real> value_trace;
};

namespace detail {

inline void require_config(const SeeSawConfig& cfg, Index d) {
  if (cfg.observables == ObservableClass::TracelessDichotomic && d % 2 != 0) {
    throw ContractError("SeeSawConfig: traceless dichotomic observables need an even dimension");
  }
  if (cfg.restarts < 1) throw ContractError("SeeSawConfig: restarts must be >= 1");
  if (cfg.max_sweeps < 1) throw ContractError("SeeSawConfig: max_sweeps must be >= 1");
  if (!(cfg.convergence_eps > 0)) throw ContractError("SeeSawConfig: convergence_eps must be > 0");
}

template <typename Real>
Observable<Real> best_response(const TensorOperator<Real>& effective, const std::string& label,
                               ObservableClass cls) {
  if (cls == ObservableClass::NormBall) return Observable<Real>(hermitian_sign(effective), label);
  return Observable<Real>(balanced_sign(effective), label);
}

// Runs `restart(r)` for r in [0, restarts) on up to cfg.threads threads and keeps the
// highest best_value, lowest restart index on ties.
template <typename Real, typename F>
OptimizationResult<Real> run_restarts(const SeeSawConfig& cfg, F&& restart) {
  std::vector<std::optional<OptimizationResult<Real>>> slots(static_cast<std::size_t>(cfg.restarts));
  const int workers = std::clamp(cfg.threads, 1, cfg.restarts);
  if (workers == 1) {
    for (int r = 0; r < cfg.restarts; ++r) slots[static_cast<std::size_t>(r)] = restart(r);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int r = w; r < cfg.restarts; r += workers) slots[static_cast<std::size_t>(r)] = restart(r);
      });
    }
    for (auto& t : pool) t.join();
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < slots.size(); ++r) {
    if (slots[r]->best_value > slots[best]->best_value) best = r;
  }
  return std::move(*slots[best]);
}

template <typename Real>
void require_seesaw_state(const DensityOperator<Real>& rho, const char* what) {
  if (rho.dims().size() != 2 || rho.dims()[0] != rho.dims()[1]) {
    throw ContractError(std::string(what) + ": state must live on C^d (x) C^d");
  }
  if (rho.dims()[0] > 6) throw ContractError(std::string(what) + ": d > 6 is not supported");
}

}  // namespace detail

/// Maximizes the original Bell gap over norm-bounded observables (a, b1, b2) by see-saw.
///
/// For each sign branch s the objective s (E(a,b1) - E(a,b2)) + E(b1,b2) - 1 is linear in each
/// observable separately, so every update sets one observable to the Hermitian sign of its
/// effective operator, which maximizes that term exactly. best_value is the gap recomputed from
/// the returned observables.
template <typename Real>
OptimizationResult<Real> seesaw_original_bell(const DensityOperator<Real>& rho, const SeeSawConfig& cfg) {
  detail::require_seesaw_state(rho, "seesaw_original_bell");
  const Index d = rho.dims()[0];
  detail::require_config(cfg, d);

  auto restart = [&](int r) {
    std::mt19937_64 rng(cfg.base_seed + static_cast<std::uint64_t>(r));
    const auto a0 = detail::initial_observable<Real>(d, rng, "a", cfg.observables);
    const auto b10 = detail::initial_observable<Real>(d, rng, "b1", cfg.observables);
    const auto b20 = detail::initial_observable<Real>(d, rng, "b2", cfg.observables);

    std::optional<OptimizationResult<Real>> best;
    for (int s : {1, -1}) {
      const Real sign = static_cast<Real>(s);
      Observable<Real> a = a0, b1 = b10, b2 = b20;
      auto objective = [&] {
        return sign * (correlation(rho, a, b1) - correlation(rho, a, b2)) + correlation(rho, b1, b2) - Real(1);
      };
      std::vector<Real> trace{objective()};
      int sweeps = 0;
      while (sweeps < cfg.max_sweeps) {
        a = detail::best_response(sign * contract_second(rho, b1.op() - b2.op()), "a", cfg.observables);
        // b1 enters both as Bob's setting against a and as Alice's setting against b2.
        b1 = detail::best_response(sign * contract_first(rho, a.op()) + contract_second(rho, b2.op()), "b1",
                                   cfg.observables);
        b2 = detail::best_response(-sign * contract_first(rho, a.op()) + contract_first(rho, b1.op()), "b2",
                                   cfg.observables);
        ++sweeps;
        trace.push_back(objective());
        if (trace.back() - trace[trace.size() - 2] < cfg.convergence_eps) break;
      }
      const Real gap = original_bell_gap(rho, a, b1, b2);
      if (!best || gap > best->best_value) {
        best = OptimizationResult<Real>{gap, {a, b1, b2}, sweeps, r, s, std::move(trace)};
      }
    }
    return std::move(*best);
  };
  return detail::run_restarts<Real>(cfg, restart);
}

/// Maximizes the CHSH value over norm-bounded observables (a1, a2, b1, b2) by see-saw.
template <typename Real>
OptimizationResult<Real> seesaw_chsh(const DensityOperator<Real>& rho, const SeeSawConfig& cfg) {
  detail::require_seesaw_state(rho, "seesaw_chsh");
  const Index d = rho.dims()[0];
  detail::require_config(cfg, d);

  auto restart = [&](int r) {
    std::mt19937_64 rng(cfg.base_seed + static_cast<std::uint64_t>(r));
    const auto a10 = detail::initial_observable<Real>(d, rng, "a1", cfg.observables);
    const auto a20 = detail::initial_observable<Real>(d, rng, "a2", cfg.observables);
    const auto b10 = detail::initial_observable<Real>(d, rng, "b1", cfg.observables);
    const auto b20 = detail::initial_observable<Real>(d, rng, "b2", cfg.observables);

    std::optional<OptimizationResult<Real>> best;
    for (int s : {1, -1}) {
      const Real sign = static_cast<Real>(s);
      Observable<Real> a1 = a10, a2 = a20, b1 = b10, b2 = b20;
      auto objective = [&] {
        return sign * (correlation(rho, a1, b1) + correlation(rho, a1, b2) + correlation(rho, a2, b1) -
                       correlation(rho, a2, b2));
      };
      std::vector<Real> trace{objective()};
      int sweeps = 0;
      while (sweeps < cfg.max_sweeps) {
        a1 = detail::best_response(sign * contract_second(rho, b1.op() + b2.op()), "a1", cfg.observables);
        a2 = detail::best_response(sign * contract_second(rho, b1.op() - b2.op()), "a2", cfg.observables);
        b1 = detail::best_response(sign * contract_first(rho, a1.op() + a2.op()), "b1", cfg.observables);
        b2 = detail::best_response(sign * contract_first(rho, a1.op() - a2.op()), "b2", cfg.observables);
        ++sweeps;
        trace.push_back(objective());
        if (trace.back() - trace[trace.size() - 2] < cfg.convergence_eps) break;
      }
      const Real value = chsh_value(rho, a1, a2, b1, b2);
      if (!best || value > best->best_value) {
        best = OptimizationResult<Real>{value, {a1, a2, b1, b2}, sweeps, r, s, std::move(trace)};
      }
    }
    return std::move(*best);
  };
  return detail::run_restarts<Real>(cfg, restart);
}

}  // namespace bellforge
