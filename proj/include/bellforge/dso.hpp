#pragma once

#include <algorithm>
#include <limits>
#include <set>
#include <vector>

#include "bellforge/states.hpp"
#include "bellforge/tensor_operator.hpp"

namespace bellforge {

/// One marginal constraint tr^{(traced_factor)} T = target on a tripartite T.
template <typename Real = double>
struct MarginalConstraint {
  std::size_t traced_factor;  // 1-based, in {1, 2, 3}
  DensityOperator<Real> target;
};

/// The set of marginal constraints defining a density source-operator for a bipartite state.
template <typename Real = double>
class MarginalPattern {
 public:
  explicit MarginalPattern(std::vector<MarginalConstraint<Real>> constraints) : constraints_(std::move(constraints)) {
    if (constraints_.empty() || constraints_.size() > 3) {
      throw ContractError("MarginalPattern: needs between 1 and 3 constraints");
    }
    std::set<std::size_t> used;
    const Dims& first = constraints_.front().target.dims();
    if (first.size() != 2 || first[0] != first[1]) {
      throw ContractError("MarginalPattern: targets must live on C^d (x) C^d");
    }
    for (const auto& c : constraints_) {
      if (c.traced_factor < 1 || c.traced_factor > 3) {
        throw ContractError("MarginalPattern: traced factor must be 1, 2 or 3");
      }
      if (!used.insert(c.traced_factor).second) {
        throw ContractError("MarginalPattern: traced factors must be distinct");
      }
      if (c.target.dims() != first) throw ContractError("MarginalPattern: all targets must share the same d");
    }
  }

  /// All three marginals equal rho.
  static MarginalPattern symmetric3(const DensityOperator<Real>& rho) {
    return MarginalPattern({{1, rho}, {2, rho}, {3, rho}});
  }

  /// Marginals over factors 2 and 3 equal rho.
  static MarginalPattern right2(const DensityOperator<Real>& rho) { return MarginalPattern({{2, rho}, {3, rho}}); }

  const std::vector<MarginalConstraint<Real>>& constraints() const noexcept { return constraints_; }
  Index d() const noexcept { return constraints_.front().target.dims()[0]; }
  Dims tripartite_dims() const { return {d(), d(), d()}; }

 private:
  std::vector<MarginalConstraint<Real>> constraints_;
};

template <typename Real = double>
struct MarginalReport {
  std::vector<Real> residuals;  // Frobenius distance per constraint, in pattern order
  bool is_density = false;      // candidate satisfies the density-operator contract at tol
  bool passed = false;
};

namespace detail {

template <typename Real>
void require_pattern_dims(const TensorOperator<Real>& t, const MarginalPattern<Real>& pattern) {
  if (t.dims() != pattern.tripartite_dims()) {
    throw ContractError("marginal check: operator dims do not match the pattern's [d,d,d]");
  }
}

template <typename Real>
bool is_density(const TensorOperator<Real>& t, double tol) {
  if (!is_hermitian(t, tol)) return false;
  if (std::abs(trace(t).real() - Real(1)) > tol) return false;
  return min_eigenvalue(t, tol) >= -tol;
}

}  // namespace detail

template <typename Real>
MarginalReport<Real> verify_marginals(const TensorOperator<Real>& t, const MarginalPattern<Real>& pattern,
                                      double tol) {
  detail::require_pattern_dims(t, pattern);
  MarginalReport<Real> report;
  bool ok = true;
  for (const auto& c : pattern.constraints()) {
    const Real r = frobenius_distance(partial_trace(t, c.traced_factor), c.target.op());
    report.residuals.push_back(r);
    ok = ok && r <= tol;
  }
  report.is_density = detail::is_density(t, tol);
  report.passed = ok && report.is_density;
  return report;
}

/// Euclidean projection of a real vector onto the probability simplex {x >= 0, sum x = 1}.
template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, 1> project_simplex(const Eigen::Matrix<Real, Eigen::Dynamic, 1>& v) {
  std::vector<Real> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  Real cumulative = 0;
  Real theta = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const Real candidate = (cumulative - Real(1)) / static_cast<Real>(j + 1);
    if (u[j] - candidate > 0) theta = candidate;
  }
  return (v.array() - theta).cwiseMax(Real(0)).matrix();
}

/// Frobenius-nearest density operator: eigenvalues projected onto the simplex.
template <typename Real>
TensorOperator<Real> project_density(const TensorOperator<Real>& t) {
  const Spectrum<Real> s = eig_hermitian(t, 1e-8);
  const auto clipped = project_simplex<Real>(s.eigenvalues);
  Index k = 0;
  return spectral_map(t, s, [&](Real) { return clipped(k++); });
}

/// Orthogonal projection onto the affine set {T : tr^{(j)} T = target}:
/// T + embed_identity(target - tr^{(j)} T, j) / d_j.
template <typename Real>
TensorOperator<Real> project_marginal(const TensorOperator<Real>& t, std::size_t j,
                                      const TensorOperator<Real>& target) {
  const Index dj = t.dims().at(j - 1);
  const TensorOperator<Real> deficit = target - partial_trace(t, j);
  return t + Real(1) / static_cast<Real>(dj) * embed_identity(deficit, j, dj);
}

/// max_k ||tr^{(j_k)} T - target_k||_F + max(0, -lambda_min) + |tr T - 1|.
template <typename Real>
Real feasibility_residual(const TensorOperator<Real>& t, const MarginalPattern<Real>& pattern) {
  detail::require_pattern_dims(t, pattern);
  Real worst = 0;
  for (const auto& c : pattern.constraints()) {
    worst = std::max(worst, frobenius_distance(partial_trace(t, c.traced_factor), c.target.op()));
  }
  const Real lmin = min_eigenvalue(t, 1e-8);
  return worst + std::max(Real(0), -lmin) + std::abs(trace(t).real() - Real(1));
}

template <typename Real = double>
struct FeasibilityResult {
  TensorOperator<Real> candidate;  // best iterate found, on [d,d,d]
  Real residual;
  int iterations = 0;
  bool converged = false;
  std::vector<Real> residual_trace;  // residual after each iteration; entry 0 is the initial iterate
};

/// Searches for a tripartite density operator whose marginals match `pattern` using Dykstra's
/// alternating projections between the density-operator set and each affine marginal set.
///
/// The iterate is Frobenius-projected onto every marginal set in pattern order and then onto
/// the density set, so each recorded iterate is a density operator. Exhausting `max_iters`
/// is not an error; `converged` is then false and the best iterate is returned.
template <typename Real>
FeasibilityResult<Real> dykstra_find_extension(const DensityOperator<Real>& rho, const MarginalPattern<Real>& pattern,
                                               int max_iters, double tol) {
  using Op = TensorOperator<Real>;
  if (rho.dims() != pattern.constraints().front().target.dims()) {
    throw ContractError("dykstra_find_extension: rho does not match the pattern dimensions");
  }
  for (const auto& c : pattern.constraints()) {
    if (frobenius_distance(c.target.op(), rho.op()) > 1e-12) {
      throw ContractError("dykstra_find_extension: every pattern target must equal rho");
    }
  }
  if (pattern.d() > 6) throw ContractError("dykstra_find_extension: d > 6 is not supported");
  if (max_iters < 0) throw ContractError("dykstra_find_extension: max_iters must be non-negative");

  const Index d = pattern.d();
  const auto& constraints = pattern.constraints();
  const std::size_t first_slot = constraints.front().traced_factor;
  Op x = Real(1) / static_cast<Real>(d) * embed_identity(rho.op(), first_slot, d);

  // One correction term per set: the marginal sets in pattern order, then the density set.
  std::vector<Op> corrections(constraints.size() + 1, Op::zero(pattern.tripartite_dims()));

  FeasibilityResult<Real> result{x, feasibility_residual(x, pattern), 0, false, {}};
  result.residual_trace.push_back(result.residual);
  if (result.residual <= tol) {
    result.converged = true;
    return result;
  }

  for (int it = 1; it <= max_iters; ++it) {
    for (std::size_t i = 0; i <= constraints.size(); ++i) {
      const Op shifted = x + corrections[i];
      Op y = i < constraints.size()
                 ? project_marginal(shifted, constraints[i].traced_factor, constraints[i].target.op())
                 : project_density(shifted);
      corrections[i] = shifted - y;
      x = std::move(y);
    }
    const Real r = feasibility_residual(x, pattern);
    result.residual_trace.push_back(r);
    result.iterations = it;
    if (r < result.residual) {
      result.residual = r;
      result.candidate = x;
    }
    if (r <= tol) break;
  }
  result.converged = result.residual <= tol;
  return result;
}

}  // namespace bellforge
