#pragma once

#include <array>
#include <string>
#include <utility>

#include "bellforge/tensor_operator.hpp"

namespace bellforge {

/// Raised when an operator fails the density-operator contract.
class InvalidStateError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// Default tolerance for the density-operator contract (Hermiticity, unit trace, PSD).
inline constexpr double kDensityTol = 1e-10;

/// A TensorOperator that is Hermitian, positive semidefinite and of unit trace.
template <typename Real = double>
class DensityOperator {
 public:
  /// Validates `op` and stores its Hermitian part.
  explicit DensityOperator(const TensorOperator<Real>& op, double tol = kDensityTol) : op_(validate(op, tol)) {}

  const TensorOperator<Real>& op() const noexcept { return op_; }
  const Dims& dims() const noexcept { return op_.dims(); }
  Index side() const noexcept { return op_.side(); }

 private:
  static TensorOperator<Real> validate(const TensorOperator<Real>& op, double tol) {
    if (!is_hermitian(op, tol)) {
      throw InvalidStateError("density operator: not Hermitian (defect " + std::to_string(hermitian_defect(op)) +
                              ")");
    }
    TensorOperator<Real> h = require_hermitian(op, tol);
    const Real tr = trace(h).real();
    if (std::abs(tr - Real(1)) > tol) {
      throw InvalidStateError("density operator: trace " + std::to_string(tr) + " is not 1");
    }
    const Real lmin = min_eigenvalue(h, tol);
    if (lmin < -tol) {
      throw InvalidStateError("density operator: negative eigenvalue " + std::to_string(lmin));
    }
    return h;
  }

  TensorOperator<Real> op_;
};

using Density = DensityOperator<double>;

/// An element of S3 acting on three tensor slots, stored as 1-based images.
///
/// The associated operator moves the content of slot k to slot images[k-1].
class Permutation3 {
 public:
  explicit Permutation3(std::array<int, 3> images) : images_(images) {
    std::array<bool, 3> hit{};
    for (int v : images_) {
      if (v < 1 || v > 3 || hit[v - 1]) throw ContractError("Permutation3: images must be a permutation of {1,2,3}");
      hit[v - 1] = true;
    }
    int inversions = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (images_[i] > images_[j]) ++inversions;
    parity_ = inversions % 2 == 0 ? 1 : -1;
  }

  static Permutation3 identity() { return Permutation3({1, 2, 3}); }
  /// Transposition of slots a and b (1-based).
  static Permutation3 transposition(int a, int b) {
    std::array<int, 3> im{1, 2, 3};
    if (a < 1 || a > 3 || b < 1 || b > 3 || a == b) throw ContractError("Permutation3: bad transposition");
    std::swap(im[a - 1], im[b - 1]);
    return Permutation3(im);
  }
  static std::array<Permutation3, 6> all() {
    return {Permutation3({1, 2, 3}), Permutation3({2, 1, 3}), Permutation3({3, 2, 1}),
            Permutation3({1, 3, 2}), Permutation3({2, 3, 1}), Permutation3({3, 1, 2})};
  }

  int operator()(int k) const { return images_.at(static_cast<std::size_t>(k - 1)); }
  const std::array<int, 3>& images() const noexcept { return images_; }
  int parity() const noexcept { return parity_; }

  friend bool operator==(const Permutation3& a, const Permutation3& b) { return a.images_ == b.images_; }

 private:
  std::array<int, 3> images_;
  int parity_ = 1;
};

/// (p o q)(k) = p(q(k)).
inline Permutation3 compose(const Permutation3& p, const Permutation3& q) {
  return Permutation3({p(q(1)), p(q(2)), p(q(3))});
}

namespace detail {

inline void require_dimension(Index d, const char* what) {
  if (d < 2) throw ContractError(std::string(what) + ": dimension must be >= 2, got " + std::to_string(d));
}

}  // namespace detail

/// Flip operator V_d on C^d (x) C^d: e_i (x) e_j -> e_j (x) e_i.
template <typename Real = double>
TensorOperator<Real> flip(Index d) {
  detail::require_dimension(d, "flip");
  using Op = TensorOperator<Real>;
  typename Op::Matrix m = Op::Matrix::Zero(d * d, d * d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) m(j * d + i, i * d + j) = 1;
  return {{d, d}, std::move(m)};
}

/// P_d^(-) = (I - V_d)/2, the projection onto the antisymmetric subspace.
template <typename Real = double>
TensorOperator<Real> antisym_projector(Index d) {
  detail::require_dimension(d, "antisym_projector");
  return Real(0.5) * (TensorOperator<Real>::identity({d, d}) - flip<Real>(d));
}

/// Unitary U_p on (C^d)^{(x)3} sending the vector in slot k to slot p(k).
template <typename Real = double>
TensorOperator<Real> permutation_operator(const Permutation3& p, Index d) {
  detail::require_dimension(d, "permutation_operator");
  using Op = TensorOperator<Real>;
  const Index n = d * d * d;
  typename Op::Matrix m = Op::Matrix::Zero(n, n);
  std::array<Index, 3> in{};
  std::array<Index, 3> out{};
  for (in[0] = 0; in[0] < d; ++in[0])
    for (in[1] = 0; in[1] < d; ++in[1])
      for (in[2] = 0; in[2] < d; ++in[2]) {
        for (int k = 0; k < 3; ++k) out[static_cast<std::size_t>(p(k + 1) - 1)] = in[static_cast<std::size_t>(k)];
        m((out[0] * d + out[1]) * d + out[2], (in[0] * d + in[1]) * d + in[2]) = 1;
      }
  return {{d, d, d}, std::move(m)};
}

/// Q_d = (1/6) sum_p sgn(p) U_p, the projection onto the totally antisymmetric subspace.
/// Zero for d = 2.
template <typename Real = double>
TensorOperator<Real> antisymmetrizer3(Index d) {
  detail::require_dimension(d, "antisymmetrizer3");
  auto q = TensorOperator<Real>::zero({d, d, d});
  for (const auto& p : Permutation3::all()) q = q + Real(p.parity()) * permutation_operator<Real>(p, d);
  return Real(1) / Real(6) * q;
}

/// Werner state (1/d^3) I + (2/d^2) P_d^(-) on C^d (x) C^d.
template <typename Real = double>
DensityOperator<Real> werner(Index d) {
  detail::require_dimension(d, "werner");
  const Real dd = static_cast<Real>(d);
  return DensityOperator<Real>(Real(1) / (dd * dd * dd) * TensorOperator<Real>::identity({d, d}) +
                               Real(2) / (dd * dd) * antisym_projector<Real>(d));
}

/// Singlet |psi-><psi-| with psi- = (e1 (x) e2 - e2 (x) e1)/sqrt(2).
template <typename Real = double>
DensityOperator<Real> singlet() {
  return DensityOperator<Real>(antisym_projector<Real>(2));
}

/// Maximally mixed state I/d^2 on C^d (x) C^d.
template <typename Real = double>
DensityOperator<Real> maximally_mixed(Index d) {
  detail::require_dimension(d, "maximally_mixed");
  const Real dd = static_cast<Real>(d);
  return DensityOperator<Real>(Real(1) / (dd * dd) * TensorOperator<Real>::identity({d, d}));
}

/// Three-qubit source operator whose marginals over slots 2 and 3 are the two-qubit Werner state:
/// (1/4) I - (1/8) V (x) I - (1/8) (I (x) V)(V (x) I)(I (x) V).
template <typename Real = double>
DensityOperator<Real> dso_two_qubit() {
  using Op = TensorOperator<Real>;
  const Op id2 = Op::identity({2});
  const Op v_left = kron(flip<Real>(2), id2);
  const Op v_right = kron(id2, flip<Real>(2));
  const Op swap13 = v_right * v_left * v_right;
  return DensityOperator<Real>(Real(0.25) * Op::identity({2, 2, 2}) - Real(0.125) * v_left -
                               Real(0.125) * swap13);
}

/// Tripartite source operator (1/d^4) I + 6/(d^2 (d-2)) Q_d for d >= 3; each of its three
/// two-party marginals equals werner(d).
template <typename Real = double>
DensityOperator<Real> dso_general(Index d) {
  if (d < 3) {
    throw ContractError("dso_general: requires d >= 3 (the Q_d coefficient 6/(d^2 (d-2)) diverges at d = 2), got " +
                        std::to_string(d));
  }
  const Real dd = static_cast<Real>(d);
  return DensityOperator<Real>(Real(1) / (dd * dd * dd * dd) * TensorOperator<Real>::identity({d, d, d}) +
                               Real(6) / (dd * dd * (dd - 2)) * antisymmetrizer3<Real>(d));
}

}  // namespace bellforge
