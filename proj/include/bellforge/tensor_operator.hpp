#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bellforge {

/// Raised when a caller violates a documented precondition (bad index, dimension mismatch, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by spectral routines when the input is not Hermitian within tolerance.
class NotHermitianError : public ContractError {
 public:
  NotHermitianError(double asymmetry, double allowed)
      : ContractError(describe(asymmetry, allowed)), asymmetry_(asymmetry) {}

  /// Measured ||t - t^dagger||_F.
  double asymmetry() const noexcept { return asymmetry_; }

 private:
  static std::string describe(double asymmetry, double allowed) {
    std::ostringstream os;
    os.precision(3);
    os << "operator is not Hermitian: ||t - t^dagger||_F = " << asymmetry << " exceeds " << allowed;
    return os.str();
  }
  double asymmetry_;
};

using Index = Eigen::Index;
using Dims = std::vector<Index>;

/// Default relative tolerance for Hermiticity checks before spectral calls.
inline constexpr double kHermitianTol = 1e-10;

/// A dense complex square matrix tagged with its ordered tensor-factor dimensions.
///
/// Storage is row-major. Basis vectors are ordered lexicographically over the factors,
/// so on dims [d1, d2, d3] the index of e_a (x) e_b (x) e_c is (a*d2 + b)*d3 + c.
/// Instances are immutable; every operation returns a new operator.
template <typename Real = double>
class TensorOperator {
 public:
  using RealScalar = Real;
  using Scalar = std::complex<Real>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  TensorOperator(Dims dims, Matrix entries) : dims_(std::move(dims)), m_(std::move(entries)) {
    if (dims_.empty()) throw ContractError("TensorOperator: factor_dims must be non-empty");
    for (Index d : dims_) {
      if (d <= 0) throw ContractError("TensorOperator: factor dimensions must be positive");
    }
    const Index side = product(dims_);
    if (m_.rows() != side || m_.cols() != side) {
      std::ostringstream os;
      os << "TensorOperator: matrix is " << m_.rows() << "x" << m_.cols() << " but factor_dims require side "
         << side;
      throw ContractError(os.str());
    }
    if (!m_.allFinite()) throw ContractError("TensorOperator: entries must be finite");
  }

  static TensorOperator identity(Dims dims) {
    const Index side = product(dims);
    return TensorOperator(std::move(dims), Matrix::Identity(side, side));
  }

  static TensorOperator zero(Dims dims) {
    const Index side = product(dims);
    return TensorOperator(std::move(dims), Matrix::Zero(side, side));
  }

  const Dims& dims() const noexcept { return dims_; }
  const Matrix& matrix() const noexcept { return m_; }
  Index side() const noexcept { return m_.rows(); }
  std::size_t factor_count() const noexcept { return dims_.size(); }
  Scalar operator()(Index r, Index c) const { return m_(r, c); }

  static Index product(const Dims& dims) {
    return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
  }

 private:
  Dims dims_;
  Matrix m_;
};

using Operator = TensorOperator<double>;

namespace detail {

template <typename Real>
void require_same_dims(const TensorOperator<Real>& a, const TensorOperator<Real>& b, const char* what) {
  if (a.dims() != b.dims()) throw ContractError(std::string(what) + ": factor_dims differ");
}

}  // namespace detail

template <typename Real>
TensorOperator<Real> operator+(const TensorOperator<Real>& a, const TensorOperator<Real>& b) {
  detail::require_same_dims(a, b, "operator+");
  return {a.dims(), a.matrix() + b.matrix()};
}

template <typename Real>
TensorOperator<Real> operator-(const TensorOperator<Real>& a, const TensorOperator<Real>& b) {
  detail::require_same_dims(a, b, "operator-");
  return {a.dims(), a.matrix() - b.matrix()};
}

template <typename Real>
TensorOperator<Real> operator-(const TensorOperator<Real>& a) {
  return {a.dims(), -a.matrix()};
}

/// Operator product; both sides must act on the same tensor structure.
template <typename Real>
TensorOperator<Real> operator*(const TensorOperator<Real>& a, const TensorOperator<Real>& b) {
  detail::require_same_dims(a, b, "operator*");
  return {a.dims(), a.matrix() * b.matrix()};
}

template <typename Real>
TensorOperator<Real> operator*(std::complex<Real> s, const TensorOperator<Real>& a) {
  return {a.dims(), s * a.matrix()};
}

template <typename Real>
TensorOperator<Real> operator*(Real s, const TensorOperator<Real>& a) {
  return {a.dims(), std::complex<Real>(s) * a.matrix()};
}

/// Kronecker product; factor_dims are concatenated in argument order.
template <typename Real>
TensorOperator<Real> kron(const TensorOperator<Real>& a, const TensorOperator<Real>& b) {
  using Op = TensorOperator<Real>;
  const Index na = a.side();
  const Index nb = b.side();
  typename Op::Matrix out(na * nb, na * nb);
  for (Index i = 0; i < na; ++i) {
    for (Index j = 0; j < na; ++j) {
      out.block(i * nb, j * nb, nb, nb) = a.matrix()(i, j) * b.matrix();
    }
  }
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return {std::move(dims), std::move(out)};
}

template <typename Real>
TensorOperator<Real> adjoint(const TensorOperator<Real>& t) {
  return {t.dims(), t.matrix().adjoint()};
}

template <typename Real>
std::complex<Real> trace(const TensorOperator<Real>& t) {
  return t.matrix().trace();
}

template <typename Real>
Real frobenius_norm(const TensorOperator<Real>& t) {
  return t.matrix().norm();
}

template <typename Real>
Real frobenius_distance(const TensorOperator<Real>& a, const TensorOperator<Real>& b) {
  detail::require_same_dims(a, b, "frobenius_distance");
  return (a.matrix() - b.matrix()).norm();
}

/// Traces out factor `j` (1-based). The remaining factors keep their order.
template <typename Real>
TensorOperator<Real> partial_trace(const TensorOperator<Real>& t, std::size_t j) {
  using Op = TensorOperator<Real>;
  const Dims& dims = t.dims();
  if (dims.size() < 2) throw ContractError("partial_trace: operator must have at least two factors");
  if (j < 1 || j > dims.size()) {
    std::ostringstream os;
    os << "partial_trace: factor index " << j << " out of range 1.." << dims.size();
    throw ContractError(os.str());
  }
  const Index left = Op::product(Dims(dims.begin(), dims.begin() + static_cast<std::ptrdiff_t>(j - 1)));
  const Index mid = dims[j - 1];
  const Index right = Op::product(Dims(dims.begin() + static_cast<std::ptrdiff_t>(j), dims.end()));

  typename Op::Matrix out = Op::Matrix::Zero(left * right, left * right);
  const auto& m = t.matrix();
  for (Index l = 0; l < left; ++l) {
    for (Index lp = 0; lp < left; ++lp) {
      for (Index k = 0; k < mid; ++k) {
        const Index row0 = (l * mid + k) * right;
        const Index col0 = (lp * mid + k) * right;
        out.block(l * right, lp * right, right, right) += m.block(row0, col0, right, right);
      }
    }
  }
  Dims rest = dims;
  rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(j - 1));
  return {std::move(rest), std::move(out)};
}

/// Adjoint of partial_trace: inserts an identity factor of dimension `d` at slot `j` (1-based),
/// so that the result's factor `j` is I_d. partial_trace(embed_identity(t, j, d), j) == d * t.
template <typename Real>
TensorOperator<Real> embed_identity(const TensorOperator<Real>& t, std::size_t j, Index d) {
  using Op = TensorOperator<Real>;
  const Dims& dims = t.dims();
  if (j < 1 || j > dims.size() + 1) throw ContractError("embed_identity: slot index out of range");
  if (d <= 0) throw ContractError("embed_identity: dimension must be positive");
  const Index left = Op::product(Dims(dims.begin(), dims.begin() + static_cast<std::ptrdiff_t>(j - 1)));
  const Index right = Op::product(Dims(dims.begin() + static_cast<std::ptrdiff_t>(j - 1), dims.end()));

  const Index side = left * d * right;
  typename Op::Matrix out = Op::Matrix::Zero(side, side);
  const auto& m = t.matrix();
  for (Index l = 0; l < left; ++l) {
    for (Index lp = 0; lp < left; ++lp) {
      for (Index k = 0; k < d; ++k) {
        out.block((l * d + k) * right, (lp * d + k) * right, right, right) =
            m.block(l * right, lp * right, right, right);
      }
    }
  }
  Dims grown = dims;
  grown.insert(grown.begin() + static_cast<std::ptrdiff_t>(j - 1), d);
  return {std::move(grown), std::move(out)};
}

/// Measured asymmetry ||t - t^dagger||_F.
template <typename Real>
Real hermitian_defect(const TensorOperator<Real>& t) {
  return (t.matrix() - t.matrix().adjoint()).norm();
}

template <typename Real>
bool is_hermitian(const TensorOperator<Real>& t, double tol = kHermitianTol) {
  return hermitian_defect(t) <= tol * std::max<Real>(Real(1), frobenius_norm(t));
}

/// Checks Hermiticity (relative Frobenius) and returns (t + t^dagger)/2.
template <typename Real>
TensorOperator<Real> require_hermitian(const TensorOperator<Real>& t, double tol = kHermitianTol) {
  const Real defect = hermitian_defect(t);
  const Real allowed = tol * std::max<Real>(Real(1), frobenius_norm(t));
  if (defect > allowed) throw NotHermitianError(static_cast<double>(defect), static_cast<double>(allowed));
  return {t.dims(), (t.matrix() + t.matrix().adjoint()) * Real(0.5)};
}

/// Eigen-decomposition of a Hermitian operator, eigenvalues in descending order.
template <typename Real = double>
struct Spectrum {
  Eigen::Matrix<Real, Eigen::Dynamic, 1> eigenvalues;
  /// Unitary; column k is the eigenvector of eigenvalues[k].
  typename TensorOperator<Real>::Matrix eigenvectors;
};

template <typename Real>
Spectrum<Real> eig_hermitian(const TensorOperator<Real>& t, double tol = kHermitianTol) {
  using ColMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
  const TensorOperator<Real> h = require_hermitian(t, tol);
  Eigen::SelfAdjointEigenSolver<ColMatrix> solver(ColMatrix(h.matrix()));
  if (solver.info() != Eigen::Success) throw std::runtime_error("eig_hermitian: eigensolver did not converge");

  // Eigen sorts ascending.
  Spectrum<Real> s;
  s.eigenvalues = solver.eigenvalues().reverse();
  s.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return s;
}

template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, 1> eigenvalues(const TensorOperator<Real>& t, double tol = kHermitianTol) {
  using ColMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
  const TensorOperator<Real> h = require_hermitian(t, tol);
  Eigen::SelfAdjointEigenSolver<ColMatrix> solver(ColMatrix(h.matrix()), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalues: eigensolver did not converge");
  return solver.eigenvalues().reverse();
}

/// V diag(f(lambda)) V^dagger on the same factor structure as `t`.
template <typename Real, typename F>
TensorOperator<Real> spectral_map(const TensorOperator<Real>& t, const Spectrum<Real>& s, F&& f) {
  Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1> mapped(s.eigenvalues.size());
  for (Index k = 0; k < s.eigenvalues.size(); ++k) mapped(k) = std::complex<Real>(f(s.eigenvalues(k)));
  return {t.dims(), s.eigenvectors * mapped.asDiagonal() * s.eigenvectors.adjoint()};
}

/// Hermitian sign function: same eigenvectors, eigenvalues mapped to +1 (lambda >= 0) or -1.
///
/// Eigenvalues within 1e-14 * max|lambda| of zero count as zero and map to +1, so round-off
/// in a numerically singular input cannot flip the tie rule.
template <typename Real>
TensorOperator<Real> hermitian_sign(const TensorOperator<Real>& t, double tol = kHermitianTol) {
  const Spectrum<Real> s = eig_hermitian(t, tol);
  const Real scale = s.eigenvalues.size() ? s.eigenvalues.cwiseAbs().maxCoeff() : Real(0);
  const Real tie = Real(1e-14) * scale;
  return spectral_map(t, s, [tie](Real l) { return l >= -tie ? Real(1) : Real(-1); });
}

template <typename Real>
Real operator_norm(const TensorOperator<Real>& t, double tol = kHermitianTol) {
  return eigenvalues(t, tol).cwiseAbs().maxCoeff();
}

template <typename Real>
Real trace_norm(const TensorOperator<Real>& t, double tol = kHermitianTol) {
  return eigenvalues(t, tol).cwiseAbs().sum();
}

template <typename Real>
Real min_eigenvalue(const TensorOperator<Real>& t, double tol = kHermitianTol) {
  return eigenvalues(t, tol).minCoeff();
}

/// True iff the smallest eigenvalue is >= -psd_tol.
template <typename Real>
bool is_psd(const TensorOperator<Real>& t, double psd_tol, double herm_tol = kHermitianTol) {
  return min_eigenvalue(t, herm_tol) >= -psd_tol;
}

}  // namespace bellforge
