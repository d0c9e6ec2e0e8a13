#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "test_support.hpp"

using namespace bellforge;
using namespace bellforge::testing;

namespace {

// Independent partial trace over the last factor: sum_k (I (x) <k|) T (I (x) |k>).
Operator partial_trace_last_by_bras(const Operator& t) {
  const Index d = t.dims().back();
  const Index rest = t.side() / d;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rest, rest);
  for (Index k = 0; k < d; ++k) {
    Eigen::MatrixXcd ket = Eigen::MatrixXcd::Zero(d, 1);
    ket(k, 0) = 1;
    Eigen::MatrixXcd lift = Eigen::MatrixXcd::Zero(rest * d, rest);
    for (Index i = 0; i < rest; ++i) lift.block(i * d, i, d, 1) = ket;
    acc += lift.adjoint() * Eigen::MatrixXcd(t.matrix()) * lift;
  }
  Dims dims(t.dims().begin(), t.dims().end() - 1);
  return {dims, acc};
}

}  // namespace

TEST_SUITE("operator-core") {
  TEST_CASE("construction enforces the side/factor_dims invariant") {
    CHECK_THROWS_AS(Operator({2, 2}, Operator::Matrix::Identity(3, 3)), ContractError);
    CHECK_THROWS_AS(Operator({}, Operator::Matrix::Identity(1, 1)), ContractError);
    CHECK_THROWS_AS(Operator({0}, Operator::Matrix::Identity(0, 0)), ContractError);
    Operator::Matrix bad = Operator::Matrix::Identity(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(Operator({2}, bad), ContractError);
    CHECK(Operator::identity({2, 3}).side() == 6);
  }

  TEST_CASE("kron of identities is the identity with concatenated dims") {
    const Operator k = kron(Operator::identity({2}), Operator::identity({2}));
    CHECK(k.dims() == Dims{2, 2});
    CHECK(frobenius_distance(k, Operator::identity({2, 2})) == 0.0);
  }

  TEST_CASE("kron(sigma_x, sigma_z) by direct definition") {
    Operator::Matrix expected(4, 4);
    expected << 0, 0, 1, 0,  //
        0, 0, 0, -1,         //
        1, 0, 0, 0,          //
        0, -1, 0, 0;
    CHECK(frobenius_distance(kron(pauli_x(), pauli_z()), Operator({2, 2}, expected)) == 0.0);
  }

  TEST_CASE("mixed-product law holds for random inputs") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
      const Index da = 2 + trial % 2;
      const Index db = 2 + (trial / 2) % 3;
      const Operator a = random_matrix({da}, rng), c = random_matrix({da}, rng);
      const Operator b = random_matrix({db}, rng), d = random_matrix({db}, rng);
      const Operator lhs = kron(a, b) * kron(c, d);
      const Operator rhs = kron(a * c, b * d);
      CHECK(frobenius_distance(lhs, rhs) <= 1e-12 * frobenius_norm(rhs));
    }
  }

  TEST_CASE("partial_trace of the maximally mixed state") {
    for (Index d = 2; d <= 5; ++d) {
      const double dd = static_cast<double>(d);
      const Operator mixed = 1.0 / (dd * dd) * Operator::identity({d, d});
      CHECK(frobenius_distance(partial_trace(mixed, 1), 1.0 / dd * Operator::identity({d})) <= 1e-15);
    }
  }

  TEST_CASE("partial_trace factorizes product operators") {
    std::mt19937_64 rng(3);
    const Density rho = random_density({3}, rng);
    const Density sigma = random_density({2}, rng);
    const Operator prod = kron(rho.op(), sigma.op());
    CHECK(frobenius_distance(partial_trace(prod, 2), trace(sigma.op()) * rho.op()) <= 1e-14);
    CHECK(frobenius_distance(partial_trace(prod, 1), trace(rho.op()) * sigma.op()) <= 1e-14);
  }

  TEST_CASE("partial_trace over the second factor of the flip is the identity") {
    for (Index d = 2; d <= 6; ++d) {
      // Flip from the basis representation sum_{n,m} |n><m| (x) |m><n|.
      Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(d * d, d * d);
      for (Index n = 0; n < d; ++n)
        for (Index m = 0; m < d; ++m) {
          Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d), b = Eigen::MatrixXcd::Zero(d, d);
          a(n, m) = 1;
          b(m, n) = 1;
          v += Eigen::MatrixXcd(kron(Operator({d}, a), Operator({d}, b)).matrix());
        }
      const Operator flip_op({d, d}, v);
      CHECK(frobenius_distance(partial_trace(flip_op, 2), Operator::identity({d})) <= 1e-15);
      CHECK(frobenius_distance(partial_trace(flip_op, 1), Operator::identity({d})) <= 1e-15);
    }
  }

  TEST_CASE("partial_trace agrees with the bra-sandwich oracle") {
    std::mt19937_64 rng(5);
    for (const Dims& dims : {Dims{2, 3}, Dims{3, 2, 2}, Dims{2, 2, 3}}) {
      const Operator t = random_matrix(dims, rng);
      CHECK(frobenius_distance(partial_trace(t, dims.size()), partial_trace_last_by_bras(t)) <= 1e-12);
    }
  }

  TEST_CASE("partial_trace index errors") {
    const Operator t = Operator::identity({2, 2, 2});
    CHECK_THROWS_AS(partial_trace(t, 0), ContractError);
    CHECK_THROWS_AS(partial_trace(t, 4), ContractError);
    CHECK_THROWS_AS(partial_trace(Operator::identity({4}), 1), ContractError);
  }

  TEST_CASE("partial_trace is linear, trace preserving and keeps Hermiticity") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      const Dims dims{2, 3, 2};
      const Operator x = random_matrix(dims, rng);
      const Operator y = random_matrix(dims, rng);
      const Operator h = random_hermitian(dims, rng);
      const std::complex<double> alpha(0.3, -1.2);
      for (std::size_t j = 1; j <= 3; ++j) {
        const Operator lhs = partial_trace(alpha * x + y, j);
        const Operator rhs = alpha * partial_trace(x, j) + partial_trace(y, j);
        CHECK(frobenius_distance(lhs, rhs) <= 1e-12 * frobenius_norm(rhs));
        CHECK(std::abs(trace(partial_trace(x, j)) - trace(x)) <= 1e-12 * frobenius_norm(x));
        CHECK(hermitian_defect(partial_trace(h, j)) <= 1e-13);
      }
    }
  }

  TEST_CASE("embed_identity is the adjoint of partial_trace") {
    std::mt19937_64 rng(23);
    const Operator x = random_matrix({3, 3, 3}, rng);
    const Operator y = random_matrix({3, 3}, rng);
    for (std::size_t j = 1; j <= 3; ++j) {
      const auto lhs = (partial_trace(x, j).matrix().adjoint() * y.matrix()).trace();
      const auto rhs = (x.matrix().adjoint() * embed_identity(y, j, 3).matrix()).trace();
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs) + 1e-12);
      CHECK(frobenius_distance(partial_trace(embed_identity(y, j, 3), j), 3.0 * y) <= 1e-12);
    }
    CHECK(embed_identity(y, 2, 4).dims() == Dims{3, 4, 3});
  }

  TEST_CASE("eig_hermitian on small known spectra") {
    const auto d = eig_hermitian(diagonal({3, 1, 2}));
    CHECK(d.eigenvalues(0) == doctest::Approx(3));
    CHECK(d.eigenvalues(1) == doctest::Approx(2));
    CHECK(d.eigenvalues(2) == doctest::Approx(1));

    const auto x = eig_hermitian(pauli_x());
    CHECK(x.eigenvalues(0) == doctest::Approx(1));
    CHECK(x.eigenvalues(1) == doctest::Approx(-1));

    // Singlet projector at d = 2: rank one.
    const Operator p = 0.5 * (Operator::identity({2, 2}) - flip<double>(2));
    const auto s = eig_hermitian(p);
    CHECK(std::abs(s.eigenvalues(0) - 1) <= 1e-14);
    for (Index k = 1; k < 4; ++k) CHECK(std::abs(s.eigenvalues(k)) <= 1e-14);
  }

  TEST_CASE("eig_hermitian rejects non-Hermitian input with the measured asymmetry") {
    Operator::Matrix m = Operator::Matrix::Zero(2, 2);
    m(0, 1) = 1;
    try {
      (void)eig_hermitian(Operator({2}, m));
      FAIL("expected NotHermitianError");
    } catch (const NotHermitianError& e) {
      CHECK(e.asymmetry() == doctest::Approx(std::sqrt(2.0)));
    }
    CHECK_THROWS_AS(operator_norm(Operator({2}, m)), NotHermitianError);
    CHECK_THROWS_AS(trace_norm(Operator({2}, m)), NotHermitianError);
    CHECK_THROWS_AS(is_psd(Operator({2}, m), 1e-10), NotHermitianError);
  }

  TEST_CASE("eig_hermitian satisfies the spectrum invariants up to side 216") {
    std::mt19937_64 rng(29);
    for (const Dims& dims : {Dims{2}, Dims{3, 3}, Dims{4, 4, 4}, Dims{6, 6, 6}}) {
      const Operator h = random_hermitian(dims, rng);
      const auto s = eig_hermitian(h);
      const Index n = h.side();
      for (Index k = 1; k < n; ++k) CHECK(s.eigenvalues(k - 1) >= s.eigenvalues(k));
      const double op_norm = s.eigenvalues.cwiseAbs().maxCoeff();
      double worst = 0;
      for (Index k = 0; k < n; ++k) {
        const Eigen::VectorXcd v = s.eigenvectors.col(k);
        worst = std::max(worst, (h.matrix() * v - s.eigenvalues(k) * v).norm());
      }
      CHECK(worst <= 1e-10 * op_norm);
      const Eigen::MatrixXcd vv = s.eigenvectors.adjoint() * s.eigenvectors;
      CHECK((vv - Eigen::MatrixXcd::Identity(n, n)).norm() <= 1e-10);
      const Operator rebuilt = spectral_map(h, s, [](double l) { return l; });
      CHECK(frobenius_distance(rebuilt, h) <= 1e-9 * frobenius_norm(h));
    }
  }

  TEST_CASE("hermitian_sign maps zero to +1") {
    const Operator s = hermitian_sign(diagonal({2, -0.5, 0}));
    CHECK(frobenius_distance(s, diagonal({1, -1, 1})) <= 1e-14);
  }

  TEST_CASE("hermitian_sign is an involution and attains the trace norm") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      const Index n = 2 + trial % 5;
      const Operator x = random_hermitian({n}, rng);
      const Operator s = hermitian_sign(x);
      CHECK(frobenius_distance(s * s, Operator::identity({n})) <= 1e-12);
      // Oracle: sum of |eigenvalues| from the spectrum.
      const double oracle = eig_hermitian(x).eigenvalues.cwiseAbs().sum();
      CHECK(std::abs(trace(x * s).real() - oracle) <= 1e-12 * oracle);
      CHECK(std::abs(trace_norm(x) - oracle) <= 1e-12 * oracle);
    }
  }

  TEST_CASE("hermitian_sign maximizes tr[X W] over the unit operator-norm ball") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (Index n = 1; n <= 4; ++n) {
      for (int trial = 0; trial < 5; ++trial) {
        const Operator x = random_hermitian({n}, rng);
        const double best = trace(x * hermitian_sign(x)).real();
        const auto spectrum = eig_hermitian(x);
        // Every +-1 pattern in the eigenbasis of X.
        double enumerated = -1e300;
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
          Index k = 0;
          const Operator w = spectral_map(x, spectrum, [&](double) { return (mask >> k++) & 1u ? 1.0 : -1.0; });
          enumerated = std::max(enumerated, trace(x * w).real());
        }
        CHECK(std::abs(best - enumerated) <= 1e-12 * std::max(1.0, best));
        // Random contractions in random bases never beat it.
        for (int sample = 0; sample < 50; ++sample) {
          const auto basis = eig_hermitian(random_hermitian({n}, rng));
          const Operator w = spectral_map(x, basis, [&](double) { return unit(rng); });
          CHECK(trace(x * w).real() <= best + 1e-12);
        }
      }
    }
  }

  TEST_CASE("norms and positivity") {
    CHECK(operator_norm(pauli_z()) == doctest::Approx(1));
    CHECK(trace_norm(diagonal({1, -2})) == doctest::Approx(3));
    CHECK(min_eigenvalue(diagonal({1, -2})) == doctest::Approx(-2));
    for (Index d = 2; d <= 5; ++d) CHECK(is_psd(antisym_projector<double>(d), 1e-10));
    CHECK_FALSE(is_psd(pauli_z(), 1e-10));
    CHECK(is_psd(diagonal({1, -1e-12}), 1e-10));
  }

  TEST_CASE("adjoint, trace and Frobenius distance") {
    Operator::Matrix m(2, 2);
    m << C(1, 1), C(2, 0), C(0, 3), C(4, -1);
    const Operator a({2}, m);
    CHECK(adjoint(a)(0, 1) == C(0, -3));
    CHECK(trace(a) == C(5, 0));
    CHECK(frobenius_distance(a, a) == 0.0);
    CHECK(frobenius_distance(Operator::identity({2}), Operator::zero({2})) == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(frobenius_distance(Operator::identity({4}), Operator::identity({2, 2})), ContractError);
  }
}
