#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>

#include "kdq/qcore.hpp"
#include "kdq/rng.hpp"

using namespace kdq;

namespace {

const cplx kI(0.0, 1.0);

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

CMatrix hadamard() {
  CMatrix m(2, 2);
  double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

/// Random matrix with dyadic-rational entries, so products are exact in
/// double precision and algebraic identities can be checked bit-for-bit.
CMatrix random_dyadic(Eigen::Index n, SplitMix64& rng) {
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      double re = static_cast<double>(rng.next() % 17) / 16.0 - 0.5;
      double im = static_cast<double>(rng.next() % 17) / 16.0 - 0.5;
      m(r, c) = cplx(re, im);
    }
  }
  return m;
}

CMatrix random_complex(Eigen::Index n, SplitMix64& rng) {
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      m(r, c) = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
    }
  }
  return m;
}

}  // namespace

TEST_CASE("identity and dimension guard") {
  CMatrix i3 = identity(3);
  CHECK(i3.rows() == 3);
  CHECK(i3(0, 0) == cplx(1.0, 0.0));
  CHECK(i3(0, 1) == cplx(0.0, 0.0));
  CHECK_NOTHROW(check_operator_dim(kMaxDim));
  CHECK_THROWS_AS(check_operator_dim(kMaxDim + 1), std::invalid_argument);
  CHECK_THROWS_AS(check_operator_dim(0), std::invalid_argument);
}

TEST_CASE("compose validates shapes and multiplies") {
  CMatrix a(2, 3), b(3, 2);
  a.setZero();
  b.setZero();
  a(0, 2) = 2.0;
  b(2, 1) = 3.0;
  CMatrix c = compose(a, b);
  CHECK(c(0, 1) == cplx(6.0, 0.0));
  CHECK_THROWS_AS(compose(a, a), std::invalid_argument);
  CHECK_THROWS_AS(compose(identity(2), identity(3)), std::invalid_argument);
}

TEST_CASE("adjoint conjugates and transposes") {
  CMatrix y = pauli_y();
  CHECK(max_abs_diff(adjoint(y), y) == 0.0);  // Hermitian
  CMatrix a(2, 2);
  a << cplx(1, 2), cplx(3, 4), cplx(5, 6), cplx(7, 8);
  CMatrix ad = adjoint(a);
  CHECK(ad(0, 1) == cplx(5, -6));
  CHECK(ad(1, 0) == cplx(3, -4));
}

TEST_CASE("trace is linear and cyclic") {
  SplitMix64 rng(11);
  for (int rep = 0; rep < 5; ++rep) {
    CMatrix a = random_complex(4, rng);
    CMatrix b = random_complex(4, rng);
    CMatrix c = random_complex(4, rng);
    cplx t1 = trace(a * b * c);
    cplx t2 = trace(b * c * a);
    cplx t3 = trace(c * a * b);
    CHECK(std::abs(t1 - t2) < 1e-12);
    CHECK(std::abs(t1 - t3) < 1e-12);
  }
  CHECK(trace(identity(5)) == cplx(5.0, 0.0));
}

TEST_CASE("tensor product structure") {
  CMatrix zx = tensor(pauli_z(), pauli_x());
  // (Z (x) X)(i1 i2, j1 j2) = Z(i1,j1) X(i2,j2); spot-check the corners.
  CHECK(zx(0, 1) == cplx(1.0, 0.0));
  CHECK(zx(1, 0) == cplx(1.0, 0.0));
  CHECK(zx(2, 3) == cplx(-1.0, 0.0));
  CHECK(zx(3, 2) == cplx(-1.0, 0.0));
  CHECK(zx(0, 0) == cplx(0.0, 0.0));

  CVector v0(2), v1(2);
  v0 << 1.0, 0.0;
  v1 << 0.0, 1.0;
  CVector v01 = tensor(v0, v1);
  CHECK(v01.size() == 4);
  CHECK(v01(1) == cplx(1.0, 0.0));
  CHECK(v01(0) == cplx(0.0, 0.0));

  SplitMix64 rng(7);
  for (int rep = 0; rep < 3; ++rep) {
    CMatrix a = random_dyadic(2, rng);
    CMatrix b = random_dyadic(2, rng);
    CMatrix c = random_dyadic(3, rng);
    // Associativity is exact for dyadic-rational entries.
    CHECK(max_abs_diff(tensor(tensor(a, b), c), tensor(a, tensor(b, c))) ==
          0.0);
    // Mixed-product property (within roundoff).
    CMatrix a2 = random_dyadic(2, rng);
    CMatrix b2 = random_dyadic(2, rng);
    CHECK(max_abs_diff(tensor(a, b) * tensor(a2, b2),
                       tensor(compose(a, a2), compose(b, b2))) < 1e-14);
  }
}

TEST_CASE("outer product") {
  CVector u(2), v(2);
  u << cplx(0, 1), 0.0;
  v << 0.0, cplx(2, 0);
  CMatrix m = outer(u, v);
  CHECK(m(0, 1) == cplx(0, 2));  // u0 * conj(v1) = i * 2
  CHECK(m(1, 0) == cplx(0, 0));
  CHECK(m.rows() == 2);
}

TEST_CASE("structural predicates") {
  CHECK(is_hermitian(pauli_y()));
  CHECK(!is_hermitian(pauli_y() * kI));
  CHECK(is_unitary(hadamard()));
  CHECK(is_unitary(pauli_x()));
  CHECK(!is_unitary(pauli_x() * 2.0));
  CMatrix psd(2, 2);
  psd << 2.0, 1.0, 1.0, 2.0;
  CHECK(is_psd(psd));
  CMatrix indef = pauli_z();
  CHECK(!is_psd(indef));
  CHECK(approx_equal(hadamard(), hadamard()));
  CHECK(!approx_equal(hadamard(), pauli_x()));
}

TEST_CASE("hermitian eigendecomposition") {
  EigResult z = hermitian_eig(pauli_z());
  REQUIRE(z.values.size() == 2);
  CHECK(z.values(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(z.values(1) == doctest::Approx(1.0).epsilon(1e-12));

  SplitMix64 rng(23);
  for (Eigen::Index n : {2, 3, 4, 6}) {
    CMatrix g = random_complex(n, rng);
    CMatrix h = g + adjoint(g);
    EigResult e = hermitian_eig(h);
    // Ascending order.
    for (Eigen::Index k = 1; k < n; ++k) {
      CHECK(e.values(k) >= e.values(k - 1));
    }
    // Orthonormal eigenvectors reconstructing the input.
    CHECK(max_abs_diff(adjoint(e.vectors) * e.vectors, identity(n)) < 1e-10);
    CMatrix rebuilt = CMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      rebuilt += e.values(k) * outer(e.vectors.col(k), e.vectors.col(k));
    }
    CHECK(max_abs_diff(rebuilt, h) < 1e-9);
  }

  CHECK_THROWS_AS(hermitian_eig(pauli_y() * cplx(2.0, 1.0)),
                  std::invalid_argument);
}
