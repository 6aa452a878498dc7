#pragma once

#include <Eigen/Dense>
#include <complex>

namespace kdq {

using cplx = std::complex<double>;

/// Dense row-major complex matrix; the common currency of the library.
using CMatrix =
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVector = Eigen::VectorXcd;

/// Default tolerance for structural predicates (hermiticity, unitarity,
/// positivity, completeness).
inline constexpr double kDefaultTol = 1e-10;

/// Largest dimension accepted for quantum objects (states, channels,
/// measurement sets, observables). Raw matrix operations are not capped.
inline constexpr Eigen::Index kMaxDim = 16;

/// Throws std::invalid_argument unless 1 <= dim <= kMaxDim.
void check_operator_dim(Eigen::Index dim);

CMatrix identity(Eigen::Index n);

/// Matrix product a*b; throws std::invalid_argument on shape mismatch.
CMatrix compose(const CMatrix& a, const CMatrix& b);

/// Conjugate transpose.
CMatrix adjoint(const CMatrix& a);

/// Trace of a square matrix.
cplx trace(const CMatrix& a);

/// Kronecker product (first factor owns the slow index).
CMatrix tensor(const CMatrix& a, const CMatrix& b);
CVector tensor(const CVector& a, const CVector& b);

/// Rank-one |u><v|.
CMatrix outer(const CVector& u, const CVector& v);

double max_abs_diff(const CMatrix& a, const CMatrix& b);
bool approx_equal(const CMatrix& a, const CMatrix& b,
                  double tol = kDefaultTol);

bool is_hermitian(const CMatrix& a, double tol = kDefaultTol);
bool is_unitary(const CMatrix& a, double tol = kDefaultTol);
/// Positive semidefinite within tol (smallest eigenvalue >= -tol);
/// requires hermiticity within tol as a precondition.
bool is_psd(const CMatrix& a, double tol = kDefaultTol);

struct EigResult {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;         // column k pairs with values[k]
};

/// Spectral decomposition of a Hermitian matrix (closed-form branch for
/// n <= 3, iterative otherwise). Throws std::invalid_argument if `a` is
/// not Hermitian within `herm_tol`.
EigResult hermitian_eig(const CMatrix& a, double herm_tol = 1e-8);

}  // namespace kdq
