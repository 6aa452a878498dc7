#include "kdq/qcore.hpp"

#include <stdexcept>
#include <string>

namespace kdq {

void check_operator_dim(Eigen::Index dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("operator dimension " + std::to_string(dim) +
                                " outside supported range [1, " +
                                std::to_string(kMaxDim) + "]");
  }
}

CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

CMatrix compose(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("compose: inner dimensions disagree (" +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + ")");
  }
  return a * b;
}

CMatrix adjoint(const CMatrix& a) { return a.adjoint(); }

cplx trace(const CMatrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("trace: matrix must be square");
  }
  return a.trace();
}

CMatrix tensor(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CVector tensor(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

CMatrix outer(const CVector& u, const CVector& v) {
  return u * v.adjoint();
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

bool approx_equal(const CMatrix& a, const CMatrix& b, double tol) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         max_abs_diff(a, b) <= tol;
}

bool is_hermitian(const CMatrix& a, double tol) {
  return a.rows() == a.cols() && max_abs_diff(a, adjoint(a)) <= tol;
}

bool is_unitary(const CMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return max_abs_diff(adjoint(a) * a, identity(a.rows())) <= tol;
}

bool is_psd(const CMatrix& a, double tol) {
  if (!is_hermitian(a, tol)) return false;
  EigResult eig = hermitian_eig(a, tol < 1e-8 ? 1e-8 : tol);
  return eig.values.size() == 0 || eig.values.minCoeff() >= -tol;
}

EigResult hermitian_eig(const CMatrix& a, double herm_tol) {
  if (!is_hermitian(a, herm_tol)) {
    throw std::invalid_argument("hermitian_eig: matrix is not Hermitian");
  }
  // Symmetrize so tiny asymmetries within tolerance cannot leak in.
  CMatrix h = 0.5 * (a + adjoint(a));
  Eigen::SelfAdjointEigenSolver<CMatrix> solver;
  if (h.rows() <= 3) {
    solver.computeDirect(h);
  } else {
    solver.compute(h);
  }
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eig: eigensolver failed");
  }
  return EigResult{solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace kdq
