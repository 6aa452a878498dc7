#include "kdq/qmodel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace kdq {

namespace {

constexpr double kPi = std::numbers::pi;

const CMatrix& pauli(int k) {
  static const CMatrix paulis[4] = {
      (CMatrix(2, 2) << 1, 0, 0, 1).finished(),
      (CMatrix(2, 2) << 0, 1, 1, 0).finished(),
      (CMatrix(2, 2) << 0, cplx(0, -1), cplx(0, 1), 0).finished(),
      (CMatrix(2, 2) << 1, 0, 0, -1).finished(),
  };
  return paulis[k];
}

CMatrix pauli_string(int code, int n_qubits) {
  CMatrix out = pauli(code % 4);
  for (int q = 1; q < n_qubits; ++q) {
    code /= 4;
    out = tensor(pauli(code % 4), out);
  }
  return out;
}

}  // namespace

DensityMatrix::DensityMatrix(CMatrix m, double tol) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols()) {
    throw std::invalid_argument("density matrix must be square");
  }
  check_operator_dim(mat_.rows());
  if (!is_hermitian(mat_, tol)) {
    throw std::invalid_argument("density matrix must be Hermitian");
  }
  if (std::abs(trace(mat_) - cplx(1.0)) > tol) {
    throw std::invalid_argument("density matrix must have unit trace");
  }
  if (!is_psd(mat_, tol)) {
    throw std::invalid_argument("density matrix must be positive semidefinite");
  }
}

DensityMatrix DensityMatrix::pure(const CVector& ket, double tol) {
  if (std::abs(ket.norm() - 1.0) > tol) {
    throw std::invalid_argument("pure state requires a unit-norm ket");
  }
  return DensityMatrix(outer(ket, ket), tol);
}

DensityMatrix DensityMatrix::basis_state(Eigen::Index dim, Eigen::Index i) {
  check_operator_dim(dim);
  if (i < 0 || i >= dim) {
    throw std::invalid_argument("basis state index out of range");
  }
  CVector ket = CVector::Zero(dim);
  ket(i) = 1.0;
  return pure(ket);
}

DensityMatrix DensityMatrix::plus_state() {
  // Build (|0>+|1>)(<0|+<1|)/2 directly so every entry is exactly 0.5;
  // squaring 1/sqrt(2) would leave the trace one ulp above 1.
  CMatrix rho = CMatrix::Constant(2, 2, cplx(0.5, 0.0));
  return DensityMatrix(rho);
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
  check_operator_dim(dim);
  return DensityMatrix(identity(dim) / static_cast<double>(dim));
}

bool Observable::is_diagonal(double tol) const {
  CMatrix diag_only = mat.diagonal().asDiagonal();
  return max_abs_diff(mat, diag_only) <= tol;
}

Observable make_observable(const CMatrix& hermitian, std::string name,
                           double merge_tol) {
  if (hermitian.rows() != hermitian.cols()) {
    throw std::invalid_argument("observable must be square");
  }
  check_operator_dim(hermitian.rows());
  EigResult eig = hermitian_eig(hermitian);
  Observable obs;
  obs.mat = 0.5 * (hermitian + adjoint(hermitian));
  obs.name = std::move(name);
  // Walk the spectrum from the top, merging eigenvalues within merge_tol
  // into a single projector.
  Eigen::Index k = eig.values.size();
  while (k > 0) {
    Eigen::Index hi = k;
    double value = eig.values(hi - 1);
    CMatrix proj = CMatrix::Zero(hermitian.rows(), hermitian.cols());
    double sum = 0.0;
    Eigen::Index count = 0;
    while (k > 0 && value - eig.values(k - 1) <= merge_tol) {
      CVector v = eig.vectors.col(k - 1);
      proj += outer(v, v);
      sum += eig.values(k - 1);
      ++count;
      --k;
    }
    obs.eigenvalues.push_back(sum / static_cast<double>(count));
    obs.projectors.push_back(proj);
  }
  return obs;
}

Observable named_observable(std::string_view name, Eigen::Index dim) {
  check_operator_dim(dim);
  if (name == "I") {
    return make_observable(identity(dim), "I");
  }
  if (name == "Z" || name == "X" || name == "Y") {
    if (dim != 2) {
      throw std::invalid_argument("observable " + std::string(name) +
                                  " is defined for qubits only");
    }
    int code = name == "X" ? 1 : (name == "Y" ? 2 : 3);
    return make_observable(pauli(code), std::string(name));
  }
  if (name.size() >= 2 && name[0] == 'P') {
    Eigen::Index k = 0;
    for (char c : name.substr(1)) {
      if (c < '0' || c > '9') {
        throw std::invalid_argument("unknown observable name: " +
                                    std::string(name));
      }
      k = k * 10 + (c - '0');
    }
    if (k >= dim) {
      throw std::invalid_argument("projector index out of range for P" +
                                  std::to_string(k));
    }
    CMatrix m = CMatrix::Zero(dim, dim);
    m(k, k) = 1.0;
    return make_observable(m, std::string(name));
  }
  throw std::invalid_argument("unknown observable name: " + std::string(name));
}

Channel Channel::unitary(CMatrix u, double tol) {
  if (u.rows() != u.cols()) {
    throw std::invalid_argument("unitary channel requires a square matrix");
  }
  check_operator_dim(u.rows());
  if (!is_unitary(u, tol)) {
    throw std::invalid_argument("matrix is not unitary within tolerance");
  }
  Channel ch;
  ch.unitary_ = true;
  ch.ops_.push_back(std::move(u));
  return ch;
}

Channel Channel::kraus(std::vector<CMatrix> ops, double tol) {
  if (ops.empty()) {
    throw std::invalid_argument("Kraus channel requires at least one operator");
  }
  Eigen::Index d = ops.front().rows();
  check_operator_dim(d);
  CMatrix sum = CMatrix::Zero(d, d);
  for (const CMatrix& k : ops) {
    if (k.rows() != d || k.cols() != d) {
      throw std::invalid_argument("Kraus operators must share one square shape");
    }
    sum += adjoint(k) * k;
  }
  if (max_abs_diff(sum, kdq::identity(d)) > tol) {
    throw std::invalid_argument(
        "Kraus operators do not satisfy the completeness relation");
  }
  Channel ch;
  ch.unitary_ = false;
  ch.ops_ = std::move(ops);
  return ch;
}

Channel Channel::identity(Eigen::Index dim) {
  return unitary(kdq::identity(dim));
}

const CMatrix& Channel::unitary_mat() const {
  if (!unitary_) {
    throw std::logic_error("channel is not of unitary kind");
  }
  return ops_.front();
}

CMatrix rotation_matrix(double theta, double phi) {
  double c = std::cos(theta / 2.0);
  double s = std::sin(theta / 2.0);
  cplx mi(0.0, -1.0);
  CMatrix r(2, 2);
  r << c, mi * std::exp(cplx(0.0, -phi)) * s,
       mi * std::exp(cplx(0.0, phi)) * s, c;
  return r;
}

Channel rotation_gate(double theta, double phi) {
  return Channel::unitary(rotation_matrix(theta, phi));
}

Observable heisenberg(const Observable& a, const Channel& u) {
  if (!u.is_unitary_kind()) {
    throw std::invalid_argument("heisenberg evolution requires a unitary");
  }
  const CMatrix& um = u.unitary_mat();
  if (um.rows() != a.dim()) {
    throw std::invalid_argument("heisenberg: dimension mismatch");
  }
  Observable out = a;
  out.mat = adjoint(um) * a.mat * um;
  for (CMatrix& p : out.projectors) {
    p = adjoint(um) * p * um;
  }
  return out;
}

DensityMatrix apply_channel(const DensityMatrix& rho, const Channel& ch) {
  return DensityMatrix(apply_channel_mat(rho.mat(), ch));
}

CMatrix apply_channel_mat(const CMatrix& op, const Channel& ch) {
  if (op.rows() != ch.dim() || op.cols() != ch.dim()) {
    throw std::invalid_argument("apply_channel: dimension mismatch");
  }
  CMatrix out = CMatrix::Zero(op.rows(), op.cols());
  for (const CMatrix& k : ch.ops()) {
    out += k * op * adjoint(k);
  }
  return out;
}

Channel csum_gate(Eigen::Index dim) {
  check_operator_dim(dim);
  check_operator_dim(dim * dim);
  CMatrix u = CMatrix::Zero(dim * dim, dim * dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      u(i * dim + (i + j) % dim, i * dim + j) = 1.0;
    }
  }
  return Channel::unitary(u);
}

Channel ms_gate() {
  CMatrix u = (identity(4) + cplx(0.0, 1.0) * tensor(pauli(1), pauli(1))) /
              std::sqrt(2.0);
  return Channel::unitary(u);
}

std::vector<GateOp> cnot_from_ms() {
  return {
      {false, 0, -kPi / 2, -kPi / 2},
      {true, 0, 0.0, 0.0},
      {false, 0, -kPi / 2, kPi},
      {false, 1, kPi / 2, 0.0},
      {false, 0, -kPi / 2, kPi / 2},
  };
}

CMatrix gate_list_unitary(const std::vector<GateOp>& ops) {
  CMatrix u = identity(4);
  for (const GateOp& op : ops) {
    CMatrix g;
    if (op.entangling) {
      g = ms_gate().unitary_mat();
    } else if (op.target == 0) {
      g = tensor(rotation_matrix(op.theta, op.phi), identity(2));
    } else if (op.target == 1) {
      g = tensor(identity(2), rotation_matrix(op.theta, op.phi));
    } else {
      throw std::invalid_argument("gate target must be 0 or 1");
    }
    u = g * u;
  }
  return u;
}

Channel depolarizing_channel(double p, int n_qubits) {
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("depolarizing strength must lie in [0, 1]");
  }
  if (n_qubits < 1 || n_qubits > 2) {
    throw std::invalid_argument("depolarizing channel supports 1 or 2 qubits");
  }
  Eigen::Index d = Eigen::Index(1) << n_qubits;
  if (p == 0.0) {
    return Channel::identity(d);
  }
  int strings = 1;
  for (int q = 0; q < n_qubits; ++q) strings *= 4;
  std::vector<CMatrix> ops;
  ops.reserve(strings);
  double keep = 1.0 - p * (strings - 1) / static_cast<double>(strings);
  ops.push_back(std::sqrt(keep) * identity(d));
  double w = std::sqrt(p) / static_cast<double>(d);
  for (int code = 1; code < strings; ++code) {
    ops.push_back(w * pauli_string(code, n_qubits));
  }
  return Channel::kraus(std::move(ops));
}

double depolarizing_from_fidelity(double fidelity) {
  if (fidelity < 0.25 || fidelity > 1.0) {
    throw std::invalid_argument(
        "two-qubit entangled-state fidelity must lie in [0.25, 1]");
  }
  return 4.0 * (1.0 - fidelity) / 3.0;
}

Channel dephasing_channel(double p) {
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("dephasing strength must lie in [0, 1]");
  }
  if (p == 0.0) {
    return Channel::identity(2);
  }
  std::vector<CMatrix> ops;
  ops.push_back(std::sqrt(1.0 - p) * identity(2));
  ops.push_back(std::sqrt(p) * pauli(3));
  return Channel::kraus(std::move(ops));
}

}  // namespace kdq
