#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kdq/qcore.hpp"

namespace kdq {

/// Validated density operator: Hermitian, unit trace, positive
/// semidefinite, all within `tol`.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix m, double tol = kDefaultTol);

  static DensityMatrix pure(const CVector& ket, double tol = kDefaultTol);
  static DensityMatrix basis_state(Eigen::Index dim, Eigen::Index i);
  /// (|0> + |1>)/sqrt(2) on a qubit.
  static DensityMatrix plus_state();
  static DensityMatrix maximally_mixed(Eigen::Index dim);

  Eigen::Index dim() const { return mat_.rows(); }
  const CMatrix& mat() const { return mat_; }

 private:
  CMatrix mat_;
};

/// Hermitian observable with its spectral decomposition
/// mat = sum_k eigenvalues[k] * projectors[k]. Nearby eigenvalues are
/// merged into one projector; eigenvalues are listed descending.
struct Observable {
  CMatrix mat;
  std::vector<double> eigenvalues;
  std::vector<CMatrix> projectors;
  std::string name;

  Eigen::Index dim() const { return mat.rows(); }
  bool is_diagonal(double tol = kDefaultTol) const;
  /// Diagonal of `mat` as a complex vector.
  CVector diagonal() const { return mat.diagonal(); }
};

Observable make_observable(const CMatrix& hermitian, std::string name = "",
                           double merge_tol = 1e-9);

/// Named observables: "I" (any dim), "Z"/"X"/"Y" (qubit), "Pk" (projector
/// onto basis state k, any dim with k < dim).
Observable named_observable(std::string_view name, Eigen::Index dim = 2);

/// Completely positive trace-preserving map, stored either as one unitary
/// or as Kraus operators with sum_k K_k^dag K_k = 1.
class Channel {
 public:
  static Channel unitary(CMatrix u, double tol = kDefaultTol);
  static Channel kraus(std::vector<CMatrix> ops, double tol = kDefaultTol);
  static Channel identity(Eigen::Index dim);

  bool is_unitary_kind() const { return unitary_; }
  Eigen::Index dim() const { return ops_.front().rows(); }
  const std::vector<CMatrix>& ops() const { return ops_; }
  /// The single unitary matrix; throws std::logic_error for Kraus kind.
  const CMatrix& unitary_mat() const;

 private:
  Channel() = default;
  bool unitary_ = false;
  std::vector<CMatrix> ops_;
};

/// R(theta, phi) = exp(-i (theta/2) (X cos(phi) + Y sin(phi))).
CMatrix rotation_matrix(double theta, double phi);
Channel rotation_gate(double theta, double phi);

/// Heisenberg picture: A -> U^dag A U (projectors transformed alike);
/// requires a unitary channel.
Observable heisenberg(const Observable& a, const Channel& u);

DensityMatrix apply_channel(const DensityMatrix& rho, const Channel& ch);
/// Linear action of the channel on an arbitrary operator
/// (not necessarily a normalized state).
CMatrix apply_channel_mat(const CMatrix& op, const Channel& ch);

/// Generalized controlled sum |i,j> -> |i, (i+j) mod d>, first tensor
/// factor controlling. Equals CNOT for d = 2.
Channel csum_gate(Eigen::Index dim);

/// Two-qubit Molmer-Sorensen interaction exp(+i pi/4 X(x)X).
Channel ms_gate();

/// One element of a native-gate program on a (system, ancilla) qubit pair.
/// `entangling` selects the MS interaction; otherwise a single-qubit
/// rotation R(theta, phi) on `target` (0 = system, 1 = ancilla).
struct GateOp {
  bool entangling = false;
  int target = 0;
  double theta = 0.0;
  double phi = 0.0;
};

/// CNOT decomposed into four single-qubit rotations and one MS gate,
/// exact up to a global phase. Listed in application order.
std::vector<GateOp> cnot_from_ms();

/// Composes a gate program into a 4x4 unitary (first op applied first).
CMatrix gate_list_unitary(const std::vector<GateOp>& ops);

/// n-qubit depolarizing channel rho -> (1-p) rho + p I/2^n, as Kraus
/// operators proportional to the Pauli strings.
Channel depolarizing_channel(double p, int n_qubits);

/// Depolarizing strength that reproduces a given maximally-entangled-state
/// fidelity under the two-qubit channel: p = 4(1 - F)/3.
double depolarizing_from_fidelity(double fidelity);

/// Single-qubit dephasing rho -> (1-p) rho + p Z rho Z.
Channel dephasing_channel(double p);

}  // namespace kdq
