#include "kdq/povm.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kdq/errors.hpp"
#include "kdq/qmodel.hpp"

namespace kdq {

namespace {

constexpr double kPi = std::numbers::pi;

CVector qubit_ket(cplx a, cplx b) {
  CVector v(2);
  v << a, b;
  return v;
}

/// Fixes the overall phase so the first non-negligible component is real
/// and positive; keeps generated bases deterministic.
void gauge_fix(CVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-9) {
      v *= std::conj(v(i)) / std::abs(v(i));
      return;
    }
  }
}

std::vector<CVector> mub_d3_kets() {
  const Eigen::Index d = 3;
  std::vector<CVector> kets;
  for (Eigen::Index k = 0; k < d; ++k) {
    CVector v = CVector::Zero(d);
    v(k) = 1.0;
    kets.push_back(v);
  }
  // Fourier-type bases |v^(r)_k> = d^{-1/2} sum_j w^{r j^2 + k j} |j>.
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index k = 0; k < d; ++k) {
      CVector v(d);
      for (Eigen::Index j = 0; j < d; ++j) {
        double arg = 2.0 * kPi * static_cast<double>(r * j * j + k * j) / 3.0;
        v(j) = std::exp(cplx(0.0, arg)) / std::sqrt(3.0);
      }
      gauge_fix(v);
      kets.push_back(v);
    }
  }
  return kets;
}

std::vector<CVector> mub_d4_kets() {
  const CMatrix x = (CMatrix(2, 2) << 0, 1, 1, 0).finished();
  const CMatrix y =
      (CMatrix(2, 2) << 0, cplx(0, -1), cplx(0, 1), 0).finished();
  const CMatrix z = (CMatrix(2, 2) << 1, 0, 0, -1).finished();
  const CMatrix i2 = identity(2);

  std::vector<CVector> kets;
  for (Eigen::Index k = 0; k < 4; ++k) {
    CVector v = CVector::Zero(4);
    v(k) = 1.0;
    kets.push_back(v);
  }
  // Joint eigenbases of commuting two-qubit Pauli triples; together with
  // the computational basis these five bases are pairwise unbiased.
  const std::array<std::array<CMatrix, 2>, 4> triples = {{
      {tensor(x, i2), tensor(i2, x)},
      {tensor(y, i2), tensor(i2, y)},
      {tensor(x, y), tensor(y, z)},
      {tensor(y, x), tensor(z, y)},
  }};
  for (const auto& pair : triples) {
    // P1 + 2 P2 has the nondegenerate spectrum {-3,-1,1,3}, so its
    // eigenvectors are the joint eigenbasis.
    EigResult eig = hermitian_eig(pair[0] + 2.0 * pair[1]);
    for (Eigen::Index k = 0; k < 4; ++k) {
      CVector v = eig.vectors.col(k);
      gauge_fix(v);
      kets.push_back(v);
    }
  }
  return kets;
}

}  // namespace

std::vector<std::string> builtin_set_names() {
  return {"z", "zy", "zyx", "mub-d3", "mub-d4"};
}

MeasurementSet builtin_set(std::string_view name) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  if (name == "z") {
    return make_set(2, {qubit_ket(1, 0), qubit_ket(0, 1)}, "z");
  }
  if (name == "zy") {
    return make_set(2,
                    {qubit_ket(1, 0), qubit_ket(0, 1),
                     qubit_ket(inv_sqrt2, cplx(0, inv_sqrt2)),
                     qubit_ket(inv_sqrt2, cplx(0, -inv_sqrt2))},
                    "zy");
  }
  if (name == "zyx") {
    return make_set(2,
                    {qubit_ket(1, 0), qubit_ket(0, 1),
                     qubit_ket(inv_sqrt2, cplx(0, inv_sqrt2)),
                     qubit_ket(inv_sqrt2, cplx(0, -inv_sqrt2)),
                     qubit_ket(inv_sqrt2, inv_sqrt2),
                     qubit_ket(inv_sqrt2, -inv_sqrt2)},
                    "zyx");
  }
  if (name == "mub-d3") {
    return make_set(3, mub_d3_kets(), "mub-d3");
  }
  if (name == "mub-d4") {
    return make_set(4, mub_d4_kets(), "mub-d4");
  }
  throw ConfigError("unknown measurement set: " + std::string(name));
}

MeasurementSet computational_set(Eigen::Index dim) {
  check_operator_dim(dim);
  std::vector<CVector> kets;
  for (Eigen::Index k = 0; k < dim; ++k) {
    CVector v = CVector::Zero(dim);
    v(k) = 1.0;
    kets.push_back(v);
  }
  return make_set(dim, std::move(kets), "computational");
}

MeasurementSet make_set(Eigen::Index dim, std::vector<CVector> kets,
                        std::string name, double tol) {
  check_operator_dim(dim);
  if (kets.empty()) {
    throw std::invalid_argument("measurement set requires at least one ket");
  }
  CMatrix sum = CMatrix::Zero(dim, dim);
  for (const CVector& k : kets) {
    if (k.size() != dim) {
      throw std::invalid_argument("measurement ket has wrong dimension");
    }
    sum += outer(k, k);
  }
  double alpha = trace(sum).real() / static_cast<double>(dim);
  if (max_abs_diff(sum, alpha * identity(dim)) > tol) {
    throw std::invalid_argument(
        "measurement kets do not satisfy the completeness relation");
  }
  MeasurementSet set;
  set.dim = dim;
  set.alpha = alpha;
  set.kets = std::move(kets);
  set.name = std::move(name);
  return set;
}

MeasurementOperators build_povm(const MeasurementSet& set) {
  MeasurementOperators out;
  out.set = set;
  double scale = 1.0 / std::sqrt(set.alpha);
  for (const CVector& phi : set.kets) {
    CMatrix m = CMatrix::Zero(set.dim, set.dim);
    for (Eigen::Index i = 0; i < set.dim; ++i) {
      m(i, i) = std::conj(phi(i)) * scale;
    }
    out.elements.push_back(std::move(m));
  }
  return out;
}

bool is_informationally_complete(const MeasurementSet& set, double rank_tol) {
  const Eigen::Index d = set.dim;
  CMatrix rows(static_cast<Eigen::Index>(set.kets.size()), d * d);
  Eigen::Index used = 0;
  for (const CVector& phi : set.kets) {
    double norm2 = phi.squaredNorm();
    if (norm2 < 1e-300) continue;  // zero kets contribute nothing
    CMatrix proj = outer(phi, phi) / norm2;
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        rows(used, i * d + j) = proj(i, j);
      }
    }
    ++used;
  }
  if (used < d * d) return false;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(
      rows.topRows(used).transpose());
  qr.setThreshold(rank_tol);
  return qr.rank() == d * d;
}

std::vector<std::vector<std::size_t>> sampling_decomposition(
    const MeasurementSet& set, double tol) {
  for (const CVector& k : set.kets) {
    if (std::abs(k.norm() - 1.0) > tol) {
      throw NumericError(
          "sampling decomposition requires unit-norm kets (set '" + set.name +
          "')");
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t m = 0; m < set.kets.size(); ++m) {
    bool placed = false;
    for (auto& group : groups) {
      if (group.size() >= static_cast<std::size_t>(set.dim)) continue;
      bool orthogonal = true;
      for (std::size_t other : group) {
        if (std::abs(set.kets[other].dot(set.kets[m])) > tol) {
          orthogonal = false;
          break;
        }
      }
      if (orthogonal) {
        group.push_back(m);
        placed = true;
        break;
      }
    }
    if (!placed) {
      groups.push_back({m});
    }
  }
  for (const auto& group : groups) {
    if (group.size() != static_cast<std::size_t>(set.dim)) {
      throw NumericError("measurement set '" + set.name +
                         "' does not decompose into orthonormal bases");
    }
  }
  return groups;
}

}  // namespace kdq
