#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kdq/qcore.hpp"

namespace kdq {

/// Family of ancilla-preparation kets {|phi_m>} over a d-dimensional
/// system with completeness sum_m |phi_m><phi_m| = alpha * I.
struct MeasurementSet {
  Eigen::Index dim = 0;
  double alpha = 0.0;
  std::vector<CVector> kets;
  std::string name;

  std::size_t size() const { return kets.size(); }
};

std::vector<std::string> builtin_set_names();

/// Built-in families: "z", "zy", "zyx" (qubit), "mub-d3", "mub-d4"
/// (full mutually unbiased bases in dimensions 3 and 4).
MeasurementSet builtin_set(std::string_view name);

/// Computational basis set in dimension `dim` (alpha = 1).
MeasurementSet computational_set(Eigen::Index dim);

/// Validates completeness of a user-supplied ket list and derives alpha.
MeasurementSet make_set(Eigen::Index dim, std::vector<CVector> kets,
                        std::string name = "custom", double tol = kDefaultTol);

/// Measurement operators M_m = sum_i (<phi_m|i>/sqrt(alpha)) |i><i|.
/// Each M_m is diagonal in the computational basis and
/// sum_m M_m^dag M_m = 1.
struct MeasurementOperators {
  MeasurementSet set;
  std::vector<CMatrix> elements;
};

MeasurementOperators build_povm(const MeasurementSet& set);

/// True when the projectors |phi_m><phi_m| span the full d^2-dimensional
/// operator space. Invariant under rescaling and permutation of the kets.
bool is_informationally_complete(const MeasurementSet& set,
                                 double rank_tol = 1e-9);

/// Partitions the kets into groups forming orthonormal bases, so a run
/// can draw one basis uniformly and measure projectively within it;
/// the resulting outcome distribution matches the POVM exactly.
/// Throws NumericError when no such partition exists.
std::vector<std::vector<std::size_t>> sampling_decomposition(
    const MeasurementSet& set, double tol = kDefaultTol);

}  // namespace kdq
