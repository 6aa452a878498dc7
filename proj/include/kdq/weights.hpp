#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kdq/povm.hpp"
#include "kdq/qmodel.hpp"

namespace kdq {

enum class WeightObjective { kAnyFeasible, kMinInfNorm };

/// kOperator: left * rho * right = sum_m gamma_m M_m rho M_m^dag holds as
/// an operator identity. kTrace: it holds only on diagonal matrix units,
/// which suffices when the weighted output is consumed as a probability
/// at the final step of a protocol.
enum class WeightScope { kOperator, kTrace };

/// Linear system T gamma = alpha y linking per-outcome weights to a
/// two-sided observable pair (left, right), both diagonal in the
/// computational basis.
struct WeightSystem {
  CMatrix t;   // d^2 x m; column m is vec(|phi_m><phi_m|)
  CVector y;   // d^2; y[i + d j] = right_diag[i] * left_diag[j]
  double alpha = 0.0;
  Eigen::Index dim = 0;
  MeasurementSet set;
  Observable left;
  Observable right;
};

WeightSystem build_system(const MeasurementSet& set, const Observable& left,
                          const Observable& right);

struct WeightVector {
  std::vector<cplx> gammas;
  double gamma_max = 0.0;
  WeightScope scope = WeightScope::kOperator;
  std::string set_name;
  Observable left;
  Observable right;
};

/// Solves the weight system. kMinInfNorm minimizes max_m |gamma_m| to a
/// certified 1e-3 relative optimality (typically far better); kAnyFeasible
/// returns the minimum-2-norm solution. Falls back from operator scope to
/// trace scope when the full system is inconsistent; throws
/// InfeasibleError when even the trace system has no solution.
WeightVector solve_weights(const WeightSystem& sys, WeightObjective objective);

/// Worst-case matrix-unit residual of the decomposition identity: all
/// units for operator scope, diagonal units for trace scope. Valid
/// solutions stay below 1e-8.
double verify_weights(const MeasurementSet& set, const WeightVector& w);

/// Smallest n with 2 exp(-2 n eps^2 / g^2) <= delta/2, i.e.
/// n = ceil(g^2 ln(4/delta) / (2 eps^2)): samples needed so each
/// real/imag component of the estimate is within eps of its mean with
/// probability 1 - delta.
std::size_t hoeffding_n(double gamma_bound, double epsilon, double delta);

}  // namespace kdq
