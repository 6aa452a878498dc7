#pragma once

#include <Eigen/Dense>
#include <vector>

namespace kdq {

struct LpResult {
  bool feasible = false;
  std::vector<double> x;  // structural variables only
};

/// Decides feasibility of {x >= 0 : A x <= b} with a dense phase-I
/// simplex (slack variables form the initial basis where possible,
/// artificials cover rows violated at x = 0). Deterministic: Dantzig
/// pricing with an automatic Bland fallback against cycling.
LpResult lp_feasible_ineq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                          double tol = 1e-9);

}  // namespace kdq
