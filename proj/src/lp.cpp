#include "kdq/lp.hpp"

#include <cmath>
#include <limits>

#include "kdq/errors.hpp"

namespace kdq {

namespace {
constexpr double kPivotTol = 1e-11;
}

LpResult lp_feasible_ineq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                          double tol) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m) {
    throw std::invalid_argument("lp_feasible_ineq: shape mismatch");
  }

  // Count artificials: one per row violated at x = 0 (b_i < 0).
  Eigen::Index n_art = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (b(i) < 0.0) ++n_art;
  }
  const Eigen::Index total = n + m + n_art;  // structural + slack + artificial

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, total + 1);
  std::vector<Eigen::Index> basis(m);
  Eigen::Index art = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (b(i) >= 0.0) {
      t.row(i).head(n) = a.row(i);
      t(i, n + i) = 1.0;
      t(i, total) = b(i);
      basis[i] = n + i;
    } else {
      t.row(i).head(n) = -a.row(i);
      t(i, n + i) = -1.0;
      t(i, n + m + art) = 1.0;
      t(i, total) = -b(i);
      basis[i] = n + m + art;
      ++art;
    }
  }
  // Phase-I reduced costs: minimize the artificial sum.
  for (Eigen::Index j = 0; j < n_art; ++j) t(m, n + m + j) = 1.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] >= n + m) t.row(m) -= t.row(i);
  }

  bool bland = false;
  double best_obj = std::numeric_limits<double>::infinity();
  Eigen::Index since_improvement = 0;
  const Eigen::Index stall_window = m + total + 16;
  const Eigen::Index max_iters = 2000 + 50 * (m + total);

  for (Eigen::Index iter = 0; iter < max_iters; ++iter) {
    // Entering column.
    Eigen::Index enter = -1;
    if (bland) {
      for (Eigen::Index j = 0; j < total; ++j) {
        if (t(m, j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
    } else {
      double best = -kPivotTol;
      for (Eigen::Index j = 0; j < total; ++j) {
        if (t(m, j) < best) {
          best = t(m, j);
          enter = j;
        }
      }
    }
    if (enter < 0) break;  // optimal

    // Ratio test; ties resolved toward the smallest basis index.
    Eigen::Index leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t(i, enter) > kPivotTol) {
        double ratio = t(i, total) / t(i, enter);
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 &&
             (leave < 0 || basis[i] < basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) {
      throw NumericError("phase-I simplex became unbounded");
    }

    // Pivot.
    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i != leave && std::abs(t(i, enter)) > 0.0) {
        t.row(i) -= t(i, enter) * t.row(leave);
      }
    }
    basis[leave] = enter;

    double obj = -t(m, total);
    if (obj < best_obj - 1e-12) {
      best_obj = obj;
      since_improvement = 0;
    } else if (++since_improvement > stall_window) {
      bland = true;
    }
  }

  LpResult result;
  double art_sum = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] >= n + m) art_sum += t(i, total);
  }
  result.feasible = art_sum <= tol;
  if (result.feasible) {
    result.x.assign(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (basis[i] < n) {
        result.x[static_cast<std::size_t>(basis[i])] = t(i, total);
      }
    }
  }
  return result;
}

}  // namespace kdq
