#include "kdq/weights.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kdq/errors.hpp"
#include "kdq/lp.hpp"

namespace kdq {

namespace {

constexpr double kConsistencyTol = 1e-8;
// Outer polygon approximation of the modulus disk used by the LP
// fallback; 96 sides keep the relative gap (1/cos(pi/96) - 1 = 5.4e-4)
// inside the 1e-3 optimality contract.
constexpr int kPolygonSides = 96;

using MatX = Eigen::MatrixXcd;
using VecX = Eigen::VectorXcd;

double inf_norm(const VecX& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

struct LinearSolve {
  VecX gamma0;      // minimum-norm least-squares solution
  MatX null_basis;  // orthonormal columns spanning null(T)
  double residual;  // infinity norm of T gamma0 - rhs
};

LinearSolve analyze(const MatX& t, const VecX& rhs) {
  LinearSolve out;
  Eigen::CompleteOrthogonalDecomposition<MatX> cod(t);
  out.gamma0 = cod.solve(rhs);
  out.residual = (t * out.gamma0 - rhs).cwiseAbs().maxCoeff();
  Eigen::JacobiSVD<MatX> svd(t, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double thresh = std::max(1e-12, sv.size() ? 1e-10 * sv(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > thresh) ++rank;
  out.null_basis = svd.matrixV().rightCols(t.cols() - rank);
  return out;
}

struct MinimaxResult {
  VecX gamma;
  double achieved = 0.0;
  double lower_bound = 0.0;
};

/// Lawson iteration (iteratively reweighted least squares) for the complex
/// Chebyshev problem min_z max_m |gamma0_m + (N z)_m|. The normalized
/// weighted 2-norm at each weighted minimizer is a true lower bound on the
/// optimum, which gives a certificate of convergence.
MinimaxResult lawson_minimax(const VecX& gamma0, const MatX& nb) {
  const Eigen::Index m = gamma0.size();
  const Eigen::Index k = nb.cols();
  Eigen::VectorXd w =
      Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  MinimaxResult result;
  result.gamma = gamma0;
  result.achieved = inf_norm(gamma0);
  result.lower_bound = 0.0;
  for (int iter = 0; iter < 5000; ++iter) {
    MatX h = nb.adjoint() * w.asDiagonal() * nb;
    h += (1e-15 * (h.trace().real() + 1e-300)) * MatX::Identity(k, k);
    VecX g = nb.adjoint() * (w.asDiagonal() * gamma0);
    VecX z = h.ldlt().solve(-g);
    VecX gamma = gamma0 + nb * z;
    Eigen::VectorXd mags = gamma.cwiseAbs();
    double gmax = mags.maxCoeff();
    double lb = std::sqrt(w.dot(mags.cwiseProduct(mags)));
    if (lb > result.lower_bound) result.lower_bound = lb;
    if (gmax < result.achieved) {
      result.achieved = gmax;
      result.gamma = gamma;
    }
    if (result.achieved - result.lower_bound <= 1e-12 * result.achieved) {
      break;
    }
    w = w.cwiseProduct(mags).cwiseMax(1e-300);
    w /= w.sum();
  }
  return result;
}

/// Bisection on the bound t with a phase-I LP deciding feasibility of the
/// polygon relaxation {z : Re(e^{-i theta_k} gamma_m(z)) <= t}. Returns a
/// certified lower bound on the true optimum and the best feasible point
/// encountered.
struct BisectResult {
  double lower_bound = 0.0;
  VecX best;
  double best_max = 0.0;
};

BisectResult lp_bisect(const VecX& gamma0, const MatX& nb, double hi_start) {
  const Eigen::Index m = gamma0.size();
  const Eigen::Index k = nb.cols();
  const Eigen::Index rows = m * kPolygonSides;
  const Eigen::Index n_free = 2 * k;           // Re/Im of each z component
  const Eigen::Index n_struct = 2 * n_free;    // split into x+ - x-

  Eigen::MatrixXd coef(rows, n_free);
  Eigen::VectorXd offset(rows);
  std::vector<cplx> phase(kPolygonSides);
  for (int s = 0; s < kPolygonSides; ++s) {
    double th = 2.0 * std::numbers::pi * s / kPolygonSides;
    phase[s] = std::exp(cplx(0.0, -th));
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (int s = 0; s < kPolygonSides; ++s) {
      Eigen::Index r = i * kPolygonSides + s;
      for (Eigen::Index l = 0; l < k; ++l) {
        cplx wl = phase[s] * nb(i, l);
        coef(r, 2 * l) = wl.real();
        coef(r, 2 * l + 1) = -wl.imag();
      }
      offset(r) = (phase[s] * gamma0(i)).real();
    }
  }
  Eigen::MatrixXd a(rows, n_struct);
  a << coef, -coef;

  BisectResult out;
  out.best = gamma0;
  out.best_max = inf_norm(gamma0);
  double lo = 0.0;
  double hi = hi_start;
  for (int iter = 0; iter < 60 && hi - lo > 1e-4 * std::max(hi, 1e-12);
       ++iter) {
    double mid = 0.5 * (lo + hi);
    Eigen::VectorXd b = Eigen::VectorXd::Constant(rows, mid) - offset;
    LpResult lp = lp_feasible_ineq(a, b);
    if (lp.feasible) {
      VecX z(k);
      for (Eigen::Index l = 0; l < k; ++l) {
        double re = lp.x[2 * l] - lp.x[n_free + 2 * l];
        double im = lp.x[2 * l + 1] - lp.x[n_free + 2 * l + 1];
        z(l) = cplx(re, im);
      }
      VecX gamma = gamma0 + nb * z;
      double gmax = inf_norm(gamma);
      if (gmax < out.best_max) {
        out.best_max = gmax;
        out.best = gamma;
      }
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.lower_bound = lo;
  return out;
}

VecX minimax_solve(const VecX& gamma0, const MatX& nb) {
  MinimaxResult lawson = lawson_minimax(gamma0, nb);
  if (lawson.achieved <= lawson.lower_bound * (1.0 + 5e-4) ||
      lawson.achieved <= 1e-12) {
    return lawson.gamma;
  }
  // Rare fallback: certify (and possibly improve) via LP bisection.
  BisectResult bis = lp_bisect(gamma0, nb, lawson.achieved);
  VecX best = lawson.gamma;
  double best_max = lawson.achieved;
  if (bis.best_max < best_max) {
    best = bis.best;
    best_max = bis.best_max;
  }
  double lower = std::max(lawson.lower_bound, bis.lower_bound);
  if (best_max > lower * (1.0 + 1e-3) && best_max > 1e-12) {
    throw NumericError(
        "minimax weight refinement failed to certify 1e-3 optimality");
  }
  return best;
}

}  // namespace

WeightSystem build_system(const MeasurementSet& set, const Observable& left,
                          const Observable& right) {
  const Eigen::Index d = set.dim;
  if (left.dim() != d || right.dim() != d) {
    throw std::invalid_argument("weight system: dimension mismatch");
  }
  if (!left.is_diagonal() || !right.is_diagonal()) {
    throw ConfigError(
        "weight systems require observables diagonal in the computational "
        "basis");
  }
  WeightSystem sys;
  sys.dim = d;
  sys.alpha = set.alpha;
  sys.set = set;
  sys.left = left;
  sys.right = right;
  const Eigen::Index n_kets = static_cast<Eigen::Index>(set.kets.size());
  sys.t = CMatrix(d * d, n_kets);
  for (Eigen::Index mcol = 0; mcol < n_kets; ++mcol) {
    const CVector& phi = set.kets[static_cast<std::size_t>(mcol)];
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        sys.t(i + j * d, mcol) = phi(i) * std::conj(phi(j));
      }
    }
  }
  CVector a = right.diagonal();
  CVector b = left.diagonal();
  sys.y = CVector(d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      sys.y(i + j * d) = a(i) * b(j);
    }
  }
  return sys;
}

WeightVector solve_weights(const WeightSystem& sys, WeightObjective objective) {
  const Eigen::Index d = sys.dim;
  const MatX t_full = sys.t;
  const VecX rhs_full = sys.alpha * sys.y;

  LinearSolve full = analyze(t_full, rhs_full);
  WeightScope scope = WeightScope::kOperator;
  LinearSolve chosen = full;
  if (full.residual > kConsistencyTol) {
    // Fall back to the diagonal (trace) subsystem.
    MatX t_diag(d, t_full.cols());
    VecX rhs_diag(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      t_diag.row(i) = t_full.row(i + i * d);
      rhs_diag(i) = rhs_full(i + i * d);
    }
    LinearSolve diag = analyze(t_diag, rhs_diag);
    if (diag.residual > kConsistencyTol) {
      throw InfeasibleError(
          "no weight vector exists for this observable pair on set '" +
              sys.set.name + "' (least-squares residual " +
              std::to_string(full.residual) + ")",
          full.residual);
    }
    scope = WeightScope::kTrace;
    chosen = diag;
  }

  VecX gamma = chosen.gamma0;
  if (objective == WeightObjective::kMinInfNorm &&
      chosen.null_basis.cols() > 0 && inf_norm(gamma) > 1e-12) {
    gamma = minimax_solve(chosen.gamma0, chosen.null_basis);
  }

  WeightVector out;
  out.gammas.assign(gamma.data(), gamma.data() + gamma.size());
  out.gamma_max = inf_norm(gamma);
  out.scope = scope;
  out.set_name = sys.set.name;
  out.left = sys.left;
  out.right = sys.right;
  return out;
}

double verify_weights(const MeasurementSet& set, const WeightVector& w) {
  const Eigen::Index d = set.dim;
  if (w.gammas.size() != set.kets.size()) {
    throw std::invalid_argument("verify_weights: weight count mismatch");
  }
  MeasurementOperators povm = build_povm(set);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (w.scope == WeightScope::kTrace && i != j) continue;
      CMatrix unit = CMatrix::Zero(d, d);
      unit(i, j) = 1.0;
      CMatrix lhs = w.left.mat * unit * w.right.mat;
      CMatrix rhs = CMatrix::Zero(d, d);
      for (std::size_t m = 0; m < povm.elements.size(); ++m) {
        rhs += w.gammas[m] * povm.elements[m] * unit *
               adjoint(povm.elements[m]);
      }
      worst = std::max(worst, max_abs_diff(lhs, rhs));
    }
  }
  return worst;
}

std::size_t hoeffding_n(double gamma_bound, double epsilon, double delta) {
  if (!(gamma_bound >= 0.0)) {
    throw std::invalid_argument("hoeffding_n: gamma bound must be >= 0");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("hoeffding_n: epsilon must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("hoeffding_n: delta must lie in (0, 1)");
  }
  double n = std::ceil(gamma_bound * gamma_bound * std::log(4.0 / delta) /
                       (2.0 * epsilon * epsilon));
  if (n > 1e18) {
    throw NumericError("hoeffding_n: required sample size exceeds 1e18");
  }
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

}  // namespace kdq
