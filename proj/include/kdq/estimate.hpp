#pragma once

#include <cstdint>
#include <vector>

#include "kdq/protocol.hpp"
#include "kdq/weights.hpp"

namespace kdq {

/// Complex Monte Carlo estimate with per-component standard errors.
struct ComplexEstimate {
  cplx value{0.0, 0.0};
  double sem_re = 0.0;
  double sem_im = 0.0;
  std::size_t n = 0;
};

/// Multi-time quasiprobability table over outcome tuples (row-major,
/// last time fastest). Sampled tables carry per-entry standard errors;
/// exact tables leave them empty and n = 0.
struct QpdTable {
  std::vector<Eigen::Index> shape;
  std::vector<cplx> q;
  std::vector<double> sem_re;
  std::vector<double> sem_im;
  std::size_t n = 0;

  std::size_t size() const { return q.size(); }
  std::size_t flat_index(const std::vector<std::uint32_t>& tuple) const;
  std::vector<std::uint32_t> tuple_of(std::size_t flat) const;
  cplx sum() const;
};

/// Heisenberg-picture oracle for the multi-time correlation
/// Tr[rho A1(t1) A2(t2) ... AN(tN)], where A_k(t_k) = V_k^dag A_k V_k and
/// V_k chains the unitary evolutions up to time k. evolutions[k] is the
/// unitary between t_{k-1} and t_k (size N, first may be identity).
cplx exact_correlation(const DensityMatrix& rho,
                       const std::vector<Observable>& observables,
                       const std::vector<Channel>& evolutions);

/// Heisenberg-picture oracle for the quasiprobability table
/// Q(i1..iN) = Tr[rho P_{i1}(t1) ... P_{iN}(tN)] for per-time projector
/// lists (each list resolves the identity).
QpdTable exact_qpd(const DensityMatrix& rho,
                   const std::vector<std::vector<CMatrix>>& projectors,
                   const std::vector<Channel>& evolutions);

/// Contracts a table against per-time outcome values:
/// sum_tuple (prod_k values[k][i_k]) Q(tuple).
cplx correlation_from_qpd(const QpdTable& table,
                          const std::vector<std::vector<double>>& values);

/// Weighted ensemble average of per-record weight products (one weight
/// vector per step; trace-scope weights allowed at the final step only).
ComplexEstimate estimate_correlation(const Protocol& protocol,
                                     const std::vector<WeightVector>& weights,
                                     const std::vector<TrajectoryRecord>& records);

/// Same contraction taken in expectation over an exact distribution.
cplx correlation_from_distribution(const Protocol& protocol,
                                   const std::vector<WeightVector>& weights,
                                   const TrajectoryDistribution& dist);

/// Estimates the full table from one ensemble in a single pass:
/// weights[k][i] realizes the pair (I, P_i) at step k.
QpdTable estimate_qpd(const Protocol& protocol,
                      const std::vector<std::vector<WeightVector>>& weights,
                      const std::vector<TrajectoryRecord>& records);

/// Exact-expectation version of estimate_qpd (noise studies, oracles).
QpdTable qpd_from_distribution(const Protocol& protocol,
                               const std::vector<std::vector<WeightVector>>& weights,
                               const TrajectoryDistribution& dist);

struct QpdMarginal {
  std::vector<double> probabilities;
  double max_abs_imag = 0.0;
};

/// Single-time marginal of a table: real parts of the summed entries
/// (a valid probability vector for consistent tables) plus the largest
/// imaginary residue.
QpdMarginal marginal(const QpdTable& table, std::size_t keep_time);

/// Temporal-correlation combination K = <E1 E2> + <E2 E3> - <E1 E3> from a
/// three-time two-outcome table with E1 = (-1)^{i1}, E2 = +1,
/// E3 = (-1)^{i3}; classical (macrorealist) models obey K <= 1.
double lgi_k(const QpdTable& table);

struct LgiEstimate {
  double k = 0.0;
  double sem = 0.0;
  std::size_t n = 0;
};

/// Monte Carlo K with its standard error from per-record terms.
LgiEstimate lgi_from_records(const Protocol& protocol,
                             const std::vector<std::vector<WeightVector>>& weights,
                             const std::vector<TrajectoryRecord>& records);

enum class SweepFamily { kTwoTime, kThreeTime };

struct SweepRow {
  double theta = 0.0;
  cplx exact{0.0, 0.0};
  cplx estimate{0.0, 0.0};
  double sem_re = 0.0;
  double sem_im = 0.0;
};

/// Correlation sweep over a theta grid for the bundled demonstration
/// dynamics: exact oracle plus a seeded Monte Carlo estimate per point.
std::vector<SweepRow> sweep(SweepFamily family, const std::vector<double>& grid,
                            std::size_t n, std::uint64_t seed);

}  // namespace kdq
