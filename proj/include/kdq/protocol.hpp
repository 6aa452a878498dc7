#pragma once

#include <cstdint>
#include <vector>

#include "kdq/povm.hpp"
#include "kdq/qmodel.hpp"

namespace kdq {

/// One measurement step: unitary/CPTP evolution since the previous step,
/// followed by a generalized measurement. A projective step measures the
/// system directly in the computational basis (no ancilla coupling).
struct ProtocolStep {
  Channel evolution;
  MeasurementSet set;
  bool projective = false;
};

/// A multi-time measurement protocol on one system.
struct Protocol {
  DensityMatrix initial;
  std::vector<ProtocolStep> steps;

  Eigen::Index dim() const { return initial.dim(); }
};

/// Validates dimensions and projective-step conventions.
Protocol make_protocol(DensityMatrix initial, std::vector<ProtocolStep> steps);

/// Joint outcome distribution stored row-major over `shape`
/// (last step's index fastest).
struct TrajectoryDistribution {
  std::vector<Eigen::Index> shape;
  std::vector<double> p;

  std::size_t size() const { return p.size(); }
  std::size_t flat_index(const std::vector<std::uint32_t>& tuple) const;
  std::vector<std::uint32_t> tuple_of(std::size_t flat) const;
  double total() const;
};

/// One sampled trajectory: the outcome index chosen at each step.
using TrajectoryRecord = std::vector<std::uint32_t>;

/// Exact joint distribution by Kraus-operator enumeration (Eq.-style
/// sequential composition). Throws NumericError if the tuple count
/// exceeds 1e6.
TrajectoryDistribution exact_distribution(const Protocol& protocol);

/// Draws n trajectory records with sequential conditional sampling.
/// Deterministic for a fixed seed: records are produced in fixed-size
/// chunks with independent counter-based substreams, so the output is
/// identical regardless of how many worker threads execute the chunks.
std::vector<TrajectoryRecord> sample(const Protocol& protocol, std::size_t n,
                                     std::uint64_t seed);

/// Empirical distribution of records over the protocol's outcome shape.
TrajectoryDistribution empirical_distribution(
    const std::vector<Eigen::Index>& shape,
    const std::vector<TrajectoryRecord>& records);

/// Hardware-style noise model. Readout confusion matrices are per step,
/// d x d column-stochastic (c(observed, true)), applied within each
/// orthonormal basis of the step's measurement set; an empty (0 x 0)
/// matrix means ideal readout for that step.
struct NoiseModel {
  double entangling_depolarizing_p = 0.0;
  double dephasing_p = 0.0;
  std::vector<Eigen::MatrixXd> readout;

  bool has_readout() const;
};

/// Symmetric confusion matrix with the given diagonal fidelity.
Eigen::MatrixXd symmetric_confusion(Eigen::Index dim, double fidelity);

/// Exact joint distribution through the explicit ancilla circuit: tensor
/// in a fresh |0> ancilla, apply CSUM (or its MS-gate decomposition when
/// use_ms is set, d = 2 only), project the ancilla on each measurement
/// ket. Equals exact_distribution when `noise` is null; otherwise applies
/// two-qubit depolarizing noise after each entangling gate, optional
/// dephasing after each step, and readout confusion on the result.
TrajectoryDistribution explicit_circuit_distribution(
    const Protocol& protocol, bool use_ms = false,
    const NoiseModel* noise = nullptr);

/// Convolves per-step readout confusion into an exact distribution.
TrajectoryDistribution apply_readout_error(const Protocol& protocol,
                                           const TrajectoryDistribution& dist,
                                           const NoiseModel& noise);

/// Resamples recorded outcomes through the per-step confusion matrices.
std::vector<TrajectoryRecord> apply_readout_error(
    const Protocol& protocol, const std::vector<TrajectoryRecord>& records,
    const NoiseModel& noise, std::uint64_t seed);

struct CorrectedDistribution {
  TrajectoryDistribution dist;
  /// Total negative mass removed by clipping after inversion.
  double clipped_mass = 0.0;
};

/// Inverts the per-step confusion matrices on a distribution, clips
/// negative entries and renormalizes.
CorrectedDistribution correct_readout(const Protocol& protocol,
                                      const TrajectoryDistribution& dist,
                                      const NoiseModel& noise);

/// Trace over the second tensor factor of a (d1*d2) x (d1*d2) operator.
CMatrix partial_trace_second(const CMatrix& joint, Eigen::Index d_first,
                             Eigen::Index d_second);

}  // namespace kdq
