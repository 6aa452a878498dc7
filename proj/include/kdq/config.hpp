#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kdq/protocol.hpp"
#include "kdq/serialize.hpp"
#include "kdq/weights.hpp"

namespace kdq {

enum class EstimatorKind { kCorrelation, kQpd };

/// Parsed run description. The JSON schema is strict: unknown keys are
/// rejected so a typo cannot silently change the physics.
struct RunConfig {
  Protocol protocol;
  EstimatorKind estimator = EstimatorKind::kCorrelation;
  /// One observable name per step ("I", "Z", "X", "Y", "Pk"). For the
  /// table estimator an empty list means computational-basis projectors.
  std::vector<std::string> observable_names;
  std::size_t n_trajectories = 10000;
  std::optional<std::uint64_t> seed;
  WeightObjective objective = WeightObjective::kMinInfNorm;
  std::optional<NoiseModel> noise;
  std::optional<std::string> out_dir;
};

RunConfig parse_config(const json& doc);
RunConfig load_config(const std::string& path);

/// Serializes a RunConfig so that re-parsing yields an equivalent run
/// (channels and kets are written out explicitly).
json config_json(const RunConfig& config);

/// Noise document: `entangling_fidelity` (or `entangling_depolarizing_p`),
/// optional `dephasing_p`, optional `readout` with either
/// {ancilla_fidelity, final_fidelity} or a `per_step_fidelity` list.
NoiseModel parse_noise(const json& doc, const Protocol& protocol);
NoiseModel load_noise(const std::string& path, const Protocol& protocol);

/// Inclusive grid {start, stop, count}.
std::vector<double> parse_grid(const json& doc);

struct SweepConfig {
  bool three_time = false;
  std::vector<double> grid;
  std::size_t n_trajectories = 10000;
  std::optional<std::uint64_t> seed;
};

SweepConfig parse_sweep_config(const json& doc);
SweepConfig load_sweep_config(const std::string& path);

/// Per-step estimator weights for a parsed run: (I, A_k) at every step,
/// minimal-infinity-norm or any consistent solution per `objective`.
std::vector<WeightVector> correlation_weights_for(const RunConfig& config);

/// Per-step, per-outcome weights (I, P_i) for the table estimator.
std::vector<std::vector<WeightVector>> qpd_weights_for(const RunConfig& config);

/// Exact per-time eigenvalue lists / projector lists for the oracle side.
std::vector<Observable> observables_for(const RunConfig& config);
std::vector<std::vector<CMatrix>> projectors_for(const RunConfig& config);

}  // namespace kdq
