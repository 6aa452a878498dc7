#pragma once

#include <string_view>
#include <vector>

#include "kdq/protocol.hpp"
#include "kdq/weights.hpp"

namespace kdq::presets {

/// Bundled demonstration scenario: a qubit prepared in |+>, evolved by
/// R(theta, 0) between the first two measurement times and by
/// R(theta^2, +pi/2) between the second and third. The +pi/2 axis sense
/// is chosen to reproduce the reference temporal-inequality curve
/// K(theta) = -sin(theta^2) - cos(theta) cos(theta^2).
Channel first_evolution(double theta);
Channel second_evolution(double theta);

/// Evolution chain for an n_times-point protocol (first entry identity).
std::vector<Channel> evolutions(double theta, int n_times);

/// Two-time protocol: measure, evolve by R(theta, 0), measure
/// projectively. `set_name` picks the first step's measurement family.
Protocol two_time(double theta, std::string_view set_name = "zy");

/// Three-time protocol: measure, evolve R(theta, 0), measure, evolve
/// R(theta^2, +pi/2), measure projectively.
Protocol three_time(double theta, std::string_view set_name = "zyx");

/// Fully projective variant (every step measures the computational basis
/// directly) used as the back-action baseline.
Protocol projective_baseline(double theta, int n_times);

/// Z observable at every time.
std::vector<Observable> zz_observables(Eigen::Index n_times);

/// Computational-basis projector lists for QPD oracles.
std::vector<std::vector<CMatrix>> z_projectors(Eigen::Index dim, int n_times);

/// Minimal-infinity-norm weights realizing (I, Z) at every step.
std::vector<WeightVector> correlation_weights(const Protocol& protocol);

/// Per-step, per-outcome weights realizing (I, P_i) for table estimation.
std::vector<std::vector<WeightVector>> qpd_weights(const Protocol& protocol);

/// Hardware-calibrated noise model for a given protocol: two-qubit
/// depolarizing strength from a 94% entangling-gate fidelity
/// (p = 4(1-F)/3 = 0.08), 98.9% ancilla readout fidelity on measurement
/// steps, 98.4% direct readout fidelity on projective steps.
NoiseModel demo_noise(const Protocol& protocol);

}  // namespace kdq::presets
