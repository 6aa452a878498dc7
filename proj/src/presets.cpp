#include "kdq/presets.hpp"

#include <numbers>
#include <stdexcept>

namespace kdq::presets {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kEntanglingFidelity = 0.94;
constexpr double kAncillaReadoutFidelity = 0.989;
constexpr double kDirectReadoutFidelity = 0.984;
}  // namespace

Channel first_evolution(double theta) { return rotation_gate(theta, 0.0); }

Channel second_evolution(double theta) {
  return rotation_gate(theta * theta, kPi / 2.0);
}

std::vector<Channel> evolutions(double theta, int n_times) {
  if (n_times < 1 || n_times > 3) {
    throw std::invalid_argument("demonstration protocols use 1 to 3 times");
  }
  std::vector<Channel> out;
  out.push_back(Channel::identity(2));
  if (n_times >= 2) out.push_back(first_evolution(theta));
  if (n_times >= 3) out.push_back(second_evolution(theta));
  return out;
}

Protocol two_time(double theta, std::string_view set_name) {
  MeasurementSet set = builtin_set(set_name);
  std::vector<ProtocolStep> steps;
  steps.push_back({Channel::identity(2), set, false});
  steps.push_back({first_evolution(theta), MeasurementSet{}, true});
  return make_protocol(DensityMatrix::plus_state(), std::move(steps));
}

Protocol three_time(double theta, std::string_view set_name) {
  MeasurementSet set = builtin_set(set_name);
  std::vector<ProtocolStep> steps;
  steps.push_back({Channel::identity(2), set, false});
  steps.push_back({first_evolution(theta), set, false});
  steps.push_back({second_evolution(theta), MeasurementSet{}, true});
  return make_protocol(DensityMatrix::plus_state(), std::move(steps));
}

Protocol projective_baseline(double theta, int n_times) {
  std::vector<Channel> evs = evolutions(theta, n_times);
  std::vector<ProtocolStep> steps;
  for (int k = 0; k < n_times; ++k) {
    steps.push_back({evs[static_cast<std::size_t>(k)], MeasurementSet{}, true});
  }
  return make_protocol(DensityMatrix::plus_state(), std::move(steps));
}

std::vector<Observable> zz_observables(Eigen::Index n_times) {
  std::vector<Observable> out;
  for (Eigen::Index k = 0; k < n_times; ++k) {
    out.push_back(named_observable("Z"));
  }
  return out;
}

std::vector<std::vector<CMatrix>> z_projectors(Eigen::Index dim, int n_times) {
  std::vector<CMatrix> per_time;
  for (Eigen::Index i = 0; i < dim; ++i) {
    CMatrix p = CMatrix::Zero(dim, dim);
    p(i, i) = 1.0;
    per_time.push_back(p);
  }
  return std::vector<std::vector<CMatrix>>(static_cast<std::size_t>(n_times),
                                           per_time);
}

std::vector<WeightVector> correlation_weights(const Protocol& protocol) {
  Observable ident = named_observable("I", protocol.dim());
  Observable z = named_observable("Z", protocol.dim());
  std::vector<WeightVector> out;
  for (const ProtocolStep& step : protocol.steps) {
    out.push_back(solve_weights(build_system(step.set, ident, z),
                                WeightObjective::kMinInfNorm));
  }
  return out;
}

std::vector<std::vector<WeightVector>> qpd_weights(const Protocol& protocol) {
  const Eigen::Index d = protocol.dim();
  Observable ident = named_observable("I", d);
  std::vector<std::vector<WeightVector>> out;
  for (const ProtocolStep& step : protocol.steps) {
    std::vector<WeightVector> per_outcome;
    for (Eigen::Index i = 0; i < d; ++i) {
      Observable proj = named_observable("P" + std::to_string(i), d);
      per_outcome.push_back(solve_weights(build_system(step.set, ident, proj),
                                          WeightObjective::kMinInfNorm));
    }
    out.push_back(std::move(per_outcome));
  }
  return out;
}

NoiseModel demo_noise(const Protocol& protocol) {
  NoiseModel noise;
  noise.entangling_depolarizing_p =
      depolarizing_from_fidelity(kEntanglingFidelity);
  for (const ProtocolStep& step : protocol.steps) {
    noise.readout.push_back(symmetric_confusion(
        protocol.dim(),
        step.projective ? kDirectReadoutFidelity : kAncillaReadoutFidelity));
  }
  return noise;
}

}  // namespace kdq::presets
