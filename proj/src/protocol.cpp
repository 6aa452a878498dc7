#include "kdq/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "kdq/errors.hpp"
#include "kdq/rng.hpp"

namespace kdq {

namespace {

constexpr std::size_t kMaxTuples = 1000000;
constexpr std::size_t kSampleChunk = 8192;

struct CompiledStep {
  Channel evolution;
  std::vector<CVector> diag;  // POVM element diagonals
  Eigen::Index n_out = 0;
};

std::vector<CompiledStep> compile_steps(const Protocol& protocol) {
  std::vector<CompiledStep> out;
  for (const ProtocolStep& step : protocol.steps) {
    CompiledStep cs{step.evolution, {}, 0};
    MeasurementOperators povm = build_povm(step.set);
    for (const CMatrix& m : povm.elements) {
      cs.diag.push_back(m.diagonal());
    }
    cs.n_out = static_cast<Eigen::Index>(cs.diag.size());
    out.push_back(std::move(cs));
  }
  return out;
}

std::vector<Eigen::Index> protocol_shape(const Protocol& protocol) {
  std::vector<Eigen::Index> shape;
  for (const ProtocolStep& step : protocol.steps) {
    shape.push_back(static_cast<Eigen::Index>(step.set.size()));
  }
  return shape;
}

std::size_t checked_size(const std::vector<Eigen::Index>& shape) {
  std::size_t total = 1;
  for (Eigen::Index extent : shape) {
    total *= static_cast<std::size_t>(extent);
    if (total > kMaxTuples) {
      throw NumericError("trajectory enumeration exceeds " +
                         std::to_string(kMaxTuples) + " outcome tuples");
    }
  }
  return total;
}

void enumerate_kraus(const std::vector<CompiledStep>& steps, std::size_t k,
                     const CMatrix& state, std::size_t base,
                     std::size_t stride, TrajectoryDistribution& out) {
  const CompiledStep& cs = steps[k];
  CMatrix evolved = apply_channel_mat(state, cs.evolution);
  const std::size_t next_stride = stride / static_cast<std::size_t>(cs.n_out);
  for (Eigen::Index m = 0; m < cs.n_out; ++m) {
    const CVector& c = cs.diag[static_cast<std::size_t>(m)];
    CMatrix post(evolved.rows(), evolved.cols());
    for (Eigen::Index i = 0; i < evolved.rows(); ++i) {
      for (Eigen::Index j = 0; j < evolved.cols(); ++j) {
        post(i, j) = c(i) * std::conj(c(j)) * evolved(i, j);
      }
    }
    std::size_t idx = base + static_cast<std::size_t>(m) * next_stride;
    if (k + 1 == steps.size()) {
      out.p[idx] = post.trace().real();
    } else {
      enumerate_kraus(steps, k + 1, post, idx, next_stride, out);
    }
  }
}

/// Expands a per-basis confusion matrix to the step's full outcome space
/// (block structure given by the orthonormal-basis partition).
Eigen::MatrixXd step_confusion(const ProtocolStep& step,
                               const Eigen::MatrixXd& c) {
  const Eigen::Index d = step.set.dim;
  const Eigen::Index n_out = static_cast<Eigen::Index>(step.set.size());
  if (c.rows() != d || c.cols() != d) {
    throw ConfigError("readout confusion matrix must be d x d");
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (c(i, j) < -1e-12) {
        throw ConfigError("readout confusion entries must be nonnegative");
      }
      col += c(i, j);
    }
    if (std::abs(col - 1.0) > 1e-9) {
      throw ConfigError("readout confusion columns must sum to 1");
    }
  }
  auto groups = sampling_decomposition(step.set);
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n_out, n_out);
  for (const auto& group : groups) {
    for (std::size_t truth = 0; truth < group.size(); ++truth) {
      for (std::size_t obs = 0; obs < group.size(); ++obs) {
        full(static_cast<Eigen::Index>(group[obs]),
             static_cast<Eigen::Index>(group[truth])) =
            c(static_cast<Eigen::Index>(obs), static_cast<Eigen::Index>(truth));
      }
    }
  }
  return full;
}

void validate_readout(const Protocol& protocol, const NoiseModel& noise) {
  if (!noise.readout.empty() &&
      noise.readout.size() != protocol.steps.size()) {
    throw ConfigError(
        "noise model must carry one readout matrix per protocol step "
        "(use an empty matrix for ideal steps)");
  }
}

/// In-place axis convolution: p'(..., m', ...) = sum_m K(m', m) p(..., m, ...).
void convolve_axis(TrajectoryDistribution& dist, std::size_t axis,
                   const Eigen::MatrixXd& kernel) {
  const Eigen::Index extent = dist.shape[axis];
  std::size_t stride = 1;
  for (std::size_t k = axis + 1; k < dist.shape.size(); ++k) {
    stride *= static_cast<std::size_t>(dist.shape[k]);
  }
  std::vector<double> next(dist.p.size(), 0.0);
  for (std::size_t f = 0; f < dist.p.size(); ++f) {
    if (dist.p[f] == 0.0) continue;
    Eigen::Index m = static_cast<Eigen::Index>((f / stride) %
                                               static_cast<std::size_t>(extent));
    std::size_t base = f - static_cast<std::size_t>(m) * stride;
    for (Eigen::Index mo = 0; mo < extent; ++mo) {
      double w = kernel(mo, m);
      if (w != 0.0) {
        next[base + static_cast<std::size_t>(mo) * stride] += w * dist.p[f];
      }
    }
  }
  dist.p = std::move(next);
}

}  // namespace

Protocol make_protocol(DensityMatrix initial, std::vector<ProtocolStep> steps) {
  if (steps.empty()) {
    throw std::invalid_argument("protocol requires at least one step");
  }
  const Eigen::Index d = initial.dim();
  for (ProtocolStep& step : steps) {
    if (step.evolution.dim() != d) {
      throw std::invalid_argument("protocol step evolution dimension mismatch");
    }
    if (step.projective) {
      // Projective steps measure the computational basis directly.
      step.set = computational_set(d);
    } else if (step.set.dim != d) {
      throw std::invalid_argument("protocol step set dimension mismatch");
    }
  }
  return Protocol{std::move(initial), std::move(steps)};
}

std::size_t TrajectoryDistribution::flat_index(
    const std::vector<std::uint32_t>& tuple) const {
  if (tuple.size() != shape.size()) {
    throw std::invalid_argument("outcome tuple has wrong length");
  }
  std::size_t idx = 0;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (tuple[k] >= static_cast<std::uint32_t>(shape[k])) {
      throw std::invalid_argument("outcome index out of range");
    }
    idx = idx * static_cast<std::size_t>(shape[k]) + tuple[k];
  }
  return idx;
}

std::vector<std::uint32_t> TrajectoryDistribution::tuple_of(
    std::size_t flat) const {
  std::vector<std::uint32_t> tuple(shape.size());
  for (std::size_t k = shape.size(); k-- > 0;) {
    std::size_t extent = static_cast<std::size_t>(shape[k]);
    tuple[k] = static_cast<std::uint32_t>(flat % extent);
    flat /= extent;
  }
  return tuple;
}

double TrajectoryDistribution::total() const {
  double sum = 0.0;
  for (double v : p) sum += v;
  return sum;
}

TrajectoryDistribution exact_distribution(const Protocol& protocol) {
  TrajectoryDistribution out;
  out.shape = protocol_shape(protocol);
  std::size_t total = checked_size(out.shape);
  out.p.assign(total, 0.0);
  std::vector<CompiledStep> steps = compile_steps(protocol);
  enumerate_kraus(steps, 0, protocol.initial.mat(), 0, total, out);
  return out;
}

std::vector<TrajectoryRecord> sample(const Protocol& protocol, std::size_t n,
                                     std::uint64_t seed) {
  std::vector<CompiledStep> steps = compile_steps(protocol);
  const Eigen::Index d = protocol.dim();
  std::vector<TrajectoryRecord> records(n);

  auto run_chunk = [&](std::size_t chunk) {
    SplitMix64 rng(substream_seed(seed, chunk));
    const std::size_t begin = chunk * kSampleChunk;
    const std::size_t end = std::min(n, begin + kSampleChunk);
    std::vector<double> probs;
    for (std::size_t r = begin; r < end; ++r) {
      CMatrix state = protocol.initial.mat();
      TrajectoryRecord& record = records[r];
      record.resize(steps.size());
      for (std::size_t k = 0; k < steps.size(); ++k) {
        const CompiledStep& cs = steps[k];
        state = apply_channel_mat(state, cs.evolution);
        probs.assign(static_cast<std::size_t>(cs.n_out), 0.0);
        double total = 0.0;
        for (Eigen::Index m = 0; m < cs.n_out; ++m) {
          const CVector& c = cs.diag[static_cast<std::size_t>(m)];
          double pm = 0.0;
          for (Eigen::Index i = 0; i < d; ++i) {
            pm += std::norm(c(i)) * state(i, i).real();
          }
          pm = std::max(pm, 0.0);
          probs[static_cast<std::size_t>(m)] = pm;
          total += pm;
        }
        if (total <= 0.0) {
          throw NumericError("sampling reached a zero-probability branch");
        }
        double u = rng.uniform() * total;
        double cum = 0.0;
        Eigen::Index chosen = cs.n_out - 1;
        for (Eigen::Index m = 0; m < cs.n_out; ++m) {
          cum += probs[static_cast<std::size_t>(m)];
          if (u < cum) {
            chosen = m;
            break;
          }
        }
        double pm = probs[static_cast<std::size_t>(chosen)];
        if (pm <= 0.0) {
          throw NumericError("sampling chose a zero-probability outcome");
        }
        const CVector& c = cs.diag[static_cast<std::size_t>(chosen)];
        CMatrix post(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
          for (Eigen::Index j = 0; j < d; ++j) {
            post(i, j) = c(i) * std::conj(c(j)) * state(i, j) / pm;
          }
        }
        state = std::move(post);
        record[k] = static_cast<std::uint32_t>(chosen);
      }
    }
  };

  const std::size_t n_chunks = n == 0 ? 0 : (n - 1) / kSampleChunk + 1;
  std::size_t n_workers =
      std::min(n_chunks,
               static_cast<std::size_t>(
                   std::max(1u, std::thread::hardware_concurrency())));
  if (n_workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t c = next.fetch_add(1); c < n_chunks;
             c = next.fetch_add(1)) {
          run_chunk(c);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  return records;
}

TrajectoryDistribution empirical_distribution(
    const std::vector<Eigen::Index>& shape,
    const std::vector<TrajectoryRecord>& records) {
  TrajectoryDistribution out;
  out.shape = shape;
  out.p.assign(checked_size(shape), 0.0);
  if (records.empty()) return out;
  double w = 1.0 / static_cast<double>(records.size());
  for (const TrajectoryRecord& r : records) {
    out.p[out.flat_index(r)] += w;
  }
  return out;
}

bool NoiseModel::has_readout() const {
  for (const Eigen::MatrixXd& c : readout) {
    if (c.size() != 0) return true;
  }
  return false;
}

Eigen::MatrixXd symmetric_confusion(Eigen::Index dim, double fidelity) {
  if (dim < 1) {
    throw std::invalid_argument("confusion dimension must be positive");
  }
  if (fidelity < 0.0 || fidelity > 1.0) {
    throw std::invalid_argument("readout fidelity must lie in [0, 1]");
  }
  double off = dim > 1 ? (1.0 - fidelity) / static_cast<double>(dim - 1) : 0.0;
  Eigen::MatrixXd c = Eigen::MatrixXd::Constant(dim, dim, off);
  for (Eigen::Index i = 0; i < dim; ++i) c(i, i) = dim > 1 ? fidelity : 1.0;
  return c;
}

namespace {

void enumerate_circuit(const Protocol& protocol, std::size_t k,
                       const CMatrix& sys_state, std::size_t base,
                       std::size_t stride, bool use_ms,
                       const NoiseModel* noise, TrajectoryDistribution& out) {
  const ProtocolStep& step = protocol.steps[k];
  const Eigen::Index d = protocol.dim();
  CMatrix evolved = apply_channel_mat(sys_state, step.evolution);
  const std::size_t n_out = step.set.size();
  const std::size_t next_stride = stride / n_out;

  auto emit = [&](std::size_t m, const CMatrix& post) {
    CMatrix branch = post;
    if (noise != nullptr && noise->dephasing_p > 0.0) {
      branch = apply_channel_mat(branch, dephasing_channel(noise->dephasing_p));
    }
    std::size_t idx = base + m * next_stride;
    if (k + 1 == protocol.steps.size()) {
      out.p[idx] = branch.trace().real();
    } else {
      enumerate_circuit(protocol, k + 1, branch, idx, next_stride, use_ms,
                        noise, out);
    }
  };

  if (step.projective) {
    // Direct computational-basis measurement: no ancilla, no gate noise.
    for (Eigen::Index i = 0; i < d; ++i) {
      CMatrix post = CMatrix::Zero(d, d);
      post(i, i) = evolved(i, i);
      emit(static_cast<std::size_t>(i), post);
    }
    return;
  }

  // Validate that the set decomposes into orthonormal bases (the physical
  // run picks one basis uniformly); the branch arithmetic below then only
  // needs the kets and alpha.
  sampling_decomposition(step.set);

  if (use_ms && d != 2) {
    throw ConfigError("the MS decomposition applies to qubit protocols only");
  }
  CVector anc0 = CVector::Zero(d);
  anc0(0) = 1.0;
  CMatrix joint = tensor(evolved, outer(anc0, anc0));
  CMatrix u = use_ms ? gate_list_unitary(cnot_from_ms())
                     : csum_gate(d).unitary_mat();
  joint = u * joint * adjoint(u);
  if (noise != nullptr && noise->entangling_depolarizing_p > 0.0) {
    if (d != 2) {
      throw ConfigError(
          "entangling-gate depolarizing noise applies to qubit protocols "
          "only");
    }
    joint = apply_channel_mat(
        joint, depolarizing_channel(noise->entangling_depolarizing_p, 2));
  }
  for (std::size_t m = 0; m < step.set.size(); ++m) {
    const CVector& phi = step.set.kets[m];
    CMatrix proj = tensor(identity(d), outer(phi, phi));
    CMatrix post =
        partial_trace_second(proj * joint * proj, d, d) / step.set.alpha;
    emit(m, post);
  }
}

}  // namespace

TrajectoryDistribution explicit_circuit_distribution(const Protocol& protocol,
                                                     bool use_ms,
                                                     const NoiseModel* noise) {
  if (noise != nullptr) validate_readout(protocol, *noise);
  TrajectoryDistribution out;
  out.shape = protocol_shape(protocol);
  std::size_t total = checked_size(out.shape);
  out.p.assign(total, 0.0);
  enumerate_circuit(protocol, 0, protocol.initial.mat(), 0, total, use_ms,
                    noise, out);
  if (noise != nullptr && noise->has_readout()) {
    out = apply_readout_error(protocol, out, *noise);
  }
  return out;
}

TrajectoryDistribution apply_readout_error(const Protocol& protocol,
                                           const TrajectoryDistribution& dist,
                                           const NoiseModel& noise) {
  validate_readout(protocol, noise);
  TrajectoryDistribution out = dist;
  if (noise.readout.empty()) return out;
  for (std::size_t k = 0; k < protocol.steps.size(); ++k) {
    const Eigen::MatrixXd& c = noise.readout[k];
    if (c.size() == 0) continue;
    convolve_axis(out, k, step_confusion(protocol.steps[k], c));
  }
  return out;
}

std::vector<TrajectoryRecord> apply_readout_error(
    const Protocol& protocol, const std::vector<TrajectoryRecord>& records,
    const NoiseModel& noise, std::uint64_t seed) {
  validate_readout(protocol, noise);
  std::vector<TrajectoryRecord> out = records;
  if (noise.readout.empty()) return out;
  std::vector<Eigen::MatrixXd> kernels(protocol.steps.size());
  for (std::size_t k = 0; k < protocol.steps.size(); ++k) {
    if (noise.readout[k].size() != 0) {
      kernels[k] = step_confusion(protocol.steps[k], noise.readout[k]);
    }
  }
  const std::size_t n_chunks =
      out.empty() ? 0 : (out.size() - 1) / kSampleChunk + 1;
  for (std::size_t chunk = 0; chunk < n_chunks; ++chunk) {
    SplitMix64 rng(substream_seed(seed, chunk));
    const std::size_t begin = chunk * kSampleChunk;
    const std::size_t end = std::min(out.size(), begin + kSampleChunk);
    for (std::size_t r = begin; r < end; ++r) {
      for (std::size_t k = 0; k < out[r].size(); ++k) {
        if (kernels[k].size() == 0) continue;
        const Eigen::MatrixXd& ker = kernels[k];
        double u = rng.uniform();
        double cum = 0.0;
        Eigen::Index chosen = ker.rows() - 1;
        for (Eigen::Index mo = 0; mo < ker.rows(); ++mo) {
          cum += ker(mo, static_cast<Eigen::Index>(out[r][k]));
          if (u < cum) {
            chosen = mo;
            break;
          }
        }
        out[r][k] = static_cast<std::uint32_t>(chosen);
      }
    }
  }
  return out;
}

CorrectedDistribution correct_readout(const Protocol& protocol,
                                      const TrajectoryDistribution& dist,
                                      const NoiseModel& noise) {
  validate_readout(protocol, noise);
  CorrectedDistribution out;
  out.dist = dist;
  if (!noise.readout.empty()) {
    for (std::size_t k = 0; k < protocol.steps.size(); ++k) {
      const Eigen::MatrixXd& c = noise.readout[k];
      if (c.size() == 0) continue;
      Eigen::MatrixXd full = step_confusion(protocol.steps[k], c);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(full);
      if (!lu.isInvertible()) {
        throw NumericError("readout confusion matrix is not invertible");
      }
      convolve_axis(out.dist, k, lu.inverse());
    }
  }
  double clipped = 0.0;
  double kept = 0.0;
  for (double& v : out.dist.p) {
    if (v < 0.0) {
      clipped -= v;
      v = 0.0;
    } else {
      kept += v;
    }
  }
  if (kept <= 0.0) {
    throw NumericError("readout correction produced an empty distribution");
  }
  for (double& v : out.dist.p) v /= kept;
  out.clipped_mass = clipped;
  return out;
}

CMatrix partial_trace_second(const CMatrix& joint, Eigen::Index d_first,
                             Eigen::Index d_second) {
  if (joint.rows() != d_first * d_second || joint.cols() != joint.rows()) {
    throw std::invalid_argument("partial_trace_second: shape mismatch");
  }
  CMatrix out = CMatrix::Zero(d_first, d_first);
  for (Eigen::Index i = 0; i < d_first; ++i) {
    for (Eigen::Index j = 0; j < d_first; ++j) {
      for (Eigen::Index a = 0; a < d_second; ++a) {
        out(i, j) += joint(i * d_second + a, j * d_second + a);
      }
    }
  }
  return out;
}

}  // namespace kdq
