#include "kdq/estimate.hpp"

#include <cmath>
#include <stdexcept>

#include "kdq/errors.hpp"
#include "kdq/presets.hpp"
#include "kdq/rng.hpp"

namespace kdq {

namespace {

std::size_t shape_size(const std::vector<Eigen::Index>& shape) {
  std::size_t total = 1;
  for (Eigen::Index e : shape) total *= static_cast<std::size_t>(e);
  return total;
}

double sem_of(double sum, double sum_sq, std::size_t n) {
  if (n < 2) return 0.0;
  double mean = sum / static_cast<double>(n);
  double var = (sum_sq - static_cast<double>(n) * mean * mean) /
               static_cast<double>(n - 1);
  if (var < 0.0) var = 0.0;
  return std::sqrt(var / static_cast<double>(n));
}

/// Heisenberg transforms V_k^dag X V_k with V_k = U_k ... U_1.
std::vector<CMatrix> heisenberg_chain(const std::vector<Channel>& evolutions,
                                      Eigen::Index dim) {
  std::vector<CMatrix> v;
  CMatrix acc = identity(dim);
  for (const Channel& u : evolutions) {
    if (!u.is_unitary_kind()) {
      throw std::invalid_argument("oracle evolutions must be unitary");
    }
    if (u.dim() != dim) {
      throw std::invalid_argument("oracle evolution dimension mismatch");
    }
    acc = u.unitary_mat() * acc;
    v.push_back(acc);
  }
  return v;
}

void validate_step_weights(const Protocol& protocol, const WeightVector& w,
                           std::size_t step_index) {
  const ProtocolStep& step = protocol.steps[step_index];
  if (w.gammas.size() != step.set.size()) {
    throw std::invalid_argument(
        "weight vector length does not match the step's outcome count");
  }
  if (w.scope == WeightScope::kTrace &&
      step_index + 1 != protocol.steps.size()) {
    throw ConfigError(
        "trace-scope weights are valid only at the final protocol step");
  }
}

/// Per-record product table: g[k][i] = gamma of weights[k][i] at the
/// record's step-k outcome, expanded as an outer product over tuples.
void tuple_products(const std::vector<std::vector<WeightVector>>& weights,
                    const TrajectoryRecord& record,
                    const std::vector<Eigen::Index>& shape,
                    std::vector<cplx>& out) {
  out.assign(shape_size(shape), cplx(1.0, 0.0));
  std::size_t stride = out.size();
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const std::size_t extent = static_cast<std::size_t>(shape[k]);
    stride /= extent;
    if (record[k] >= weights[k][0].gammas.size()) {
      throw std::invalid_argument("outcome index exceeds the step's set size");
    }
    for (std::size_t f = 0; f < out.size(); ++f) {
      std::size_t i = (f / stride) % extent;
      out[f] *= weights[k][i].gammas[record[k]];
    }
  }
}

}  // namespace

std::size_t QpdTable::flat_index(const std::vector<std::uint32_t>& tuple) const {
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

std::vector<std::uint32_t> QpdTable::tuple_of(std::size_t flat) const {
  std::vector<std::uint32_t> tuple(shape.size());
  for (std::size_t k = shape.size(); k-- > 0;) {
    std::size_t extent = static_cast<std::size_t>(shape[k]);
    tuple[k] = static_cast<std::uint32_t>(flat % extent);
    flat /= extent;
  }
  return tuple;
}

cplx QpdTable::sum() const {
  cplx total(0.0, 0.0);
  for (const cplx& v : q) total += v;
  return total;
}

cplx exact_correlation(const DensityMatrix& rho,
                       const std::vector<Observable>& observables,
                       const std::vector<Channel>& evolutions) {
  if (observables.empty() || observables.size() != evolutions.size()) {
    throw std::invalid_argument(
        "need one evolution per observable (identity for the first)");
  }
  const Eigen::Index d = rho.dim();
  std::vector<CMatrix> v = heisenberg_chain(evolutions, d);
  CMatrix product = identity(d);
  for (std::size_t k = 0; k < observables.size(); ++k) {
    if (observables[k].dim() != d) {
      throw std::invalid_argument("observable dimension mismatch");
    }
    product = product * (adjoint(v[k]) * observables[k].mat * v[k]);
  }
  return trace(rho.mat() * product);
}

QpdTable exact_qpd(const DensityMatrix& rho,
                   const std::vector<std::vector<CMatrix>>& projectors,
                   const std::vector<Channel>& evolutions) {
  if (projectors.empty() || projectors.size() != evolutions.size()) {
    throw std::invalid_argument(
        "need one evolution per projector list (identity for the first)");
  }
  const Eigen::Index d = rho.dim();
  std::vector<CMatrix> v = heisenberg_chain(evolutions, d);

  QpdTable table;
  std::vector<std::vector<CMatrix>> h(projectors.size());
  for (std::size_t k = 0; k < projectors.size(); ++k) {
    CMatrix sum = CMatrix::Zero(d, d);
    for (const CMatrix& p : projectors[k]) {
      if (!is_hermitian(p, 1e-8) || max_abs_diff(p * p, p) > 1e-8) {
        throw std::invalid_argument("QPD projectors must be idempotent");
      }
      sum += p;
      h[k].push_back(adjoint(v[k]) * p * v[k]);
    }
    if (max_abs_diff(sum, identity(d)) > 1e-8) {
      throw std::invalid_argument("QPD projectors must resolve the identity");
    }
    table.shape.push_back(static_cast<Eigen::Index>(projectors[k].size()));
  }
  table.q.assign(shape_size(table.shape), cplx(0.0, 0.0));
  for (std::size_t f = 0; f < table.q.size(); ++f) {
    std::vector<std::uint32_t> tuple = table.tuple_of(f);
    CMatrix product = rho.mat();
    for (std::size_t k = 0; k < h.size(); ++k) {
      product = product * h[k][tuple[k]];
    }
    table.q[f] = product.trace();
  }
  return table;
}

cplx correlation_from_qpd(const QpdTable& table,
                          const std::vector<std::vector<double>>& values) {
  if (values.size() != table.shape.size()) {
    throw std::invalid_argument("need one value list per time");
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k].size() != static_cast<std::size_t>(table.shape[k])) {
      throw std::invalid_argument("value list length mismatch");
    }
  }
  cplx total(0.0, 0.0);
  for (std::size_t f = 0; f < table.q.size(); ++f) {
    std::vector<std::uint32_t> tuple = table.tuple_of(f);
    double prod = 1.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
      prod *= values[k][tuple[k]];
    }
    total += prod * table.q[f];
  }
  return total;
}

ComplexEstimate estimate_correlation(
    const Protocol& protocol, const std::vector<WeightVector>& weights,
    const std::vector<TrajectoryRecord>& records) {
  if (weights.size() != protocol.steps.size()) {
    throw std::invalid_argument("need one weight vector per protocol step");
  }
  for (std::size_t k = 0; k < weights.size(); ++k) {
    validate_step_weights(protocol, weights[k], k);
  }
  if (records.empty()) {
    throw std::invalid_argument("estimate requires at least one record");
  }
  double sum_re = 0.0, sum_im = 0.0, sq_re = 0.0, sq_im = 0.0;
  for (const TrajectoryRecord& r : records) {
    if (r.size() != weights.size()) {
      throw std::invalid_argument("record length does not match protocol");
    }
    cplx term(1.0, 0.0);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (r[k] >= weights[k].gammas.size()) {
        throw std::invalid_argument(
            "outcome index exceeds the step's set size");
      }
      term *= weights[k].gammas[r[k]];
    }
    sum_re += term.real();
    sum_im += term.imag();
    sq_re += term.real() * term.real();
    sq_im += term.imag() * term.imag();
  }
  ComplexEstimate est;
  est.n = records.size();
  double n = static_cast<double>(est.n);
  est.value = cplx(sum_re / n, sum_im / n);
  est.sem_re = sem_of(sum_re, sq_re, est.n);
  est.sem_im = sem_of(sum_im, sq_im, est.n);
  return est;
}

cplx correlation_from_distribution(const Protocol& protocol,
                                   const std::vector<WeightVector>& weights,
                                   const TrajectoryDistribution& dist) {
  if (weights.size() != protocol.steps.size()) {
    throw std::invalid_argument("need one weight vector per protocol step");
  }
  for (std::size_t k = 0; k < weights.size(); ++k) {
    validate_step_weights(protocol, weights[k], k);
  }
  cplx total(0.0, 0.0);
  for (std::size_t f = 0; f < dist.p.size(); ++f) {
    if (dist.p[f] == 0.0) continue;
    std::vector<std::uint32_t> tuple = dist.tuple_of(f);
    cplx term(1.0, 0.0);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      term *= weights[k].gammas[tuple[k]];
    }
    total += dist.p[f] * term;
  }
  return total;
}

namespace {

std::vector<Eigen::Index> qpd_shape(
    const Protocol& protocol,
    const std::vector<std::vector<WeightVector>>& weights) {
  if (weights.size() != protocol.steps.size()) {
    throw std::invalid_argument("need one weight family per protocol step");
  }
  std::vector<Eigen::Index> shape;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k].empty()) {
      throw std::invalid_argument("empty weight family");
    }
    for (const WeightVector& w : weights[k]) {
      validate_step_weights(protocol, w, k);
    }
    shape.push_back(static_cast<Eigen::Index>(weights[k].size()));
  }
  return shape;
}

}  // namespace

QpdTable estimate_qpd(const Protocol& protocol,
                      const std::vector<std::vector<WeightVector>>& weights,
                      const std::vector<TrajectoryRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("estimate requires at least one record");
  }
  QpdTable table;
  table.shape = qpd_shape(protocol, weights);
  std::size_t total = shape_size(table.shape);
  std::vector<double> sum_re(total, 0.0), sum_im(total, 0.0);
  std::vector<double> sq_re(total, 0.0), sq_im(total, 0.0);
  std::vector<cplx> prods;
  for (const TrajectoryRecord& r : records) {
    if (r.size() != weights.size()) {
      throw std::invalid_argument("record length does not match protocol");
    }
    tuple_products(weights, r, table.shape, prods);
    for (std::size_t f = 0; f < total; ++f) {
      double re = prods[f].real();
      double im = prods[f].imag();
      sum_re[f] += re;
      sum_im[f] += im;
      sq_re[f] += re * re;
      sq_im[f] += im * im;
    }
  }
  table.n = records.size();
  double n = static_cast<double>(table.n);
  table.q.resize(total);
  table.sem_re.resize(total);
  table.sem_im.resize(total);
  for (std::size_t f = 0; f < total; ++f) {
    table.q[f] = cplx(sum_re[f] / n, sum_im[f] / n);
    table.sem_re[f] = sem_of(sum_re[f], sq_re[f], table.n);
    table.sem_im[f] = sem_of(sum_im[f], sq_im[f], table.n);
  }
  return table;
}

QpdTable qpd_from_distribution(
    const Protocol& protocol,
    const std::vector<std::vector<WeightVector>>& weights,
    const TrajectoryDistribution& dist) {
  QpdTable table;
  table.shape = qpd_shape(protocol, weights);
  std::size_t total = shape_size(table.shape);
  table.q.assign(total, cplx(0.0, 0.0));
  std::vector<cplx> prods;
  for (std::size_t f = 0; f < dist.p.size(); ++f) {
    if (dist.p[f] == 0.0) continue;
    TrajectoryRecord tuple = dist.tuple_of(f);
    tuple_products(weights, tuple, table.shape, prods);
    for (std::size_t g = 0; g < total; ++g) {
      table.q[g] += dist.p[f] * prods[g];
    }
  }
  return table;
}

QpdMarginal marginal(const QpdTable& table, std::size_t keep_time) {
  if (keep_time >= table.shape.size()) {
    throw std::invalid_argument("marginal time index out of range");
  }
  QpdMarginal out;
  out.probabilities.assign(static_cast<std::size_t>(table.shape[keep_time]),
                           0.0);
  std::vector<cplx> sums(out.probabilities.size(), cplx(0.0, 0.0));
  for (std::size_t f = 0; f < table.q.size(); ++f) {
    sums[table.tuple_of(f)[keep_time]] += table.q[f];
  }
  for (std::size_t i = 0; i < sums.size(); ++i) {
    out.probabilities[i] = sums[i].real();
    out.max_abs_imag = std::max(out.max_abs_imag, std::abs(sums[i].imag()));
  }
  return out;
}

double lgi_k(const QpdTable& table) {
  if (table.shape != std::vector<Eigen::Index>{2, 2, 2}) {
    throw std::invalid_argument(
        "the temporal inequality needs a three-time two-outcome table");
  }
  double k = 0.0;
  for (std::size_t f = 0; f < table.q.size(); ++f) {
    std::vector<std::uint32_t> t = table.tuple_of(f);
    double e1 = t[0] == 0 ? 1.0 : -1.0;
    double e3 = t[2] == 0 ? 1.0 : -1.0;
    k += table.q[f].real() * (e1 + e3 - e1 * e3);
  }
  return k;
}

LgiEstimate lgi_from_records(
    const Protocol& protocol,
    const std::vector<std::vector<WeightVector>>& weights,
    const std::vector<TrajectoryRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("estimate requires at least one record");
  }
  std::vector<Eigen::Index> shape = qpd_shape(protocol, weights);
  if (shape != std::vector<Eigen::Index>{2, 2, 2}) {
    throw std::invalid_argument(
        "the temporal inequality needs a three-time two-outcome table");
  }
  std::vector<double> signs(8);
  QpdTable probe;
  probe.shape = shape;
  for (std::size_t f = 0; f < 8; ++f) {
    std::vector<std::uint32_t> t = probe.tuple_of(f);
    double e1 = t[0] == 0 ? 1.0 : -1.0;
    double e3 = t[2] == 0 ? 1.0 : -1.0;
    signs[f] = e1 + e3 - e1 * e3;
  }
  double sum = 0.0, sq = 0.0;
  std::vector<cplx> prods;
  for (const TrajectoryRecord& r : records) {
    tuple_products(weights, r, shape, prods);
    double term = 0.0;
    for (std::size_t f = 0; f < 8; ++f) {
      term += signs[f] * prods[f].real();
    }
    sum += term;
    sq += term * term;
  }
  LgiEstimate est;
  est.n = records.size();
  est.k = sum / static_cast<double>(est.n);
  est.sem = sem_of(sum, sq, est.n);
  return est;
}

std::vector<SweepRow> sweep(SweepFamily family, const std::vector<double>& grid,
                            std::size_t n, std::uint64_t seed) {
  if (n == 0) {
    throw std::invalid_argument("sweep requires n >= 1 trajectories per point");
  }
  const int n_times = family == SweepFamily::kTwoTime ? 2 : 3;
  std::vector<SweepRow> rows;
  std::vector<WeightVector> weights;  // set-dependent only; solve once
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double theta = grid[i];
    Protocol protocol = family == SweepFamily::kTwoTime
                            ? presets::two_time(theta)
                            : presets::three_time(theta);
    if (weights.empty()) {
      weights = presets::correlation_weights(protocol);
    }
    SweepRow row;
    row.theta = theta;
    row.exact = exact_correlation(DensityMatrix::plus_state(),
                                  presets::zz_observables(n_times),
                                  presets::evolutions(theta, n_times));
    std::vector<TrajectoryRecord> records =
        sample(protocol, n, substream_seed(seed, i));
    ComplexEstimate est = estimate_correlation(protocol, weights, records);
    row.estimate = est.value;
    row.sem_re = est.sem_re;
    row.sem_im = est.sem_im;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace kdq
