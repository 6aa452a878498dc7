#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdq/estimate.hpp"
#include "kdq/protocol.hpp"
#include "kdq/weights.hpp"

namespace kdq {

using json = nlohmann::ordered_json;

/// Shortest round-trip decimal rendering of a double (no locale surprises).
std::string format_double(double x);

/// Writes trajectory records as CSV with header `traj_id,m_1,...,m_N`.
/// Every record must have the same length.
void write_trajectories(const std::string& path,
                        const std::vector<TrajectoryRecord>& records);

/// Reads a trajectory CSV produced by write_trajectories. Validates the
/// header shape and that ids are consecutive from 0.
std::vector<TrajectoryRecord> read_trajectories(const std::string& path);

/// Writes sweep rows as CSV with header
/// `theta,re_exact,im_exact,re_est,im_est,sem_re,sem_im`.
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

/// Complex number as a JSON [re, im] pair.
json complex_json(const cplx& z);

/// Estimated or exact quasiprobability table as JSON: shape, entries keyed by
/// outcome tuple, per-entry standard errors when available, and the total.
json qpd_json(const QpdTable& table);

json complex_estimate_json(const ComplexEstimate& est);

/// Joint outcome distribution as {shape, p: {"i1,...,iN": prob}} with keys
/// in row-major order.
json distribution_json(const TrajectoryDistribution& dist);

/// Weight vector: gammas as [re, im] pairs in ket order, alongside the set
/// name, the (B, A) observable labels, scope, and the max modulus.
json weight_vector_json(const WeightVector& w);

/// Writes a JSON document to a file (2-space indent, trailing newline).
void write_json(const std::string& path, const json& doc);

}  // namespace kdq
