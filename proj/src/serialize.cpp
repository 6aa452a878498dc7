#include "kdq/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "kdq/errors.hpp"

namespace kdq {

std::string format_double(double x) {
  // %.17g is the shortest width guaranteed to round-trip an IEEE double.
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

void write_trajectories(const std::string& path,
                        const std::vector<TrajectoryRecord>& records) {
  std::size_t width = records.empty() ? 0 : records.front().size();
  for (const TrajectoryRecord& r : records) {
    if (r.size() != width) {
      throw std::invalid_argument("records with mixed lengths");
    }
  }
  std::ofstream out = open_out(path);
  out << "traj_id";
  for (std::size_t k = 1; k <= width; ++k) out << ",m_" << k;
  out << '\n';
  for (std::size_t i = 0; i < records.size(); ++i) {
    out << i;
    for (std::uint32_t m : records[i]) out << ',' << m;
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<TrajectoryRecord> read_trajectories(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty trajectory file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_csv(line);
  if (header.empty() || header[0] != "traj_id") {
    throw IoError("trajectory file must start with a traj_id header: " + path);
  }
  for (std::size_t k = 1; k < header.size(); ++k) {
    if (header[k] != "m_" + std::to_string(k)) {
      throw IoError("unexpected trajectory column '" + header[k] + "' in " +
                    path);
    }
  }
  const std::size_t width = header.size() - 1;
  if (width == 0) throw IoError("trajectory file has no outcome columns");
  std::vector<TrajectoryRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv(line);
    if (fields.size() != width + 1) {
      throw IoError("trajectory row with wrong field count in " + path);
    }
    TrajectoryRecord record(width);
    try {
      if (std::stoull(fields[0]) != records.size()) {
        throw IoError("trajectory ids must be consecutive from 0 in " + path);
      }
      for (std::size_t k = 0; k < width; ++k) {
        unsigned long v = std::stoul(fields[k + 1]);
        record[k] = static_cast<std::uint32_t>(v);
      }
    } catch (const std::logic_error&) {
      throw IoError("non-numeric trajectory field in " + path);
    }
    records.push_back(std::move(record));
  }
  return records;
}

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRow>& rows) {
  std::ofstream out = open_out(path);
  out << "theta,re_exact,im_exact,re_est,im_est,sem_re,sem_im\n";
  for (const SweepRow& r : rows) {
    out << format_double(r.theta) << ',' << format_double(r.exact.real()) << ','
        << format_double(r.exact.imag()) << ','
        << format_double(r.estimate.real()) << ','
        << format_double(r.estimate.imag()) << ',' << format_double(r.sem_re)
        << ',' << format_double(r.sem_im) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

json complex_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

json qpd_json(const QpdTable& table) {
  json doc;
  doc["shape"] = table.shape;
  json entries = json::array();
  for (std::size_t f = 0; f < table.q.size(); ++f) {
    json entry;
    entry["outcomes"] = table.tuple_of(f);
    entry["value"] = complex_json(table.q[f]);
    if (table.n > 0) {
      entry["sem_re"] = table.sem_re[f];
      entry["sem_im"] = table.sem_im[f];
    }
    entries.push_back(entry);
  }
  doc["entries"] = entries;
  doc["sum"] = complex_json(table.sum());
  if (table.n > 0) doc["n"] = table.n;
  return doc;
}

json complex_estimate_json(const ComplexEstimate& est) {
  json doc;
  doc["value"] = complex_json(est.value);
  doc["sem_re"] = est.sem_re;
  doc["sem_im"] = est.sem_im;
  doc["n"] = est.n;
  return doc;
}

json distribution_json(const TrajectoryDistribution& dist) {
  json doc;
  doc["shape"] = dist.shape;
  json p = json::object();
  for (std::size_t f = 0; f < dist.p.size(); ++f) {
    std::vector<std::uint32_t> tuple = dist.tuple_of(f);
    std::string key;
    for (std::size_t k = 0; k < tuple.size(); ++k) {
      if (k) key += ',';
      key += std::to_string(tuple[k]);
    }
    p[key] = dist.p[f];
  }
  doc["p"] = p;
  return doc;
}

json weight_vector_json(const WeightVector& w) {
  json doc;
  doc["set"] = w.set_name;
  doc["B"] = w.left.name;
  doc["A"] = w.right.name;
  doc["scope"] = w.scope == WeightScope::kTrace ? "trace" : "operator";
  json gammas = json::array();
  for (const cplx& g : w.gammas) gammas.push_back(complex_json(g));
  doc["gammas"] = gammas;
  doc["gamma_max"] = w.gamma_max;
  return doc;
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream out = open_out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace kdq
