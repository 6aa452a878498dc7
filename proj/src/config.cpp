#include "kdq/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "kdq/errors.hpp"
#include "kdq/povm.hpp"
#include "kdq/qmodel.hpp"

namespace kdq {

namespace {

constexpr double kPi = std::numbers::pi;

void check_keys(const json& obj, const std::string& context,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) {
    throw ConfigError(context + " must be a JSON object");
  }
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!ok.count(item.key())) {
      throw ConfigError("unknown key '" + item.key() + "' in " + context);
    }
  }
}

const json& require(const json& obj, const char* key,
                    const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError(context + " is missing required key '" + key + "'");
  }
  return *it;
}

double as_double(const json& v, const std::string& context) {
  if (!v.is_number()) throw ConfigError(context + " must be a number");
  return v.get<double>();
}

cplx parse_complex(const json& v, const std::string& context) {
  if (v.is_number()) return cplx(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return cplx(v[0].get<double>(), v[1].get<double>());
  }
  throw ConfigError(context + " must be a number or an [re, im] pair");
}

CMatrix parse_matrix(const json& v, const std::string& context) {
  if (!v.is_array() || v.empty()) {
    throw ConfigError(context + " must be a non-empty array of rows");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(v.size());
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const json& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw ConfigError(context + " must be square");
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      m(r, c) = parse_complex(row[static_cast<std::size_t>(c)],
                              context + " entry");
    }
  }
  return m;
}

CVector parse_ket(const json& v, const std::string& context) {
  if (!v.is_array() || v.empty()) {
    throw ConfigError(context + " must be a non-empty array");
  }
  CVector ket(static_cast<Eigen::Index>(v.size()));
  for (Eigen::Index i = 0; i < ket.size(); ++i) {
    ket(i) = parse_complex(v[static_cast<std::size_t>(i)], context + " entry");
  }
  return ket;
}

DensityMatrix parse_initial(const json& v, Eigen::Index dim) {
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    if (name == "plus") {
      if (dim != 2) throw ConfigError("initial 'plus' requires dim 2");
      return DensityMatrix::plus_state();
    }
    if (name == "zero") return DensityMatrix::basis_state(dim, 0);
    if (name == "maximally_mixed") return DensityMatrix::maximally_mixed(dim);
    throw ConfigError("unknown initial state '" + name + "'");
  }
  if (v.is_object()) {
    check_keys(v, "initial", {"matrix"});
    CMatrix m = parse_matrix(require(v, "matrix", "initial"), "initial matrix");
    if (m.rows() != dim) throw ConfigError("initial matrix dimension mismatch");
    try {
      return DensityMatrix(m);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("initial matrix: ") + e.what());
    }
  }
  throw ConfigError("initial must be a name or {\"matrix\": ...}");
}

Channel parse_evolution(const json& v, Eigen::Index dim,
                        const std::string& context) {
  if (v.is_string()) {
    if (v.get<std::string>() == "identity") return Channel::identity(dim);
    throw ConfigError(context + ": unknown evolution '" +
                      v.get<std::string>() + "'");
  }
  if (v.is_object() && v.contains("rotation")) {
    check_keys(v, context, {"rotation"});
    const json& rot = v["rotation"];
    check_keys(rot, context + " rotation", {"theta", "phi"});
    if (dim != 2) throw ConfigError(context + ": rotations require dim 2");
    double theta = as_double(require(rot, "theta", context), context + " theta");
    double phi = rot.contains("phi") ? as_double(rot["phi"], context + " phi")
                                     : 0.0;
    return rotation_gate(theta, phi);
  }
  if (v.is_object() && v.contains("matrix")) {
    check_keys(v, context, {"matrix"});
    CMatrix m = parse_matrix(v["matrix"], context + " matrix");
    if (m.rows() != dim) throw ConfigError(context + ": matrix dim mismatch");
    try {
      return Channel::unitary(m);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(context + ": " + e.what());
    }
  }
  throw ConfigError(context +
                    ": evolution must be \"identity\", {\"rotation\": ...} or "
                    "{\"matrix\": ...}");
}

MeasurementSet parse_set(const json& v, Eigen::Index dim,
                         const std::string& context) {
  try {
    if (v.is_string()) {
      MeasurementSet set = builtin_set(v.get<std::string>());
      if (set.dim != dim) {
        throw ConfigError(context + ": set '" + v.get<std::string>() +
                          "' has dimension " + std::to_string(set.dim) +
                          ", expected " + std::to_string(dim));
      }
      return set;
    }
    if (v.is_object()) {
      check_keys(v, context + " set", {"kets", "name"});
      const json& kets_doc = require(v, "kets", context + " set");
      if (!kets_doc.is_array() || kets_doc.empty()) {
        throw ConfigError(context + ": kets must be a non-empty array");
      }
      std::vector<CVector> kets;
      for (const json& k : kets_doc) {
        CVector ket = parse_ket(k, context + " ket");
        if (ket.size() != dim) {
          throw ConfigError(context + ": ket dimension mismatch");
        }
        kets.push_back(std::move(ket));
      }
      std::string name = v.contains("name") ? v["name"].get<std::string>()
                                            : "custom";
      return make_set(dim, std::move(kets), name);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(context + ": " + e.what());
  }
  throw ConfigError(context + ": set must be a name or {\"kets\": ...}");
}

std::size_t parse_count(const json& v, const std::string& context) {
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) {
    throw ConfigError(context + " must be a positive integer");
  }
  return static_cast<std::size_t>(v.get<std::uint64_t>());
}

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(complex_json(m(r, c)));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  check_keys(doc, "config",
             {"dim", "initial", "steps", "estimator", "n_trajectories", "seed",
              "objective", "noise", "out_dir"});
  const json& dim_doc = require(doc, "dim", "config");
  if (!dim_doc.is_number_unsigned() || dim_doc.get<std::uint64_t>() < 2) {
    throw ConfigError("dim must be an integer >= 2");
  }
  const Eigen::Index dim =
      static_cast<Eigen::Index>(dim_doc.get<std::uint64_t>());

  DensityMatrix initial = parse_initial(require(doc, "initial", "config"), dim);

  const json& steps_doc = require(doc, "steps", "config");
  if (!steps_doc.is_array() || steps_doc.empty()) {
    throw ConfigError("steps must be a non-empty array");
  }
  std::vector<ProtocolStep> steps;
  for (std::size_t k = 0; k < steps_doc.size(); ++k) {
    const std::string context = "step " + std::to_string(k + 1);
    const json& s = steps_doc[k];
    check_keys(s, context, {"evolution", "set", "projective"});
    if (s.contains("projective") && !s["projective"].is_boolean()) {
      throw ConfigError(context + ": projective must be a boolean");
    }
    const bool projective =
        s.contains("projective") && s["projective"].get<bool>();
    Channel evolution = s.contains("evolution")
                            ? parse_evolution(s["evolution"], dim, context)
                            : Channel::identity(dim);
    if (projective && s.contains("set")) {
      throw ConfigError(context + ": projective steps take no set");
    }
    MeasurementSet set =
        projective ? computational_set(dim)
                   : parse_set(require(s, "set", context), dim, context);
    steps.push_back({std::move(evolution), std::move(set), projective});
  }
  RunConfig config{[&] {
    try {
      return make_protocol(initial, std::move(steps));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("steps: ") + e.what());
    }
  }()};

  if (doc.contains("estimator")) {
    const json& est = doc["estimator"];
    check_keys(est, "estimator", {"kind", "observables"});
    const std::string kind =
        require(est, "kind", "estimator").get<std::string>();
    if (kind == "correlation") {
      config.estimator = EstimatorKind::kCorrelation;
    } else if (kind == "qpd") {
      config.estimator = EstimatorKind::kQpd;
    } else {
      throw ConfigError("estimator kind must be 'correlation' or 'qpd'");
    }
    if (est.contains("observables")) {
      const json& obs = est["observables"];
      if (!obs.is_array()) throw ConfigError("observables must be an array");
      for (const json& o : obs) {
        if (!o.is_string()) throw ConfigError("observable names are strings");
        config.observable_names.push_back(o.get<std::string>());
      }
    }
    if (config.estimator == EstimatorKind::kCorrelation &&
        config.observable_names.size() != config.protocol.steps.size()) {
      throw ConfigError(
          "correlation estimator needs one observable name per step");
    }
    if (config.estimator == EstimatorKind::kQpd &&
        !config.observable_names.empty() &&
        config.observable_names.size() != config.protocol.steps.size()) {
      throw ConfigError(
          "qpd estimator observables: give one name per step or none");
    }
  } else {
    config.observable_names.assign(config.protocol.steps.size(), "Z");
  }

  if (doc.contains("n_trajectories")) {
    config.n_trajectories = parse_count(doc["n_trajectories"], "n_trajectories");
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      throw ConfigError("seed must be an unsigned integer");
    }
    config.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("objective")) {
    const std::string obj = doc["objective"].get<std::string>();
    if (obj == "min-inf") {
      config.objective = WeightObjective::kMinInfNorm;
    } else if (obj == "any") {
      config.objective = WeightObjective::kAnyFeasible;
    } else {
      throw ConfigError("objective must be 'any' or 'min-inf'");
    }
  }
  if (doc.contains("noise")) {
    config.noise = parse_noise(doc["noise"], config.protocol);
  }
  if (doc.contains("out_dir")) {
    if (!doc["out_dir"].is_string()) {
      throw ConfigError("out_dir must be a string");
    }
    config.out_dir = doc["out_dir"].get<std::string>();
  }

  for (const std::string& name : config.observable_names) {
    try {
      named_observable(name, dim);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("observables: ") + e.what());
    }
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc);
}

json config_json(const RunConfig& config) {
  json doc;
  doc["dim"] = config.protocol.dim();
  doc["initial"]["matrix"] = matrix_json(config.protocol.initial.mat());
  json steps = json::array();
  for (const ProtocolStep& step : config.protocol.steps) {
    json s;
    s["evolution"]["matrix"] = matrix_json(step.evolution.unitary_mat());
    if (step.projective) {
      s["projective"] = true;
    } else {
      json kets = json::array();
      for (const CVector& ket : step.set.kets) {
        json k = json::array();
        for (Eigen::Index i = 0; i < ket.size(); ++i) {
          k.push_back(complex_json(ket(i)));
        }
        kets.push_back(k);
      }
      s["set"]["kets"] = kets;
      s["set"]["name"] = step.set.name;
    }
    steps.push_back(s);
  }
  doc["steps"] = steps;
  doc["estimator"]["kind"] =
      config.estimator == EstimatorKind::kQpd ? "qpd" : "correlation";
  if (!config.observable_names.empty()) {
    doc["estimator"]["observables"] = config.observable_names;
  }
  doc["n_trajectories"] = config.n_trajectories;
  if (config.seed) doc["seed"] = *config.seed;
  doc["objective"] =
      config.objective == WeightObjective::kMinInfNorm ? "min-inf" : "any";
  if (config.out_dir) doc["out_dir"] = *config.out_dir;
  return doc;
}

NoiseModel parse_noise(const json& doc, const Protocol& protocol) {
  check_keys(doc, "noise",
             {"entangling_fidelity", "entangling_depolarizing_p", "dephasing_p",
              "readout"});
  NoiseModel noise;
  if (doc.contains("entangling_fidelity") &&
      doc.contains("entangling_depolarizing_p")) {
    throw ConfigError(
        "give entangling_fidelity or entangling_depolarizing_p, not both");
  }
  if (doc.contains("entangling_fidelity")) {
    double f = as_double(doc["entangling_fidelity"], "entangling_fidelity");
    if (f < 0.25 || f > 1.0) {
      throw ConfigError("entangling_fidelity must lie in [0.25, 1]");
    }
    noise.entangling_depolarizing_p = 4.0 * (1.0 - f) / 3.0;
  }
  if (doc.contains("entangling_depolarizing_p")) {
    double p = as_double(doc["entangling_depolarizing_p"],
                         "entangling_depolarizing_p");
    if (p < 0.0 || p > 1.0) {
      throw ConfigError("entangling_depolarizing_p must lie in [0, 1]");
    }
    noise.entangling_depolarizing_p = p;
  }
  if (doc.contains("dephasing_p")) {
    double p = as_double(doc["dephasing_p"], "dephasing_p");
    if (p < 0.0 || p > 1.0) throw ConfigError("dephasing_p must lie in [0, 1]");
    noise.dephasing_p = p;
  }
  if (doc.contains("readout")) {
    const json& r = doc["readout"];
    check_keys(r, "readout",
               {"ancilla_fidelity", "final_fidelity", "per_step_fidelity"});
    const Eigen::Index d = protocol.dim();
    if (r.contains("per_step_fidelity")) {
      if (r.contains("ancilla_fidelity") || r.contains("final_fidelity")) {
        throw ConfigError(
            "per_step_fidelity excludes ancilla/final fidelities");
      }
      const json& list = r["per_step_fidelity"];
      if (!list.is_array() || list.size() != protocol.steps.size()) {
        throw ConfigError("per_step_fidelity needs one entry per step");
      }
      for (const json& f : list) {
        noise.readout.push_back(
            symmetric_confusion(d, as_double(f, "per_step_fidelity")));
      }
    } else {
      double anc = r.contains("ancilla_fidelity")
                       ? as_double(r["ancilla_fidelity"], "ancilla_fidelity")
                       : 1.0;
      double fin = r.contains("final_fidelity")
                       ? as_double(r["final_fidelity"], "final_fidelity")
                       : 1.0;
      for (const ProtocolStep& step : protocol.steps) {
        noise.readout.push_back(
            symmetric_confusion(d, step.projective ? fin : anc));
      }
    }
  }
  return noise;
}

NoiseModel load_noise(const std::string& path, const Protocol& protocol) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open noise file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("noise file is not valid JSON: " + std::string(e.what()));
  }
  return parse_noise(doc, protocol);
}

std::vector<double> parse_grid(const json& doc) {
  check_keys(doc, "grid", {"start", "stop", "count"});
  double start = as_double(require(doc, "start", "grid"), "grid start");
  double stop = as_double(require(doc, "stop", "grid"), "grid stop");
  std::size_t count = parse_count(require(doc, "count", "grid"), "grid count");
  std::vector<double> grid;
  if (count == 1) {
    grid.push_back(start);
    return grid;
  }
  for (std::size_t i = 0; i < count; ++i) {
    grid.push_back(start + (stop - start) * static_cast<double>(i) /
                               static_cast<double>(count - 1));
  }
  return grid;
}

SweepConfig parse_sweep_config(const json& doc) {
  check_keys(doc, "sweep config",
             {"family", "grid", "n_trajectories", "seed"});
  SweepConfig config;
  const std::string family =
      require(doc, "family", "sweep config").get<std::string>();
  if (family == "three_time") {
    config.three_time = true;
  } else if (family != "two_time") {
    throw ConfigError("family must be 'two_time' or 'three_time'");
  }
  config.grid = doc.contains("grid")
                    ? parse_grid(doc["grid"])
                    : parse_grid(json{{"start", 0.0},
                                      {"stop", kPi},
                                      {"count", 41}});
  if (doc.contains("n_trajectories")) {
    config.n_trajectories = parse_count(doc["n_trajectories"], "n_trajectories");
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      throw ConfigError("seed must be an unsigned integer");
    }
    config.seed = doc["seed"].get<std::uint64_t>();
  }
  return config;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sweep config: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("sweep config is not valid JSON: " +
                      std::string(e.what()));
  }
  return parse_sweep_config(doc);
}

std::vector<WeightVector> correlation_weights_for(const RunConfig& config) {
  const Eigen::Index d = config.protocol.dim();
  const Observable id = named_observable("I", d);
  std::vector<WeightVector> weights;
  for (std::size_t k = 0; k < config.protocol.steps.size(); ++k) {
    const Observable a = named_observable(config.observable_names[k], d);
    weights.push_back(solve_weights(
        build_system(config.protocol.steps[k].set, id, a), config.objective));
  }
  return weights;
}

std::vector<std::vector<WeightVector>> qpd_weights_for(
    const RunConfig& config) {
  const Eigen::Index d = config.protocol.dim();
  const Observable id = named_observable("I", d);
  std::vector<std::vector<CMatrix>> projectors = projectors_for(config);
  std::vector<std::vector<WeightVector>> weights;
  for (std::size_t k = 0; k < config.protocol.steps.size(); ++k) {
    std::vector<WeightVector> per_outcome;
    for (Eigen::Index i = 0; i < d; ++i) {
      Observable proj =
          make_observable(projectors[k][static_cast<std::size_t>(i)],
                          "P" + std::to_string(i));
      per_outcome.push_back(solve_weights(
          build_system(config.protocol.steps[k].set, id, proj),
          config.objective));
    }
    weights.push_back(std::move(per_outcome));
  }
  return weights;
}

std::vector<Observable> observables_for(const RunConfig& config) {
  std::vector<Observable> out;
  for (const std::string& name : config.observable_names) {
    out.push_back(named_observable(name, config.protocol.dim()));
  }
  return out;
}

std::vector<std::vector<CMatrix>> projectors_for(const RunConfig& config) {
  const Eigen::Index d = config.protocol.dim();
  std::vector<std::vector<CMatrix>> out;
  for (std::size_t k = 0; k < config.protocol.steps.size(); ++k) {
    std::vector<CMatrix> per_time;
    if (config.observable_names.empty()) {
      for (Eigen::Index i = 0; i < d; ++i) {
        per_time.push_back(
            named_observable("P" + std::to_string(i), d).mat);
      }
    } else {
      Observable a = named_observable(config.observable_names[k], d);
      if (static_cast<Eigen::Index>(a.projectors.size()) != d) {
        throw ConfigError(
            "qpd estimator needs a non-degenerate observable per step");
      }
      per_time = a.projectors;
    }
    out.push_back(std::move(per_time));
  }
  return out;
}

}  // namespace kdq
