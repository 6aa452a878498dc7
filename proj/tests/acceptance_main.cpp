// Integration gate: runs the full acceptance checklist and prints one
// [PASS]/[FAIL] line per criterion. Exit code = number of failures.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdq/estimate.hpp"
#include "kdq/presets.hpp"
#include "kdq/protocol.hpp"
#include "kdq/qmodel.hpp"
#include "kdq/rng.hpp"
#include "kdq/weights.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kdq;

namespace {

constexpr double kPi = std::numbers::pi;

std::string g_bin;  // path to the command-line tool

struct CmdResult {
  int code = -1;
  std::string out;
};

CmdResult run_cmd(const std::string& args) {
  std::string cmd = '\'' + g_bin + "' " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  CmdResult result;
  if (!pipe) return result;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) {
    result.out.append(buf, got);
  }
  int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

double tv_distance(const TrajectoryDistribution& a,
                   const TrajectoryDistribution& b) {
  if (a.p.size() != b.p.size()) return 1.0;
  double tv = 0.0;
  for (std::size_t f = 0; f < a.p.size(); ++f) {
    tv += std::abs(a.p[f] - b.p[f]);
  }
  return 0.5 * tv;
}

std::vector<double> populations_at(const DensityMatrix& rho,
                                   const std::vector<Channel>& evolutions,
                                   std::size_t time_index) {
  CMatrix v = identity(rho.dim());
  for (std::size_t k = 0; k <= time_index; ++k) {
    v = evolutions[k].unitary_mat() * v;
  }
  CMatrix evolved = v * rho.mat() * adjoint(v);
  std::vector<double> pops;
  for (Eigen::Index i = 0; i < rho.dim(); ++i) {
    pops.push_back(evolved(i, i).real());
  }
  return pops;
}

/// Sums a step's per-outcome table weights into the (I, I) normalization
/// estimator for that step.
WeightVector sum_weights(const std::vector<WeightVector>& per_outcome) {
  WeightVector w = per_outcome.front();
  for (std::size_t i = 1; i < per_outcome.size(); ++i) {
    for (std::size_t m = 0; m < w.gammas.size(); ++m) {
      w.gammas[m] += per_outcome[i].gammas[m];
    }
  }
  w.gamma_max = 0.0;
  for (const cplx& g : w.gammas) {
    w.gamma_max = std::max(w.gamma_max, std::abs(g));
  }
  return w;
}

std::string fmt(double x) {
  std::ostringstream ss;
  ss.precision(6);
  ss << x;
  return ss.str();
}

// ---------------------------------------------------------------------------

bool weight_recovery(std::string& detail) {
  CmdResult res = run_cmd("weights --set zy --A Z --objective min-inf");
  if (res.code != 0) {
    detail = "weights command exited with " + std::to_string(res.code);
    return false;
  }
  json doc = json::parse(res.out, nullptr, false);
  if (doc.is_discarded()) {
    detail = "weights output is not JSON";
    return false;
  }
  double gamma_max = doc["gamma_max"].get<double>();
  double residual = doc["residual"].get<double>();
  std::vector<cplx> expected = {cplx(2, 0), cplx(-2, 0), cplx(0, 2),
                                cplx(0, -2)};
  double entry_err = 0.0;
  if (doc["gammas"].size() != expected.size()) {
    detail = "expected 4 weights";
    return false;
  }
  for (std::size_t m = 0; m < expected.size(); ++m) {
    cplx g(doc["gammas"][m][0].get<double>(),
           doc["gammas"][m][1].get<double>());
    entry_err = std::max(entry_err, std::abs(g - expected[m]));
  }
  detail = "gamma_max " + fmt(gamma_max) + ", residual " + fmt(residual) +
           ", max entry error " + fmt(entry_err);
  return std::abs(gamma_max - 2.0) < 1e-6 && residual < 1e-8 &&
         entry_err < 1e-5;
}

bool minimax_optimum(std::string& detail) {
  CmdResult res = run_cmd("weights --set zyx --A P0 --objective min-inf");
  if (res.code != 0) {
    detail = "weights command exited with " + std::to_string(res.code);
    return false;
  }
  json doc = json::parse(res.out, nullptr, false);
  if (doc.is_discarded()) {
    detail = "weights output is not JSON";
    return false;
  }
  double gamma_max = doc["gamma_max"].get<double>();
  detail = "gamma_max " + fmt(gamma_max);
  return std::abs(gamma_max - 1.775) <= 0.01;
}

bool closed_form_grid(std::string& detail) {
  double max_err = 0.0;
  for (int i = 0; i <= 40; ++i) {
    double theta = kPi * i / 40.0;
    cplx c = exact_correlation(DensityMatrix::plus_state(),
                               presets::zz_observables(2),
                               presets::evolutions(theta, 2));
    max_err = std::max(max_err,
                       std::abs(c - cplx(std::cos(theta), -std::sin(theta))));
  }
  detail = "max abs error " + fmt(max_err);
  return max_err < 1e-12;
}

bool monte_carlo_consistency(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  const double theta = 0.3 * kPi;
  Protocol protocol = presets::two_time(theta);
  auto weights = presets::correlation_weights(protocol);
  auto records = sample(protocol, 100000, 20260815);
  ComplexEstimate est = estimate_correlation(protocol, weights, records);
  cplx oracle(std::cos(theta), -std::sin(theta));
  double z_re = std::abs(est.value.real() - oracle.real()) / est.sem_re;
  double z_im = std::abs(est.value.imag() - oracle.imag()) / est.sem_im;
  double seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  detail = "deviations " + fmt(z_re) + " / " + fmt(z_im) + " sigma in " +
           fmt(seconds) + " s";
  return z_re < 4.0 && z_im < 4.0 && seconds < 30.0;
}

bool qpd_normalization(std::string& detail) {
  double exact_err = 0.0;
  for (double theta : {0.3 * kPi, 0.74 * kPi, 1.9}) {
    for (int times : {2, 3}) {
      auto evolutions = presets::evolutions(theta, times);
      QpdTable table = exact_qpd(DensityMatrix::plus_state(),
                                 presets::z_projectors(2, times), evolutions);
      exact_err = std::max(exact_err,
                           std::abs(table.sum() - cplx(1.0, 0.0)));
      for (int k = 0; k < times; ++k) {
        QpdMarginal m = marginal(table, static_cast<std::size_t>(k));
        auto pops = populations_at(DensityMatrix::plus_state(), evolutions,
                                   static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < pops.size(); ++i) {
          exact_err = std::max(exact_err,
                               std::abs(m.probabilities[i] - pops[i]));
        }
        exact_err = std::max(exact_err, m.max_abs_imag);
      }
    }
  }

  // Sampled tables: the summed-weight estimators give the table sum and
  // single-time marginals with per-record standard errors.  Some components
  // (e.g. the imaginary part of an all-real weight chain) are deterministic
  // up to rounding, leaving SEMs near machine epsilon; the floor keeps those
  // from turning rounding residue into fake sigmas.
  constexpr double kSemFloor = 1e-9;
  auto sigma = [](double dev, double sem) { return dev / (sem + kSemFloor); };
  double worst_sigma = 0.0;
  for (int times : {2, 3}) {
    const double theta = times == 2 ? 0.3 * kPi : 0.74 * kPi;
    Protocol protocol = times == 2 ? presets::two_time(theta, "zyx")
                                   : presets::three_time(theta);
    auto evolutions = presets::evolutions(theta, times);
    auto qw = presets::qpd_weights(protocol);
    std::vector<WeightVector> sums;
    for (const auto& per_outcome : qw) sums.push_back(sum_weights(per_outcome));
    auto records = sample(protocol, 40000, 614 + static_cast<std::uint64_t>(times));

    ComplexEstimate total = estimate_correlation(protocol, sums, records);
    worst_sigma = std::max(
        worst_sigma, sigma(std::abs(total.value.real() - 1.0), total.sem_re));
    worst_sigma = std::max(
        worst_sigma, sigma(std::abs(total.value.imag()), total.sem_im));
    for (int k = 0; k < times; ++k) {
      auto pops = populations_at(DensityMatrix::plus_state(), evolutions,
                                 static_cast<std::size_t>(k));
      for (std::size_t i = 0; i < pops.size(); ++i) {
        std::vector<WeightVector> w = sums;
        w[static_cast<std::size_t>(k)] = qw[static_cast<std::size_t>(k)][i];
        ComplexEstimate est = estimate_correlation(protocol, w, records);
        worst_sigma = std::max(
            worst_sigma, sigma(std::abs(est.value.real() - pops[i]), est.sem_re));
        worst_sigma = std::max(
            worst_sigma, sigma(std::abs(est.value.imag()), est.sem_im));
      }
    }
  }
  detail = "exact error " + fmt(exact_err) + ", sampled worst deviation " +
           fmt(worst_sigma) + " sigma";
  return exact_err < 1e-12 && worst_sigma < 4.0;
}

bool back_action_contrast(std::string& detail) {
  double max_contrast = 0.0;
  double max_baseline_dev = 0.0;
  for (int i = 0; i <= 40; ++i) {
    double theta = kPi * i / 40.0;
    QpdTable table = exact_qpd(DensityMatrix::plus_state(),
                               presets::z_projectors(2, 3),
                               presets::evolutions(theta, 3));
    double p0 = marginal(table, 2).probabilities[0];
    max_contrast = std::max(max_contrast, std::abs(p0 - 0.5));

    Protocol baseline = presets::projective_baseline(theta, 3);
    TrajectoryDistribution dist = exact_distribution(baseline);
    double b0 = 0.0;
    for (std::size_t f = 0; f < dist.p.size(); ++f) {
      if (dist.tuple_of(f)[2] == 0) b0 += dist.p[f];
    }
    max_baseline_dev = std::max(max_baseline_dev, std::abs(b0 - 0.5));
  }
  detail = "marginal contrast " + fmt(max_contrast) + ", baseline deviation " +
           fmt(max_baseline_dev);
  return max_contrast > 0.3 && max_baseline_dev < 1e-12;
}

bool three_time_negativity(std::string& detail) {
  QpdTable table = exact_qpd(DensityMatrix::plus_state(),
                             presets::z_projectors(2, 3),
                             presets::evolutions(0.74 * kPi, 3));
  std::vector<std::vector<std::uint32_t>> negatives;
  for (std::size_t f = 0; f < table.q.size(); ++f) {
    if (table.q[f].real() < -1e-9) negatives.push_back(table.tuple_of(f));
  }
  bool ok = negatives ==
            std::vector<std::vector<std::uint32_t>>{{0, 0, 1}, {1, 0, 1}};
  detail =
      "negative real parts at (0,0,1) and (1,0,1) in (t1,t2,t3) order — the "
      "published labels (0,1,0) and (1,1,0) with the last two indices "
      "exchanged";
  if (!ok) {
    detail = "unexpected negative set of size " +
             std::to_string(negatives.size());
  }
  return ok;
}

bool lgi_violation(std::string& detail) {
  const double theta = 0.74 * kPi;
  QpdTable table = exact_qpd(DensityMatrix::plus_state(),
                             presets::z_projectors(2, 3),
                             presets::evolutions(theta, 3));
  double k = lgi_k(table);
  double closed = -std::sin(theta * theta) -
                  std::cos(theta) * std::cos(theta * theta);

  Protocol protocol = presets::three_time(theta);
  auto weights = presets::qpd_weights(protocol);
  auto records = sample(protocol, 100000, 981);
  LgiEstimate est = lgi_from_records(protocol, weights, records);

  detail = "K " + fmt(k) + ", sampled " + fmt(est.k) + " +/- " + fmt(est.sem);
  return std::abs(k - 1.208) <= 0.005 && std::abs(k - closed) < 1e-12 &&
         k > 1.0 && std::abs(k - 1.17) <= 0.06 &&
         est.k - 1.645 * est.sem > 1.0;
}

bool degenerate_theta_zero(std::string& detail) {
  cplx c = exact_correlation(DensityMatrix::plus_state(),
                             presets::zz_observables(2),
                             presets::evolutions(0.0, 2));
  QpdTable table = exact_qpd(DensityMatrix::plus_state(),
                             presets::z_projectors(2, 3),
                             presets::evolutions(0.0, 3));
  double k = lgi_k(table);
  detail = "C = " + fmt(c.real()) + " + " + fmt(c.imag()) + "i, K = " + fmt(k);
  return c.real() == 1.0 && c.imag() == 0.0 && k == -1.0;
}

bool path_equivalence(std::string& detail) {
  double max_tv = 0.0;
  for (double theta : {0.3 * kPi, 0.74 * kPi}) {
    std::vector<Protocol> protocols = {presets::two_time(theta),
                                       presets::three_time(theta)};
    for (const Protocol& protocol : protocols) {
      TrajectoryDistribution kraus = exact_distribution(protocol);
      for (bool use_ms : {false, true}) {
        TrajectoryDistribution circuit =
            explicit_circuit_distribution(protocol, use_ms);
        max_tv = std::max(max_tv, tv_distance(kraus, circuit));
      }
    }
  }
  detail = "max total variation " + fmt(max_tv);
  return max_tv < 1e-10;
}

bool gate_decomposition(std::string& detail) {
  CMatrix u = gate_list_unitary(cnot_from_ms());
  CMatrix cnot = csum_gate(2).unitary_mat();
  cplx t = (adjoint(u) * cnot).trace();
  if (std::abs(t) < 1e-12) {
    detail = "trace overlap vanished";
    return false;
  }
  double dist = max_abs_diff((t / std::abs(t)) * u, cnot);
  detail = "phase-aligned entrywise distance " + fmt(dist);
  return dist < 1e-10;
}

bool readout_round_trip(std::string& detail) {
  Protocol protocol = presets::three_time(0.74 * kPi);
  NoiseModel noise;
  for (const ProtocolStep& step : protocol.steps) {
    noise.readout.push_back(
        symmetric_confusion(2, step.projective ? 0.984 : 0.989));
  }
  TrajectoryDistribution exact = exact_distribution(protocol);
  TrajectoryDistribution blurred = apply_readout_error(protocol, exact, noise);
  CorrectedDistribution corrected = correct_readout(protocol, blurred, noise);
  double tv = tv_distance(corrected.dist, exact);
  detail = "round-trip total variation " + fmt(tv) + ", clipped mass " +
           fmt(corrected.clipped_mass);
  return tv < 1e-10 && blurred.p != exact.p;
}

bool hoeffding_honesty(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = hoeffding_n(2.0, 0.2, 0.1);
  if (n != 185) {
    detail = "planner returned n = " + std::to_string(n);
    return false;
  }
  const double theta = 0.3 * kPi;
  Protocol protocol = presets::two_time(theta);
  auto weights = presets::correlation_weights(protocol);
  cplx oracle(std::cos(theta), -std::sin(theta));
  int failures = 0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    auto records = sample(protocol, n, substream_seed(42424242, rep));
    ComplexEstimate est = estimate_correlation(protocol, weights, records);
    if (std::abs(est.value.real() - oracle.real()) > 0.2 ||
        std::abs(est.value.imag() - oracle.imag()) > 0.2) {
      ++failures;
    }
  }
  double seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  // delta * reps = 20 expected failures at most; 3-sigma binomial slack
  // gives 20 + 3 * sqrt(200 * 0.1 * 0.9) = 32.7.
  detail = std::to_string(failures) + "/200 runs off by > 0.2 in " +
           fmt(seconds) + " s (budget 32)";
  return failures <= 32 && seconds < 120.0;
}

bool noise_monotonicity(std::string& detail) {
  Protocol protocol = presets::three_time(0.74 * kPi);
  auto weights = presets::qpd_weights(protocol);
  std::string series;
  double prev = 0.0;
  bool decreasing = true;
  std::vector<double> ps = {0.0, 0.02, 0.05, 0.1};
  for (std::size_t i = 0; i < ps.size(); ++i) {
    NoiseModel noise;
    noise.entangling_depolarizing_p = ps[i];
    TrajectoryDistribution dist =
        explicit_circuit_distribution(protocol, false, &noise);
    double k = lgi_k(qpd_from_distribution(protocol, weights, dist));
    if (i > 0 && k >= prev) decreasing = false;
    prev = k;
    if (i) series += " > ";
    series += fmt(k);
  }
  detail = "K: " + series;
  return decreasing;
}

}  // namespace

int main(int, char** argv) {
  if (const char* env = std::getenv("KDQ_BIN")) {
    g_bin = env;
  } else {
    fs::path guess =
        fs::path(argv[0]).parent_path().parent_path() / "tools" / "kdq";
    g_bin = guess.string();
  }

  struct Criterion {
    const char* description;
    std::function<bool(std::string&)> check;
  };
  std::vector<Criterion> criteria = {
      {"per-outcome weights on the zy set recover the known optimum "
       "(gamma_max 2, values {2, -2, 2i, -2i})",
       weight_recovery},
      {"minimax weight bound on the zyx set for a basis projector is "
       "1.775 +/- 0.01",
       minimax_optimum},
      {"two-time correlation oracle matches cos(theta) - i sin(theta) on a "
       "41-point grid (< 1e-12)",
       closed_form_grid},
      {"Monte Carlo correlation at theta = 0.3 pi, n = 1e5 lies within 4 SEM "
       "of the oracle in under 30 s",
       monte_carlo_consistency},
      {"exact tables normalize and marginalize to populations (< 1e-12); "
       "sampled tables agree within 4 SEM",
       qpd_normalization},
      {"final-time marginal varies with theta (contrast > 0.3) while the "
       "projective baseline stays at 1/2 (< 1e-12)",
       back_action_contrast},
      {"three-time table at theta = 0.74 pi has exactly two negative real "
       "parts at the expected outcome tuples",
       three_time_negativity},
      {"inequality oracle K(0.74 pi) = 1.208 +/- 0.005, matches the closed "
       "form, exceeds 1, within 0.06 of the measured 1.17; Monte Carlo "
       "confirms K > 1 at 95% confidence",
       lgi_violation},
      {"theta = 0 degenerate case gives C = 1 and K = -1 exactly",
       degenerate_theta_zero},
      {"ancilla-circuit and measurement-operator paths agree to total "
       "variation < 1e-10, with and without the MS decomposition",
       path_equivalence},
      {"the MS-gate sequence composes a CNOT up to global phase (< 1e-10)",
       gate_decomposition},
      {"readout correction inverts readout blur on exact distributions "
       "(< 1e-10) at fidelities 0.989 / 0.984",
       readout_round_trip},
      {"sample-size planner returns n = 185 for (2, 0.2, 0.1) and its promise "
       "holds over 200 runs within 3-sigma slack in under 2 min",
       hoeffding_honesty},
      {"K(0.74 pi) decreases strictly with entangling depolarizing strength "
       "p in {0, 0.02, 0.05, 0.1}",
       noise_monotonicity},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].check(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << (i + 1) << ". "
              << criteria[i].description;
    if (!detail.empty()) std::cout << " — " << detail;
    std::cout << '\n';
    if (!ok) ++failures;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/"
            << criteria.size() << " acceptance criteria passed\n";
  return failures;
}
