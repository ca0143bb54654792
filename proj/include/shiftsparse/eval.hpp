#pragma once

// Metrics, the Monte-Carlo trial runner, the lambda sweep and the
// expanded-dictionary baseline.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "shiftsparse/error.hpp"
#include "shiftsparse/model.hpp"
#include "shiftsparse/solver.hpp"
#include "shiftsparse/sparsity.hpp"
#include "shiftsparse/spectral.hpp"

namespace shiftsparse {

inline constexpr double kDefaultSnrCapDb = 300.0;

// 10 log10(|alpha|^2 / |alpha_hat - alpha|^2), capped for exact recovery.
inline double snr_db(const CoefficientVector& alpha_true, const CoefficientVector& alpha_hat,
                     double cap_db = kDefaultSnrCapDb) {
  detail::require_dims(alpha_true.size() == alpha_hat.size(), "coefficient vectors differ in length");
  const double signal = alpha_true.squaredNorm();
  if (!(signal > 0.0)) throw InvalidArgument("SNR is undefined for a zero reference vector");
  const double error = (alpha_hat - alpha_true).squaredNorm();
  if (error == 0.0) return cap_db;
  return std::min(cap_db, 10.0 * std::log10(signal / error));
}

// Circular distance between two (real) shifts, folded into [0, n/2].
inline double shift_error(double k_hat, double k_true, Eigen::Index n) {
  const double nn = static_cast<double>(n);
  double d = std::fmod(std::abs(k_hat - k_true), nn);
  return std::min(d, nn - d);
}

struct TrialConfig {
  Eigen::Index n = 40;
  Eigen::Index m = 80;
  BernoulliGaussianModel model{};
  double sigma_noise = 0.01;
  SolverConfig solver{};
  std::size_t trials = 1000;
  std::uint64_t base_seed = 1;
  double success_shift_tol = 0.5;
  std::optional<double> success_snr_floor;
  double snr_cap_db = kDefaultSnrCapDb;

  void validate() const {
    detail::require(n >= 2 && m >= n, "trial dimensions need m >= n >= 2");
    model.validate();
    detail::require(sigma_noise >= 0.0, "sigma_noise must be >= 0");
    solver.validate();
    detail::require(trials >= 1, "trials must be >= 1");
    detail::require(success_shift_tol > 0.0 && success_shift_tol < static_cast<double>(n) / 2.0,
                    "success_shift_tol must lie in (0, n/2)");
  }
};

struct TrialResult {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  long long k_true = 0;
  double k_hat = 0.0;
  long long init_shift = 0;
  double shift_error = 0.0;
  double snr_db = 0.0;
  bool success = false;
  double wall_time = 0.0;  // seconds
  std::size_t stage_count = 0;
  double final_h = 0.0;
  std::uint64_t instance_hash = 0;
  std::optional<std::string> failure;  // set when the solve threw
};

struct TrialAggregate {
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::size_t failures = 0;  // trials that raised an error
  double success_rate = 0.0;
  double mean_snr_db_success = std::numeric_limits<double>::quiet_NaN();
  double mean_snr_db_all = std::numeric_limits<double>::quiet_NaN();
  double mean_shift_error = std::numeric_limits<double>::quiet_NaN();
  double wall_time_total = 0.0;
  double wall_time_p50 = 0.0;
  double wall_time_p90 = 0.0;
  double wall_time_max = 0.0;
};

struct TrialReport {
  std::vector<TrialResult> rows;  // sorted by trial index
  TrialAggregate aggregate;
};

// FNV-1a over the bytes of the dictionary, coefficients and observation.
inline std::uint64_t instance_hash(const SyntheticInstance& inst) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const double* data, Eigen::Index count) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < static_cast<std::size_t>(count) * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  mix(inst.dictionary.atoms().data(), inst.dictionary.atoms().size());
  mix(inst.alpha_true.data(), inst.alpha_true.size());
  mix(inst.observed.data(), inst.observed.size());
  const double k = static_cast<double>(inst.k_true);
  mix(&k, 1);
  return h;
}

inline TrialResult run_single_trial(const TrialConfig& config, std::size_t index) {
  TrialResult row;
  row.trial = index;
  row.seed = config.base_seed + index;
  const auto start = std::chrono::steady_clock::now();
  try {
    const SyntheticInstance inst =
        generate_instance(config.n, config.m, config.model, config.sigma_noise, std::nullopt, row.seed);
    row.k_true = inst.k_true;
    row.instance_hash = instance_hash(inst);
    const DecompositionResult res = solve(inst.dictionary, inst.observed, config.solver);
    row.k_hat = res.k_hat;
    row.init_shift = res.init_shift;
    row.shift_error = shift_error(res.k_hat, static_cast<double>(inst.k_true), config.n);
    row.snr_db = snr_db(inst.alpha_true, res.alpha_hat, config.snr_cap_db);
    row.stage_count = res.stage_count;
    row.final_h = res.trace.empty() ? 0.0 : res.trace.back().h;
    row.success = row.shift_error <= config.success_shift_tol &&
                  (!config.success_snr_floor || row.snr_db >= *config.success_snr_floor);
  } catch (const std::exception& e) {
    row.failure = e.what();
    row.success = false;
    row.snr_db = std::numeric_limits<double>::quiet_NaN();
    row.shift_error = std::numeric_limits<double>::quiet_NaN();
  }
  row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

namespace detail {

inline double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size()))) ;
  return values[std::min(values.size() - 1, idx == 0 ? 0 : idx - 1)];
}

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace detail

// Pure function of the rows.
inline TrialAggregate aggregate_trials(const std::vector<TrialResult>& rows) {
  TrialAggregate agg;
  agg.trials = rows.size();
  std::vector<double> snr_success, snr_all, shift_err, times;
  for (const auto& row : rows) {
    times.push_back(row.wall_time);
    agg.wall_time_total += row.wall_time;
    if (row.failure) {
      ++agg.failures;
      continue;
    }
    snr_all.push_back(row.snr_db);
    shift_err.push_back(row.shift_error);
    if (row.success) {
      ++agg.successes;
      snr_success.push_back(row.snr_db);
    }
  }
  agg.success_rate = rows.empty() ? 0.0 : static_cast<double>(agg.successes) / static_cast<double>(rows.size());
  agg.mean_snr_db_success = detail::mean_of(snr_success);
  agg.mean_snr_db_all = detail::mean_of(snr_all);
  agg.mean_shift_error = detail::mean_of(shift_err);
  agg.wall_time_p50 = detail::percentile(times, 0.5);
  agg.wall_time_p90 = detail::percentile(times, 0.9);
  agg.wall_time_max = times.empty() ? 0.0 : *std::max_element(times.begin(), times.end());
  return agg;
}

// Worker count when none is requested: SHIFTSPARSE_THREADS, else hardware.
inline unsigned default_worker_count() {
  if (const char* env = std::getenv("SHIFTSPARSE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Trial t uses seed base_seed + t. Rows do not depend on the worker count.
inline TrialReport run_trials(const TrialConfig& config, unsigned workers = 0) {
  config.validate();
  if (workers == 0) workers = default_worker_count();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, config.trials));

  std::vector<TrialResult> rows(config.trials);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t t = next++; t < config.trials; t = next++) rows[t] = run_single_trial(config, t);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  TrialReport report{std::move(rows), {}};
  report.aggregate = aggregate_trials(report.rows);
  return report;
}

struct SweepRow {
  double lambda = 0.0;
  std::size_t trials = 0;
  double mean_snr_db_success = 0.0;
  double mean_snr_db_all = 0.0;
  double success_rate = 0.0;
  std::vector<std::uint64_t> instance_hashes;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // lambda strictly increasing
};

// Every lambda sees the same instances (seeds base_seed .. base_seed + trials - 1).
inline SweepResult lambda_sweep(const TrialConfig& base, std::vector<double> lambdas, std::size_t trials_per_lambda,
                                unsigned workers = 0) {
  detail::require(!lambdas.empty(), "lambda sweep needs at least one lambda");
  std::sort(lambdas.begin(), lambdas.end());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    detail::require(lambdas[i] > 0.0 && lambdas[i] < 1.0, "every lambda must lie in (0, 1)");
    if (i > 0) detail::require(lambdas[i] > lambdas[i - 1], "lambdas must be distinct");
  }
  SweepResult out;
  for (const double lambda : lambdas) {
    TrialConfig cfg = base;
    cfg.solver.lambda = lambda;
    cfg.trials = trials_per_lambda;
    const TrialReport report = run_trials(cfg, workers);
    SweepRow row{lambda, report.rows.size(), report.aggregate.mean_snr_db_success, report.aggregate.mean_snr_db_all,
                 report.aggregate.success_rate, {}};
    for (const auto& r : report.rows) row.instance_hashes.push_back(r.instance_hash);
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline constexpr double kExpandedEntryLimit = 1e8;

// n x (n*m) dictionary whose column k*m + i is atom i delayed by k samples.
inline Dictionary expanded_dictionary(const Dictionary& dict) {
  const Eigen::Index n = dict.n();
  const Eigen::Index m = dict.m();
  const double entries = static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(m);
  if (entries > kExpandedEntryLimit) throw ResourceError("expanded dictionary would exceed 1e8 entries");
  Eigen::MatrixXd atoms(n, n * m);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < m; ++i)
      atoms.col(k * m + i) = circular_shift<double>(Signal(dict.atoms().col(i)), k);
  return Dictionary(std::move(atoms), {.require_overcomplete = true, .unit_norm = false});
}

struct BaselineResult {
  CoefficientVector alpha_expanded;  // n*m coefficients, block k = shift k
  long long k_hat = 0;
  CoefficientVector alpha_hat;       // block k_hat mapped back to m atoms
  std::vector<double> block_energy;  // summed squared coefficients per shift
  Eigen::Index expanded_atoms = 0;
};

inline BaselineResult baseline_expanded(const Dictionary& dict, const Signal& x, const ScheduleParams& schedule,
                                        int inner_steps) {
  detail::require_dims(x.size() == dict.n(), "signal length must equal dictionary rows");
  const Eigen::Index n = dict.n();
  const Eigen::Index m = dict.m();
  const Dictionary expanded = expanded_dictionary(dict);

  BaselineResult out;
  out.expanded_atoms = expanded.m();
  out.alpha_expanded = plain_sl0(expanded, x, schedule, inner_steps);
  out.block_energy.assign(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index k = 0; k < n; ++k)
    out.block_energy[static_cast<std::size_t>(k)] = out.alpha_expanded.segment(k * m, m).squaredNorm();
  const auto best = std::max_element(out.block_energy.begin(), out.block_energy.end());
  out.k_hat = *best > 0.0 ? static_cast<long long>(best - out.block_energy.begin()) : 0;
  out.alpha_hat = out.alpha_expanded.segment(out.k_hat * m, m);
  return out;
}

}  // namespace shiftsparse
