#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shiftsparse/eval.hpp"
#include "shiftsparse/gradcheck.hpp"
#include "shiftsparse/io.hpp"
#include "shiftsparse/model.hpp"
#include "shiftsparse/solver.hpp"
#include "shiftsparse/version.hpp"

namespace shiftsparse::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct ModelOptions {
  long long n = 40;
  long long m = 80;
  double p = 0.1;
  double sigma_on = 1.0;
  double sigma_off = 0.01;
  double sigma_noise = 0.01;
  std::uint64_t seed = 1;

  BernoulliGaussianModel model() const { return {p, sigma_on, sigma_off}; }
};

struct SolverOptions {
  double lambda = 0.75;
  int inner_iterations = 50;
  double mu0 = 0.05;
  double sigma_min = 0.01;
  double decay = 0.5;
  bool reset_mu_per_stage = false;
  bool reject_uphill = false;
  double theta_step_scale = 0.0;  // 0 selects 1/n^2
  double init_sigma_scale = 0.25;

  SolverConfig config() const {
    SolverConfig c;
    c.lambda = lambda;
    c.inner_iterations = inner_iterations;
    c.mu0 = mu0;
    c.schedule = {sigma_min, decay};
    c.reset_mu_per_stage = reset_mu_per_stage;
    c.reject_uphill = reject_uphill;
    if (theta_step_scale > 0.0) c.theta_step_scale = theta_step_scale;
    c.init_sigma_scale = init_sigma_scale;
    return c;
  }
};

struct TrialOptions {
  std::size_t trials = 1000;
  double success_shift_tol = 0.5;
  std::optional<double> success_snr_floor;
  unsigned threads = 0;
};

void add_model_options(CLI::App* cmd, ModelOptions& o) {
  cmd->add_option("--n", o.n, "signal length")->capture_default_str();
  cmd->add_option("--m", o.m, "number of atoms")->capture_default_str();
  cmd->add_option("--p", o.p, "activity probability")->capture_default_str();
  cmd->add_option("--sigma-on", o.sigma_on, "std-dev of active coefficients")->capture_default_str();
  cmd->add_option("--sigma-off", o.sigma_off, "std-dev of inactive coefficients")->capture_default_str();
  cmd->add_option("--sigma-noise", o.sigma_noise, "additive noise std-dev")->capture_default_str();
  cmd->add_option("--seed", o.seed, "RNG seed (base seed for multi-trial commands)")->capture_default_str();
}

void add_solver_options(CLI::App* cmd, SolverOptions& o) {
  cmd->add_option("--lambda", o.lambda, "weight of the fit term in H")->capture_default_str();
  cmd->add_option("--L,--inner-iterations", o.inner_iterations, "descent steps per sigma stage")
      ->capture_default_str();
  cmd->add_option("--mu0", o.mu0, "initial step size")->capture_default_str();
  cmd->add_option("--sigma-min", o.sigma_min, "last sigma of the schedule")->capture_default_str();
  cmd->add_option("--decay", o.decay, "sigma decay factor per stage")->capture_default_str();
  cmd->add_flag("--reset-mu-per-stage", o.reset_mu_per_stage, "restart mu at mu0 for every sigma");
  cmd->add_flag("--reject-uphill", o.reject_uphill, "skip steps that increase H");
  cmd->add_option("--theta-step-scale", o.theta_step_scale, "theta step multiplier (0 = 1/n^2)")
      ->capture_default_str();
  cmd->add_option("--init-sigma-scale", o.init_sigma_scale, "shift scan sigma as a fraction of sigma_1")
      ->capture_default_str();
}

void add_trial_options(CLI::App* cmd, TrialOptions& o) {
  cmd->add_option("--trials", o.trials, "number of trials")->capture_default_str();
  cmd->add_option("--success-shift-tol", o.success_shift_tol, "max shift error (samples) for success")
      ->capture_default_str();
  cmd->add_option("--success-snr-floor", o.success_snr_floor, "optional SNR floor (dB) for success");
  cmd->add_option("--threads", o.threads, "worker threads (0 = SHIFTSPARSE_THREADS or all cores)")
      ->capture_default_str();
}

json solver_json(const SolverConfig& c, Eigen::Index n) {
  return {{"lambda", c.lambda},
          {"inner_iterations", c.inner_iterations},
          {"mu0", c.mu0},
          {"sigma_min", c.schedule.sigma_min},
          {"decay", c.schedule.decay},
          {"reset_mu_per_stage", c.reset_mu_per_stage},
          {"reject_uphill", c.reject_uphill},
          {"theta_step_scale", c.theta_scale(n)},
          {"init_sigma_scale", c.init_sigma_scale}};
}

json model_json(const ModelOptions& o) {
  return {{"n", o.n}, {"m", o.m}, {"p", o.p}, {"sigma_on", o.sigma_on}, {"sigma_off", o.sigma_off},
          {"sigma_noise", o.sigma_noise}, {"seed", o.seed}};
}

TrialConfig trial_config(const ModelOptions& mo, const SolverOptions& so, const TrialOptions& to) {
  TrialConfig c;
  c.n = mo.n;
  c.m = mo.m;
  c.model = mo.model();
  c.sigma_noise = mo.sigma_noise;
  c.solver = so.config();
  c.trials = to.trials;
  c.base_seed = mo.seed;
  c.success_shift_tol = to.success_shift_tol;
  c.success_snr_floor = to.success_snr_floor;
  return c;
}

json trial_json(const TrialConfig& c) {
  json j = {{"n", c.n},
            {"m", c.m},
            {"p", c.model.p},
            {"sigma_on", c.model.sigma_on},
            {"sigma_off", c.model.sigma_off},
            {"sigma_noise", c.sigma_noise},
            {"trials", c.trials},
            {"base_seed", c.base_seed},
            {"success_shift_tol", c.success_shift_tol},
            {"success_snr_floor", c.success_snr_floor ? json(*c.success_snr_floor) : json(nullptr)},
            {"snr_cap_db", c.snr_cap_db}};
  j["solver"] = solver_json(c.solver, c.n);
  return j;
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

// Collects outputs in memory and commits them (plus a manifest) only when
// the command has finished, so a failing command leaves no partial files.
class OutputSet {
 public:
  OutputSet(std::string command, std::vector<std::string> argv, fs::path dir)
      : command_(std::move(command)), argv_(std::move(argv)), dir_(std::move(dir)),
        start_(std::chrono::system_clock::now()) {}

  void add(const std::string& name, std::string contents) { files_.emplace_back(name, std::move(contents)); }

  void commit(const json& config, const json& seeds) {
    fs::create_directories(dir_);
    json outputs = json::array();
    for (const auto& [name, contents] : files_) {
      io::write_file_atomic(dir_ / name, contents);
      outputs.push_back((dir_ / name).string());
    }
    json manifest = {{"command", command_},
                     {"argv", argv_},
                     {"config", config},
                     {"seeds", seeds},
                     {"version", kVersion},
                     {"start_time", utc_timestamp(start_)},
                     {"end_time", utc_timestamp(std::chrono::system_clock::now())},
                     {"outputs", outputs}};
    io::write_file_atomic(dir_ / (command_ + ".manifest.json"), manifest.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  fs::path dir_;
  std::chrono::system_clock::time_point start_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string fixed(double v, int digits = 3) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
  ModelOptions model;
  std::optional<long long> k;
  bool random_shift = false;
  std::string out_dir = ".";
};

int cmd_synth(const SynthOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  if (o.k.has_value() == o.random_shift) throw InvalidArgument("give exactly one of --k and --random-shift");
  if (o.k && (*o.k < 0 || *o.k >= o.model.n)) throw InvalidArgument("--k must lie in [0, n)");
  const SyntheticInstance inst =
      generate_instance(o.model.n, o.model.m, o.model.model(), o.model.sigma_noise, o.k, o.model.seed);

  OutputSet files("synth", argv, o.out_dir);
  std::ostringstream dict_csv;
  io::write_dictionary_csv(dict_csv, inst.dictionary);
  files.add("dictionary.csv", dict_csv.str());
  files.add("instance.json", io::instance_to_json(io::to_record(inst)).dump(2) + "\n");
  json config = model_json(o.model);
  config["k"] = o.k ? json(*o.k) : json(nullptr);
  config["random_shift"] = o.random_shift;
  files.commit(config, {{"seed", o.model.seed}});

  const auto active = (inst.alpha_true.array().abs() > 3.0 * o.model.sigma_off).count();
  out << "synth: n=" << inst.n() << " m=" << inst.m() << " k_true=" << inst.k_true << " active~" << active
      << " -> " << (fs::path(o.out_dir) / "instance.json").string() << "\n";
  return kOk;
}

// ------------------------------------------------------------ decompose

struct DecomposeOptions {
  std::string dictionary;
  std::string instance;
  std::string signal;
  SolverOptions solver;
  std::string out_dir = ".";
  std::size_t top = 5;
};

int cmd_decompose(const DecomposeOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  if (o.instance.empty() == o.signal.empty()) throw InvalidArgument("give exactly one of --instance and --signal");
  std::istringstream dict_in(io::read_file(o.dictionary));
  const Dictionary dict = io::read_dictionary_csv(dict_in, {.require_overcomplete = false});

  std::optional<io::InstanceRecord> record;
  Signal x;
  if (!o.instance.empty()) {
    record = io::instance_from_json(json::parse(io::read_file(o.instance)));
    x = record->observed;
  } else {
    std::istringstream sig_in(io::read_file(o.signal));
    x = io::read_signal_csv(sig_in);
  }
  if (x.size() != dict.n())
    throw DimensionError("signal has " + std::to_string(x.size()) + " samples but the dictionary has " +
                         std::to_string(dict.n()) + " rows");
  if (record && record->m != dict.m()) throw DimensionError("instance m disagrees with the dictionary");

  const SolverConfig config = o.solver.config();
  const DecompositionResult res = solve(dict, x, config);

  OutputSet files("decompose", argv, o.out_dir);
  files.add("result.json", io::result_to_json(res).dump(2) + "\n");
  json cfg = solver_json(config, dict.n());
  cfg["dictionary"] = o.dictionary;
  cfg["instance"] = o.instance;
  cfg["signal"] = o.signal;
  files.commit(cfg, json::object());

  out << "k_hat = " << fixed(res.k_hat, 4) << "  (theta_hat = " << fixed(res.theta_hat.radians(), 6)
      << ", init shift " << res.init_shift << ", " << res.stage_count << " stages)\n";
  if (record) {
    out << "k_true = " << record->k_true
        << "  shift error = " << fixed(shift_error(res.k_hat, static_cast<double>(record->k_true), dict.n()), 4);
    if (record->alpha_true.squaredNorm() > 0.0) out << "  SNR = " << fixed(snr_db(record->alpha_true, res.alpha_hat), 2) << " dB";
    out << "\n";
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(res.alpha_hat.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(res.alpha_hat[a]) > std::abs(res.alpha_hat[b]);
  });
  out << "top coefficients:";
  for (std::size_t i = 0; i < std::min(o.top, order.size()); ++i)
    out << "  [" << order[i] << "] " << fixed(res.alpha_hat[order[i]], 4);
  out << "\n";
  return kOk;
}

// ---------------------------------------------------------------- bench

struct BenchOptions {
  ModelOptions model;
  SolverOptions solver;
  TrialOptions trials;
  std::string out_dir = ".";
  bool assert_thresholds = false;
  double min_success_rate = 0.95;
  double min_snr_db = 20.0;
};

int cmd_bench(const BenchOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  const TrialConfig config = trial_config(o.model, o.solver, o.trials);
  config.validate();
  const TrialReport report = run_trials(config, o.trials.threads);
  const TrialAggregate& a = report.aggregate;

  OutputSet files("bench", argv, o.out_dir);
  std::ostringstream csv;
  io::write_trials_csv(csv, report.rows);
  files.add("trials.csv", csv.str());
  files.add("aggregate.json", io::aggregate_to_json(a).dump(2) + "\n");
  files.commit(trial_json(config), {{"base_seed", config.base_seed}, {"trials", config.trials}});

  out << "trials=" << a.trials << " successes=" << a.successes << " success_rate=" << fixed(a.success_rate, 4)
      << " mean_snr_db_success=" << fixed(a.mean_snr_db_success, 2) << " mean_snr_db_all=" << fixed(a.mean_snr_db_all, 2)
      << " failures=" << a.failures << "\n";
  if (o.assert_thresholds) {
    const bool ok = a.success_rate >= o.min_success_rate && a.mean_snr_db_success >= o.min_snr_db;
    out << (ok ? "PASS" : "FAIL") << ": success_rate >= " << o.min_success_rate << " and mean_snr_db_success >= "
        << o.min_snr_db << "\n";
    if (!ok) return kThresholdFailure;
  }
  return kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepOptions {
  ModelOptions model;
  SolverOptions solver;
  TrialOptions trials = [] {
    TrialOptions t;
    t.trials = 100;
    return t;
  }();
  std::string lambdas = "0.3:0.9:0.1";
  std::string out_dir = ".";
};

int cmd_sweep(const SweepOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  const std::vector<double> lambdas = parse_lambda_list(o.lambdas);
  TrialConfig base = trial_config(o.model, o.solver, o.trials);
  base.validate();
  const SweepResult sweep = lambda_sweep(base, lambdas, o.trials.trials, o.trials.threads);

  OutputSet files("sweep", argv, o.out_dir);
  std::ostringstream csv;
  io::write_sweep_csv(csv, sweep);
  files.add("sweep.csv", csv.str());
  json cfg = trial_json(base);
  cfg["lambdas"] = lambdas;
  files.commit(cfg, {{"base_seed", base.base_seed}, {"trials_per_lambda", o.trials.trials}});

  out << "lambda  mean_snr_db_success  mean_snr_db_all  success_rate\n";
  for (const auto& r : sweep.rows)
    out << fixed(r.lambda, 3) << "  " << fixed(r.mean_snr_db_success, 2) << "  " << fixed(r.mean_snr_db_all, 2) << "  "
        << fixed(r.success_rate, 3) << "\n";
  return kOk;
}

// ------------------------------------------------------------- baseline

struct BaselineOptions {
  ModelOptions model;
  SolverOptions solver;
  std::size_t trials = 20;
  bool single_atom = false;
  int inner_steps = 100;
  std::string out_dir = ".";
};

Eigen::Index dominant_atom(const CoefficientVector& alpha) {
  Eigen::Index idx = 0;
  alpha.cwiseAbs().maxCoeff(&idx);
  return idx;
}

int cmd_baseline(const BaselineOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  const SolverConfig config = o.solver.config();
  config.validate();
  detail::require(o.trials >= 1, "--trials must be >= 1");

  std::ostringstream csv;
  csv << "trial,seed,k_true,solve_k_hat,baseline_k_hat,solve_atom,baseline_atom,agree,solve_snr_db,baseline_snr_db\n";
  std::size_t agreements = 0;
  Eigen::Index expanded_atoms = 0;
  for (std::size_t t = 0; t < o.trials; ++t) {
    const std::uint64_t seed = o.model.seed + t;
    const SyntheticInstance inst =
        o.single_atom ? generate_single_atom_instance(o.model.n, o.model.m, seed)
                      : generate_instance(o.model.n, o.model.m, o.model.model(), o.model.sigma_noise, std::nullopt, seed);
    const DecompositionResult res = solve(inst.dictionary, inst.observed, config);
    const BaselineResult base = baseline_expanded(inst.dictionary, inst.observed, config.schedule, o.inner_steps);
    expanded_atoms = base.expanded_atoms;

    const auto n = static_cast<long long>(inst.n());
    const long long solve_k = static_cast<long long>(std::llround(res.k_hat)) % n;
    const Eigen::Index solve_atom = dominant_atom(res.alpha_hat);
    const Eigen::Index base_atom = dominant_atom(base.alpha_hat);
    const bool agree = solve_k == base.k_hat && solve_atom == base_atom;
    agreements += agree ? 1 : 0;
    csv << t << ',' << seed << ',' << inst.k_true << ',' << io::format_double(res.k_hat) << ',' << base.k_hat << ','
        << solve_atom << ',' << base_atom << ',' << (agree ? 1 : 0) << ','
        << io::format_double(snr_db(inst.alpha_true, res.alpha_hat)) << ','
        << io::format_double(snr_db(inst.alpha_true, base.alpha_hat)) << '\n';
  }

  const double rate = static_cast<double>(agreements) / static_cast<double>(o.trials);
  json summary = {{"trials", o.trials},
                  {"agreements", agreements},
                  {"agreement_rate", rate},
                  {"expanded_atoms", expanded_atoms},
                  {"size_ratio", static_cast<double>(expanded_atoms) / static_cast<double>(o.model.m)}};
  OutputSet files("baseline", argv, o.out_dir);
  files.add("baseline.csv", csv.str());
  files.add("baseline.json", summary.dump(2) + "\n");
  json cfg = model_json(o.model);
  cfg["solver"] = solver_json(config, o.model.n);
  cfg["trials"] = o.trials;
  cfg["single_atom"] = o.single_atom;
  cfg["inner_steps"] = o.inner_steps;
  files.commit(cfg, {{"base_seed", o.model.seed}});

  out << "agreement " << agreements << "/" << o.trials << " (" << fixed(rate, 3) << "), expanded dictionary has "
      << expanded_atoms << " atoms (" << fixed(summary["size_ratio"].get<double>(), 1) << "x)\n";
  return kOk;
}

// ------------------------------------------------------------ gradcheck

struct GradCheckOptions {
  long long n = 8;
  long long m = 16;
  std::size_t points = 100;
  std::uint64_t seed = 1;
  double h = 1e-6;
  double tol = 1e-5;
  std::string out_dir;
};

int cmd_gradcheck(const GradCheckOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  detail::require(o.points >= 1, "--points must be >= 1");
  detail::require(o.h > 0.0, "--h must be positive");
  const GradCheckReport report = gradient_check(o.n, o.m, o.points, o.seed, o.h);
  const bool ok = report.max_rel_error() < o.tol;

  if (!o.out_dir.empty()) {
    json points = json::array();
    for (const auto& p : report.points)
      points.push_back({{"lambda", p.lambda}, {"sigma", p.sigma}, {"theta", p.theta},
                        {"alpha_rel_error", p.alpha_rel_error}, {"theta_rel_error", p.theta_rel_error}});
    json doc = {{"max_alpha_rel_error", report.max_alpha_rel_error},
                {"max_theta_rel_error", report.max_theta_rel_error},
                {"tolerance", o.tol},
                {"pass", ok},
                {"points", points}};
    OutputSet files("gradcheck", argv, o.out_dir);
    files.add("gradcheck.json", doc.dump(2) + "\n");
    files.commit({{"n", o.n}, {"m", o.m}, {"points", o.points}, {"h", o.h}, {"tol", o.tol}}, {{"seed", o.seed}});
  }

  out << "points=" << o.points << " max_alpha_rel_error=" << io::format_double(report.max_alpha_rel_error)
      << " max_theta_rel_error=" << io::format_double(report.max_theta_rel_error) << " -> " << (ok ? "PASS" : "FAIL")
      << "\n";
  return ok ? kOk : kThresholdFailure;
}

}  // namespace

std::vector<double> parse_lambda_list(const std::string& text) {
  std::vector<double> values;
  auto parse = [](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("bad lambda value '" + s + "'");
    }
    if (used != s.size()) throw InvalidArgument("bad lambda value '" + s + "'");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw InvalidArgument("lambda range must be start:stop:step");
    const double start = parse(parts[0]), stop = parse(parts[1]), step = parse(parts[2]);
    if (!(step > 0.0) || stop < start) throw InvalidArgument("lambda range needs step > 0 and stop >= start");
    const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long long i = 0; i < count; ++i) values.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');)
      if (!p.empty()) values.push_back(parse(p));
  }
  if (values.empty()) throw InvalidArgument("no lambda values given");
  return values;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint shift and sparse-coefficient estimation over an overcomplete dictionary", "shiftsparse"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a random dictionary and shifted sparse instance");
  add_model_options(synth_cmd, synth.model);
  synth_cmd->add_option("--k", synth.k, "circular shift in samples");
  synth_cmd->add_flag("--random-shift", synth.random_shift, "draw the shift uniformly from [0, n)");
  synth_cmd->add_option("--out-dir", synth.out_dir, "output directory")->capture_default_str();

  DecomposeOptions decompose;
  auto* decompose_cmd = app.add_subcommand("decompose", "estimate shift and coefficients of a signal");
  decompose_cmd->add_option("--dictionary", decompose.dictionary, "dictionary CSV")->required()->check(CLI::ExistingFile);
  decompose_cmd->add_option("--instance", decompose.instance, "instance JSON")->check(CLI::ExistingFile);
  decompose_cmd->add_option("--signal", decompose.signal, "signal CSV")->check(CLI::ExistingFile);
  add_solver_options(decompose_cmd, decompose.solver);
  decompose_cmd->add_option("--top", decompose.top, "coefficients to print")->capture_default_str();
  decompose_cmd->add_option("--out-dir", decompose.out_dir, "output directory")->capture_default_str();

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Monte-Carlo success rate and SNR");
  add_model_options(bench_cmd, bench.model);
  add_solver_options(bench_cmd, bench.solver);
  add_trial_options(bench_cmd, bench.trials);
  bench_cmd->add_option("--out-dir", bench.out_dir, "output directory")->capture_default_str();
  bench_cmd->add_flag("--assert", bench.assert_thresholds, "exit 3 when thresholds are missed");
  bench_cmd->add_option("--min-success-rate", bench.min_success_rate)->capture_default_str();
  bench_cmd->add_option("--min-snr-db", bench.min_snr_db, "threshold on mean SNR over successes")
      ->capture_default_str();

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "mean SNR versus lambda on paired instances");
  add_model_options(sweep_cmd, sweep.model);
  add_solver_options(sweep_cmd, sweep.solver);
  add_trial_options(sweep_cmd, sweep.trials);
  sweep_cmd->add_option("--lambdas", sweep.lambdas, "start:stop:step or comma list")->capture_default_str();
  sweep_cmd->add_option("--out-dir", sweep.out_dir, "output directory")->capture_default_str();

  BaselineOptions baseline;
  auto* baseline_cmd = app.add_subcommand("baseline", "compare against smoothed-l0 over all shifted atoms");
  add_model_options(baseline_cmd, baseline.model);
  add_solver_options(baseline_cmd, baseline.solver);
  baseline_cmd->add_option("--trials", baseline.trials, "number of instances")->capture_default_str();
  baseline_cmd->add_flag("--single-atom", baseline.single_atom, "noiseless single-atom instances");
  baseline_cmd->add_option("--inner-steps", baseline.inner_steps, "smoothed-l0 steps per sigma")->capture_default_str();
  baseline_cmd->add_option("--out-dir", baseline.out_dir, "output directory")->capture_default_str();

  GradCheckOptions gradcheck;
  auto* gradcheck_cmd = app.add_subcommand("gradcheck", "finite-difference check of the analytic gradients");
  gradcheck_cmd->add_option("--n", gradcheck.n)->capture_default_str();
  gradcheck_cmd->add_option("--m", gradcheck.m)->capture_default_str();
  gradcheck_cmd->add_option("--points", gradcheck.points)->capture_default_str();
  gradcheck_cmd->add_option("--seed", gradcheck.seed)->capture_default_str();
  gradcheck_cmd->add_option("--fd-step", gradcheck.h, "central-difference step")->capture_default_str();
  gradcheck_cmd->add_option("--tol", gradcheck.tol, "max relative error")->capture_default_str();
  gradcheck_cmd->add_option("--out-dir", gradcheck.out_dir, "write gradcheck.json here");

  std::vector<std::string> argv_storage{"shiftsparse"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth, args, out);
    if (decompose_cmd->parsed()) return cmd_decompose(decompose, args, out);
    if (bench_cmd->parsed()) return cmd_bench(bench, args, out);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep, args, out);
    if (baseline_cmd->parsed()) return cmd_baseline(baseline, args, out);
    if (gradcheck_cmd->parsed()) return cmd_gradcheck(gradcheck, args, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const io::FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kConfigError;
}

}  // namespace shiftsparse::cli
