#pragma once

// File formats.
//
//   dictionary CSV   first line "<n>,<m>", then n rows of m comma-separated values
//   signal CSV       first line "<n>", then n rows of one value
//   instance JSON    {n, m, seed, p, sigma_on, sigma_off, sigma_noise, k_true,
//                     alpha_true[], observed[], noise[]}
//   result JSON      {alpha_hat[], theta_hat, k_hat, init_shift, stage_count,
//                     total_inner_steps, trace[{sigma, h, g, f, mu, uphill_steps}]}
//   trials CSV       trial,seed,k_true,k_hat,shift_error,snr_db,success,wall_time
//   sweep CSV        lambda,trials,mean_snr_db_success,mean_snr_db_all,success_rate
//
// CSV floats use 17 significant digits. JSON numbers are written by
// nlohmann::json, which emits the shortest representation that round-trips.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "shiftsparse/error.hpp"
#include "shiftsparse/eval.hpp"
#include "shiftsparse/model.hpp"
#include "shiftsparse/solver.hpp"

namespace shiftsparse::io {

using nlohmann::json;

class FormatError : public Error {
 public:
  using Error::Error;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline double parse_double(const std::string& text) {
  const char* first = text.data();
  const char* last = first + text.size();
  while (first < last && std::isspace(static_cast<unsigned char>(*first))) ++first;
  while (last > first && std::isspace(static_cast<unsigned char>(last[-1]))) --last;
  if (first < last && *first == '+') ++first;
  double v = 0.0;
  // from_chars keeps subnormals that stod would reject as out of range
  const auto [end, ec] = std::from_chars(first, last, v);
  if (ec == std::errc::invalid_argument || first == last) throw FormatError("not a number: '" + text + "'");
  if (end != last) throw FormatError("trailing characters in number: '" + text + "'");
  if (ec == std::errc::result_out_of_range) {
    // from_chars leaves v untouched here; strtod tells overflow from underflow
    v = std::strtod(std::string(first, last).c_str(), nullptr);
    if (std::isinf(v)) throw FormatError("number out of range: '" + text + "'");
  }
  return v;
}

inline long long parse_count(const std::string& text) {
  const double v = parse_double(text);
  if (v < 0 || v != static_cast<double>(static_cast<long long>(v))) throw FormatError("not a count: '" + text + "'");
  return static_cast<long long>(v);
}

inline std::string next_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(std::string("unexpected end of ") + what);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

template <typename Vec>
json to_array(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Eigen::VectorXd from_array(const json& a, const char* field) {
  if (!a.is_array()) throw FormatError(std::string("field '") + field + "' must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw FormatError(std::string("field '") + field + "' must hold numbers");
    v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  }
  return v;
}

}  // namespace detail

// ---- dictionary / signal CSV ----

inline void write_dictionary_csv(std::ostream& out, const Dictionary& dict) {
  out << dict.n() << ',' << dict.m() << '\n';
  for (Eigen::Index i = 0; i < dict.n(); ++i) {
    for (Eigen::Index j = 0; j < dict.m(); ++j) {
      if (j) out << ',';
      out << format_double(dict.atoms()(i, j));
    }
    out << '\n';
  }
}

inline Eigen::MatrixXd read_matrix_csv(std::istream& in) {
  const auto header = detail::split(detail::next_line(in, "dictionary header"), ',');
  if (header.size() != 2) throw FormatError("dictionary header must be '<n>,<m>'");
  const auto n = detail::parse_count(header[0]);
  const auto m = detail::parse_count(header[1]);
  Eigen::MatrixXd atoms(n, m);
  for (long long i = 0; i < n; ++i) {
    const auto cells = detail::split(detail::next_line(in, "dictionary rows"), ',');
    if (static_cast<long long>(cells.size()) != m)
      throw FormatError("dictionary row " + std::to_string(i) + " has " + std::to_string(cells.size()) +
                        " values, expected " + std::to_string(m));
    for (long long j = 0; j < m; ++j) atoms(i, j) = detail::parse_double(cells[static_cast<std::size_t>(j)]);
  }
  return atoms;
}

inline Dictionary read_dictionary_csv(std::istream& in, DictionaryOptions options = {}) {
  return Dictionary(read_matrix_csv(in), options);
}

inline void write_signal_csv(std::ostream& out, const Signal& s) {
  out << s.size() << '\n';
  for (Eigen::Index i = 0; i < s.size(); ++i) out << format_double(s[i]) << '\n';
}

inline Signal read_signal_csv(std::istream& in) {
  const auto n = detail::parse_count(detail::next_line(in, "signal header"));
  Signal s(n);
  for (long long i = 0; i < n; ++i) s[i] = detail::parse_double(detail::next_line(in, "signal samples"));
  return s;
}

// ---- instance JSON ----

// Instance fields except the dictionary, which travels as CSV.
struct InstanceRecord {
  long long n = 0;
  long long m = 0;
  std::uint64_t seed = 0;
  std::optional<BernoulliGaussianModel> model;
  double sigma_noise = 0.0;
  long long k_true = 0;
  CoefficientVector alpha_true;
  Signal observed;
  Signal noise;
};

inline InstanceRecord to_record(const SyntheticInstance& inst) {
  return {inst.n(), inst.m(), inst.seed, inst.model, inst.sigma_noise, inst.k_true,
          inst.alpha_true, inst.observed, inst.noise};
}

inline json instance_to_json(const InstanceRecord& r) {
  json j;
  j["n"] = r.n;
  j["m"] = r.m;
  j["seed"] = r.seed;
  j["p"] = r.model ? json(r.model->p) : json(nullptr);
  j["sigma_on"] = r.model ? json(r.model->sigma_on) : json(nullptr);
  j["sigma_off"] = r.model ? json(r.model->sigma_off) : json(nullptr);
  j["sigma_noise"] = r.sigma_noise;
  j["k_true"] = r.k_true;
  j["alpha_true"] = detail::to_array(r.alpha_true);
  j["observed"] = detail::to_array(r.observed);
  j["noise"] = detail::to_array(r.noise);
  return j;
}

inline InstanceRecord instance_from_json(const json& j) {
  try {
    InstanceRecord r;
    r.n = j.at("n").get<long long>();
    r.m = j.at("m").get<long long>();
    r.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("p") && !j["p"].is_null())
      r.model = BernoulliGaussianModel{j["p"].get<double>(), j.at("sigma_on").get<double>(),
                                       j.at("sigma_off").get<double>()};
    r.sigma_noise = j.value("sigma_noise", 0.0);
    r.k_true = j.value("k_true", 0LL);
    r.alpha_true = detail::from_array(j.at("alpha_true"), "alpha_true");
    r.observed = detail::from_array(j.at("observed"), "observed");
    r.noise = j.contains("noise") ? detail::from_array(j["noise"], "noise") : Signal::Zero(r.n);
    if (r.alpha_true.size() != r.m || r.observed.size() != r.n || r.noise.size() != r.n)
      throw FormatError("instance array lengths disagree with n, m");
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed instance JSON: ") + e.what());
  }
}

// ---- results ----

inline json result_to_json(const DecompositionResult& r) {
  json j;
  j["alpha_hat"] = detail::to_array(r.alpha_hat);
  j["theta_hat"] = r.theta_hat.radians();
  j["k_hat"] = r.k_hat;
  j["init_shift"] = r.init_shift;
  j["stage_count"] = r.stage_count;
  j["total_inner_steps"] = r.total_inner_steps;
  json trace = json::array();
  for (const auto& t : r.trace)
    trace.push_back({{"sigma", t.sigma}, {"h", t.h}, {"g", t.g}, {"f", t.f}, {"mu", t.mu},
                     {"uphill_steps", t.uphill_steps}});
  j["trace"] = std::move(trace);
  return j;
}

inline void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& rows) {
  out << "trial,seed,k_true,k_hat,shift_error,snr_db,success,wall_time\n";
  for (const auto& r : rows)
    out << r.trial << ',' << r.seed << ',' << r.k_true << ',' << format_double(r.k_hat) << ','
        << format_double(r.shift_error) << ',' << format_double(r.snr_db) << ',' << (r.success ? 1 : 0) << ','
        << format_double(r.wall_time) << '\n';
}

inline json aggregate_to_json(const TrialAggregate& a) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"trials", a.trials},
          {"successes", a.successes},
          {"failures", a.failures},
          {"success_rate", a.success_rate},
          {"mean_snr_db_success", num(a.mean_snr_db_success)},
          {"mean_snr_db_all", num(a.mean_snr_db_all)},
          {"mean_shift_error", num(a.mean_shift_error)},
          {"wall_time_total", a.wall_time_total},
          {"wall_time_p50", a.wall_time_p50},
          {"wall_time_p90", a.wall_time_p90},
          {"wall_time_max", a.wall_time_max}};
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "lambda,trials,mean_snr_db_success,mean_snr_db_all,success_rate\n";
  for (const auto& r : sweep.rows)
    out << format_double(r.lambda) << ',' << r.trials << ',' << format_double(r.mean_snr_db_success) << ','
        << format_double(r.mean_snr_db_all) << ',' << format_double(r.success_rate) << '\n';
}

// ---- files ----

// Writes via a temporary sibling and renames, so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace shiftsparse::io
