#pragma once

#include <atomic>
#include <bit>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qcs/analysis.hpp"
#include "qcs/common.hpp"
#include "qcs/models.hpp"
#include "qcs/pbp.hpp"
#include "qcs/quantize.hpp"
#include "qcs/rng.hpp"
#include "qcs/sensing.hpp"

namespace qcs {

enum class ExperimentKind { SparseVsM, LowRankVsM, NoDitherVsM, DeltaSweep, Custom };

inline std::string_view to_token(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::SparseVsM: return "sparse-vs-m";
    case ExperimentKind::LowRankVsM: return "lowrank-vs-m";
    case ExperimentKind::NoDitherVsM: return "nodither-vs-m";
    case ExperimentKind::DeltaSweep: return "delta-sweep";
    case ExperimentKind::Custom: return "custom";
  }
  return "?";
}

inline ExperimentKind experiment_from_token(std::string_view token) {
  for (ExperimentKind k : {ExperimentKind::SparseVsM, ExperimentKind::LowRankVsM,
                           ExperimentKind::NoDitherVsM, ExperimentKind::DeltaSweep,
                           ExperimentKind::Custom})
    if (token == to_token(k)) return k;
  throw std::invalid_argument("unknown experiment '" + std::string(token) +
                              "' (expected sparse-vs-m, lowrank-vs-m, nodither-vs-m, "
                              "delta-sweep or custom)");
}

inline constexpr std::uint64_t kDefaultMasterSeed = 1;

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Custom;
  std::string matrix = "gaussian";  // gaussian | partial-dct | bernoulli
  std::string model = "sparse";     // sparse | lowrank
  Index n = 512;                    // sparse ambient dimension
  Index n1 = 0, n2 = 0;             // low-rank shape (ambient dimension is n1 * n2)
  Index k = 4;
  Index r = 2;
  std::vector<Index> m_grid;        // explicit grid; wins over the range below
  Index m_min = 0, m_max = 0;
  int m_points = 0;
  bool m_log = true;
  std::vector<double> deltas;
  bool dither = true;
  int trials = 100;
  std::uint64_t master_seed = kDefaultMasterSeed;
  std::optional<double> fit_min_m;  // smallest m included in decay fits
  bool fixed_matrix = false;        // reuse trial 0's operator and dither across trials
};

inline SignalModel signal_model(const ExperimentConfig& cfg) {
  if (cfg.model == "sparse") return SparseModel{cfg.n, cfg.k};
  if (cfg.model == "lowrank") return LowRankModel{cfg.n1, cfg.n2, cfg.r};
  throw std::invalid_argument("unknown model '" + cfg.model + "' (expected sparse or lowrank)");
}

/// Log- or linearly-spaced integer grid, rounded and deduplicated.
inline std::vector<Index> spaced_grid(Index lo, Index hi, int points, bool log_spaced) {
  detail::require(lo >= 1 && hi >= lo, "m grid: need 1 <= m_min <= m_max");
  detail::require(points >= 1, "m grid: need at least one point");
  std::vector<Index> grid;
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    const double v = log_spaced
                         ? std::exp(std::log(static_cast<double>(lo)) +
                                    t * (std::log(static_cast<double>(hi)) -
                                         std::log(static_cast<double>(lo))))
                         : static_cast<double>(lo) + t * static_cast<double>(hi - lo);
    grid.push_back(static_cast<Index>(std::llround(v)));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

inline std::vector<Index> resolve_m_grid(const ExperimentConfig& cfg) {
  if (!cfg.m_grid.empty()) {
    std::vector<Index> grid = cfg.m_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
  }
  detail::require(cfg.m_points >= 1 && cfg.m_min >= 1 && cfg.m_max >= cfg.m_min,
                  "experiment config: either m_grid or m_min/m_max/m_points must be set");
  return spaced_grid(cfg.m_min, cfg.m_max, cfg.m_points, cfg.m_log);
}

inline void validate(const ExperimentConfig& cfg) {
  detail::require(cfg.matrix == "gaussian" || cfg.matrix == "partial-dct" ||
                      cfg.matrix == "bernoulli",
                  "unknown matrix '" + cfg.matrix +
                      "' (expected gaussian, partial-dct or bernoulli)");
  const SignalModel model = signal_model(cfg);
  validate(model);
  const Index n = ambient_dim(model);
  const std::vector<Index> grid = resolve_m_grid(cfg);
  detail::require(!grid.empty(), "experiment config: empty m grid");
  for (Index m : grid) {
    detail::require(m >= 1, "experiment config: m values must be positive");
    detail::require(m <= n, "experiment config: m=" + std::to_string(m) +
                                " exceeds the ambient dimension n=" + std::to_string(n));
  }
  detail::require(!cfg.deltas.empty(), "experiment config: at least one delta is required");
  for (double d : cfg.deltas)
    detail::require(d > 0.0, "experiment config: deltas must be positive, got " + format_double(d));
  detail::require(cfg.trials >= 1, "experiment config: trials must be positive");
}

/// Built-in experiment presets. Grids follow the defaults documented in the
/// README; the sparse grid starts at ceil(4 k ln(n/k)).
inline ExperimentConfig preset(std::string_view name) {
  ExperimentConfig cfg;
  if (name == "exp-a") {
    cfg.experiment = ExperimentKind::SparseVsM;
    cfg.matrix = "gaussian";
    cfg.model = "sparse";
    cfg.n = 512;
    cfg.k = 4;
    cfg.m_min = static_cast<Index>(std::ceil(
        4.0 * static_cast<double>(cfg.k) *
        std::log(static_cast<double>(cfg.n) / static_cast<double>(cfg.k))));
    cfg.m_max = cfg.n;
    cfg.m_points = 10;
    cfg.deltas = {0.5, 1.0, 2.0};
    cfg.dither = true;
    cfg.trials = 100;
  } else if (name == "exp-b") {
    cfg.experiment = ExperimentKind::LowRankVsM;
    cfg.matrix = "partial-dct";
    cfg.model = "lowrank";
    cfg.n1 = cfg.n2 = 64;
    cfg.r = 2;
    cfg.m_min = 256;  // n / 16
    cfg.m_max = 4096;
    cfg.m_points = 9;
    cfg.deltas = {0.5, 1.0, 2.0};
    cfg.dither = true;
    cfg.trials = 50;
  } else if (name == "exp-c") {
    cfg = preset("exp-a");
    cfg.experiment = ExperimentKind::NoDitherVsM;
    cfg.matrix = "partial-dct";
    cfg.dither = false;
  } else if (name == "exp-d") {
    cfg.experiment = ExperimentKind::DeltaSweep;
    cfg.matrix = "gaussian";
    cfg.model = "lowrank";
    cfg.n1 = cfg.n2 = 64;
    cfg.r = 2;
    cfg.m_grid = {2048};  // n / 2
    cfg.deltas = {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
    cfg.dither = true;
    cfg.trials = 50;
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) +
                                "' (expected exp-a, exp-b, exp-c or exp-d)");
  }
  // Decay fits: exp-a over the upper two-thirds of the grid, exp-c over the
  // largest half (plateau region); exp-b over the full grid.
  const std::vector<Index> grid = resolve_m_grid(cfg);
  if (name == "exp-a") cfg.fit_min_m = static_cast<double>(grid[grid.size() / 3]);
  if (name == "exp-c") cfg.fit_min_m = static_cast<double>(grid[grid.size() / 2]);
  return cfg;
}

// --- config files -----------------------------------------------------------

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1" || value == "yes") return true;
  if (value == "off" || value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("config key '" + key + "': expected a boolean, got '" + value + "'");
}

inline long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + value +
                                "'");
  }
}

inline double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': expected a number, got '" + value +
                                "'");
  }
}

inline std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string current;
  for (char c : value) {
    if (c == ',') {
      items.push_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  items.push_back(trim(current));
  return items;
}

}  // namespace detail

/// Parses a flat `key = value` config (UTF-8, '#' comments). Unknown keys are
/// an error; keys mirror the ExperimentConfig fields.
inline ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig cfg;
  cfg.deltas.clear();
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string stripped = detail::trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value', got '" + stripped + "'");
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));
    if (key == "experiment") {
      cfg.experiment = experiment_from_token(value);
    } else if (key == "matrix") {
      cfg.matrix = value;
    } else if (key == "model") {
      cfg.model = value;
    } else if (key == "n") {
      cfg.n = detail::parse_int(key, value);
    } else if (key == "n1") {
      cfg.n1 = detail::parse_int(key, value);
    } else if (key == "n2") {
      cfg.n2 = detail::parse_int(key, value);
    } else if (key == "k") {
      cfg.k = detail::parse_int(key, value);
    } else if (key == "r") {
      cfg.r = detail::parse_int(key, value);
    } else if (key == "m_grid") {
      cfg.m_grid.clear();
      for (const std::string& item : detail::split_list(value))
        cfg.m_grid.push_back(detail::parse_int(key, item));
    } else if (key == "m_min") {
      cfg.m_min = detail::parse_int(key, value);
    } else if (key == "m_max") {
      cfg.m_max = detail::parse_int(key, value);
    } else if (key == "m_points") {
      cfg.m_points = static_cast<int>(detail::parse_int(key, value));
    } else if (key == "m_log") {
      cfg.m_log = detail::parse_bool(key, value);
    } else if (key == "deltas") {
      cfg.deltas.clear();
      for (const std::string& item : detail::split_list(value))
        cfg.deltas.push_back(detail::parse_real(key, item));
    } else if (key == "dither") {
      cfg.dither = detail::parse_bool(key, value);
    } else if (key == "trials") {
      cfg.trials = static_cast<int>(detail::parse_int(key, value));
    } else if (key == "seed") {
      cfg.master_seed = static_cast<std::uint64_t>(detail::parse_int(key, value));
    } else if (key == "fit_min_m") {
      cfg.fit_min_m = detail::parse_real(key, value);
    } else if (key == "fixed_matrix") {
      cfg.fixed_matrix = detail::parse_bool(key, value);
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" +
                                  key + "'");
    }
  }
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

// --- seeds ------------------------------------------------------------------

/// Derived trial seed: seed_chain(master, fnv1a64(experiment token), m,
/// bit pattern of delta, dither flag, trial index). Pure in its inputs; any
/// reimplementation must reproduce it bit-exactly.
inline std::uint64_t derive_trial_seed(std::uint64_t master, std::string_view experiment, Index m,
                                       double delta, bool dither, int trial) {
  return seed_chain(master, fnv1a64(experiment), static_cast<std::uint64_t>(m),
                    std::bit_cast<std::uint64_t>(delta), dither ? 1ull : 0ull,
                    static_cast<std::uint64_t>(trial));
}

// Per-trial substreams hang off the derived seed with fixed tags.
inline constexpr std::uint64_t kOperatorStream = 1;
inline constexpr std::uint64_t kSignalStream = 2;
inline constexpr std::uint64_t kDitherStream = 3;

// --- experiment runner ------------------------------------------------------

struct RunOptions {
  std::filesystem::path out_dir = ".";
  bool timestamp = true;
  int jobs = 1;
  bool write_csv = true;
  std::optional<std::string> csv_name;  // default: "<experiment token>.csv"
};

struct RunResult {
  SweepResult sweep;
  std::vector<TrialRecord> records;
  std::filesystem::path csv_path;  // empty when write_csv is off
  // Deterministic per-trial inequality checks (counts over all trials):
  // sparse trials verify ||x - xhat|| <= 2 ||x - a_T||; all trials verify
  // projector optimality ||xhat - a|| <= ||x - a||.
  long triangle_checks = 0;
  long triangle_failures = 0;
  long optimality_checks = 0;
  long optimality_failures = 0;
};

inline constexpr char kCsvHeader[] = "experiment,matrix,model,n,k_or_r,m,delta,dither,trial,seed,error";

inline void write_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path,
                      bool timestamp) {
  std::string body;
  if (timestamp) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    body += std::string("# generated ") + buf + "\n";
  }
  body += kCsvHeader;
  body += '\n';
  for (const TrialRecord& r : records) {
    body += r.experiment + ',' + r.matrix + ',' + r.model + ',' + std::to_string(r.n) + ',' +
            std::to_string(r.k_or_r) + ',' + std::to_string(r.m) + ',' + format_double(r.delta) +
            ',' + (r.dither ? "1" : "0") + ',' + std::to_string(r.trial) + ',' +
            std::to_string(r.seed) + ',' + format_double(r.error) + '\n';
  }
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << body;
    if (!f) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::vector<TrialRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open CSV file " + path.string());
  std::vector<TrialRecord> records;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      detail::require(line == kCsvHeader, "unexpected CSV header in " + path.string());
      header_seen = true;
      continue;
    }
    const std::vector<std::string> f = detail::split_list(line);
    detail::require(f.size() == 11, "malformed CSV row: '" + line + "'");
    TrialRecord r;
    r.experiment = f[0];
    r.matrix = f[1];
    r.model = f[2];
    r.n = detail::parse_int("n", f[3]);
    r.k_or_r = detail::parse_int("k_or_r", f[4]);
    r.m = detail::parse_int("m", f[5]);
    r.delta = detail::parse_real("delta", f[6]);
    r.dither = detail::parse_bool("dither", f[7]);
    r.trial = static_cast<int>(detail::parse_int("trial", f[8]));
    r.seed = static_cast<std::uint64_t>(std::stoull(f[9]));
    r.error = detail::parse_real("error", f[10]);
    records.push_back(std::move(r));
  }
  detail::require(header_seen, "CSV file " + path.string() + " has no header row");
  return records;
}

namespace detail {

inline SensingOperator build_operator(const std::string& matrix, Index m, Index n,
                                      std::uint64_t seed) {
  if (matrix == "gaussian") return SensingOperator::gaussian(m, n, seed);
  if (matrix == "partial-dct") return SensingOperator::partial_dct(m, n, seed);
  if (matrix == "bernoulli") return SensingOperator::bernoulli(m, n, seed);
  throw std::invalid_argument("unknown matrix '" + matrix + "'");
}

struct TrialTask {
  Index m = 0;
  double delta = 0.0;
  int trial = 0;
  std::uint64_t derived_seed = 0;
  std::uint64_t op_seed = 0;
  std::uint64_t dither_seed = 0;
};

struct TrialChecks {
  bool triangle_ok = true;  // sparse only
  bool triangle_applicable = false;
  bool optimality_ok = true;
};

// Runs one trial: build operator, generate signal, observe, reconstruct.
inline TrialChecks run_trial(const ExperimentConfig& cfg, const SignalModel& model,
                             const TrialTask& task, double& error_out) {
  const Index n = ambient_dim(model);
  SensingOperator op = build_operator(cfg.matrix, task.m, n, task.op_seed);
  const Signal x = generate(model, mix_seed(task.derived_seed, kSignalStream));
  QuantizedMap map(std::move(op), task.delta,
                   cfg.dither ? DitherMode::Uniform : DitherMode::None, task.dither_seed);
  const Vector y = map.observe(x.data);
  const Vector a = back_project(map.op(), y);
  const Signal xhat = project(model, a);
  const double err = reconstruction_error(x, xhat);
  error_out = err;

  TrialChecks checks;
  // Projector optimality: xhat is the model's nearest point to a, and x is
  // itself in the model, so ||xhat - a|| <= ||x - a|| up to roundoff.
  const double guard = 1e-10 * (1.0 + a.norm());
  checks.optimality_ok = (xhat.data - a).norm() <= (x.data - a).norm() + guard;
  if (std::holds_alternative<SparseModel>(model)) {
    // ||x - xhat|| <= 2 ||x - a_T|| with T the union of the two supports.
    checks.triangle_applicable = true;
    Vector a_t = Vector::Zero(n);
    for (Index i = 0; i < n; ++i)
      if (x.data[i] != 0.0 || xhat.data[i] != 0.0) a_t[i] = a[i];
    checks.triangle_ok = err <= 2.0 * (x.data - a_t).norm() + guard;
  }
  return checks;
}

}  // namespace detail

/// Runs every (m, delta, trial) grid point of the config: derive the trial
/// seed, realize Phi / x / xi from its substreams, observe, reconstruct and
/// record the error. Rows are sorted by (m, delta, dither, trial) before the
/// CSV is written, so output is identical for any worker count.
inline RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {}) {
  validate(cfg);
  const SignalModel model = signal_model(cfg);
  const std::vector<Index> grid = resolve_m_grid(cfg);
  const std::string exp_token{to_token(cfg.experiment)};

  std::vector<detail::TrialTask> tasks;
  tasks.reserve(grid.size() * cfg.deltas.size() * static_cast<std::size_t>(cfg.trials));
  for (Index m : grid)
    for (double delta : cfg.deltas)
      for (int trial = 0; trial < cfg.trials; ++trial) {
        detail::TrialTask t;
        t.m = m;
        t.delta = delta;
        t.trial = trial;
        t.derived_seed = derive_trial_seed(cfg.master_seed, exp_token, m, delta, cfg.dither, trial);
        // With a fixed matrix, the operator and dither substreams come from
        // trial 0 (uniform-guarantee regime: one Phi and xi, many signals).
        const std::uint64_t base =
            cfg.fixed_matrix ? derive_trial_seed(cfg.master_seed, exp_token, m, delta, cfg.dither, 0)
                             : t.derived_seed;
        t.op_seed = mix_seed(base, kOperatorStream);
        t.dither_seed = mix_seed(base, kDitherStream);
        tasks.push_back(t);
      }

  std::vector<double> errors(tasks.size(), 0.0);
  std::atomic<std::size_t> next{0};
  std::atomic<long> triangle_tally{0}, triangle_fail_tally{0}, opt_checks{0}, opt_failures{0};
  std::atomic<bool> failed{false};
  std::string failure_message;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size() || failed.load()) break;
      try {
        const detail::TrialChecks checks = detail::run_trial(cfg, model, tasks[i], errors[i]);
        opt_checks.fetch_add(1);
        if (!checks.optimality_ok) opt_failures.fetch_add(1);
        if (checks.triangle_applicable) {
          triangle_tally.fetch_add(1);
          if (!checks.triangle_ok) triangle_fail_tally.fetch_add(1);
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failure_message = e.what();
        failed.store(true);
      }
    }
  };

  const int jobs = std::max(1, opts.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw std::runtime_error("experiment trial failed: " + failure_message);

  RunResult result;
  result.records.reserve(tasks.size());
  const Index n = ambient_dim(model);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    TrialRecord r;
    r.experiment = exp_token;
    r.matrix = cfg.matrix;
    r.model = std::string(to_token(model));
    r.n = n;
    r.k_or_r = complexity_param(model);
    r.m = tasks[i].m;
    r.delta = tasks[i].delta;
    r.dither = cfg.dither;
    r.trial = tasks[i].trial;
    r.seed = tasks[i].derived_seed;
    r.error = errors[i];
    result.records.push_back(std::move(r));
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const TrialRecord& a, const TrialRecord& b) {
              return std::tie(a.m, a.delta, a.dither, a.trial) <
                     std::tie(b.m, b.delta, b.dither, b.trial);
            });
  result.triangle_checks = triangle_tally.load();
  result.triangle_failures = triangle_fail_tally.load();
  result.optimality_checks = opt_checks.load();
  result.optimality_failures = opt_failures.load();
  result.sweep = aggregate_trials(result.records, cfg.fit_min_m);

  if (opts.write_csv) {
    const std::string name = opts.csv_name.value_or(exp_token + ".csv");
    result.csv_path = opts.out_dir / name;
    std::filesystem::create_directories(opts.out_dir);
    write_csv(result.records, result.csv_path, opts.timestamp);
  }
  return result;
}

/// Human-readable summary block: one line per (delta, dither) series with the
/// fitted decay exponent and fit residual.
inline std::string format_summary(const ExperimentConfig& cfg, const RunResult& result) {
  std::string out;
  const SignalModel model = signal_model(cfg);
  out += "experiment " + std::string(to_token(cfg.experiment)) + ": matrix=" + cfg.matrix +
         " model=" + cfg.model + " n=" + std::to_string(ambient_dim(model)) +
         (cfg.model == "sparse" ? " k=" : " r=") + std::to_string(complexity_param(model)) +
         " trials=" + std::to_string(cfg.trials) + " seed=" + std::to_string(cfg.master_seed) +
         "\n";
  for (const SeriesFit& f : result.sweep.fits) {
    out += "  delta=" + format_double(f.delta) + (f.dither ? "" : " (no dither)") +
           ": exponent=" + format_double(f.fit.exponent) + " +/- " +
           format_double(f.fit.residual) + " over " + std::to_string(f.points_used) +
           " grid points\n";
  }
  if (result.sweep.fits.empty()) out += "  (no decay fit: fewer than two distinct m values)\n";
  if (result.triangle_checks > 0)
    out += "  pbp triangle bound: " + std::to_string(result.triangle_failures) + " / " +
           std::to_string(result.triangle_checks) + " failures\n";
  out += "  projector optimality: " + std::to_string(result.optimality_failures) + " / " +
         std::to_string(result.optimality_checks) + " failures\n";
  if (!result.csv_path.empty()) out += "  csv: " + result.csv_path.string() + "\n";
  return out;
}

}  // namespace qcs
