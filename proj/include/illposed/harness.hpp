#pragma once

// Convergence-study harness: JSON sweep configuration, per-cell execution of the four
// methods over (delta, seed) grids, and CSV reports.
//
// Config schema:
//   {
//     "problem": {"kind": "fredholm", "n": 64, "truth": "hat"},
//     "deltas": [1e-2, 1e-3],
//     "seeds": [0, 1, 2],
//     "methods": [
//       {"method": "tikhonov", "rule": "apriori:0.6666666666666666"},
//       {"method": "quasi", "radius": 1.0},
//       {"method": "landweber", "mu": 0.9, "stop": "discrepancy:1.5", "nmax": 100000},
//       {"method": "dsm", "schedule": "c0=1,c1=1,p=0.5", "stop": "root:0.5"}
//     ],
//     "output": "report.csv",
//     "threads": 1
//   }

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "illposed/dsm.hpp"
#include "illposed/error.hpp"
#include "illposed/landweber.hpp"
#include "illposed/linops.hpp"
#include "illposed/problems.hpp"
#include "illposed/quasisol.hpp"
#include "illposed/variational.hpp"

namespace illposed {

struct TikhonovMethod {
  AlphaRule rule = AprioriRule{};
};
struct QuasiMethod {
  double radius = 1.0;
};
struct LandweberMethod {
  double mu = kDefaultLandweberStep;
  std::string stop = "discrepancy:1.5";
  std::size_t nmax = kDefaultLandweberBudget;
};
struct DsmMethod {
  EpsilonSchedule schedule{};
  std::string stop = "root:0.5";
};
using MethodSpec = std::variant<TikhonovMethod, QuasiMethod, LandweberMethod, DsmMethod>;

inline std::string_view method_name(const MethodSpec& m) {
  constexpr std::string_view names[] = {"tikhonov", "quasi", "landweber", "dsm"};
  return names[m.index()];
}

struct SweepConfig {
  std::string problem = "fredholm";
  std::size_t n = 64;
  std::string truth = "hat";
  std::vector<double> deltas;
  std::vector<std::uint64_t> seeds;
  std::vector<MethodSpec> methods;
  std::string output;
  unsigned threads = 1;
};

struct ReportRow {
  std::string method;
  std::size_t n = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::string param_name;
  double param_value = 0.0;
  double residual = 0.0;
  double error = -1.0;  ///< -1 when the truth is unavailable
  double steps_or_time = 0.0;
  double wall_ms = 0.0;
  std::string status = "ok";
};

inline constexpr std::string_view kReportHeader =
    "method,n,delta,seed,param_name,param_value,residual,error,steps_or_time,wall_ms,status";

// ---------------------------------------------------------------------------------------
// config

namespace detail {

[[noreturn]] inline void config_fail(const std::string& what) { throw Error(Errc::config_error, what); }

template <class T>
T json_get(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) config_fail(where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    config_fail(where + ": bad '" + key + "': " + e.what());
  }
}

template <class T>
T json_get_or(const nlohmann::json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? json_get<T>(j, key, where) : fallback;
}

inline MethodSpec parse_method(const nlohmann::json& j, std::size_t index) {
  const std::string where = "methods[" + std::to_string(index) + "]";
  if (!j.is_object()) config_fail(where + ": expected an object");
  const auto name = json_get<std::string>(j, "method", where);
  try {
    if (name == "tikhonov") return TikhonovMethod{parse_alpha_rule(json_get_or<std::string>(j, "rule", "apriori", where))};
    if (name == "quasi") {
      QuasiMethod m{json_get<double>(j, "radius", where)};
      (void)BallCompactum(m.radius);
      return m;
    }
    if (name == "landweber") {
      LandweberMethod m;
      m.mu = json_get_or<double>(j, "mu", m.mu, where);
      m.stop = json_get_or<std::string>(j, "stop", m.stop, where);
      m.nmax = json_get_or<std::size_t>(j, "nmax", m.nmax, where);
      if (!(m.mu > 0.0)) config_fail(where + ": mu must be > 0");
      if (m.nmax < 1) config_fail(where + ": nmax must be >= 1");
      parse_landweber_stop(m.stop, Vector());
      return m;
    }
    if (name == "dsm") {
      DsmMethod m;
      m.schedule = parse_schedule(json_get_or<std::string>(j, "schedule", to_string(m.schedule), where));
      m.stop = json_get_or<std::string>(j, "stop", m.stop, where);
      parse_dsm_stop(m.stop);
      return m;
    }
  } catch (const Error& e) {
    if (e.code() == Errc::config_error) throw;
    config_fail(where + ": " + e.what());
  }
  config_fail(where + ": unknown method '" + name + "'");
}

inline nlohmann::json method_to_json(const MethodSpec& spec) {
  return std::visit(
      [](const auto& m) -> nlohmann::json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, TikhonovMethod>) return {{"method", "tikhonov"}, {"rule", to_string(m.rule)}};
        else if constexpr (std::is_same_v<T, QuasiMethod>) return {{"method", "quasi"}, {"radius", m.radius}};
        else if constexpr (std::is_same_v<T, LandweberMethod>)
          return {{"method", "landweber"}, {"mu", m.mu}, {"stop", m.stop}, {"nmax", m.nmax}};
        else return {{"method", "dsm"}, {"schedule", to_string(m.schedule)}, {"stop", m.stop}};
      },
      spec);
}

}  // namespace detail

/// Parses and validates a sweep configuration; every failure is a config-error.
inline SweepConfig parse_config(const nlohmann::json& j) {
  using detail::config_fail;
  if (!j.is_object()) config_fail("config must be a JSON object");
  SweepConfig c;
  if (j.contains("problem")) {
    const auto& p = j.at("problem");
    if (!p.is_object()) config_fail("problem: expected an object");
    c.problem = detail::json_get_or<std::string>(p, "kind", c.problem, "problem");
    c.n = detail::json_get_or<std::size_t>(p, "n", c.n, "problem");
    c.truth = detail::json_get_or<std::string>(p, "truth", c.truth, "problem");
  }
  if (c.problem != "differentiation" && c.problem != "fredholm")
    config_fail("problem: unknown kind '" + c.problem + "'");
  if (!is_truth_name(c.truth)) config_fail("problem: unknown truth '" + c.truth + "'");
  if (c.n < 1 || c.n > 512) config_fail("problem: n must lie in [1, 512]");

  c.deltas = detail::json_get<std::vector<double>>(j, "deltas", "config");
  if (c.deltas.empty()) config_fail("deltas: at least one noise level required");
  for (double d : c.deltas)
    if (!(d > 0.0)) config_fail("deltas: every delta must be > 0");
  c.seeds = detail::json_get_or<std::vector<std::uint64_t>>(j, "seeds", {0}, "config");
  if (c.seeds.empty()) config_fail("seeds: at least one seed required");

  if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty())
    config_fail("methods: at least one method required");
  for (std::size_t i = 0; i < j.at("methods").size(); ++i)
    c.methods.push_back(detail::parse_method(j.at("methods")[i], i));
  c.output = detail::json_get_or<std::string>(j, "output", "", "config");
  c.threads = detail::json_get_or<unsigned>(j, "threads", 1u, "config");
  if (c.threads < 1) config_fail("threads must be >= 1");
  return c;
}

inline SweepConfig parse_config_text(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::config_error, std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

inline nlohmann::json to_json(const SweepConfig& c) {
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& m : c.methods) methods.push_back(detail::method_to_json(m));
  return {{"problem", {{"kind", c.problem}, {"n", c.n}, {"truth", c.truth}}},
          {"deltas", c.deltas},
          {"seeds", c.seeds},
          {"methods", methods},
          {"output", c.output},
          {"threads", c.threads}};
}

/// Field-wise comparison; stop strings and rules are compared after parsing.
inline bool same_config(const SweepConfig& a, const SweepConfig& b) {
  if (a.problem != b.problem || a.n != b.n || a.truth != b.truth || a.deltas != b.deltas || a.seeds != b.seeds ||
      a.output != b.output || a.threads != b.threads || a.methods.size() != b.methods.size())
    return false;
  for (std::size_t i = 0; i < a.methods.size(); ++i) {
    if (detail::method_to_json(a.methods[i]) != detail::method_to_json(b.methods[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------------------
// execution

/// Everything produced by a single run; traces are filled for the iterative methods.
struct CellOutcome {
  ReportRow row;
  std::optional<Vector> u;
  std::optional<IterationTrace> landweber_trace;
  std::optional<DsmTrajectory> dsm_trajectory;
};

inline CellOutcome run_method(const Problem& problem, const NoisyData& data, double requested_delta,
                              const MethodSpec& spec) {
  CellOutcome out;
  ReportRow& row = out.row;
  row.method = std::string(method_name(spec));
  row.n = problem.size();
  row.delta = requested_delta;
  row.seed = data.seed();

  const auto& op = problem.op();
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&](const Vector& u) {
    row.residual = op.residual(u, data.f_delta());
    row.error = op.norm_h(u - problem.truth());
    out.u = u;
  };

  try {
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, TikhonovMethod>) {
            const auto r = tikhonov_regularize(op, data, m.rule);
            row.param_name = "alpha";
            row.param_value = r.alpha;
            row.steps_or_time = r.iterations;
            finish(r.u);
          } else if constexpr (std::is_same_v<T, QuasiMethod>) {
            const auto r = quasi_solution(op, problem.spectrum(), data.f_delta(), BallCompactum(m.radius));
            row.param_name = "lambda";
            row.param_value = r.lambda;
            row.steps_or_time = r.iterations;
            finish(r.u);
          } else if constexpr (std::is_same_v<T, LandweberMethod>) {
            const auto stop = parse_landweber_stop(m.stop, problem.truth());
            auto r = landweber_run(op, data, m.mu, m.nmax, stop, problem.truth());
            row.param_name = std::holds_alternative<OracleStop>(stop) ? "n_oracle" : "n";
            row.param_value = static_cast<double>(r.stop_index());
            row.steps_or_time = static_cast<double>(r.stop_index());
            if (r.budget_exhausted) row.status = std::string(to_string(Errc::budget_exhausted));
            finish(r.u);
            out.landweber_trace = std::move(r.trace);
          } else {
            DsmOptions options;
            options.truth = problem.truth();
            auto r = dsm_solve(op, data, m.schedule, parse_dsm_stop(m.stop), options);
            row.param_name = "epsilon";
            row.param_value = r.stop.epsilon;
            row.steps_or_time = r.stop.t;
            finish(r.u);
            out.dsm_trajectory = std::move(r.trajectory);
          }
        },
        spec);
  } catch (const Error& e) {
    row.status = std::string(to_string(e.code()));
    row.param_value = std::numeric_limits<double>::quiet_NaN();
    row.residual = std::numeric_limits<double>::quiet_NaN();
    row.error = -1.0;
    row.steps_or_time = std::numeric_limits<double>::quiet_NaN();
    out.u.reset();
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

inline Problem build_problem(const SweepConfig& config) {
  return make_problem(config.problem, config.n, config.truth);
}

/// One row per (method, delta, seed) in that nesting order. Cells are independent and may
/// run on config.threads workers; results are merged in config order.
inline std::vector<ReportRow> run_sweep(const SweepConfig& config) {
  if (config.methods.empty() || config.deltas.empty() || config.seeds.empty())
    throw Error(Errc::config_error, "sweep needs at least one method, delta and seed");
  const Problem problem = build_problem(config);

  struct Cell {
    const MethodSpec* method;
    double delta;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& m : config.methods)
    for (double d : config.deltas)
      for (auto s : config.seeds) cells.push_back({&m, d, s});

  std::vector<ReportRow> rows(cells.size());
  auto run_cell = [&](std::size_t i) {
    const Cell& c = cells[i];
    const NoisyData data = add_noise(problem, c.delta, c.seed);
    rows[i] = run_method(problem, data, c.delta, *c.method).row;
  };

  const unsigned workers = std::min<unsigned>(config.threads, static_cast<unsigned>(cells.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(i);
      });
  }
  return rows;
}

// ---------------------------------------------------------------------------------------
// CSV

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string format_row(const ReportRow& r) {
  std::string s;
  s += r.method + ',' + std::to_string(r.n) + ',' + format_number(r.delta) + ',' + std::to_string(r.seed) + ',';
  s += r.param_name + ',' + format_number(r.param_value) + ',' + format_number(r.residual) + ',';
  s += format_number(r.error) + ',' + format_number(r.steps_or_time) + ',' + format_number(r.wall_ms) + ',';
  s += r.status;
  return s;
}

inline void write_report(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << kReportHeader << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

inline void write_report(const std::vector<ReportRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot open '" + path + "' for writing");
  write_report(out, rows);
  out.flush();
  if (!out) throw Error(Errc::io_error, "write failed for '" + path + "'");
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace detail

inline ReportRow parse_row(const std::string& line) {
  const auto f = detail::split_csv_line(line);
  if (f.size() != 11) throw Error(Errc::io_error, "report row has " + std::to_string(f.size()) + " fields");
  ReportRow r;
  try {
    r.method = f[0];
    r.n = std::stoull(f[1]);
    r.delta = std::stod(f[2]);
    r.seed = std::stoull(f[3]);
    r.param_name = f[4];
    r.param_value = std::stod(f[5]);
    r.residual = std::stod(f[6]);
    r.error = std::stod(f[7]);
    r.steps_or_time = std::stod(f[8]);
    r.wall_ms = std::stod(f[9]);
    r.status = f[10];
  } catch (const std::exception&) {
    throw Error(Errc::io_error, "malformed report row '" + line + "'");
  }
  return r;
}

inline std::vector<ReportRow> read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader) throw Error(Errc::io_error, "bad report header in '" + path + "'");
  std::vector<ReportRow> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(parse_row(line));
  return rows;
}

/// Landweber trace CSV: n,residual,error (error = -1 without truth).
inline void write_trace(const IterationTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot open '" + path + "' for writing");
  out << "n,residual,error\n";
  for (std::size_t n = 0; n < trace.residual.size(); ++n)
    out << n << ',' << format_number(trace.residual[n]) << ','
        << format_number(n < trace.error.size() ? trace.error[n] : -1.0) << '\n';
  if (!out) throw Error(Errc::io_error, "write failed for '" + path + "'");
}

/// DSM trace CSV: t,epsilon,residual,error (error = -1 without truth).
inline void write_trace(const DsmTrajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot open '" + path + "' for writing");
  out << "t,epsilon,residual,error\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k)
    out << format_number(traj.times[k]) << ',' << format_number(traj.epsilon[k]) << ','
        << format_number(traj.residual[k]) << ',' << format_number(k < traj.error.size() ? traj.error[k] : -1.0)
        << '\n';
  if (!out) throw Error(Errc::io_error, "write failed for '" + path + "'");
}

}  // namespace illposed
