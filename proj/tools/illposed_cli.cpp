// illposed: command-line front end for the regularization library.
//
//   illposed solve --method tikhonov --rule morozov:1.5 --delta 1e-3
//   illposed sweep --config sweep.json --out report.csv
//   illposed diff --M 1 --deltas 1e-2,1e-3,1e-4
//   illposed laplace-demo --nmax 20
//   illposed selftest

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "illposed/illposed.hpp"
#include "illposed/selftest.hpp"

namespace {

using namespace illposed;

struct SolveArgs {
  std::string problem = "fredholm";
  std::size_t n = 64;
  std::string truth = "hat";
  double delta = 1e-3;
  std::uint64_t seed = 0;
  std::string method;
  std::string rule = "apriori";
  double radius = 1.0;
  double mu = kDefaultLandweberStep;
  std::optional<std::string> stop;
  std::size_t nmax = kDefaultLandweberBudget;
  std::string schedule = "c0=1,c1=1,p=0.5";
  std::string trace;
};

int run_solve(const SolveArgs& a) {
  MethodSpec spec;
  if (a.method == "tikhonov") {
    spec = TikhonovMethod{parse_alpha_rule(a.rule)};
  } else if (a.method == "quasi") {
    spec = QuasiMethod{a.radius};
  } else if (a.method == "landweber") {
    spec = LandweberMethod{a.mu, a.stop.value_or("discrepancy:1.5"), a.nmax};
  } else {
    spec = DsmMethod{parse_schedule(a.schedule), a.stop.value_or("root:0.5")};
  }
  const Problem problem = make_problem(a.problem, a.n, a.truth);
  const NoisyData data = add_noise(problem, a.delta, a.seed);
  const CellOutcome outcome = run_method(problem, data, a.delta, spec);
  if (!a.trace.empty()) {
    if (outcome.landweber_trace) write_trace(*outcome.landweber_trace, a.trace);
    else if (outcome.dsm_trajectory) write_trace(*outcome.dsm_trajectory, a.trace);
    else std::cerr << "note: --trace ignored for method " << a.method << '\n';
  }
  std::cout << kReportHeader << '\n' << format_row(outcome.row) << '\n';
  return outcome.row.status == "ok" ? 0 : 3;
}

int run_sweep_cmd(const std::string& config_path, const std::string& out_path, std::optional<std::uint64_t> seed) {
  SweepConfig config = load_config(config_path);
  if (seed) config.seeds = {*seed};
  const std::string out = out_path.empty() ? config.output : out_path;
  const auto rows = run_sweep(config);
  if (out.empty()) write_report(std::cout, rows);
  else write_report(rows, out);
  return 0;
}

int run_diff(double M, const std::vector<double>& deltas, std::size_t points) {
  std::cout << "delta,h,max_error,bound,error_over_sqrt_delta\n";
  for (double delta : deltas) {
    const double h = stable_step(delta, M);
    double worst = 0.0;
    for (std::size_t k = 0; k < points; ++k) {
      const double x = h + (1.0 - 2.0 * h) * static_cast<double>(k) / static_cast<double>(points - 1);
      // worst-case noise: +delta right of x, -delta left of x
      auto noisy = [&](double s) { return std::sin(s) + (s > x ? delta : -delta); };
      const Vector d = stable_differentiate(noisy, delta, M, Vector::Constant(1, x));
      worst = std::max(worst, std::abs(d[0] - std::cos(x)));
    }
    std::printf("%.12g,%.12g,%.12g,%.12g,%.12g\n", delta, h, worst, stable_error_bound(delta, M),
                worst / std::sqrt(delta));
  }
  return 0;
}

int run_laplace(int n_max, double y, const std::string& out_path) {
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw Error(Errc::io_error, "cannot open '" + out_path + "' for writing");
    out = &file;
  }
  *out << "n,phi_sup,dphi_sup,u_max,phi_sup_alt,dphi_sup_alt,u_max_alt\n";
  for (const auto& r : hadamard_instability_table(n_max, y)) {
    *out << r.n << ',' << format_number(r.phi_sup) << ',' << format_number(r.dphi_sup) << ','
         << format_number(r.u_max) << ',' << format_number(r.phi_sup_alt) << ',' << format_number(r.dphi_sup_alt)
         << ',' << format_number(r.u_max_alt) << '\n';
  }
  return 0;
}

int run_selftest_cmd() {
  bool ok = true;
  for (const auto& c : run_selftest()) {
    std::printf("[%s] %s (worst %.3g)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.worst);
    ok = ok && c.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularization of linear ill-posed problems"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Single regularized solve; prints one report row");
  solve_cmd->add_option("--problem", solve.problem, "differentiation | fredholm")
      ->check(CLI::IsMember({"differentiation", "fredholm"}));
  solve_cmd->add_option("--n", solve.n, "Grid size")->check(CLI::Range(1, 512));
  solve_cmd->add_option("--truth", solve.truth, "one | cospi | sin1 | hat")
      ->check(CLI::IsMember({"one", "cospi", "sin1", "hat"}));
  solve_cmd->add_option("--delta", solve.delta, "Noise level")->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--seed", solve.seed, "Noise seed");
  solve_cmd->add_option("--method", solve.method, "tikhonov | quasi | landweber | dsm")
      ->required()
      ->check(CLI::IsMember({"tikhonov", "quasi", "landweber", "dsm"}));
  solve_cmd->add_option("--rule", solve.rule, "apriori:<p> | morozov:<C> | fixed:<alpha>");
  solve_cmd->add_option("--radius", solve.radius, "Ball radius for quasi-solutions");
  solve_cmd->add_option("--mu", solve.mu, "Landweber step");
  solve_cmd->add_option("--stop", solve.stop,
                        "landweber: discrepancy:<C> | oracle | fixed:<n>; dsm: root:<b> | discrepancy:<C> | time:<t>");
  solve_cmd->add_option("--nmax", solve.nmax, "Landweber iteration budget");
  solve_cmd->add_option("--schedule", solve.schedule, "DSM schedule c0=..,c1=..,p=..");
  solve_cmd->add_option("--trace", solve.trace, "Write the iteration trace CSV here");

  std::string config_path, out_path;
  std::optional<std::uint64_t> sweep_seed;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a JSON-configured convergence sweep");
  sweep_cmd->add_option("--config", config_path, "Sweep config JSON")->required();
  sweep_cmd->add_option("--out", out_path, "CSV report path (default: config output, else stdout)");
  sweep_cmd->add_option("--seed", sweep_seed, "Override the config seed list with one seed");

  double M = 1.0;
  std::vector<double> diff_deltas{1e-2, 1e-3, 1e-4, 1e-5};
  std::size_t diff_points = 201;
  auto* diff_cmd = app.add_subcommand("diff", "Stable differentiation of sin(x) under worst-case noise");
  diff_cmd->add_option("--M", M, "Bound on |f''|")->check(CLI::PositiveNumber);
  diff_cmd->add_option("--deltas", diff_deltas, "Noise levels")->delimiter(',');
  diff_cmd->add_option("--points", diff_points, "Evaluation points")->check(CLI::Range(2, 100000));

  int n_max = 20;
  double y_eval = 1.0;
  std::string laplace_out;
  auto* laplace_cmd = app.add_subcommand("laplace-demo", "Hadamard instability table for the Laplace-Cauchy problem");
  laplace_cmd->add_option("--nmax", n_max, "Largest frequency")->check(CLI::PositiveNumber);
  laplace_cmd->add_option("--y", y_eval, "Evaluation height")->check(CLI::PositiveNumber);
  laplace_cmd->add_option("--out", laplace_out, "CSV path (default stdout)");

  auto* selftest_cmd = app.add_subcommand("selftest", "Run the invariant checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) return run_solve(solve);
    if (*sweep_cmd) return run_sweep_cmd(config_path, out_path, sweep_seed);
    if (*diff_cmd) return run_diff(M, diff_deltas, diff_points);
    if (*laplace_cmd) return run_laplace(n_max, y_eval, laplace_out);
    if (*selftest_cmd) return run_selftest_cmd();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
