// Command-line front end: solve, sweep, oracle, verify.
//
// Exit codes: 0 success, 1 usage or config error, 2 runtime error,
// 3 verification failures.

#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mimo_ee/channel.hpp"
#include "mimo_ee/config_io.hpp"
#include "mimo_ee/errors.hpp"
#include "mimo_ee/harness.hpp"
#include "mimo_ee/rate_model.hpp"
#include "mimo_ee/solver.hpp"
#include "mimo_ee/verify.hpp"

namespace {

using namespace mimo_ee;
using nlohmann::ordered_json;

enum Exit { ok = 0, usage = 1, runtime = 2, failed_checks = 3 };

struct ConfigFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ExperimentSpec read_spec(const std::string& path) {
  try {
    if (path.empty()) {
      ExperimentSpec spec;
      spec.base_config = SystemConfig::table_one();
      return spec;
    }
    return load_config(path);
  } catch (const Error& e) {
    throw ConfigFailure(e.what());
  }
}

// beta from --beta, --distances, or a seeded drop of trial `trial`.
std::vector<double> instance_beta(const ExperimentSpec& spec, const std::vector<double>& beta,
                                  const std::vector<double>& distances, int trial) {
  const SystemConfig& cfg = spec.base_config;
  if (!beta.empty()) {
    if (beta.size() != static_cast<std::size_t>(cfg.K)) {
      throw ConfigFailure("--beta needs K = " + std::to_string(cfg.K) + " values");
    }
    return beta;
  }
  const Seed seed = trial_seed(spec.master_seed, trial);
  if (!distances.empty()) {
    SystemConfig no_shadow = cfg;
    no_shadow.sigma2_dB = 0.0;
    try {
      return large_scale_at(no_shadow, distances, seed).beta;
    } catch (const Error& e) {
      throw ConfigFailure(e.what());
    }
  }
  return sample_large_scale(cfg, seed).beta;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw IoError("cannot write '" + path + "'");
  return file;
}

ordered_json to_json(const SolveResult& r, const std::vector<double>& beta, bool with_trace) {
  ordered_json j;
  j["status"] = to_string(r.status);
  j["iterations"] = r.iterations;
  j["stopping_rule_met"] = r.stopping_rule_met;
  j["fixed_point_iterations"] = r.fixed_point_iterations;
  j["beta"] = beta;
  j["p_star_w"] = r.p_star;
  j["q_star_bits_per_joule"] = r.q_star;
  j["rates_bps"] = r.rates.r;
  j["certificate"] = r.certificate;
  j["max_violation"] = r.max_violation;
  j["omega"] = r.duals.omega;
  j["rho"] = r.duals.rho;
  j["screen"] = {{"feasible", r.screen.feasible},
                 {"spectral_radius", r.screen.spectral_radius},
                 {"min_sum_power_w", r.screen.min_sum_power}};
  if (with_trace) {
    ordered_json trace = ordered_json::array();
    for (const auto& t : r.trace) {
      trace.push_back({{"iteration", t.iteration},
                       {"p", t.p},
                       {"q", t.q},
                       {"objective", t.objective},
                       {"omega", t.omega},
                       {"rho", t.rho},
                       {"sum_power", t.sum_power},
                       {"min_rate_slack", t.min_rate_slack},
                       {"max_violation", t.max_violation},
                       {"fixed_point_iterations", t.fixed_point_iterations}});
    }
    j["trace"] = std::move(trace);
  }
  return j;
}

struct Common {
  std::string config;
  std::string output;
  std::vector<double> beta;
  std::vector<double> distances;
  int trial = 0;
};

void add_instance_options(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "experiment file (default: reference drop)");
  cmd->add_option("--beta", c.beta, "fixed large-scale gains, one per user")->delimiter(',');
  cmd->add_option("--distances", c.distances, "user distances in m, no shadowing")
      ->delimiter(',');
  cmd->add_option("--trial", c.trial, "trial index for the seeded drop")->check(CLI::NonNegativeNumber);
  cmd->add_option("-o,--output", c.output, "output file (default stdout)");
}

int run_solve(const Common& c, bool no_trace) {
  const auto spec = read_spec(c.config);
  const auto beta = instance_beta(spec, c.beta, c.distances, c.trial);
  const auto result = solve(spec.base_config, beta, spec.solver_params);
  std::ofstream file;
  open_output(c.output, file) << to_json(result, beta, !no_trace).dump(2) << '\n';
  return ok;
}

int run_sweep(const Common& c, const std::string& trace_path, const std::string& scaling_path,
              std::optional<int> threads) {
  auto spec = read_spec(c.config);
  if (threads) spec.threads = *threads;
  std::vector<ResultRow> rows;
  try {
    spec.validate();
  } catch (const Error& e) {
    throw ConfigFailure(e.what());
  }
  rows = run_experiment(spec);
  std::ofstream file;
  emit_csv(spec, rows, open_output(c.output, file));
  if (!trace_path.empty()) {
    std::ofstream trace(trace_path, std::ios::binary);
    if (!trace) throw IoError("cannot write '" + trace_path + "'");
    emit_trace(rows, trace);
  }
  if (!scaling_path.empty()) {
    const auto report = iteration_scaling_report(spec, rows);
    std::ofstream out(scaling_path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + scaling_path + "'");
    out << "K,mean_iterations,mean_fixed_point_iterations\n";
    for (std::size_t i = 0; i < report.K.size(); ++i) {
      out << format_number(report.K[i]) << ',' << format_number(report.mean_iterations[i]) << ','
          << format_number(report.mean_inner_iterations[i]) << '\n';
    }
    out << "# slope = " << format_number(report.fit.slope) << '\n'
        << "# intercept = " << format_number(report.fit.intercept) << '\n'
        << "# r_squared = " << format_number(report.fit.r_squared) << '\n';
  }
  return ok;
}

int run_oracle(const Common& c, int points, std::optional<double> max_gap, int threads) {
  const auto spec = read_spec(c.config);
  const auto beta = instance_beta(spec, c.beta, c.distances, c.trial);
  const auto grid = GridSpec::for_config(spec.base_config, points);
  const auto cmp = verify_solver_against_oracle(spec.base_config, beta, spec.solver_params, grid,
                                                threads);
  std::ofstream file;
  auto& out = open_output(c.output, file);
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
    return s;
  };
  out << "solver_status = " << to_string(cmp.solver.status) << '\n'
      << "solver_iterations = " << cmp.iterations << '\n'
      << "solver_ee = " << format_number(cmp.ee_solver) << '\n'
      << "solver_p = " << list(cmp.solver.p_star) << '\n'
      << "solver_max_violation = " << format_number(cmp.solver_violation) << '\n'
      << "grid_points_per_axis = " << points << '\n'
      << "grid_evaluated = " << cmp.oracle.evaluated_count << '\n'
      << "grid_feasible = " << cmp.oracle.feasible_count << '\n'
      << "oracle_ee = " << format_number(cmp.ee_oracle) << '\n'
      << "oracle_p = " << list(cmp.oracle.p_best) << '\n'
      << "oracle_max_violation = " << format_number(cmp.oracle_violation) << '\n'
      << "relative_gap = " << format_number(cmp.relative_gap) << '\n';
  if (max_gap && !(std::abs(cmp.relative_gap) <= *max_gap)) {
    std::cerr << "relative gap " << cmp.relative_gap << " exceeds " << *max_gap << '\n';
    return failed_checks;
  }
  return ok;
}

int run_verify(const Common& c, int samples, Seed seed) {
  const auto spec = read_spec(c.config);
  const SystemConfig& cfg = spec.base_config;
  const auto beta = instance_beta(spec, c.beta, c.distances, c.trial);
  const auto solved = solve(cfg, beta, spec.solver_params);
  const double q = std::max(solved.q_star, 0.5);

  const auto concave = verify_concavity(cfg, beta, q, samples, seed);
  DualState duals{0.0, std::vector<double>(beta.size(), 0.0), q};
  const auto sif = verify_sif_properties(duals, beta, cfg.M, cfg.B, cfg.N0, samples, seed);

  // Bound ordering r_tilde <= r_hat at random powers.
  int ordering = 0;
  auto engine = make_engine(derive_seed(seed, Stream::trial));
  std::uniform_real_distribution<double> u(std::log(1e-6 * cfg.PT), std::log(cfg.PT));
  std::vector<double> p(beta.size());
  for (int s = 0; s < samples; ++s) {
    for (double& x : p) x = std::exp(u(engine));
    const auto lo = lb_rate_high_snr(beta, p, cfg.M, cfg.B, cfg.N0);
    const auto hi = lb_rate_full(beta, p, cfg.M, cfg.B, cfg.N0);
    for (std::size_t k = 0; k < p.size(); ++k) ordering += lo[k] > hi[k];
  }

  std::ofstream file;
  auto& out = open_output(c.output, file);
  out << "q = " << format_number(q) << '\n'
      << "concavity_samples = " << concave.samples << '\n'
      << "concavity_violations = " << concave.violations << '\n'
      << "concavity_worst_gap = " << format_number(concave.worst_gap) << '\n'
      << "sif_samples = " << sif.samples << '\n'
      << "sif_positivity_violations = " << sif.positivity_violations << '\n'
      << "sif_monotonicity_violations = " << sif.monotonicity_violations << '\n'
      << "sif_scalability_violations = " << sif.scalability_violations << '\n'
      << "sif_scalability_strict = " << sif.scalability_strict << '\n'
      << "rate_ordering_violations = " << ordering << '\n';
  const int total = concave.violations + sif.total_violations() + ordering;
  out << "total_violations = " << total << '\n';
  return total == 0 ? ok : failed_checks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficient power allocation for massive MIMO downlink"};
  app.require_subcommand(1);

  Common solve_opts, sweep_opts, oracle_opts, verify_opts;
  bool no_trace = false;
  auto* solve_cmd = app.add_subcommand("solve", "solve one instance, print result and trace as JSON");
  add_instance_options(solve_cmd, solve_opts);
  solve_cmd->add_flag("--no-trace", no_trace, "omit the per-iteration trace");

  std::string trace_path, scaling_path;
  std::optional<int> threads;
  auto* sweep_cmd = app.add_subcommand("sweep", "run an experiment file, write CSV");
  sweep_cmd->add_option("-c,--config", sweep_opts.config, "experiment file")->required();
  sweep_cmd->add_option("-o,--output", sweep_opts.output, "CSV file (default stdout)");
  sweep_cmd->add_option("--trace", trace_path, "also write per-iteration traces here");
  sweep_cmd->add_option("--scaling", scaling_path, "also write the iteration scaling report (K sweeps)");
  sweep_cmd->add_option("-j,--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  int points = 200;
  int oracle_threads = 1;
  std::optional<double> max_gap;
  auto* oracle_cmd = app.add_subcommand("oracle", "compare the solver with a grid search");
  add_instance_options(oracle_cmd, oracle_opts);
  oracle_cmd->add_option("--points", points, "grid points per axis")->check(CLI::Range(2, 100000000));
  oracle_cmd->add_option("--max-gap", max_gap, "exit 3 if the relative EE gap exceeds this");
  oracle_cmd->add_option("-j,--threads", oracle_threads, "worker threads")->check(CLI::PositiveNumber);

  int samples = 10000;
  Seed seed = 1;
  auto* verify_cmd = app.add_subcommand("verify", "random property checks; exit 3 on any violation");
  add_instance_options(verify_cmd, verify_opts);
  verify_cmd->add_option("--samples", samples, "draws per check")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", seed, "seed of the random draws");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (*solve_cmd) return run_solve(solve_opts, no_trace);
    if (*sweep_cmd) return run_sweep(sweep_opts, trace_path, scaling_path, threads);
    if (*oracle_cmd) return run_oracle(oracle_opts, points, max_gap, oracle_threads);
    if (*verify_cmd) return run_verify(verify_opts, samples, seed);
  } catch (const ConfigFailure& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return usage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return runtime;
  }
  return usage;
}
