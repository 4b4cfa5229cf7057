#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mimo_ee/config.hpp"
#include "mimo_ee/config_io.hpp"
#include "mimo_ee/random.hpp"
#include "mimo_ee/solver.hpp"

namespace mimo_ee {

enum class SweepVariable { none, PT, Pc, K, M };
enum class Output { ee_final, iterations, trace, oracle_gap };

const char* to_string(SweepVariable v) noexcept;
const char* to_string(Output o) noexcept;

struct ExperimentSpec {
  SystemConfig base_config;
  SweepVariable sweep_variable = SweepVariable::none;
  std::vector<double> sweep_values;  // PT and Pc in W, K and M as counts
  int trials = 1;                    // large-scale drops per sweep value
  Seed master_seed = 1;
  SolverParams solver_params;
  std::vector<Output> outputs{Output::ee_final, Output::iterations};
  int n_mc = 500;  // fast-fading draws for the exact-rate EE, 0 disables it
  // K sweeps only: when > 0, PT = K * pt_per_user for every point.
  double pt_per_user = 0.0;
  int oracle_points = 200;  // per axis, log grid, for the oracle_gap output
  int threads = 1;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  bool wants(Output o) const;
  /// Config actually solved at one sweep value.
  SystemConfig config_at(double sweep_value) const;
  /// Values iterated over; a single NaN when nothing is swept.
  std::vector<double> points() const;
};

struct ResultRow {
  double sweep_value = 0.0;
  int trial_index = 0;
  Seed seed = 0;
  std::string status;  // solver status, or "error: <message>"
  int iterations = 0;
  long long fixed_point_iterations = 0;
  bool stopping_rule_met = false;
  double final_ee = 0.0;           // lower-bound EE at p*, bits/J
  double final_ee_exact_mc = 0.0;  // NaN when not computed
  double sum_power = 0.0;          // W
  double min_rate_slack = 0.0;     // bits/s
  double omega_final = 0.0;
  double q_final = 0.0;
  double oracle_gap = 0.0;  // NaN unless requested and available
  std::vector<double> p_star;
  std::vector<IterationRecord> trace;  // kept only when Output::trace is requested
};

/// Seed of trial t; the same for every sweep value so points are paired.
Seed trial_seed(Seed master, int trial);

/// Exact-rate EE at p averaged over n_mc fast-fading draws: the per-user
/// rates are averaged first, then divided by the consumed power.
double monte_carlo_exact_ee(const SystemConfig& config, const std::vector<double>& beta,
                            const std::vector<double>& p, int n_mc, Seed seed);

/// Rows ordered by (sweep value index, trial). Per-trial failures land in the
/// row status.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares y = slope x + intercept. Zero variance in x gives slope 0,
/// intercept mean(y) and r_squared 0.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingReport {
  std::vector<double> K;
  std::vector<double> mean_iterations;        // outer iterations
  std::vector<double> mean_inner_iterations;  // power fixed-point passes
  LinearFit fit;                              // of mean_iterations on K
  LinearFit inner_fit;
};

/// Mean iteration counts per K with linear fits. Needs a K sweep with at
/// least 4 values and 20 trials, else throws SpecificationError.
ScalingReport iteration_scaling_report(const ExperimentSpec& spec);
ScalingReport iteration_scaling_report(const ExperimentSpec& spec,
                                       const std::vector<ResultRow>& rows);

/// CSV with a '#'-prefixed echo of the resolved spec, then the fixed columns
///   sweep_value,trial,seed,status,iterations,final_ee_lb,final_ee_exact_mc,
///   sum_power_w,min_rate_slack_bps,omega_final,q_final
/// plus oracle_gap when that output is requested.
void emit_csv(const ExperimentSpec& spec, const std::vector<ResultRow>& rows, std::ostream& out);
void emit_csv(const ExperimentSpec& spec, const std::vector<ResultRow>& rows,
              const std::string& path);

/// One line per (row, iteration): sweep_value,trial,iteration,q,objective,
/// sum_power,omega,max_violation,p_0..p_{K-1}.
void emit_trace(const std::vector<ResultRow>& rows, std::ostream& out);

}  // namespace mimo_ee
