#include "mimo_ee/harness.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "mimo_ee/channel.hpp"
#include "mimo_ee/errors.hpp"
#include "mimo_ee/rate_model.hpp"
#include "mimo_ee/verify.hpp"

namespace mimo_ee {

const char* to_string(SweepVariable v) noexcept {
  switch (v) {
    case SweepVariable::none: return "none";
    case SweepVariable::PT: return "PT";
    case SweepVariable::Pc: return "Pc";
    case SweepVariable::K: return "K";
    case SweepVariable::M: return "M";
  }
  return "unknown";
}

const char* to_string(Output o) noexcept {
  switch (o) {
    case Output::ee_final: return "ee_final";
    case Output::iterations: return "iterations";
    case Output::trace: return "trace";
    case Output::oracle_gap: return "oracle_gap";
  }
  return "unknown";
}

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

bool is_count(double v) { return v >= 1 && v <= 1e6 && v == std::floor(v); }

}  // namespace

bool ExperimentSpec::wants(Output o) const {
  for (auto x : outputs) {
    if (x == o) return true;
  }
  return false;
}

std::vector<double> ExperimentSpec::points() const {
  if (sweep_variable == SweepVariable::none) return {nan_value};
  return sweep_values;
}

SystemConfig ExperimentSpec::config_at(double v) const {
  SystemConfig c = base_config;
  switch (sweep_variable) {
    case SweepVariable::none: break;
    case SweepVariable::PT: c.PT = v; break;
    case SweepVariable::Pc: c.Pc = {v}; break;
    case SweepVariable::K:
      c.K = static_cast<int>(v);
      if (pt_per_user > 0) c.PT = c.K * pt_per_user;
      break;
    case SweepVariable::M: c.M = static_cast<int>(v); break;
  }
  return c;
}

void ExperimentSpec::validate() const {
  base_config.validate();
  if (trials < 1) throw ConfigError("trials", "must be >= 1");
  if (n_mc < 0) throw ConfigError("n_mc", "must be >= 0");
  if (threads < 1) throw ConfigError("threads", "must be >= 1");
  if (oracle_points < 2) throw ConfigError("oracle_points", "must be >= 2");
  if (!(pt_per_user >= 0) || !std::isfinite(pt_per_user)) {
    throw ConfigError("pt_per_user", "must be >= 0");
  }
  if (outputs.empty()) throw ConfigError("outputs", "must list at least one output");
  if (sweep_variable != SweepVariable::none && sweep_values.empty()) {
    throw ConfigError("sweep_values", "must be nonempty when sweep_variable is set");
  }
  for (double v : sweep_values) {
    switch (sweep_variable) {
      case SweepVariable::PT:
      case SweepVariable::Pc:
        if (!(v > 0) || !std::isfinite(v)) throw ConfigError("sweep_values", "powers must be > 0");
        break;
      case SweepVariable::K:
      case SweepVariable::M:
        if (!is_count(v)) throw ConfigError("sweep_values", "counts must be positive integers");
        break;
      case SweepVariable::none: break;
    }
  }
  if (sweep_variable == SweepVariable::K && base_config.RT.size() != 1) {
    throw ConfigError("RT", "a K sweep needs a single broadcast rate target");
  }
  if (sweep_variable == SweepVariable::M && base_config.Pc.size() != 1) {
    throw ConfigError("Pc", "an M sweep needs a single broadcast circuit power");
  }
  for (double v : points()) {
    const SystemConfig c = config_at(v);
    c.validate();
    resolve_params(c, solver_params);
    if (wants(Output::oracle_gap)) {
      double total = 1;
      for (int k = 0; k < c.K; ++k) total *= oracle_points;
      if (total > static_cast<double>(default_grid_budget)) {
        throw ConfigError("oracle_points", "oracle grid exceeds the evaluation budget at K = " +
                                               std::to_string(c.K));
      }
    }
  }
}

Seed trial_seed(Seed master, int trial) {
  return derive_seed(derive_seed(master, Stream::trial), static_cast<std::uint64_t>(trial));
}

double monte_carlo_exact_ee(const SystemConfig& config, const std::vector<double>& beta,
                            const std::vector<double>& p, int n_mc, Seed seed) {
  if (n_mc < 1) throw ConfigError("n_mc", "must be >= 1");
  const Seed base = derive_seed(seed, Stream::fast_fading);
  LargeScaleCoefficients ls;
  ls.beta = beta;
  std::vector<double> mean_rate(p.size(), 0.0);
  for (int i = 0; i < n_mc; ++i) {
    const auto H = sample_fast_fading(config.M, static_cast<int>(beta.size()),
                                      derive_seed(base, static_cast<std::uint64_t>(i)));
    const auto channel = compose_channel(H, ls);
    const auto rates = exact_rate(exact_sinr(channel, p, config.B, config.N0), config.B);
    for (std::size_t k = 0; k < p.size(); ++k) mean_rate[k] += rates[k];
  }
  RateVector avg{mean_rate, RateKind::exact};
  for (double& r : avg.r) r /= n_mc;
  return energy_efficiency(avg, p, config.total_circuit_power());
}

namespace {

ResultRow run_trial(const ExperimentSpec& spec, double value, int trial) {
  ResultRow row;
  row.sweep_value = value;
  row.trial_index = trial;
  row.seed = trial_seed(spec.master_seed, trial);
  row.final_ee_exact_mc = nan_value;
  row.oracle_gap = nan_value;
  try {
    const SystemConfig cfg = spec.config_at(value);
    const auto ls = sample_large_scale(cfg, row.seed);
    auto result = solve(cfg, ls.beta, spec.solver_params);
    row.status = to_string(result.status);
    row.iterations = result.iterations;
    row.fixed_point_iterations = result.fixed_point_iterations;
    row.stopping_rule_met = result.stopping_rule_met;
    row.final_ee = energy_efficiency(result.rates, result.p_star, cfg.total_circuit_power());
    row.sum_power = std::accumulate(result.p_star.begin(), result.p_star.end(), 0.0);
    row.min_rate_slack = result.trace.back().min_rate_slack;
    row.omega_final = result.duals.omega;
    row.q_final = result.duals.q;
    row.p_star = result.p_star;
    if (spec.n_mc > 0) {
      row.final_ee_exact_mc = monte_carlo_exact_ee(cfg, ls.beta, result.p_star, spec.n_mc, row.seed);
    }
    if (spec.wants(Output::oracle_gap)) {
      const auto oracle = grid_search(cfg, ls.beta, GridSpec::for_config(cfg, spec.oracle_points));
      if (oracle.feasible()) row.oracle_gap = (oracle.ee_best - row.final_ee) / oracle.ee_best;
    }
    if (spec.wants(Output::trace)) row.trace = std::move(result.trace);
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto values = spec.points();
  const std::size_t trials = static_cast<std::size_t>(spec.trials);
  const std::size_t total = values.size() * trials;
  std::vector<ResultRow> rows(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      rows[i] = run_trial(spec, values[i / trials], static_cast<int>(i % trials));
    }
  };
  const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(spec.threads), total);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) throw DimensionError("fit needs equal, nonempty x and y");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  if (sxx == 0) {
    fit.intercept = my;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

ScalingReport iteration_scaling_report(const ExperimentSpec& spec) {
  if (spec.sweep_variable != SweepVariable::K) {
    throw SpecificationError("iteration scaling needs a sweep over K");
  }
  if (spec.sweep_values.size() < 4 || spec.trials < 20) {
    throw SpecificationError("iteration scaling needs at least 4 K values and 20 trials");
  }
  return iteration_scaling_report(spec, run_experiment(spec));
}

ScalingReport iteration_scaling_report(const ExperimentSpec& spec,
                                       const std::vector<ResultRow>& rows) {
  if (spec.sweep_variable != SweepVariable::K) {
    throw SpecificationError("iteration scaling needs a sweep over K");
  }
  if (spec.sweep_values.size() < 4 || spec.trials < 20) {
    throw SpecificationError("iteration scaling needs at least 4 K values and 20 trials");
  }
  const std::size_t trials = static_cast<std::size_t>(spec.trials);
  if (rows.size() != spec.sweep_values.size() * trials) {
    throw DimensionError("row count does not match the spec");
  }
  ScalingReport report;
  for (std::size_t v = 0; v < spec.sweep_values.size(); ++v) {
    double outer = 0, inner = 0;
    int n = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto& row = rows[v * trials + t];
      if (row.status.rfind("error", 0) == 0) continue;
      outer += row.iterations;
      inner += static_cast<double>(row.fixed_point_iterations);
      ++n;
    }
    if (n == 0) throw SpecificationError("every trial failed at one K value");
    report.K.push_back(spec.sweep_values[v]);
    report.mean_iterations.push_back(outer / n);
    report.mean_inner_iterations.push_back(inner / n);
  }
  report.fit = fit_line(report.K, report.mean_iterations);
  report.inner_fit = fit_line(report.K, report.mean_inner_iterations);
  return report;
}

namespace {

std::string csv_safe(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
  }
  return s;
}

}  // namespace

void emit_csv(const ExperimentSpec& spec, const std::vector<ResultRow>& rows, std::ostream& out) {
  std::istringstream echo(format_config(spec));
  for (std::string line; std::getline(echo, line);) out << "# " << line << '\n';
  const bool gap = spec.wants(Output::oracle_gap);
  out << "sweep_value,trial,seed,status,iterations,final_ee_lb,final_ee_exact_mc,"
         "sum_power_w,min_rate_slack_bps,omega_final,q_final";
  if (gap) out << ",oracle_gap";
  out << '\n';
  for (const auto& r : rows) {
    out << (spec.sweep_variable == SweepVariable::none ? std::string("none")
                                                       : format_number(r.sweep_value))
        << ',' << r.trial_index << ',' << r.seed << ',' << csv_safe(r.status) << ','
        << r.iterations << ',' << format_number(r.final_ee) << ','
        << format_number(r.final_ee_exact_mc) << ',' << format_number(r.sum_power) << ','
        << format_number(r.min_rate_slack) << ',' << format_number(r.omega_final) << ','
        << format_number(r.q_final);
    if (gap) out << ',' << format_number(r.oracle_gap);
    out << '\n';
  }
}

void emit_csv(const ExperimentSpec& spec, const std::vector<ResultRow>& rows,
              const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  emit_csv(spec, rows, out);
  if (!out) throw IoError("write to '" + path + "' failed");
}

void emit_trace(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << "sweep_value,trial,iteration,q,objective,sum_power,omega,max_violation,p\n";
  for (const auto& r : rows) {
    for (const auto& t : r.trace) {
      out << format_number(r.sweep_value) << ',' << r.trial_index << ',' << t.iteration << ','
          << format_number(t.q) << ',' << format_number(t.objective) << ','
          << format_number(t.sum_power) << ',' << format_number(t.omega) << ','
          << format_number(t.max_violation);
      for (double p : t.p) out << ',' << format_number(p);
      out << '\n';
    }
  }
}

}  // namespace mimo_ee
