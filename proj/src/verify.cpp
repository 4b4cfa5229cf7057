#include "mimo_ee/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "mimo_ee/errors.hpp"
#include "mimo_ee/rate_model.hpp"

namespace mimo_ee {

const char* to_string(GridScale scale) noexcept {
  return scale == GridScale::linear ? "linear" : "logarithmic";
}

void GridSpec::validate() const {
  if (!(p_min > 0) || !std::isfinite(p_min)) throw ConfigError("p_min", "must be > 0");
  if (!(p_max > p_min) || !std::isfinite(p_max)) throw ConfigError("p_max", "must exceed p_min");
  if (points_per_axis < 2) throw ConfigError("points_per_axis", "must be >= 2");
}

std::vector<double> GridSpec::axis() const {
  validate();
  std::vector<double> out(static_cast<std::size_t>(points_per_axis));
  const double last = points_per_axis - 1;
  const double lo = scale == GridScale::logarithmic ? std::log(p_min) : p_min;
  const double hi = scale == GridScale::logarithmic ? std::log(p_max) : p_max;
  for (int i = 0; i < points_per_axis; ++i) {
    const double t = i / last;
    const double x = lo + t * (hi - lo);
    out[static_cast<std::size_t>(i)] = scale == GridScale::logarithmic ? std::exp(x) : x;
  }
  // pin the end points against rounding in exp/log
  out.front() = p_min;
  out.back() = p_max;
  return out;
}

GridSpec GridSpec::for_config(const SystemConfig& config, int points_per_axis) {
  return GridSpec{1e-6 * config.PT, config.PT, points_per_axis, GridScale::logarithmic};
}

namespace {

struct Best {
  double ee = -std::numeric_limits<double>::infinity();
  std::uint64_t index = 0;
  std::uint64_t feasible = 0;
  bool found = false;
};

// Scans flat indices [lo, hi); the last axis varies fastest, so increasing
// index means lexicographically increasing p.
Best scan(const SystemConfig& config, std::span<const double> beta,
          const std::vector<double>& axis, const std::vector<double>& targets, double circuit,
          std::uint64_t lo, std::uint64_t hi) {
  const std::size_t K = beta.size();
  const auto n = static_cast<std::uint64_t>(axis.size());
  std::vector<std::uint64_t> digit(K);
  std::uint64_t rest = lo;
  for (std::size_t k = K; k-- > 0;) {
    digit[k] = rest % n;
    rest /= n;
  }
  const double noise = config.B * config.N0;
  std::vector<double> p(K);
  Best best;
  for (std::uint64_t idx = lo; idx < hi; ++idx) {
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      p[k] = axis[digit[k]];
      total += p[k];
    }
    if (total <= config.PT) {
      bool ok = true;
      double sum_rate = 0.0;
      for (std::size_t k = 0; k < K && ok; ++k) {
        const double sinr = config.M * beta[k] * p[k] / (beta[k] * (total - p[k]) + noise);
        const double r = config.B * std::log2(sinr);
        ok = r >= targets[k];
        sum_rate += r;
      }
      if (ok) {
        ++best.feasible;
        const double ee = sum_rate / (total + circuit);
        if (!best.found || ee > best.ee) {
          best.ee = ee;
          best.index = idx;
          best.found = true;
        }
      }
    }
    for (std::size_t k = K; k-- > 0;) {
      if (++digit[k] < n) break;
      digit[k] = 0;
    }
  }
  return best;
}

std::vector<double> uniform_box(std::mt19937_64& engine, std::size_t K, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> out(K);
  for (double& x : out) x = u(engine);
  return out;
}

double objective_at(const SystemConfig& config, std::span<const double> beta, double q,
                    std::span<const double> log_p, double& magnitude) {
  std::vector<double> p(log_p.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::exp(log_p[k]);
  const auto rates = lb_rate_high_snr(beta, p, config.M, config.B, config.N0);
  const double circuit = config.total_circuit_power();
  const double consumed = std::accumulate(p.begin(), p.end(), 0.0) + circuit;
  double mag = q * consumed;
  for (double r : rates.r) mag += std::abs(r);
  magnitude = std::max(magnitude, mag);
  return subtractive_objective(rates, p, circuit, q);
}

}  // namespace

OracleResult grid_search(const SystemConfig& config, std::span<const double> beta,
                         const GridSpec& grid, std::uint64_t budget, int threads) {
  config.validate();
  const auto axis = grid.axis();
  const std::size_t K = static_cast<std::size_t>(config.K);
  if (beta.size() != K) throw DimensionError("beta length does not match K");
  for (double b : beta) {
    if (!(b > 0)) throw DomainError("large-scale gains must be > 0");
  }
  std::uint64_t total = 1;
  const auto n = static_cast<std::uint64_t>(axis.size());
  for (std::size_t k = 0; k < K; ++k) {
    if (total > budget / n) {
      throw BudgetError("grid of " + std::to_string(n) + "^" + std::to_string(K) +
                        " points exceeds the budget of " + std::to_string(budget));
    }
    total *= n;
  }
  const auto targets = config.rate_targets();
  const double circuit = config.total_circuit_power();

  const auto workers = static_cast<std::uint64_t>(std::clamp<std::uint64_t>(
      static_cast<std::uint64_t>(std::max(threads, 1)), 1, std::max<std::uint64_t>(total, 1)));
  std::vector<Best> parts(workers);
  auto run = [&](std::uint64_t w) {
    const std::uint64_t lo = total * w / workers;
    const std::uint64_t hi = total * (w + 1) / workers;
    parts[w] = scan(config, beta, axis, targets, circuit, lo, hi);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }

  // Parts cover increasing index ranges, so a strict comparison keeps the
  // smallest index among equal values.
  Best best;
  for (const auto& part : parts) {
    best.feasible += part.feasible;
    if (part.found && (!best.found || part.ee > best.ee)) {
      best.ee = part.ee;
      best.index = part.index;
      best.found = true;
    }
  }

  OracleResult out;
  out.evaluated_count = total;
  out.feasible_count = best.feasible;
  if (best.found) {
    out.ee_best = best.ee;
    out.p_best.resize(K);
    std::uint64_t rest = best.index;
    for (std::size_t k = K; k-- > 0;) {
      out.p_best[k] = axis[rest % n];
      rest /= n;
    }
  }
  return out;
}

double concavity_gap(const SystemConfig& config, std::span<const double> beta, double q,
                     std::span<const double> log_pa, std::span<const double> log_pb,
                     double lambda) {
  if (log_pa.size() != log_pb.size()) throw DimensionError("segment end points differ in length");
  std::vector<double> mix(log_pa.size());
  for (std::size_t k = 0; k < mix.size(); ++k) {
    mix[k] = lambda * log_pa[k] + (1.0 - lambda) * log_pb[k];
  }
  double magnitude = 0.0;
  const double fa = objective_at(config, beta, q, log_pa, magnitude);
  const double fb = objective_at(config, beta, q, log_pb, magnitude);
  const double fm = objective_at(config, beta, q, mix, magnitude);
  const double diff = fm - (lambda * fa + (1.0 - lambda) * fb);
  return magnitude > 0 ? diff / magnitude : diff;
}

ConcavityReport verify_concavity(const SystemConfig& config, std::span<const double> beta,
                                 double q, int samples, Seed seed) {
  config.validate();
  if (samples < 1) throw ConfigError("samples", "must be >= 1");
  if (beta.size() != static_cast<std::size_t>(config.K)) {
    throw DimensionError("beta length does not match K");
  }
  auto engine = make_engine(derive_seed(seed, Stream::verification));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lo = std::log(1e-6 * config.PT);
  const double hi = std::log(config.PT);
  ConcavityReport report;
  report.samples = samples;
  for (int s = 0; s < samples; ++s) {
    const auto a = uniform_box(engine, beta.size(), lo, hi);
    const auto b = uniform_box(engine, beta.size(), lo, hi);
    const double lambda = unit(engine);
    const double gap = concavity_gap(config, beta, q, a, b, lambda);
    if (gap < -1e-9) ++report.violations;
    report.worst_gap = std::min(report.worst_gap, gap);
  }
  return report;
}

SifReport verify_sif_properties(const DualState& duals, std::span<const double> beta, int M,
                                double B, double N0, int samples, Seed seed) {
  if (samples < 1) throw ConfigError("samples", "must be >= 1");
  (void)M;  // T does not depend on the antenna count
  const std::size_t K = beta.size();
  if (duals.rho.size() != K) throw DimensionError("rho length does not match beta");
  auto engine = make_engine(derive_seed(seed, Stream::verification));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double rel = 1e-12;  // rounding allowance for the non-strict checks
  const double lo = std::log(1e-9);

  SifReport report;
  report.samples = samples;
  for (int s = 0; s < samples; ++s) {
    const auto log_p = uniform_box(engine, K, lo, 0.0);
    std::vector<double> p(K), p_up(K), p_scaled(K);
    for (std::size_t k = 0; k < K; ++k) {
      p[k] = std::exp(log_p[k]);
      p_up[k] = p[k] * std::exp(unit(engine) * std::log(10.0));
    }
    const double c = std::exp(unit(engine) * std::log(10.0));
    for (std::size_t k = 0; k < K; ++k) p_scaled[k] = c * p[k];

    const auto t = sif_update(p, duals, beta, B, N0);
    const auto t_up = sif_update(p_up, duals, beta, B, N0);
    const auto t_scaled = sif_update(p_scaled, duals, beta, B, N0);

    bool positive = true, monotone = true, scalable = true, strict = true;
    for (std::size_t k = 0; k < K; ++k) {
      positive = positive && t[k] > 0 && std::isfinite(t[k]);
      monotone = monotone && t_up[k] >= t[k] * (1.0 - rel);
      scalable = scalable && c * t[k] >= t_scaled[k] * (1.0 - rel);
      strict = strict && c * t[k] > t_scaled[k];
    }
    report.positivity_violations += !positive;
    report.monotonicity_violations += !monotone;
    report.scalability_violations += !scalable;
    report.scalability_strict += strict;
  }
  return report;
}

OracleComparison verify_solver_against_oracle(const SystemConfig& config,
                                              std::span<const double> beta,
                                              const SolverParams& params, const GridSpec& grid,
                                              int threads) {
  OracleComparison out;
  out.solver = solve(config, beta, params);
  out.oracle = grid_search(config, beta, grid, default_grid_budget, threads);
  out.iterations = out.solver.iterations;
  out.ee_solver = energy_efficiency(out.solver.rates, out.solver.p_star,
                                    config.total_circuit_power());
  out.solver_violation = out.solver.max_violation;
  if (out.oracle.feasible()) {
    out.ee_oracle = out.oracle.ee_best;
    out.relative_gap = (out.ee_oracle - out.ee_solver) / out.ee_oracle;
    const auto rates = lb_rate_high_snr(beta, out.oracle.p_best, config.M, config.B, config.N0);
    out.oracle_violation = max_constraint_violation(config, out.oracle.p_best, rates);
  } else {
    out.ee_oracle = std::numeric_limits<double>::quiet_NaN();
    out.relative_gap = std::numeric_limits<double>::quiet_NaN();
    out.oracle_violation = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace mimo_ee
