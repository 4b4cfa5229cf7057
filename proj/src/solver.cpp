#include "mimo_ee/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>

#include "mimo_ee/errors.hpp"

namespace mimo_ee {

const char* to_string(SolveStatus status) noexcept {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter_reached: return "max_iter_reached";
    case SolveStatus::infeasible_constraints: return "infeasible_constraints";
  }
  return "unknown";
}

namespace {

constexpr double kLn2 = std::numbers::ln2;

std::vector<double> broadcast(const std::vector<double>& v, std::size_t n, const char* field) {
  if (v.size() == n) return v;
  if (v.size() == 1) return std::vector<double>(n, v.front());
  throw ConfigError(field, "expected 1 or " + std::to_string(n) + " entries");
}

// sum_{i != k} x_i for every k, from prefix and suffix sums (no cancellation).
std::vector<double> leave_one_out_sums(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  double prefix = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = prefix;
    prefix += x[k];
  }
  double suffix = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    out[k] += suffix;
    suffix += x[k];
  }
  return out;
}

struct MapTerms {
  std::vector<double> weight;  // c_k
  std::vector<double> cross;   // sum_{j != k} c_j / (ln2 I_j)
};

MapTerms map_terms(std::span<const double> p, const DualState& duals,
                   std::span<const double> beta, double B, double N0, bool bandwidth) {
  const std::size_t K = p.size();
  if (beta.size() != K || duals.rho.size() != K) {
    throw DimensionError("power, gain and multiplier vectors must have equal length");
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (!(p[k] > 0) || !std::isfinite(p[k])) {
      throw DomainError("power update needs strictly positive powers (user " +
                        std::to_string(k) + ")");
    }
    if (!(beta[k] > 0)) throw DomainError("large-scale gains must be > 0");
  }
  const double scale = bandwidth ? B : 1.0;
  MapTerms terms;
  terms.weight.resize(K);
  for (std::size_t k = 0; k < K; ++k) terms.weight[k] = scale * (1.0 + duals.rho[k]);

  const auto others = leave_one_out_sums(p);
  std::vector<double> per_user(K);
  for (std::size_t j = 0; j < K; ++j) {
    const double interference = others[j] + B * N0 / beta[j];
    per_user[j] = terms.weight[j] / (kLn2 * interference);
  }
  terms.cross = leave_one_out_sums(per_user);
  return terms;
}

}  // namespace

ResolvedSolverParams resolve_params(const SystemConfig& config, const SolverParams& params) {
  config.validate();
  const auto K = static_cast<std::size_t>(config.K);
  ResolvedSolverParams out;
  out.tau = params.tau.value_or(1e-6 * config.B * config.K);
  out.theta1 = params.theta1.value_or(0.0);
  if (params.theta2.empty()) {
    out.theta2.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
      const double rt = config.rate_target(static_cast<int>(k));
      out.theta2[k] = rt > 0 ? 0.1 / rt : 0.1 / config.B;
    }
  } else {
    out.theta2 = broadcast(params.theta2, K, "theta2");
  }
  out.adaptive_steps = params.adaptive_steps;
  out.step_growth = params.step_growth;
  out.step_shrink = params.step_shrink;
  out.max_iter = params.max_iter;
  out.p_init = params.p_init.empty() ? std::vector<double>(K, config.PT / (2.0 * config.K))
                                     : broadcast(params.p_init, K, "p_init");
  out.omega_init = params.omega_init;
  out.rho_init = params.rho_init.empty() ? std::vector<double>(K, 0.0)
                                         : broadcast(params.rho_init, K, "rho_init");
  out.include_bandwidth_factor = params.include_bandwidth_factor;
  out.fixed_point_tol = params.fixed_point_tol;
  out.fixed_point_max_iter = params.fixed_point_max_iter;
  out.feasibility_tol = params.feasibility_tol;

  if (!(out.tau > 0)) throw ConfigError("tau", "must be > 0");
  if (params.theta1 && !(out.theta1 > 0)) throw ConfigError("theta1", "must be > 0");
  if (!(out.step_growth >= 1)) throw ConfigError("step_growth", "must be >= 1");
  if (!(out.step_shrink > 0 && out.step_shrink <= 1)) {
    throw ConfigError("step_shrink", "must lie in (0, 1]");
  }
  for (double t : out.theta2) {
    if (!(t > 0)) throw ConfigError("theta2", "entries must be > 0");
  }
  if (out.max_iter < 1) throw ConfigError("max_iter", "must be >= 1");
  for (double p : out.p_init) {
    if (!(p > 0)) throw ConfigError("p_init", "entries must be > 0");
  }
  if (!(out.omega_init >= 0)) throw ConfigError("omega_init", "must be >= 0");
  for (double r : out.rho_init) {
    if (!(r >= 0)) throw ConfigError("rho_init", "entries must be >= 0");
  }
  if (!(out.fixed_point_tol > 0)) throw ConfigError("fixed_point_tol", "must be > 0");
  if (out.fixed_point_max_iter < 1) throw ConfigError("fixed_point_max_iter", "must be >= 1");
  if (!(out.feasibility_tol >= 0)) throw ConfigError("feasibility_tol", "must be >= 0");
  return out;
}

FeasibilityScreen screen_feasibility(const SystemConfig& config, std::span<const double> beta) {
  config.validate();
  const auto K = static_cast<Eigen::Index>(config.K);
  if (beta.size() != static_cast<std::size_t>(K)) {
    throw DimensionError("beta length does not match K");
  }
  Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(K, K);
  Eigen::VectorXd floor(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double target = std::exp2(config.rate_target(static_cast<int>(k)) / config.B);
    for (Eigen::Index j = 0; j < K; ++j) {
      if (j != k) coupling(k, j) = target / config.M;
    }
    floor(k) = target * config.B * config.N0 / (config.M * beta[static_cast<std::size_t>(k)]);
  }

  FeasibilityScreen out;
  if (K > 1) {
    Eigen::EigenSolver<Eigen::MatrixXd> eig(coupling, false);
    out.spectral_radius = eig.eigenvalues().cwiseAbs().maxCoeff();
  }
  // The Perron root equals 1 exactly in the balanced interference-limited
  // case; treat a radius within rounding of 1 as infeasible.
  if (out.spectral_radius >= 1.0 - 1e-12) return out;

  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(K, K) - coupling;
  const Eigen::VectorXd p = system.partialPivLu().solve(floor);
  out.min_power.assign(p.data(), p.data() + K);
  out.min_sum_power = p.sum();
  out.feasible = (p.array() > 0).all() && out.min_sum_power <= config.PT;
  return out;
}

std::vector<double> sif_update(std::span<const double> p, const DualState& duals,
                               std::span<const double> beta, double B, double N0,
                               bool include_bandwidth_factor) {
  const auto terms = map_terms(p, duals, beta, B, N0, include_bandwidth_factor);
  std::vector<double> out(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double denom = kLn2 * (terms.cross[k] + duals.q + duals.omega);
    if (!(denom > 0)) {
      throw DomainError("power update undefined: no interference and q + omega = 0");
    }
    out[k] = terms.weight[k] / denom;
  }
  return out;
}

std::vector<double> interference_map(std::span<const double> p, const DualState& duals,
                                     std::span<const double> beta, double B, double N0,
                                     bool include_bandwidth_factor) {
  return sif_update(p, duals, beta, B, N0, include_bandwidth_factor);
}

FixedPointResult solve_power_fixed_point(std::span<const double> start, const DualState& duals,
                                         std::span<const double> beta, double B, double N0,
                                         bool include_bandwidth_factor, double tol,
                                         int max_iter) {
  FixedPointResult out;
  out.p.assign(start.begin(), start.end());
  for (int it = 1; it <= max_iter; ++it) {
    auto next = sif_update(out.p, duals, beta, B, N0, include_bandwidth_factor);
    double movement = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) {
      movement = std::max(movement, std::abs(next[k] - out.p[k]) / next[k]);
    }
    out.p = std::move(next);
    out.iterations = it;
    if (movement <= tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

double dual_update_omega(double omega, std::span<const double> p, double PT, double theta1) {
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  return std::max(0.0, omega - theta1 * (PT - total));
}

std::vector<double> dual_update_rho(std::span<const double> rho, const RateVector& rates,
                                    std::span<const double> RT, std::span<const double> theta2) {
  if (rho.size() != rates.size() || RT.size() != rho.size() || theta2.size() != rho.size()) {
    throw DimensionError("rate multiplier update: vector lengths differ");
  }
  std::vector<double> out(rho.size());
  for (std::size_t k = 0; k < rho.size(); ++k) {
    out[k] = std::max(0.0, rho[k] - theta2[k] * (rates[k] - RT[k]));
  }
  return out;
}

double q_update(const RateVector& rates, std::span<const double> p, double circuit_power) {
  return std::max(0.0, energy_efficiency(rates, p, circuit_power));
}

std::vector<double> stationarity_residual(std::span<const double> p, const DualState& duals,
                                          std::span<const double> beta, double B, double N0,
                                          bool include_bandwidth_factor) {
  const auto terms = map_terms(p, duals, beta, B, N0, include_bandwidth_factor);
  std::vector<double> out(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    out[k] = terms.weight[k] / (p[k] * kLn2) - terms.cross[k] - duals.q - duals.omega;
  }
  return out;
}

std::vector<double> relative_stationarity_residual(std::span<const double> p,
                                                   const DualState& duals,
                                                   std::span<const double> beta, double B,
                                                   double N0, bool include_bandwidth_factor) {
  auto out = stationarity_residual(p, duals, beta, B, N0, include_bandwidth_factor);
  const double scale = include_bandwidth_factor ? B : 1.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    out[k] /= scale * (1.0 + duals.rho[k]) / (p[k] * kLn2);
  }
  return out;
}

double max_constraint_violation(const SystemConfig& config, std::span<const double> p,
                                const RateVector& rates) {
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  double worst = std::max(0.0, (total - config.PT) / config.PT);
  for (std::size_t k = 0; k < rates.size(); ++k) {
    const double target = config.rate_target(static_cast<int>(k));
    const double scale = target > 0 ? target : config.B;
    worst = std::max(worst, (target - rates[k]) / scale);
  }
  return worst;
}

namespace {

double min_slack(const RateVector& rates, std::span<const double> RT) {
  double slack = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rates.size(); ++k) slack = std::min(slack, rates[k] - RT[k]);
  return slack;
}

}  // namespace

SolveResult solve(const SystemConfig& config, std::span<const double> beta,
                  const SolverParams& params) {
  const auto settings = resolve_params(config, params);
  const auto K = static_cast<std::size_t>(config.K);
  if (beta.size() != K) throw DimensionError("beta length does not match K");
  for (double b : beta) {
    if (!(b > 0)) throw DomainError("large-scale gains must be > 0");
  }
  const double circuit = config.total_circuit_power();
  const auto targets = config.rate_targets();

  SolveResult result;
  result.screen = screen_feasibility(config, beta);

  std::vector<double> p = settings.p_init;
  auto rates = lb_rate_high_snr(beta, p, config.M, config.B, config.N0);
  DualState duals{settings.omega_init, settings.rho_init, q_update(rates, p, circuit)};
  // omega is in bits/J, so its step has to carry the EE scale.
  double theta1 = settings.theta1 > 0 ? settings.theta1 : std::max(duals.q, 1.0) / config.PT;
  auto theta2 = settings.theta2;
  const double theta1_cap = 1e6 * theta1;
  std::vector<double> theta2_cap(K);
  for (std::size_t k = 0; k < K; ++k) theta2_cap[k] = 1e6 * theta2[k];
  int omega_sign = 0;
  std::vector<int> rho_sign(K, 0);
  auto adapt = [&](double& step, double cap, int& last, double violation, double multiplier) {
    if (!settings.adaptive_steps) return;
    const int sign = violation > 0 ? 1 : (violation < 0 ? -1 : 0);
    if (multiplier <= 0 && sign <= 0) {  // inactive and projected at zero
      last = 0;
      return;
    }
    if (last != 0 && sign != 0) {
      step = std::min(cap, step * (sign == last ? settings.step_growth : settings.step_shrink));
    }
    last = sign;
  };

  auto record = [&](int n, double objective, int inner) {
    IterationRecord rec;
    rec.iteration = n;
    rec.p = p;
    rec.omega = duals.omega;
    rec.rho = duals.rho;
    rec.q = duals.q;
    rec.objective = objective;
    rec.sum_power = std::accumulate(p.begin(), p.end(), 0.0);
    rec.min_rate_slack = min_slack(rates, targets);
    rec.max_violation = max_constraint_violation(config, p, rates);
    rec.fixed_point_iterations = inner;
    result.trace.push_back(std::move(rec));
  };
  record(0, subtractive_objective(rates, p, circuit, duals.q), 0);

  for (int n = 1; n <= settings.max_iter; ++n) {
    // Powers for the current (q, omega, rho): the implicit fixed point of T.
    auto fixed = solve_power_fixed_point(p, duals, beta, config.B, config.N0,
                                         settings.include_bandwidth_factor,
                                         settings.fixed_point_tol, settings.fixed_point_max_iter);
    p = std::move(fixed.p);
    rates = lb_rate_high_snr(beta, p, config.M, config.B, config.N0);
    const double objective = subtractive_objective(rates, p, circuit, duals.q);

    const double excess = std::accumulate(p.begin(), p.end(), 0.0) - config.PT;
    adapt(theta1, theta1_cap, omega_sign, excess, duals.omega);
    for (std::size_t k = 0; k < K; ++k) {
      adapt(theta2[k], theta2_cap[k], rho_sign[k], targets[k] - rates[k], duals.rho[k]);
    }
    duals.omega = dual_update_omega(duals.omega, p, config.PT, theta1);
    // Unreachable targets would push rho up without bound; hold it and
    // optimize under the power budget alone.
    if (result.screen.feasible) duals.rho = dual_update_rho(duals.rho, rates, targets, theta2);
    duals.q = q_update(rates, p, circuit);

    result.fixed_point_iterations += fixed.iterations;
    result.iterations = n;
    result.certificate = objective;
    record(n, objective, fixed.iterations);

    // Root condition of the parametric problem, plus primal feasibility unless
    // the screen already proved the constraints cannot all be met.
    const double violation = result.trace.back().max_violation;
    if (std::abs(objective) <= settings.tau &&
        (violation <= settings.feasibility_tol || !result.screen.feasible)) {
      result.stopping_rule_met = true;
      break;
    }
  }

  result.p_star = p;
  result.rates = rates;
  result.q_star = duals.q;
  result.duals = duals;
  result.max_violation = result.trace.back().max_violation;
  if (result.max_violation > settings.feasibility_tol) {
    result.status = SolveStatus::infeasible_constraints;
  } else if (result.stopping_rule_met) {
    result.status = SolveStatus::converged;
  } else {
    result.status = SolveStatus::max_iter_reached;
  }
  return result;
}

}  // namespace mimo_ee
