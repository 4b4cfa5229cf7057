#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mimo_ee/config.hpp"
#include "mimo_ee/rate_model.hpp"

namespace mimo_ee {

/// Lagrange multipliers of the sum-power (omega) and per-user rate (rho)
/// constraints, plus the current energy-efficiency estimate q in bits/J.
struct DualState {
  double omega = 0.0;
  std::vector<double> rho;
  double q = 0.0;
};

/// Tuning of the iterative solver. Unset optionals and empty vectors take
/// config-dependent defaults, see resolve_params().
struct SolverParams {
  std::optional<double> tau;     // stopping threshold on the subtractive objective, bits/s
  std::optional<double> theta1;  // omega step; default q0 / PT with q0 the initial EE
  std::vector<double> theta2;    // rho steps, length K or 1
  // Per-multiplier step control: a step grows by step_growth while its
  // constraint keeps the same sign of violation and is cut by step_shrink
  // when the sign flips. false gives plain fixed steps.
  bool adaptive_steps = true;
  double step_growth = 1.5;
  double step_shrink = 0.5;
  int max_iter = 500;
  std::vector<double> p_init;    // W, length K; default PT/(2K) each
  double omega_init = 0.0;
  std::vector<double> rho_init;  // default zeros
  // Keep the bandwidth factor of the rate gradient. false reproduces the
  // printed update, which equals the corrected one only for B = 1.
  bool include_bandwidth_factor = true;
  // Inner power fixed point: stop on max relative movement below this.
  double fixed_point_tol = 1e-12;
  int fixed_point_max_iter = 200000;
  // Relative constraint violation tolerated at termination.
  double feasibility_tol = 1e-6;
};

struct ResolvedSolverParams {
  double tau;
  double theta1;  // 0 until solve() fixes it from the initial EE
  std::vector<double> theta2;
  bool adaptive_steps;
  double step_growth;
  double step_shrink;
  int max_iter;
  std::vector<double> p_init;
  double omega_init;
  std::vector<double> rho_init;
  bool include_bandwidth_factor;
  double fixed_point_tol;
  int fixed_point_max_iter;
  double feasibility_tol;
};

/// Fills defaults and validates: tau = 1e-6 B K, theta2_k = 0.1 / RT_k
/// (0.1 / B when RT_k = 0), p_init = PT/(2K). An unset theta1 stays 0 and
/// solve() replaces it by q0 / PT.
ResolvedSolverParams resolve_params(const SystemConfig& config, const SolverParams& params);

enum class SolveStatus { converged, max_iter_reached, infeasible_constraints };

const char* to_string(SolveStatus status) noexcept;

struct IterationRecord {
  int iteration = 0;
  std::vector<double> p;
  double omega = 0.0;
  std::vector<double> rho;
  double q = 0.0;
  double objective = 0.0;       // sum r - q_prev (sum p + Pc) at the new powers
  double sum_power = 0.0;
  double min_rate_slack = 0.0;  // min_k (r_k - RT_k), bits/s
  double max_violation = 0.0;   // largest relative constraint violation
  int fixed_point_iterations = 0;
};

/// Exact feasibility test of the rate and sum-power constraints under the
/// high-SINR bound. r_k >= RT_k is linear in p:
///   p_k >= (g_k / M) (sum_{j != k} p_j + B N0 / beta_k),  g_k = 2^(RT_k / B),
/// so a solution exists iff the spectral radius of the coupling matrix is
/// below 1 and the minimal solution fits the power budget.
struct FeasibilityScreen {
  bool feasible = false;
  double spectral_radius = 0.0;
  std::vector<double> min_power;  // minimal power vector, empty if none exists
  double min_sum_power = 0.0;
};

FeasibilityScreen screen_feasibility(const SystemConfig& config, std::span<const double> beta);

struct SolveResult {
  std::vector<double> p_star;
  double q_star = 0.0;  // lower-bound EE at p_star
  RateVector rates;     // lower-bound rates at p_star
  DualState duals;      // multipliers after the last update
  std::vector<IterationRecord> trace;
  SolveStatus status = SolveStatus::max_iter_reached;
  int iterations = 0;
  bool stopping_rule_met = false;
  double certificate = 0.0;  // subtractive objective of the last iteration
  double max_violation = 0.0;
  long long fixed_point_iterations = 0;
  FeasibilityScreen screen;
};

/// One Jacobi pass of the implicit power update: every output component is
/// computed from the input vector p,
///   p_k' = c_k / (ln2 [ sum_{j != k} c_j / (ln2 (sum_{i != j} p_i + B N0 / beta_j)) + q + omega ])
/// with c_k = B (1 + rho_k) (c_k = 1 + rho_k when the bandwidth factor is off).
std::vector<double> sif_update(std::span<const double> p, const DualState& duals,
                               std::span<const double> beta, double B, double N0,
                               bool include_bandwidth_factor = true);

/// The same map viewed as a vector function T(p).
std::vector<double> interference_map(std::span<const double> p, const DualState& duals,
                                     std::span<const double> beta, double B, double N0,
                                     bool include_bandwidth_factor = true);

struct FixedPointResult {
  std::vector<double> p;
  int iterations = 0;
  bool converged = false;
};

/// Iterates sif_update from `start` until the max relative change is <= tol.
FixedPointResult solve_power_fixed_point(std::span<const double> start, const DualState& duals,
                                         std::span<const double> beta, double B, double N0,
                                         bool include_bandwidth_factor, double tol,
                                         int max_iter);

double dual_update_omega(double omega, std::span<const double> p, double PT, double theta1);

std::vector<double> dual_update_rho(std::span<const double> rho, const RateVector& rates,
                                    std::span<const double> RT, std::span<const double> theta2);

/// Lower-bound EE at the current iterate, clamped at 0.
double q_update(const RateVector& rates, std::span<const double> p, double circuit_power);

/// Gradient of the Lagrangian with respect to each p_k:
///   c_k / (p_k ln2) - sum_{j != k} c_j / (ln2 I_j) - q - omega,
/// with I_j = sum_{i != j} p_i + B N0 / beta_j. Positive below the optimum.
std::vector<double> stationarity_residual(std::span<const double> p, const DualState& duals,
                                          std::span<const double> beta, double B, double N0,
                                          bool include_bandwidth_factor = true);

/// Residual divided by the own-power term c_k / (p_k ln2).
std::vector<double> relative_stationarity_residual(std::span<const double> p,
                                                   const DualState& duals,
                                                   std::span<const double> beta, double B,
                                                   double N0,
                                                   bool include_bandwidth_factor = true);

/// Largest relative violation of C1 (sum p <= PT) and C2 (r_k >= RT_k).
double max_constraint_violation(const SystemConfig& config, std::span<const double> p,
                                const RateVector& rates);

SolveResult solve(const SystemConfig& config, std::span<const double> beta,
                  const SolverParams& params = {});

}  // namespace mimo_ee
