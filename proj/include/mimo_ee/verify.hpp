#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mimo_ee/config.hpp"
#include "mimo_ee/random.hpp"
#include "mimo_ee/solver.hpp"

namespace mimo_ee {

enum class GridScale { linear, logarithmic };

const char* to_string(GridScale scale) noexcept;

/// Per-axis power grid. Point i of n sits at fraction i/(n-1) of the range
/// (of the log range for logarithmic), so an n-point grid is a subset of the
/// 2(n-1)+1 point grid.
struct GridSpec {
  double p_min = 1e-6;  // W
  double p_max = 1.0;   // W
  int points_per_axis = 200;
  GridScale scale = GridScale::logarithmic;

  void validate() const;
  std::vector<double> axis() const;

  /// Log grid over [1e-6 PT, PT].
  static GridSpec for_config(const SystemConfig& config, int points_per_axis = 200);
};

struct OracleResult {
  std::vector<double> p_best;  // empty when nothing is feasible
  double ee_best = 0.0;
  std::uint64_t feasible_count = 0;
  std::uint64_t evaluated_count = 0;

  bool feasible() const noexcept { return feasible_count > 0; }
};

inline constexpr std::uint64_t default_grid_budget = 10'000'000;

/// Exhaustive search of the lower-bound EE over the K-fold product grid,
/// keeping points with sum p <= PT and every rate >= its target. Ties go to
/// the lexicographically smallest p, so the result is independent of the
/// thread count. Throws BudgetError when points^K exceeds `budget`.
OracleResult grid_search(const SystemConfig& config, std::span<const double> beta,
                         const GridSpec& grid, std::uint64_t budget = default_grid_budget,
                         int threads = 1);

struct ConcavityReport {
  int samples = 0;
  int violations = 0;
  double worst_gap = 0.0;  // most negative normalized (F(mix) - mix of F), 0 if none
};

/// Checks the subtractive objective sum r - q (sum p + Pc), as a function of
/// log-powers, for midpoint concavity on random segments of the box
/// [ln(1e-6 PT), ln PT]^K. Tolerance is 1e-9 of the magnitudes involved.
ConcavityReport verify_concavity(const SystemConfig& config, std::span<const double> beta,
                                 double q, int samples, Seed seed);

/// Same test for one given segment and mixing weight; returns the normalized
/// gap, negative when concavity fails.
double concavity_gap(const SystemConfig& config, std::span<const double> beta, double q,
                     std::span<const double> log_pa, std::span<const double> log_pb,
                     double lambda);

struct SifReport {
  int samples = 0;
  int positivity_violations = 0;
  int monotonicity_violations = 0;
  int scalability_violations = 0;
  int scalability_strict = 0;  // draws where c T(p) > T(c p) in every component

  int total_violations() const noexcept {
    return positivity_violations + monotonicity_violations + scalability_violations;
  }
};

/// Random checks of the power map T: positivity, componentwise monotonicity
/// and scalability c T(p) >= T(c p) for c > 1. Powers are drawn log-uniform
/// in [1e-9, 1] W. The map is evaluated with the bandwidth factor.
SifReport verify_sif_properties(const DualState& duals, std::span<const double> beta, int M,
                                double B, double N0, int samples, Seed seed);

struct OracleComparison {
  SolveResult solver;
  OracleResult oracle;
  double ee_solver = 0.0;
  double ee_oracle = 0.0;
  double relative_gap = 0.0;  // (ee_oracle - ee_solver) / ee_oracle
  double solver_violation = 0.0;
  double oracle_violation = 0.0;
  int iterations = 0;
};

OracleComparison verify_solver_against_oracle(const SystemConfig& config,
                                              std::span<const double> beta,
                                              const SolverParams& params, const GridSpec& grid,
                                              int threads = 1);

}  // namespace mimo_ee
