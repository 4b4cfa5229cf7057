#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "mimo_ee/channel.hpp"
#include "mimo_ee/errors.hpp"
#include "mimo_ee/solver.hpp"

using namespace mimo_ee;

namespace {

const double ln2 = std::log(2.0);

DualState duals_of(double q, std::size_t K, double omega = 0.0) {
  return DualState{omega, std::vector<double>(K, 0.0), q};
}

// K = 1, M = 128, beta = 1e-10, Table I bandwidth and noise, 1.28 W circuit
// power, no rate target. Optimum from a bracketed root of the stationarity
// condition B (p + Pc) / (p ln2) = r(p).
constexpr double single_p_star = 0.0994231594717135;
constexpr double single_ee_star = 1741278.4488701583;

SystemConfig single_user() {
  SystemConfig cfg = SystemConfig::table_one();
  cfg.K = 1;
  cfg.RT = {0.0};
  cfg.PT = 10.0;
  return cfg;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("sif_update closed forms") {
  const std::vector<double> one{1.0};
  auto out = sif_update(one, duals_of(1.0, 1), one, 1.0, 1.0);
  CHECK(out[0] == doctest::Approx(1.0 / ln2).epsilon(1e-15));
  CHECK(out[0] == doctest::Approx(1.442695).epsilon(1e-6));

  const std::vector<double> p{1.0, 1.0};
  const std::vector<double> beta{1.0, 1.0};
  out = sif_update(p, duals_of(0.5, 2), beta, 1.0, 1.0);
  CHECK(out[0] == doctest::Approx(1.1812322182992825).epsilon(1e-14));
  CHECK(out[1] == out[0]);
  CHECK(interference_map(p, duals_of(0.5, 2), beta, 1.0, 1.0) == out);
}

TEST_CASE("sif_update symmetry and errors") {
  const std::vector<double> p(4, 0.01);
  const std::vector<double> beta(4, 3e-11);
  DualState d{2.0, std::vector<double>(4, 0.3), 1e6};
  const auto out = sif_update(p, d, beta, 120e3, 1e-20);
  for (double x : out) CHECK(x == doctest::Approx(out[0]).epsilon(1e-15));
  CHECK_THROWS_AS(sif_update(std::vector<double>{0.01, 0.0, 0.01, 0.01}, d, beta, 120e3, 1e-20),
                  DomainError);
}

TEST_CASE("bandwidth factor only matters when B != 1") {
  const std::vector<double> p{0.2, 0.5, 0.1};
  const std::vector<double> beta{0.3, 1.0, 2.0};
  DualState d{0.1, {0.2, 0.0, 0.5}, 0.7};
  CHECK(sif_update(p, d, beta, 1.0, 0.4, true) == sif_update(p, d, beta, 1.0, 0.4, false));
  CHECK(sif_update(p, d, beta, 3.0, 0.4, true) != sif_update(p, d, beta, 3.0, 0.4, false));
}

TEST_CASE("dual_update_omega examples") {
  const std::vector<double> full{0.5, 0.5};
  CHECK(dual_update_omega(0.3, full, 1.0, 2.0) == 0.3);
  const std::vector<double> half{0.25, 0.25};
  CHECK(dual_update_omega(0.1, half, 1.0, 1.0) == 0.0);
  const std::vector<double> over{0.6, 0.6};
  CHECK(dual_update_omega(0.1, over, 1.0, 0.5) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("dual_update_rho examples") {
  const std::vector<double> RT{1000, 1000};
  const RateVector at{{1000, 1000}, RateKind::lower_high_snr};
  const std::vector<double> rho{0.4, 0.7};
  const std::vector<double> theta{1e-3, 1e-3};
  CHECK(dual_update_rho(rho, at, RT, theta) == rho);

  const RateVector mixed{{2000, 0}, RateKind::lower_high_snr};
  const auto out = dual_update_rho(std::vector<double>{0, 0}, mixed, RT, theta);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == doctest::Approx(1.0).epsilon(1e-15));

  const RateVector plenty{{1e7, 1e7}, RateKind::lower_high_snr};
  const auto down = dual_update_rho(rho, plenty, RT, theta);
  CHECK(down == std::vector<double>{0.0, 0.0});
  const auto small = dual_update_rho(rho, RateVector{{1100, 1100}, RateKind::lower_high_snr}, RT,
                                     theta);
  CHECK(small[0] < rho[0]);
  CHECK(small[0] >= 0.0);
  CHECK_THROWS_AS(dual_update_rho(rho, at, std::vector<double>{1000}, theta), DimensionError);
}

TEST_CASE("q_update examples") {
  const RateVector zero{{0, 0}, RateKind::lower_high_snr};
  CHECK(q_update(zero, std::vector<double>{0.5, 0.5}, 1.28) == 0.0);
  const RateVector r{{1.0e6, 0.68e6}, RateKind::lower_high_snr};
  CHECK(q_update(r, std::vector<double>{0.5, 0.5}, 1.28) == doctest::Approx(736842.1).epsilon(1e-7));
  const RateVector neg{{-5.0, 1.0}, RateKind::lower_high_snr};
  CHECK(q_update(neg, std::vector<double>{0.5, 0.5}, 1.28) == 0.0);
}

TEST_CASE("q is a fixed point at the single-user optimum") {
  const auto cfg = single_user();
  const std::vector<double> beta{1e-10};
  const std::vector<double> p{single_p_star};
  const auto rates = lb_rate_high_snr(beta, p, cfg.M, cfg.B, cfg.N0);
  const double q = q_update(rates, p, cfg.total_circuit_power());
  CHECK(q == doctest::Approx(single_ee_star).epsilon(1e-13));
  const auto next = sif_update(p, duals_of(q, 1), beta, cfg.B, cfg.N0);
  CHECK(next[0] == doctest::Approx(single_p_star).epsilon(1e-12));
  const auto r2 = lb_rate_high_snr(beta, next, cfg.M, cfg.B, cfg.N0);
  CHECK(q_update(r2, next, cfg.total_circuit_power()) == doctest::Approx(q).epsilon(1e-14));
}

TEST_CASE("stationarity residual") {
  // single user closed form
  const double B = 120e3, q = 2e6, omega = 5e4, rho = 0.3;
  const std::vector<double> beta{1e-10};
  DualState d{omega, {rho}, q};
  const std::vector<double> p{B * (1 + rho) / (ln2 * (q + omega))};
  CHECK(std::abs(relative_stationarity_residual(p, d, beta, B, 1e-20)[0]) < 1e-9);
  // positive below, negative above
  CHECK(stationarity_residual(std::vector<double>{p[0] / 2}, d, beta, B, 1e-20)[0] > 0);
  CHECK(stationarity_residual(std::vector<double>{p[0] * 2}, d, beta, B, 1e-20)[0] < 0);

  // fixed point of T at a Table I drop
  const auto cfg = SystemConfig::table_one();
  const auto ls = sample_large_scale(cfg, 17);
  const DualState dd = duals_of(1.6e6, 3);
  const std::vector<double> start(3, 0.01);
  const auto fp = solve_power_fixed_point(start, dd, ls.beta, cfg.B, cfg.N0, true, 1e-12, 200000);
  REQUIRE(fp.converged);
  for (double r : relative_stationarity_residual(fp.p, dd, ls.beta, cfg.B, cfg.N0)) {
    CHECK(std::abs(r) <= 1e-6);
  }
}

TEST_CASE("resolve_params defaults and validation") {
  const auto cfg = SystemConfig::table_one();
  const auto r = resolve_params(cfg, {});
  CHECK(r.tau == doctest::Approx(1e-6 * cfg.B * cfg.K));
  CHECK(r.theta2[0] == doctest::Approx(0.1 / cfg.RT[0]));
  CHECK(r.p_init == std::vector<double>(3, cfg.PT / 6));
  CHECK(r.max_iter == 500);
  SolverParams bad;
  bad.theta1 = -1.0;
  try {
    resolve_params(cfg, bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "theta1");
  }
  bad = {};
  bad.p_init = {0.1, 0.2};
  CHECK_THROWS_AS(resolve_params(cfg, bad), ConfigError);
  bad = {};
  bad.max_iter = 0;
  CHECK_THROWS_AS(resolve_params(cfg, bad), ConfigError);
}

TEST_CASE("feasibility screen") {
  auto cfg = SystemConfig::table_one();
  const auto ls = sample_large_scale(cfg, 3);
  // 2^6 / 128 coupling with two interferers: radius exactly one
  const auto tight = screen_feasibility(cfg, ls.beta);
  CHECK(tight.spectral_radius == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(tight.feasible);

  cfg.RT = {4.0 * cfg.B};
  const auto loose = screen_feasibility(cfg, ls.beta);
  CHECK(loose.feasible);
  CHECK(loose.spectral_radius == doctest::Approx(2 * 16.0 / 128).epsilon(1e-12));
  // the minimal vector meets every target with equality
  const auto r = lb_rate_high_snr(ls.beta, loose.min_power, cfg.M, cfg.B, cfg.N0);
  for (int k = 0; k < 3; ++k) CHECK(r[k] == doctest::Approx(cfg.RT[0]).epsilon(1e-10));

  cfg.PT = loose.min_sum_power * 0.5;
  CHECK_FALSE(screen_feasibility(cfg, ls.beta).feasible);
}

TEST_CASE("single user reaches the analytic optimum") {
  const auto cfg = single_user();
  const std::vector<double> beta{1e-10};
  const auto res = solve(cfg, beta);
  CHECK(res.status == SolveStatus::converged);
  CHECK(res.p_star[0] == doctest::Approx(single_p_star).epsilon(1e-6));
  CHECK(res.q_star == doctest::Approx(single_ee_star).epsilon(1e-9));
  CHECK(res.iterations < 20);
}

TEST_CASE("solve invariants on Table I drops") {
  const auto cfg = SystemConfig::table_one();
  for (Seed s = 0; s < 10; ++s) {
    const auto ls = sample_large_scale(cfg, s);
    const auto res = solve(cfg, ls.beta);
    CHECK(res.trace.size() <= 501);
    CHECK(res.trace.size() == static_cast<std::size_t>(res.iterations) + 1);
    for (const auto& t : res.trace) {
      REQUIRE(t.omega >= 0);
      for (double r : t.rho) REQUIRE(r >= 0);
      for (double p : t.p) REQUIRE(p > 0);
      REQUIRE(t.q >= 0);
    }
    // the targets cannot all be met, which the screen proves
    CHECK_FALSE(res.screen.feasible);
    CHECK(res.stopping_rule_met);
    CHECK(std::abs(res.certificate) <= 1e-6 * cfg.B * cfg.K);
    const auto again = solve(cfg, ls.beta);
    CHECK(again.p_star == res.p_star);
    CHECK(again.trace.back().q == res.trace.back().q);
  }
}

TEST_CASE("unreachable targets fall back to the power-budget problem") {
  auto cfg = SystemConfig::table_one();
  cfg.M = 32;
  cfg.K = 8;
  cfg.PT = 0.8;
  const auto beta = sample_large_scale(cfg, 4).beta;
  const auto res = solve(cfg, beta);
  REQUIRE_FALSE(res.screen.feasible);
  CHECK(res.status == SolveStatus::infeasible_constraints);
  CHECK(res.stopping_rule_met);
  for (double r : res.duals.rho) CHECK(r == 0.0);

  auto free = cfg;
  free.RT = {0.0};
  const auto ref = solve(free, beta);
  CHECK(res.q_star == doctest::Approx(ref.q_star).epsilon(1e-9));
}

TEST_CASE("converged runs carry the certificate and stay positive") {
  auto cfg = SystemConfig::table_one();
  cfg.RT = {3.0 * cfg.B};
  for (Seed s = 0; s < 10; ++s) {
    const auto ls = sample_large_scale(cfg, s);
    const auto res = solve(cfg, ls.beta);
    REQUIRE(res.status == SolveStatus::converged);
    CHECK(std::abs(res.certificate) <= 1e-6 * cfg.B * cfg.K);
    for (double p : res.p_star) CHECK(p > 0);
    CHECK(res.max_violation <= 1e-6);
  }
}

TEST_CASE("symmetric users get equal powers") {
  auto cfg = SystemConfig::table_one();
  cfg.RT = {0.0};
  const std::vector<double> beta(3, 4e-11);
  const auto res = solve(cfg, beta);
  CHECK(res.status == SolveStatus::converged);
  CHECK(res.p_star[1] == doctest::Approx(res.p_star[0]).epsilon(1e-12));
  CHECK(res.p_star[2] == doctest::Approx(res.p_star[0]).epsilon(1e-12));
}

TEST_CASE("binding power budget is enforced through omega") {
  auto cfg = SystemConfig::table_one();
  cfg.RT = {0.0};
  const auto ls = sample_large_scale(cfg, 4);
  const auto free = solve(cfg, ls.beta);
  const double used = std::accumulate(free.p_star.begin(), free.p_star.end(), 0.0);
  cfg.PT = 0.5 * used;
  const auto res = solve(cfg, ls.beta);
  CHECK(res.status == SolveStatus::converged);
  CHECK(res.duals.omega > 0);
  const double total = std::accumulate(res.p_star.begin(), res.p_star.end(), 0.0);
  CHECK(total <= cfg.PT * (1 + 1e-6));
  CHECK(total >= cfg.PT * 0.99);
}

TEST_CASE("fixed steps remain available") {
  auto cfg = SystemConfig::table_one();
  cfg.RT = {0.0};
  const auto ls = sample_large_scale(cfg, 2);
  SolverParams fixed;
  fixed.adaptive_steps = false;
  const auto a = solve(cfg, ls.beta, fixed);
  const auto b = solve(cfg, ls.beta);
  // constraints inactive: identical paths
  CHECK(a.p_star == b.p_star);
  CHECK(a.status == SolveStatus::converged);
}

TEST_CASE("solve rejects bad inputs") {
  const auto cfg = SystemConfig::table_one();
  CHECK_THROWS_AS(solve(cfg, std::vector<double>{1e-10, 1e-10}), DimensionError);
  CHECK_THROWS_AS(solve(cfg, std::vector<double>{1e-10, 0.0, 1e-10}), DomainError);
}

}  // TEST_SUITE
