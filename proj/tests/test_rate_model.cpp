#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "mimo_ee/channel.hpp"
#include "mimo_ee/errors.hpp"
#include "mimo_ee/rate_model.hpp"

using namespace mimo_ee;

namespace {

ChannelRealization fixed_channel() {
  ComplexMatrix H(4, 2);
  H << std::complex<double>(1, 0.5), std::complex<double>(-0.3, 0.2),
      std::complex<double>(0.2, -1), std::complex<double>(0.7, 0.1),
      std::complex<double>(-0.4, 0.3), std::complex<double>(0.5, -0.6),
      std::complex<double>(0.9, 0), std::complex<double>(-0.2, 0.8);
  LargeScaleCoefficients ls;
  ls.beta = {0.5, 2.0};
  return compose_channel(H, ls);
}

const std::vector<double> one{1.0};

}  // namespace

TEST_SUITE("ratemodel") {

TEST_CASE("exact_rate examples") {
  CHECK(exact_rate(std::vector<double>{0.0}, 1.0)[0] == 0.0);
  CHECK(exact_rate(std::vector<double>{1.0}, 1.0)[0] == 1.0);
  CHECK(exact_rate(std::vector<double>{127.0}, 120000.0)[0] == doctest::Approx(840000.0).epsilon(1e-15));
  CHECK_THROWS_AS(exact_rate(std::vector<double>{-0.1}, 1.0), DomainError);
  CHECK(exact_rate(std::vector<double>{1.0}, 1.0).kind == RateKind::exact);
}

TEST_CASE("exact_sinr single user equals p |g|^2 / (B N0)") {
  LargeScaleCoefficients ls;
  ls.beta = {3e-3};
  const auto ch = compose_channel(sample_fast_fading(16, 1, 9), ls);
  const std::vector<double> p{0.7};
  const double g2 = ch.G.col(0).squaredNorm();
  CHECK(exact_sinr(ch, p, 2.0, 0.5)[0] == doctest::Approx(0.7 * g2 / 1.0).epsilon(1e-13));
}

TEST_CASE("exact_sinr orthogonal columns see no interference") {
  ComplexMatrix H = ComplexMatrix::Zero(4, 2);
  H(0, 0) = {1, 1};
  H(2, 1) = {0, 2};
  LargeScaleCoefficients ls;
  ls.beta = {1, 1};
  const auto ch = compose_channel(H, ls);
  const std::vector<double> p{0.3, 0.4};
  const auto s = exact_sinr(ch, p, 1.0, 1.0);
  CHECK(s[0] == doctest::Approx(0.3 * 2.0).epsilon(1e-14));
  CHECK(s[1] == doctest::Approx(0.4 * 4.0).epsilon(1e-14));
}

TEST_CASE("exact_sinr dense oracle, M=4 K=2") {
  const auto ch = fixed_channel();
  const std::vector<double> p{0.1, 0.2};
  const auto s = exact_sinr(ch, p, 1.0, 1.0);
  CHECK(s[0] == doctest::Approx(0.13830592444780845).epsilon(1e-13));
  CHECK(s[1] == doctest::Approx(0.6183782952294885).epsilon(1e-13));
  CHECK_THROWS_AS(exact_sinr(ch, std::vector<double>{0.1}, 1.0, 1.0), DimensionError);
}

TEST_CASE("lb_rate_full examples") {
  const std::vector<double> beta{1.0, 1.0};
  const std::vector<double> p{0.0, 1.0};
  CHECK(lb_rate_full(beta, p, 128, 1.0, 1.0)[0] == 0.0);
  CHECK(lb_rate_full(one, one, 128, 1.0, 1.0)[0] == doctest::Approx(std::log2(129.0)).epsilon(1e-15));
  CHECK_THROWS_AS(lb_rate_full(std::vector<double>{0.0}, one, 128, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(lb_rate_full(std::vector<double>{-1.0}, one, 128, 1.0, 1.0), DomainError);
}

TEST_CASE("lb_rate_high_snr examples") {
  CHECK(lb_rate_high_snr(one, one, 128, 1.0, 1.0)[0] == doctest::Approx(7.0).epsilon(1e-15));
  const std::vector<double> beta{2e-9, 2e-9};
  const std::vector<double> p{0.3, 0.3};
  const auto r = lb_rate_high_snr(beta, p, 128, 120000.0, 0.0);
  CHECK(r[0] == doctest::Approx(840000.0).epsilon(1e-14));
  CHECK(r[1] == doctest::Approx(840000.0).epsilon(1e-14));
  CHECK_THROWS_AS(lb_rate_high_snr(beta, std::vector<double>{0.0, 0.3}, 128, 1.0, 1.0),
                  DomainError);
  // may go negative
  CHECK(lb_rate_high_snr(one, std::vector<double>{1e-3}, 1, 1.0, 1.0)[0] < 0);
}

TEST_CASE("lb_rate_low_snr examples") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> beta{u(rng), u(rng), u(rng)};
    const std::vector<double> p{u(rng), u(rng), u(rng)};
    const auto hi = lb_rate_high_snr(beta, p, 32, 2.0, 0.1);
    const auto lo = lb_rate_low_snr(beta, p, 32, 2.0, 0.1, {0.0, 1.0});
    for (int k = 0; k < 3; ++k) CHECK(lo[k] == doctest::Approx(hi[k]).epsilon(1e-15));
  }
  CHECK(lb_rate_low_snr(one, one, 128, 1.0, 1.0, {1.0, 1.0})[0] == doctest::Approx(8.0));
  CHECK(lb_rate_low_snr(one, one, 128, 1.0, 1.0, {0.5, 0.75})[0] == doctest::Approx(5.75));
  CHECK_THROWS_AS(lb_rate_low_snr(one, one, 128, 1.0, 1.0, {0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(lb_rate_low_snr(one, std::vector<double>{0.0}, 128, 1.0, 1.0, {0.0, 1.0}),
                  DomainError);
}

TEST_CASE("energy_efficiency examples") {
  const RateVector r{{840000, 840000}, RateKind::exact};
  const std::vector<double> p{0.5, 0.5};
  CHECK(energy_efficiency(r, p, 128 * 0.01) == doctest::Approx(736842.1).epsilon(1e-7));
  const RateVector zero{{0, 0}, RateKind::exact};
  CHECK(energy_efficiency(zero, p, 1.28) == 0.0);
  const std::vector<double> none{0.0, 0.0};
  CHECK(energy_efficiency(r, none, 1.28) == doctest::Approx(1680000 / 1.28));
  CHECK_THROWS_AS(energy_efficiency(r, none, 0.0), DegenerateError);
  const RateVector r3{{3 * 840000.0, 3 * 840000.0}, RateKind::exact};
  CHECK(energy_efficiency(r3, p, 1.28) == doctest::Approx(3 * energy_efficiency(r, p, 1.28)));
}

TEST_CASE("subtractive_objective examples") {
  const RateVector r{{1.0e6, 0.68e6}, RateKind::lower_high_snr};
  const std::vector<double> p{0.4, 0.6};
  CHECK(subtractive_objective(r, p, 1.28, 0.0) == doctest::Approx(1.68e6));
  CHECK(subtractive_objective(r, p, 1.28, 5e5) == doctest::Approx(540000.0).epsilon(1e-12));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (int i = 0; i < 100; ++i) {
    const RateVector rr{{u(rng) * 1e6, u(rng) * 1e6, u(rng) * 1e6}, RateKind::lower_high_snr};
    const std::vector<double> pp{u(rng), u(rng), u(rng)};
    const double q = energy_efficiency(rr, pp, 1.28);
    // root identity up to rounding of one product and one sum
    CHECK(std::abs(subtractive_objective(rr, pp, 1.28, q)) <= 1e-15 * 4 * rr.sum());
  }
}

TEST_CASE("bound ordering and monotonicity on random instances") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> lp(std::log(1e-6), 0.0);
  std::uniform_real_distribution<double> lb(std::log(1e-13), std::log(1e-8));
  for (int i = 0; i < 500; ++i) {
    std::vector<double> beta(4), p(4);
    for (auto& b : beta) b = std::exp(lb(rng));
    for (auto& x : p) x = std::exp(lp(rng));
    const auto lo = lb_rate_high_snr(beta, p, 64, 120e3, 1e-20);
    const auto hi = lb_rate_full(beta, p, 64, 120e3, 1e-20);
    for (int k = 0; k < 4; ++k) REQUIRE(lo[k] <= hi[k]);

    const std::size_t k = static_cast<std::size_t>(i % 4);
    auto up = p;
    up[k] *= 1.01;
    const auto moved = lb_rate_high_snr(beta, up, 64, 120e3, 1e-20);
    for (std::size_t j = 0; j < 4; ++j) {
      if (j == k) CHECK(moved[j] > lo[j]);
      else CHECK(moved[j] < lo[j]);
    }
  }
}

TEST_CASE("fast-fading mean of the exact rate dominates the hardening bound (M=64)") {
  SystemConfig cfg = SystemConfig::table_one();
  cfg.M = 64;
  const auto ls = sample_large_scale(cfg, 5);
  const std::vector<double> p{0.002, 0.001, 0.003};
  const auto bound = lb_rate_full(ls.beta, p, cfg.M, cfg.B, cfg.N0);
  const int n = 2000;
  std::vector<double> sum(3, 0.0), sum2(3, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto ch = compose_channel(sample_fast_fading(cfg.M, 3, static_cast<Seed>(i)), ls);
    const auto r = exact_rate(exact_sinr(ch, p, cfg.B, cfg.N0), cfg.B);
    for (int k = 0; k < 3; ++k) {
      sum[k] += r[k];
      sum2[k] += r[k] * r[k];
    }
  }
  for (int k = 0; k < 3; ++k) {
    const double mean = sum[k] / n;
    const double se = std::sqrt((sum2[k] / n - mean * mean) / n);
    CHECK(mean >= bound[k] - 2 * se);
  }
}

}  // TEST_SUITE
