#include "mimo_ee/rate_model.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "mimo_ee/errors.hpp"

namespace mimo_ee {

const char* to_string(RateKind kind) noexcept {
  switch (kind) {
    case RateKind::exact: return "exact";
    case RateKind::lower_full: return "lower_full";
    case RateKind::lower_high_snr: return "lower_high_snr";
    case RateKind::lower_low_snr: return "lower_low_snr";
  }
  return "unknown";
}

double RateVector::sum() const noexcept { return std::accumulate(r.begin(), r.end(), 0.0); }

void check_powers(std::span<const double> p) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(p[k] >= 0) || !std::isfinite(p[k])) {
      throw DomainError("power of user " + std::to_string(k) + " must be finite and >= 0");
    }
  }
}

namespace {

void check_same_size(std::span<const double> beta, std::span<const double> p) {
  if (beta.size() != p.size()) {
    throw DimensionError("beta has " + std::to_string(beta.size()) + " entries, p has " +
                         std::to_string(p.size()));
  }
}

void check_gains(std::span<const double> beta) {
  for (double b : beta) {
    if (!(b > 0) || !std::isfinite(b)) throw DomainError("large-scale gains must be > 0");
  }
}

// M b_k p_k / (b_k sum_{j != k} p_j + B N0) for every k.
std::vector<double> hardened_sinr(std::span<const double> beta, std::span<const double> p,
                                  int M, double B, double N0) {
  check_same_size(beta, p);
  check_gains(beta);
  check_powers(p);
  if (M < 1) throw DomainError("antenna count must be >= 1");
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  std::vector<double> out(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double denom = beta[k] * (total - p[k]) + B * N0;
    if (!(denom > 0)) {
      throw DomainError("zero interference-plus-noise for user " + std::to_string(k));
    }
    out[k] = M * beta[k] * p[k] / denom;
  }
  return out;
}

}  // namespace

std::vector<double> exact_sinr(const ChannelRealization& channel, std::span<const double> p,
                               double B, double N0) {
  const auto K = static_cast<std::size_t>(channel.users());
  if (p.size() != K) {
    throw DimensionError("channel has " + std::to_string(K) + " users, p has " +
                         std::to_string(p.size()));
  }
  check_powers(p);
  // cross(k, j) = g_k^H v_j
  const ComplexMatrix cross = channel.G.adjoint() * channel.V;
  std::vector<double> sinr(K);
  for (std::size_t k = 0; k < K; ++k) {
    double interference = B * N0;
    for (std::size_t j = 0; j < K; ++j) {
      if (j != k) interference += p[j] * std::norm(cross(Eigen::Index(k), Eigen::Index(j)));
    }
    if (!(interference > 0)) {
      throw DomainError("zero interference-plus-noise for user " + std::to_string(k));
    }
    sinr[k] = p[k] * std::norm(cross(Eigen::Index(k), Eigen::Index(k))) / interference;
  }
  return sinr;
}

RateVector exact_rate(std::span<const double> sinr, double B) {
  RateVector out{std::vector<double>(sinr.size()), RateKind::exact};
  for (std::size_t k = 0; k < sinr.size(); ++k) {
    if (!(sinr[k] >= 0)) throw DomainError("SINR must be >= 0");
    out.r[k] = B * std::log2(1.0 + sinr[k]);
  }
  return out;
}

RateVector lb_rate_full(std::span<const double> beta, std::span<const double> p, int M,
                        double B, double N0) {
  const auto sinr = hardened_sinr(beta, p, M, B, N0);
  RateVector out{std::vector<double>(sinr.size()), RateKind::lower_full};
  for (std::size_t k = 0; k < sinr.size(); ++k) out.r[k] = B * std::log2(1.0 + sinr[k]);
  return out;
}

RateVector lb_rate_high_snr(std::span<const double> beta, std::span<const double> p, int M,
                            double B, double N0) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 0.0) {
      throw DomainError("high-SINR rate bound is -inf for zero power (user " +
                        std::to_string(k) + ")");
    }
  }
  const auto sinr = hardened_sinr(beta, p, M, B, N0);
  RateVector out{std::vector<double>(sinr.size()), RateKind::lower_high_snr};
  for (std::size_t k = 0; k < sinr.size(); ++k) out.r[k] = B * std::log2(sinr[k]);
  return out;
}

RateVector lb_rate_low_snr(std::span<const double> beta, std::span<const double> p, int M,
                           double B, double N0, const LowSnrParams& params) {
  if (!(params.b > 0)) throw DomainError("low-SINR slope b must be > 0");
  RateVector out = lb_rate_high_snr(beta, p, M, B, N0);
  out.kind = RateKind::lower_low_snr;
  // B*(a + b*log2(x)) = B*a + b*(B*log2(x))
  for (double& r : out.r) r = B * params.a + params.b * r;
  return out;
}

double energy_efficiency(const RateVector& rates, std::span<const double> p,
                         double circuit_power) {
  if (rates.size() != p.size()) throw DimensionError("rate and power vectors differ in length");
  check_powers(p);
  const double denom = std::accumulate(p.begin(), p.end(), 0.0) + circuit_power;
  if (!(denom > 0)) throw DegenerateError("total consumed power is zero");
  return rates.sum() / denom;
}

double subtractive_objective(const RateVector& rates, std::span<const double> p,
                             double circuit_power, double q) {
  if (rates.size() != p.size()) throw DimensionError("rate and power vectors differ in length");
  check_powers(p);
  const double consumed = std::accumulate(p.begin(), p.end(), 0.0) + circuit_power;
  return rates.sum() - q * consumed;
}

}  // namespace mimo_ee
