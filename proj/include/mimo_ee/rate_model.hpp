#pragma once

#include <span>
#include <vector>

#include "mimo_ee/channel.hpp"

namespace mimo_ee {

enum class RateKind { exact, lower_full, lower_high_snr, lower_low_snr };

const char* to_string(RateKind kind) noexcept;

/// Per-user rates in bits/s, tagged with the model that produced them.
struct RateVector {
  std::vector<double> r;
  RateKind kind = RateKind::exact;

  double sum() const noexcept;
  std::size_t size() const noexcept { return r.size(); }
  double operator[](std::size_t k) const { return r[k]; }
};

/// Affine constants of the low-SINR bound B*(a + b*log2(SINR)). There are no
/// defaults; the caller calibrates them for the operating SINR range.
struct LowSnrParams {
  double a = 0.0;
  double b = 1.0;
};

/// Throws DomainError if any power is negative or not finite.
void check_powers(std::span<const double> p);

/// Exact downlink SINR under the realization's precoders:
/// p_k |g_k^H v_k|^2 / (sum_{j != k} p_j |g_k^H v_j|^2 + B N0).
std::vector<double> exact_sinr(const ChannelRealization& channel, std::span<const double> p,
                               double B, double N0);

RateVector exact_rate(std::span<const double> sinr, double B);

/// Channel-hardening bound B log2(1 + M b_k p_k / (b_k sum_{j != k} p_j + B N0)).
RateVector lb_rate_full(std::span<const double> beta, std::span<const double> p, int M,
                        double B, double N0);

/// High-SINR bound B log2(M b_k p_k / (b_k sum_{j != k} p_j + B N0)). Can be
/// negative; requires every p_k > 0.
RateVector lb_rate_high_snr(std::span<const double> beta, std::span<const double> p, int M,
                            double B, double N0);

RateVector lb_rate_low_snr(std::span<const double> beta, std::span<const double> p, int M,
                           double B, double N0, const LowSnrParams& params);

/// Sum rate over total consumed power (transmit + circuit), bits/J.
double energy_efficiency(const RateVector& rates, std::span<const double> p,
                         double circuit_power);

/// sum r - q * (sum p + circuit); zero exactly when q is the EE of (r, p).
double subtractive_objective(const RateVector& rates, std::span<const double> p,
                             double circuit_power, double q);

}  // namespace mimo_ee
