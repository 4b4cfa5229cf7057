#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "mimo_ee/config.hpp"
#include "mimo_ee/random.hpp"

namespace mimo_ee {

using ComplexMatrix = Eigen::MatrixXcd;

/// Path loss plus log-normal shadowing for each user of one drop.
struct LargeScaleCoefficients {
  std::vector<double> beta;         // linear power gain, > 0
  std::vector<double> distances;    // m, in [d_min, cell_radius]
  std::vector<double> shadowing_db;  // 10*log10 of the shadowing factor

  std::size_t size() const noexcept { return beta.size(); }
};

struct ChannelRealization {
  ComplexMatrix H;  // M x K fast fading, CN(0, 1) entries
  ComplexMatrix G;  // M x K composed channel, column k = sqrt(beta_k) * h_k
  ComplexMatrix V;  // M x K MRT precoders, unit-norm columns
  LargeScaleCoefficients large_scale;

  int antennas() const noexcept { return static_cast<int>(G.rows()); }
  int users() const noexcept { return static_cast<int>(G.cols()); }
};

/// beta = phi * 10^(shadowing_db/10) / distance^alpha.
double large_scale_gain(const SystemConfig& config, double distance, double shadowing_db);

/// Drops K users uniformly over the annulus [d_min, cell_radius] and draws one
/// quasi-static shadowing value per user. Placement and shadowing come from
/// separate sub-streams of `seed`.
LargeScaleCoefficients sample_large_scale(const SystemConfig& config, Seed seed);

/// Same as sample_large_scale but with caller-fixed distances; only the
/// shadowing is random. Distances must lie in [d_min, cell_radius].
LargeScaleCoefficients large_scale_at(const SystemConfig& config,
                                      std::span<const double> distances, Seed seed);

/// M x K matrix of i.i.d. CN(0, 1) entries (variance 1/2 per component).
ComplexMatrix sample_fast_fading(int M, int K, Seed seed);

ComplexMatrix mrt_precoder(const ComplexMatrix& G);

ChannelRealization compose_channel(const ComplexMatrix& H, const LargeScaleCoefficients& large_scale);

/// Convenience: fast fading drawn from the fast-fading sub-stream of `seed`.
ChannelRealization sample_channel(const SystemConfig& config,
                                  const LargeScaleCoefficients& large_scale, Seed seed);

}  // namespace mimo_ee
