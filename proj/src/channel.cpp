#include "mimo_ee/channel.hpp"

#include <cmath>
#include <string>

#include "mimo_ee/errors.hpp"

namespace mimo_ee {

double large_scale_gain(const SystemConfig& config, double distance, double shadowing_db) {
  return config.phi * db_to_linear(shadowing_db) / std::pow(distance, config.alpha);
}

namespace {

std::vector<double> draw_shadowing_db(const SystemConfig& config, Seed seed) {
  auto engine = make_engine(derive_seed(seed, Stream::shadowing));
  std::normal_distribution<double> normal(0.0, std::sqrt(config.sigma2_dB));
  std::vector<double> out(static_cast<std::size_t>(config.K));
  for (double& s : out) s = config.sigma2_dB > 0 ? normal(engine) : 0.0;
  return out;
}

LargeScaleCoefficients assemble(const SystemConfig& config, std::vector<double> distances,
                                std::vector<double> shadowing_db) {
  LargeScaleCoefficients out;
  out.beta.resize(distances.size());
  for (std::size_t k = 0; k < distances.size(); ++k) {
    out.beta[k] = large_scale_gain(config, distances[k], shadowing_db[k]);
    if (!(out.beta[k] > 0) || !std::isfinite(out.beta[k])) {
      throw DomainError("large-scale gain of user " + std::to_string(k) +
                        " is not a positive finite number");
    }
  }
  out.distances = std::move(distances);
  out.shadowing_db = std::move(shadowing_db);
  return out;
}

}  // namespace

LargeScaleCoefficients sample_large_scale(const SystemConfig& config, Seed seed) {
  config.validate();
  auto engine = make_engine(derive_seed(seed, Stream::placement));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r0 = config.d_min * config.d_min;
  const double r1 = config.cell_radius * config.cell_radius;
  std::vector<double> distances(static_cast<std::size_t>(config.K));
  // Uniform over area: the CDF of d is (d^2 - r0) / (r1 - r0).
  for (double& d : distances) d = std::sqrt(r0 + unit(engine) * (r1 - r0));
  return assemble(config, std::move(distances), draw_shadowing_db(config, seed));
}

LargeScaleCoefficients large_scale_at(const SystemConfig& config,
                                      std::span<const double> distances, Seed seed) {
  config.validate();
  if (distances.size() != static_cast<std::size_t>(config.K)) {
    throw DimensionError("expected " + std::to_string(config.K) + " distances, got " +
                         std::to_string(distances.size()));
  }
  for (double d : distances) {
    if (!(d >= config.d_min && d <= config.cell_radius)) {
      throw ConfigError("distances", "distance " + std::to_string(d) + " m outside the cell");
    }
  }
  return assemble(config, {distances.begin(), distances.end()},
                  draw_shadowing_db(config, seed));
}

ComplexMatrix sample_fast_fading(int M, int K, Seed seed) {
  if (M < 1 || K < 1) {
    throw DimensionError("fast fading needs M, K >= 1 (got " + std::to_string(M) + "x" +
                         std::to_string(K) + ")");
  }
  auto engine = make_engine(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix H(M, K);
  // Column-major fill keeps a user's channel contiguous in the stream.
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) {
      const double re = normal(engine);
      const double im = normal(engine);
      H(m, k) = {re, im};
    }
  }
  return H;
}

ComplexMatrix mrt_precoder(const ComplexMatrix& G) {
  ComplexMatrix V(G.rows(), G.cols());
  for (Eigen::Index k = 0; k < G.cols(); ++k) {
    const double norm = G.col(k).norm();
    if (!(norm > 0)) {
      throw DegenerateError("channel column " + std::to_string(k) + " has zero norm");
    }
    V.col(k) = G.col(k) / norm;
  }
  return V;
}

ChannelRealization compose_channel(const ComplexMatrix& H, const LargeScaleCoefficients& large_scale) {
  if (static_cast<std::size_t>(H.cols()) != large_scale.size()) {
    throw DimensionError("H has " + std::to_string(H.cols()) + " columns but " +
                         std::to_string(large_scale.size()) + " large-scale gains given");
  }
  ChannelRealization out;
  out.H = H;
  out.G.resize(H.rows(), H.cols());
  for (Eigen::Index k = 0; k < H.cols(); ++k) {
    const double b = large_scale.beta[static_cast<std::size_t>(k)];
    if (!(b > 0)) throw DomainError("large-scale gain must be > 0");
    out.G.col(k) = std::sqrt(b) * H.col(k);
  }
  out.V = mrt_precoder(out.G);
  out.large_scale = large_scale;
  return out;
}

ChannelRealization sample_channel(const SystemConfig& config,
                                  const LargeScaleCoefficients& large_scale, Seed seed) {
  return compose_channel(sample_fast_fading(config.M, static_cast<int>(large_scale.size()),
                                            derive_seed(seed, Stream::fast_fading)),
                         large_scale);
}

}  // namespace mimo_ee
