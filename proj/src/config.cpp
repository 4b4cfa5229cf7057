#include "mimo_ee/config.hpp"

#include <string>

#include "mimo_ee/errors.hpp"

namespace mimo_ee {

namespace {

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

}  // namespace

void SystemConfig::validate() const {
  require(M >= 1, "M", "antenna count must be >= 1");
  require(K >= 1, "K", "user count must be >= 1");
  require(std::isfinite(B) && B > 0, "B", "bandwidth must be > 0");
  require(std::isfinite(N0) && N0 > 0, "N0", "noise PSD must be > 0");
  require(std::isfinite(PT) && PT > 0, "PT", "power budget must be > 0");
  require(Pc.size() == 1 || Pc.size() == static_cast<std::size_t>(M), "Pc",
          "expected 1 or M entries");
  for (double v : Pc) require(std::isfinite(v) && v >= 0, "Pc", "entries must be >= 0");
  require(RT.size() == 1 || RT.size() == static_cast<std::size_t>(K), "RT",
          "expected 1 or K entries");
  for (double v : RT) require(std::isfinite(v) && v >= 0, "RT", "entries must be >= 0");
  require(std::isfinite(d_min) && d_min > 0, "d_min", "must be > 0");
  require(std::isfinite(cell_radius) && cell_radius > d_min, "cell_radius",
          "must exceed d_min");
  require(std::isfinite(alpha) && alpha >= 0, "alpha", "must be >= 0");
  require(std::isfinite(sigma2_dB) && sigma2_dB >= 0, "sigma2_dB", "must be >= 0");
  require(std::isfinite(phi) && phi > 0, "phi", "must be > 0");
}

double SystemConfig::total_circuit_power() const {
  if (Pc.size() == 1) return Pc.front() * M;
  double total = 0.0;
  for (double v : Pc) total += v;
  return total;
}

double SystemConfig::circuit_power(int antenna) const {
  return Pc.size() == 1 ? Pc.front() : Pc.at(static_cast<std::size_t>(antenna));
}

double SystemConfig::rate_target(int user) const {
  return RT.size() == 1 ? RT.front() : RT.at(static_cast<std::size_t>(user));
}

std::vector<double> SystemConfig::rate_targets() const {
  std::vector<double> out(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) out[static_cast<std::size_t>(k)] = rate_target(k);
  return out;
}

SystemConfig SystemConfig::table_one() {
  SystemConfig cfg;
  cfg.M = 128;
  cfg.K = 3;
  cfg.B = 120e3;
  cfg.N0 = dbm_to_watt(-170.0);
  cfg.Pc = {0.01};
  cfg.PT = 1.0;
  cfg.RT = {6.0 * cfg.B};
  cfg.cell_radius = 500.0;
  cfg.d_min = 35.0;
  cfg.alpha = 3.8;
  cfg.sigma2_dB = 10.0;
  cfg.phi = 1.0;
  return cfg;
}

}  // namespace mimo_ee
