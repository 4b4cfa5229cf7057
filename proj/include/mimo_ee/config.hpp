#pragma once

#include <cmath>
#include <vector>

namespace mimo_ee {

/// Physical and constraint parameters of one single-cell downlink scenario.
/// Every quantity is stored in SI units (W, W/Hz, Hz, bits/s, m); unit
/// conversion happens once, when a config file is loaded.
struct SystemConfig {
  int M = 128;          // BS antennas
  int K = 3;            // single-antenna users
  double B = 120e3;     // resource-block bandwidth, Hz
  double N0 = 1e-20;    // noise PSD, W/Hz
  // Per-antenna circuit power in W. Length M, or length 1 broadcast to all
  // antennas.
  std::vector<double> Pc{0.01};
  double PT = 1.0;  // sum transmit power budget, W
  // Per-user minimum rate in bits/s. Length K, or length 1 broadcast.
  std::vector<double> RT{6.0 * 120e3};
  double cell_radius = 500.0;
  // Minimum BS-user distance. Not part of the reference system model; it keeps
  // the path loss bounded for users dropped next to the BS.
  double d_min = 35.0;
  double alpha = 3.8;      // path-loss exponent
  double sigma2_dB = 10.0;  // variance of 10*log10(shadowing)
  double phi = 1.0;         // carrier / antenna-gain constant

  /// Throws ConfigError naming the first violated field.
  void validate() const;

  double total_circuit_power() const;
  double circuit_power(int antenna) const;
  double rate_target(int user) const;
  std::vector<double> rate_targets() const;

  /// Reference drop: 128 antennas, 3 users, 120 kHz RB, -170 dBm/Hz,
  /// 0.01 W per antenna, 6 bit/s/Hz per user, 500 m cell, alpha 3.8,
  /// 10 dB shadowing. PT = 1 W.
  static SystemConfig table_one();
};

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace mimo_ee
