#pragma once

#include <iosfwd>
#include <string>

namespace mimo_ee {

struct ExperimentSpec;

/// Reads an experiment file. Format, one entry per line:
///
///   key = value [unit]
///   key = v1, v2, v3 [unit]
///
/// '#' starts a comment. Keys are the field names of SystemConfig,
/// SolverParams and ExperimentSpec; each may appear once, unknown keys are
/// rejected. Missing keys keep their defaults. Accepted units:
///   power (Pc, PT, p_init, pt_per_user, PT/Pc sweep values): W, mW, dBm
///   N0: W/Hz, dBm/Hz
///   B: Hz, kHz, MHz
///   RT, tau: bit/s, kbit/s, Mbit/s, bit/s/Hz (multiplied by B)
///   cell_radius, d_min: m, km
///   sigma2_dB: dB
/// A value without a unit is taken in the first (SI) unit of its list.
/// Throws ParseError (with line number) on syntax, unknown keys and bad
/// units, ConfigError when the parsed spec is invalid.
ExperimentSpec parse_config(std::istream& in);
ExperimentSpec parse_config_text(const std::string& text);
ExperimentSpec load_config(const std::string& path);

/// Every resolved field in SI units, in a form parse_config reads back to
/// the same values. Unset optional solver fields are written as comments.
std::string format_config(const ExperimentSpec& spec);

/// Shortest decimal text that reads back to the same double; "nan", "inf"
/// and "-inf" for non-finite values.
std::string format_number(double value);

}  // namespace mimo_ee
