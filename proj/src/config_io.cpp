#include "mimo_ee/config_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string_view>
#include <vector>

#include "mimo_ee/errors.hpp"
#include "mimo_ee/harness.hpp"

namespace mimo_ee {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  int line = 0;
  std::vector<std::string> items;
  std::string unit;
};

// Unit tables: name -> conversion to SI. The first entry is the default unit.
using Converter = std::function<double(double, const SystemConfig&)>;
using UnitTable = std::vector<std::pair<std::string, Converter>>;

Converter scale(double s) {
  return [s](double v, const SystemConfig&) { return v * s; };
}

const UnitTable& no_unit() {
  static const UnitTable t{{"", scale(1.0)}};
  return t;
}
const UnitTable& power_units() {
  static const UnitTable t{{"W", scale(1.0)},
                           {"mW", scale(1e-3)},
                           {"dBm", [](double v, const SystemConfig&) { return dbm_to_watt(v); }}};
  return t;
}
const UnitTable& psd_units() {
  static const UnitTable t{{"W/Hz", scale(1.0)},
                           {"dBm/Hz", [](double v, const SystemConfig&) { return dbm_to_watt(v); }}};
  return t;
}
const UnitTable& freq_units() {
  static const UnitTable t{{"Hz", scale(1.0)}, {"kHz", scale(1e3)}, {"MHz", scale(1e6)}};
  return t;
}
const UnitTable& rate_units() {
  static const UnitTable t{{"bit/s", scale(1.0)},
                           {"kbit/s", scale(1e3)},
                           {"Mbit/s", scale(1e6)},
                           {"bit/s/Hz", [](double v, const SystemConfig& c) { return v * c.B; }}};
  return t;
}
const UnitTable& length_units() {
  static const UnitTable t{{"m", scale(1.0)}, {"km", scale(1e3)}};
  return t;
}
const UnitTable& db_units() {
  static const UnitTable t{{"dB", scale(1.0)}};
  return t;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::vector<double> reals(const std::string& key, const UnitTable& units,
                            const SystemConfig& cfg) {
    const Entry& e = entries_.at(key);
    const Converter* conv = nullptr;
    if (e.unit.empty()) {
      conv = &units.front().second;
    } else {
      for (const auto& [name, c] : units) {
        if (name == e.unit) conv = &c;
      }
    }
    if (conv == nullptr) {
      std::string allowed;
      for (const auto& u : units) allowed += (allowed.empty() ? "" : ", ") + u.first;
      throw ParseError(e.line, "unit '" + e.unit + "' not accepted for " + key +
                                   (allowed.empty() ? " (dimensionless)" : " (use " + allowed + ")"));
    }
    std::vector<double> out;
    for (const auto& item : e.items) out.push_back((*conv)(parse_real(item, e.line), cfg));
    return out;
  }

  double real(const std::string& key, const UnitTable& units, const SystemConfig& cfg) {
    return single(key, reals(key, units, cfg));
  }

  long long integer(const std::string& key) {
    const Entry& e = entries_.at(key);
    no_unit_allowed(key, e);
    if (e.items.size() != 1) throw ParseError(e.line, key + " takes one value");
    long long v = 0;
    const auto& s = e.items.front();
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw ParseError(e.line, "'" + s + "' is not an integer");
    }
    return v;
  }

  std::uint64_t unsigned_integer(const std::string& key) {
    const Entry& e = entries_.at(key);
    no_unit_allowed(key, e);
    if (e.items.size() != 1) throw ParseError(e.line, key + " takes one value");
    std::uint64_t v = 0;
    const auto& s = e.items.front();
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw ParseError(e.line, "'" + s + "' is not an unsigned 64-bit integer");
    }
    return v;
  }

  bool flag(const std::string& key) {
    const auto w = word(key);
    if (w == "true" || w == "1") return true;
    if (w == "false" || w == "0") return false;
    throw ParseError(entries_.at(key).line, key + " must be true or false");
  }

  std::string word(const std::string& key) {
    const auto ws = words(key);
    if (ws.size() != 1) throw ParseError(entries_.at(key).line, key + " takes one value");
    return ws.front();
  }

  std::vector<std::string> words(const std::string& key) {
    const Entry& e = entries_.at(key);
    no_unit_allowed(key, e);
    return e.items;
  }

  int line(const std::string& key) const { return entries_.at(key).line; }

 private:
  static double parse_real(const std::string& s, int line) {
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw ParseError(line, "'" + s + "' is not a number");
    }
    return v;
  }

  double single(const std::string& key, const std::vector<double>& v) const {
    if (v.size() != 1) throw ParseError(entries_.at(key).line, key + " takes one value");
    return v.front();
  }

  static void no_unit_allowed(const std::string& key, const Entry& e) {
    if (!e.unit.empty()) throw ParseError(e.line, key + " takes no unit");
  }

  std::map<std::string, Entry> entries_;
};

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      // SystemConfig
      "M", "K", "B", "N0", "Pc", "PT", "RT", "cell_radius", "d_min", "alpha", "sigma2_dB", "phi",
      // SolverParams
      "tau", "theta1", "theta2", "max_iter", "p_init", "omega_init", "rho_init",
      "include_bandwidth_factor", "adaptive_steps", "step_growth", "step_shrink",
      "fixed_point_tol", "fixed_point_max_iter", "feasibility_tol",
      // ExperimentSpec
      "sweep_variable", "sweep_values", "trials", "master_seed", "outputs", "n_mc",
      "pt_per_user", "oracle_points", "threads"};
  return keys;
}

bool is_key(std::string_view key) {
  for (const auto& k : known_keys()) {
    if (k == key) return true;
  }
  return false;
}

// Splits "1, 2, 3 W" into items {1, 2, 3} and unit "W".
void split_value(std::string_view text, int line, Entry& e) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const auto piece = trim(text.substr(start, comma == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : comma - start));
    if (piece.empty()) throw ParseError(line, "empty value");
    parts.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  auto& last = parts.back();
  const auto space = last.find_first_of(" \t");
  if (space != std::string::npos) {
    e.unit = std::string(trim(std::string_view(last).substr(space)));
    last = std::string(trim(std::string_view(last).substr(0, space)));
    if (e.unit.find_first_of(" \t") != std::string::npos) {
      throw ParseError(line, "unexpected text after unit '" + e.unit + "'");
    }
  }
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (parts[i].find_first_of(" \t") != std::string::npos) {
      throw ParseError(line, "a unit may only follow the last value");
    }
  }
  e.items = std::move(parts);
}

SweepVariable parse_sweep_variable(const std::string& w, int line) {
  for (auto v : {SweepVariable::none, SweepVariable::PT, SweepVariable::Pc, SweepVariable::K,
                 SweepVariable::M}) {
    if (w == to_string(v)) return v;
  }
  throw ParseError(line, "sweep_variable must be one of none, PT, Pc, K, M");
}

Output parse_output(const std::string& w, int line) {
  for (auto o : {Output::ee_final, Output::iterations, Output::trace, Output::oracle_gap}) {
    if (w == to_string(o)) return o;
  }
  throw ParseError(line, "unknown output '" + w + "'");
}

int to_int(long long v, const std::string& key, int line) {
  if (v < -2147483647LL || v > 2147483647LL) throw ParseError(line, key + " out of range");
  return static_cast<int>(v);
}

}  // namespace

ExperimentSpec parse_config(std::istream& in) {
  std::map<std::string, Entry> entries;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text(raw);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError(line, "expected 'key = value'");
    const std::string key(trim(text.substr(0, eq)));
    if (key.empty()) throw ParseError(line, "missing key");
    if (!is_key(key)) throw ParseError(line, "unknown key '" + key + "'");
    if (entries.count(key)) {
      throw ParseError(line, "duplicate key '" + key + "' (first on line " +
                                 std::to_string(entries[key].line) + ")");
    }
    Entry e;
    e.line = line;
    split_value(trim(text.substr(eq + 1)), line, e);
    entries.emplace(key, std::move(e));
  }
  if (in.bad()) throw IoError("read error");

  Reader r(std::move(entries));
  ExperimentSpec spec;
  SystemConfig& c = spec.base_config;
  SolverParams& s = spec.solver_params;

  // B first: bit/s/Hz rates depend on it.
  if (r.has("B")) c.B = r.real("B", freq_units(), c);
  if (r.has("M")) c.M = to_int(r.integer("M"), "M", r.line("M"));
  if (r.has("K")) c.K = to_int(r.integer("K"), "K", r.line("K"));
  if (r.has("N0")) c.N0 = r.real("N0", psd_units(), c);
  if (r.has("Pc")) c.Pc = r.reals("Pc", power_units(), c);
  if (r.has("PT")) c.PT = r.real("PT", power_units(), c);
  if (r.has("RT")) c.RT = r.reals("RT", rate_units(), c);
  if (r.has("cell_radius")) c.cell_radius = r.real("cell_radius", length_units(), c);
  if (r.has("d_min")) c.d_min = r.real("d_min", length_units(), c);
  if (r.has("alpha")) c.alpha = r.real("alpha", no_unit(), c);
  if (r.has("sigma2_dB")) c.sigma2_dB = r.real("sigma2_dB", db_units(), c);
  if (r.has("phi")) c.phi = r.real("phi", no_unit(), c);

  if (r.has("tau")) s.tau = r.real("tau", rate_units(), c);
  if (r.has("theta1")) s.theta1 = r.real("theta1", no_unit(), c);
  if (r.has("theta2")) s.theta2 = r.reals("theta2", no_unit(), c);
  if (r.has("max_iter")) s.max_iter = to_int(r.integer("max_iter"), "max_iter", r.line("max_iter"));
  if (r.has("p_init")) s.p_init = r.reals("p_init", power_units(), c);
  if (r.has("omega_init")) s.omega_init = r.real("omega_init", no_unit(), c);
  if (r.has("rho_init")) s.rho_init = r.reals("rho_init", no_unit(), c);
  if (r.has("include_bandwidth_factor")) {
    s.include_bandwidth_factor = r.flag("include_bandwidth_factor");
  }
  if (r.has("adaptive_steps")) s.adaptive_steps = r.flag("adaptive_steps");
  if (r.has("step_growth")) s.step_growth = r.real("step_growth", no_unit(), c);
  if (r.has("step_shrink")) s.step_shrink = r.real("step_shrink", no_unit(), c);
  if (r.has("fixed_point_tol")) s.fixed_point_tol = r.real("fixed_point_tol", no_unit(), c);
  if (r.has("fixed_point_max_iter")) {
    s.fixed_point_max_iter =
        to_int(r.integer("fixed_point_max_iter"), "fixed_point_max_iter",
               r.line("fixed_point_max_iter"));
  }
  if (r.has("feasibility_tol")) s.feasibility_tol = r.real("feasibility_tol", no_unit(), c);

  if (r.has("sweep_variable")) {
    spec.sweep_variable = parse_sweep_variable(r.word("sweep_variable"), r.line("sweep_variable"));
  }
  if (r.has("sweep_values")) {
    const bool power = spec.sweep_variable == SweepVariable::PT ||
                       spec.sweep_variable == SweepVariable::Pc;
    spec.sweep_values = r.reals("sweep_values", power ? power_units() : no_unit(), c);
  }
  if (r.has("trials")) spec.trials = to_int(r.integer("trials"), "trials", r.line("trials"));
  if (r.has("master_seed")) spec.master_seed = r.unsigned_integer("master_seed");
  if (r.has("outputs")) {
    spec.outputs.clear();
    for (const auto& w : r.words("outputs")) {
      spec.outputs.push_back(parse_output(w, r.line("outputs")));
    }
  }
  if (r.has("n_mc")) spec.n_mc = to_int(r.integer("n_mc"), "n_mc", r.line("n_mc"));
  if (r.has("pt_per_user")) spec.pt_per_user = r.real("pt_per_user", power_units(), c);
  if (r.has("oracle_points")) {
    spec.oracle_points = to_int(r.integer("oracle_points"), "oracle_points",
                                r.line("oracle_points"));
  }
  if (r.has("threads")) spec.threads = to_int(r.integer("threads"), "threads", r.line("threads"));

  spec.validate();
  return spec;
}

ExperimentSpec parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_config(in);
}

namespace {

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_number(v[i]);
  }
  return out;
}

}  // namespace

std::string format_config(const ExperimentSpec& spec) {
  const SystemConfig& c = spec.base_config;
  const SolverParams& s = spec.solver_params;
  std::ostringstream o;
  auto line = [&](const char* key, const std::string& value, const char* unit = "") {
    o << key << " = " << value;
    if (*unit) o << ' ' << unit;
    o << '\n';
  };
  auto num = [](double v) { return format_number(v); };
  auto flag = [](bool b) { return std::string(b ? "true" : "false"); };

  o << "# system\n";
  line("M", std::to_string(c.M));
  line("K", std::to_string(c.K));
  line("B", num(c.B), "Hz");
  line("N0", num(c.N0), "W/Hz");
  line("Pc", join(c.Pc), "W");
  line("PT", num(c.PT), "W");
  line("RT", join(c.RT), "bit/s");
  line("cell_radius", num(c.cell_radius), "m");
  line("d_min", num(c.d_min), "m");
  line("alpha", num(c.alpha));
  line("sigma2_dB", num(c.sigma2_dB), "dB");
  line("phi", num(c.phi));

  o << "# solver\n";
  if (s.tau) line("tau", num(*s.tau), "bit/s");
  else o << "# tau unset: 1e-6 B K\n";
  if (s.theta1) line("theta1", num(*s.theta1));
  else o << "# theta1 unset: initial EE / PT\n";
  if (!s.theta2.empty()) line("theta2", join(s.theta2));
  else o << "# theta2 unset: 0.1 / RT_k\n";
  line("max_iter", std::to_string(s.max_iter));
  if (!s.p_init.empty()) line("p_init", join(s.p_init), "W");
  else o << "# p_init unset: PT / (2K)\n";
  line("omega_init", num(s.omega_init));
  if (!s.rho_init.empty()) line("rho_init", join(s.rho_init));
  line("include_bandwidth_factor", flag(s.include_bandwidth_factor));
  line("adaptive_steps", flag(s.adaptive_steps));
  line("step_growth", num(s.step_growth));
  line("step_shrink", num(s.step_shrink));
  line("fixed_point_tol", num(s.fixed_point_tol));
  line("fixed_point_max_iter", std::to_string(s.fixed_point_max_iter));
  line("feasibility_tol", num(s.feasibility_tol));

  o << "# experiment\n";
  line("sweep_variable", to_string(spec.sweep_variable));
  if (!spec.sweep_values.empty()) {
    const bool power = spec.sweep_variable == SweepVariable::PT ||
                       spec.sweep_variable == SweepVariable::Pc;
    line("sweep_values", join(spec.sweep_values), power ? "W" : "");
  }
  line("trials", std::to_string(spec.trials));
  line("master_seed", std::to_string(spec.master_seed));
  std::string outs;
  for (auto out : spec.outputs) outs += (outs.empty() ? "" : ", ") + std::string(to_string(out));
  if (!outs.empty()) line("outputs", outs);
  line("n_mc", std::to_string(spec.n_mc));
  line("pt_per_user", num(spec.pt_per_user), "W");
  line("oracle_points", std::to_string(spec.oracle_points));
  line("threads", std::to_string(spec.threads));
  return o.str();
}

}  // namespace mimo_ee
