#include "torimem/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

namespace torimem {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& v, int line, const std::string& key) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(ConfigError::Kind::type_error, line,
                      "value for '" + key + "' is not a number: '" + v + "'");
  return x;
}

std::int64_t parse_int(const std::string& v, int line, const std::string& key) {
  std::int64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError(ConfigError::Kind::type_error, line,
                      "value for '" + key + "' is not an integer: '" + v + "'");
  return x;
}

std::uint64_t parse_uint(const std::string& v, int line, const std::string& key) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError(ConfigError::Kind::type_error, line,
                      "value for '" + key + "' is not an unsigned integer: '" + v + "'");
  return x;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void range_error(int line, const std::string& msg) {
  throw ConfigError(ConfigError::Kind::range_error, line, msg);
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::lifetime_scaling: return "lifetime-scaling";
    case ExperimentKind::density_vs_t: return "density-vs-T";
    case ExperimentKind::pair_confinement: return "pair-confinement";
    case ExperimentKind::table_dump: return "table-dump";
    case ExperimentKind::verify_decomposition: return "verify-decomposition";
  }
  return "?";
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::bare: return "bare";
    case Mode::toric_boson: return "toric-boson";
    case Mode::custom_z: return "custom-z";
  }
  return "?";
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, int> seen;  // key -> line, for cross-field errors

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool mode_given = false;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(ConfigError::Kind::type_error, line_no,
                        "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    seen[key] = line_no;

    if (key == "kind") {
      if (value == "lifetime-scaling") cfg.kind = ExperimentKind::lifetime_scaling;
      else if (value == "density-vs-T") cfg.kind = ExperimentKind::density_vs_t;
      else if (value == "pair-confinement") cfg.kind = ExperimentKind::pair_confinement;
      else if (value == "table-dump") cfg.kind = ExperimentKind::table_dump;
      else if (value == "verify-decomposition") cfg.kind = ExperimentKind::verify_decomposition;
      else range_error(line_no, "unknown experiment kind '" + value + "'");
    } else if (key == "L") {
      cfg.sizes.clear();
      for (const auto& item : split_list(value)) {
        const std::int64_t L = parse_int(item, line_no, key);
        if (L < 2) range_error(line_no, "L must be >= 2, got " + item);
        cfg.sizes.push_back(static_cast<int>(L));
      }
    } else if (key == "T") {
      cfg.temperatures.clear();
      for (const auto& item : split_list(value)) {
        const double t = parse_double(item, line_no, key);
        if (!(t > 0.0)) range_error(line_no, "T must be positive, got " + item);
        cfg.temperatures.push_back(t);
      }
    } else if (key == "mode") {
      mode_given = true;
      if (value == "bare") cfg.mode = Mode::bare;
      else if (value == "toric-boson") cfg.mode = Mode::toric_boson;
      else if (value == "custom-z") cfg.mode = Mode::custom_z;
      else range_error(line_no, "unknown mode '" + value + "'");
    } else if (key == "delta") {
      cfg.couplings.delta = parse_double(value, line_no, key);
      if (!(cfg.couplings.delta > 0.0)) range_error(line_no, "delta must be positive");
    } else if (key == "g_omega") {
      cfg.couplings.g_omega = parse_double(value, line_no, key);
      if (!(cfg.couplings.g_omega > 0.0)) range_error(line_no, "g_omega must be positive");
    } else if (key == "v_omega") {
      cfg.couplings.v_omega = parse_double(value, line_no, key);
      if (!(cfg.couplings.v_omega > 0.0)) range_error(line_no, "v_omega must be positive");
    } else if (key == "g_Omega") {
      if (value == "auto") {
        cfg.couplings.g_Omega = 0.0;
      } else {
        cfg.couplings.g_Omega = parse_double(value, line_no, key);
        if (!(cfg.couplings.g_Omega > 0.0))
          range_error(line_no, "g_Omega must be positive or 'auto'");
      }
    } else if (key == "v_Omega") {
      cfg.couplings.v_Omega = parse_double(value, line_no, key);
      if (!(cfg.couplings.v_Omega > 0.0)) range_error(line_no, "v_Omega must be positive");
    } else if (key == "xi_L") {
      if (value == "auto") {
        cfg.couplings.xi_L = 0.0;
      } else {
        cfg.couplings.xi_L = parse_double(value, line_no, key);
        if (!(cfg.couplings.xi_L > 1.0))
          range_error(line_no, "xi_L must exceed the lattice constant (or be 'auto')");
      }
    } else if (key == "a") {
      cfg.couplings.a = parse_double(value, line_no, key);
      if (cfg.couplings.a != 1.0)
        range_error(line_no, "the lattice constant a is fixed to 1");
    } else if (key == "z") {
      const std::int64_t z = parse_int(value, line_no, key);
      if (z < 1) range_error(line_no, "dispersion exponent z must be >= 1");
      cfg.couplings.z = static_cast<int>(z);
    } else if (key == "trajectories") {
      const std::int64_t n = parse_int(value, line_no, key);
      if (n < 1) range_error(line_no, "trajectories must be >= 1");
      cfg.trajectories = static_cast<int>(n);
    } else if (key == "max_time") {
      cfg.max_time = parse_int(value, line_no, key);
      if (cfg.max_time < 1) range_error(line_no, "max_time must be >= 1 sweep");
    } else if (key == "seed") {
      cfg.seed = parse_uint(value, line_no, key);
    } else if (key == "out") {
      if (value.empty()) range_error(line_no, "out must not be empty");
      cfg.out_dir = value;
    } else if (key == "workers") {
      const std::int64_t w = parse_int(value, line_no, key);
      if (w < 0) range_error(line_no, "workers must be >= 0 (0 = auto)");
      cfg.workers = static_cast<int>(w);
    } else if (key == "burn_in") {
      cfg.burn_in = parse_int(value, line_no, key);
      if (cfg.burn_in < 0) range_error(line_no, "burn_in must be >= 0");
    } else if (key == "window") {
      cfg.window = parse_int(value, line_no, key);
      if (cfg.window < 1) range_error(line_no, "window must be >= 1");
    } else if (key == "observe_interval") {
      cfg.observe_interval = parse_int(value, line_no, key);
      if (cfg.observe_interval < 0) range_error(line_no, "observe_interval must be >= 0");
    } else {
      throw ConfigError(ConfigError::Kind::unknown_key, line_no,
                        "unknown key '" + key + "'");
    }
  }

  if (cfg.sizes.empty())
    range_error(seen.count("L") ? seen["L"] : line_no, "at least one L is required");
  if (cfg.temperatures.empty())
    range_error(seen.count("T") ? seen["T"] : line_no, "at least one T is required");
  if (!mode_given && cfg.couplings.z != 1) cfg.mode = Mode::custom_z;
  if (cfg.mode == Mode::toric_boson && cfg.couplings.z != 1)
    range_error(seen.count("z") ? seen["z"] : line_no,
                "mode toric-boson fixes z = 1; use mode = custom-z");
  return cfg;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "kind = " << to_string(c.kind) << "\n";
  out << "L = ";
  for (std::size_t i = 0; i < c.sizes.size(); ++i)
    out << (i ? "," : "") << c.sizes[i];
  out << "\nT = ";
  for (std::size_t i = 0; i < c.temperatures.size(); ++i)
    out << (i ? "," : "") << fmt_double(c.temperatures[i]);
  out << "\nmode = " << to_string(c.mode) << "\n";
  out << "delta = " << fmt_double(c.couplings.delta) << "\n";
  out << "g_omega = " << fmt_double(c.couplings.g_omega) << "\n";
  out << "v_omega = " << fmt_double(c.couplings.v_omega) << "\n";
  if (c.couplings.g_Omega > 0.0)
    out << "g_Omega = " << fmt_double(c.couplings.g_Omega) << "\n";
  else
    out << "g_Omega = auto\n";
  out << "v_Omega = " << fmt_double(c.couplings.v_Omega) << "\n";
  if (c.couplings.xi_L > 0.0)
    out << "xi_L = " << fmt_double(c.couplings.xi_L) << "\n";
  else
    out << "xi_L = auto\n";
  out << "a = " << fmt_double(c.couplings.a) << "\n";
  out << "z = " << c.couplings.z << "\n";
  out << "trajectories = " << c.trajectories << "\n";
  out << "max_time = " << c.max_time << "\n";
  out << "seed = " << c.seed << "\n";
  out << "workers = " << c.workers << "\n";
  out << "burn_in = " << c.burn_in << "\n";
  out << "window = " << c.window << "\n";
  out << "observe_interval = " << c.observe_interval << "\n";
  out << "out = " << c.out_dir << "\n";
  return out.str();
}

}  // namespace torimem
