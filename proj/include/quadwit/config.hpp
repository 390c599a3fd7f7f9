#pragma once
// Experiment configuration: flat key=value text files, range validation with
// per-field diagnostics, defaults for every knob, and a canonical rendering
// that reparses to the same configuration (used by run manifests).

#include "quadwit/bounds.hpp"
#include "quadwit/interface_model.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace quadwit {

struct SweepSpec {
  std::string variable;  // one of: xi, tau_us, beta2_deg; empty = scenario default
  double start = 0.0;
  double stop = 0.0;
  int steps = 0;         // 0 = scenario default
};

struct ExperimentConfig {
  double xi = 5e-3;
  std::array<double, 4> write_phases_deg{0.0, 0.0, 0.0, 0.0};
  double herald_efficiency = 0.06;
  double eta_read = 0.38;
  double detector_eta = 1.0;
  double nu_read = 2e-4;
  double nu_sub = 2.5e-3;
  double v0 = 0.98;
  double tau_us = 0.2;
  double tau_m_us = 17.0;
  int cutoff = 2;
  std::array<double, 3> beta_phases_deg{90.0, 90.0, 90.0};
  std::uint64_t seed = 1;
  SweepSpec sweep;

  std::string thermal_model = "heisenberg-prime";  // heisenberg-prime | lmg | both
  double spin_j = 1.0;
  double spin_h_z = 0.5;
  double kt_min = 1e-3;  // units of J; thermal scenario prepends the exact kT=0 point
  double kt_max = 10.0;
  int kt_steps = 41;

  int bound_restarts = 64;
  int bound_components = 8;
  double bound_tol_yc = 2e-3;
  std::vector<double> bound_yc_grid;  // empty = default grid
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("config: " + key + ": cannot parse '" + value + "' as a number");
  }
  if (trim(value.substr(pos)) != "")
    throw std::runtime_error("config: " + key + ": trailing characters in '" + value + "'");
  return v;
}

inline long long parse_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("config: " + key + ": cannot parse '" + value + "' as an integer");
  }
  if (trim(value.substr(pos)) != "")
    throw std::runtime_error("config: " + key + ": trailing characters in '" + value + "'");
  return v;
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(value);
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw std::runtime_error("config: " + key + ": empty list");
  return out;
}

inline int edit_distance(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                         prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "xi", "write_phases_deg", "herald_efficiency", "eta_read", "detector_eta", "nu_read",
      "nu_sub", "v0", "tau_us", "tau_m_us", "cutoff", "beta_phases_deg", "seed",
      "sweep_variable", "sweep_start", "sweep_stop", "sweep_steps", "thermal_model", "spin_j",
      "spin_h_z", "kt_min", "kt_max", "kt_steps", "bound_restarts", "bound_components",
      "bound_tol_yc", "bound_yc_grid"};
  return keys;
}

inline std::string nearest_key(const std::string& key) {
  int best = std::numeric_limits<int>::max();
  std::string arg;
  for (const auto& k : known_config_keys()) {
    const int d = edit_distance(key, k);
    if (d < best) {
      best = d;
      arg = k;
    }
  }
  return arg;
}

}  // namespace detail

// Parses key=value lines ('#' starts a comment; blank lines ignored).
// Unknown keys produce warnings naming the nearest valid key; malformed
// values throw.  Ranges are checked by validate_config.
inline ExperimentConfig parse_config_text(const std::string& text,
                                          std::vector<std::string>* warnings = nullptr) {
  ExperimentConfig cfg;
  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(line_no) +
                               ": expected key=value, got '" + line + "'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));

    if (key == "xi") cfg.xi = detail::parse_double(key, value);
    else if (key == "write_phases_deg") {
      const auto v = detail::parse_double_list(key, value);
      if (v.size() != 4)
        throw std::runtime_error("config: write_phases_deg: expected 4 comma-separated values");
      std::copy(v.begin(), v.end(), cfg.write_phases_deg.begin());
    } else if (key == "herald_efficiency") cfg.herald_efficiency = detail::parse_double(key, value);
    else if (key == "eta_read") cfg.eta_read = detail::parse_double(key, value);
    else if (key == "detector_eta") cfg.detector_eta = detail::parse_double(key, value);
    else if (key == "nu_read") cfg.nu_read = detail::parse_double(key, value);
    else if (key == "nu_sub") cfg.nu_sub = detail::parse_double(key, value);
    else if (key == "v0") cfg.v0 = detail::parse_double(key, value);
    else if (key == "tau_us") cfg.tau_us = detail::parse_double(key, value);
    else if (key == "tau_m_us") cfg.tau_m_us = detail::parse_double(key, value);
    else if (key == "cutoff") cfg.cutoff = static_cast<int>(detail::parse_int(key, value));
    else if (key == "beta_phases_deg") {
      const auto v = detail::parse_double_list(key, value);
      if (v.size() != 3)
        throw std::runtime_error("config: beta_phases_deg: expected 3 comma-separated values");
      std::copy(v.begin(), v.end(), cfg.beta_phases_deg.begin());
    } else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(detail::parse_int(key, value));
    else if (key == "sweep_variable") cfg.sweep.variable = value;
    else if (key == "sweep_start") cfg.sweep.start = detail::parse_double(key, value);
    else if (key == "sweep_stop") cfg.sweep.stop = detail::parse_double(key, value);
    else if (key == "sweep_steps") cfg.sweep.steps = static_cast<int>(detail::parse_int(key, value));
    else if (key == "thermal_model") cfg.thermal_model = value;
    else if (key == "spin_j") cfg.spin_j = detail::parse_double(key, value);
    else if (key == "spin_h_z") cfg.spin_h_z = detail::parse_double(key, value);
    else if (key == "kt_min") cfg.kt_min = detail::parse_double(key, value);
    else if (key == "kt_max") cfg.kt_max = detail::parse_double(key, value);
    else if (key == "kt_steps") cfg.kt_steps = static_cast<int>(detail::parse_int(key, value));
    else if (key == "bound_restarts") cfg.bound_restarts = static_cast<int>(detail::parse_int(key, value));
    else if (key == "bound_components") cfg.bound_components = static_cast<int>(detail::parse_int(key, value));
    else if (key == "bound_tol_yc") cfg.bound_tol_yc = detail::parse_double(key, value);
    else if (key == "bound_yc_grid") cfg.bound_yc_grid = detail::parse_double_list(key, value);
    else if (warnings)
      warnings->push_back("unknown key '" + key + "' (nearest valid key: '" +
                          detail::nearest_key(key) + "')");
  }
  return cfg;
}

// Checks every field against its allowed range; all violations are reported
// together.
inline void validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> errors;
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  };
  require(cfg.xi >= 0.0 && cfg.xi < 0.5, "xi must be < 0.5 and >= 0");
  for (double p : cfg.write_phases_deg)
    require(std::isfinite(p), "write_phases_deg must be finite");
  require(cfg.herald_efficiency > 0.0 && cfg.herald_efficiency <= 1.0,
          "herald_efficiency must be in (0, 1]");
  require(cfg.eta_read > 0.0 && cfg.eta_read <= 1.0, "eta_read must be in (0, 1]");
  require(cfg.detector_eta > 0.0 && cfg.detector_eta <= 1.0, "detector_eta must be in (0, 1]");
  require(cfg.nu_read >= 0.0 && cfg.nu_read <= 0.1, "nu_read must be in [0, 0.1]");
  require(cfg.nu_sub >= 0.0 && cfg.nu_sub <= 0.1, "nu_sub must be in [0, 0.1]");
  require(cfg.v0 >= 0.0 && cfg.v0 <= 1.0, "v0 must be in [0, 1]");
  require(cfg.tau_us >= 0.0, "tau_us must be >= 0");
  require(cfg.tau_m_us > 0.0, "tau_m_us must be > 0");
  require(cfg.cutoff >= 1 && cfg.cutoff <= kMaxCutoff,
          "cutoff must be in [1, " + std::to_string(kMaxCutoff) + "]");
  for (double p : cfg.beta_phases_deg) require(std::isfinite(p), "beta_phases_deg must be finite");
  if (!cfg.sweep.variable.empty())
    require(cfg.sweep.variable == "xi" || cfg.sweep.variable == "tau_us" ||
                cfg.sweep.variable == "beta2_deg",
            "sweep_variable must be one of: xi, tau_us, beta2_deg");
  if (cfg.sweep.steps != 0) require(cfg.sweep.steps >= 1, "sweep_steps must be >= 1");
  if (!cfg.sweep.variable.empty() && cfg.sweep.steps > 1)
    require(cfg.sweep.stop >= cfg.sweep.start, "sweep_stop must be >= sweep_start");
  require(cfg.thermal_model == "heisenberg-prime" || cfg.thermal_model == "lmg" ||
              cfg.thermal_model == "both",
          "thermal_model must be one of: heisenberg-prime, lmg, both");
  require(cfg.spin_j > 0.0, "spin_j must be > 0");
  require(std::isfinite(cfg.spin_h_z), "spin_h_z must be finite");
  require(cfg.kt_min > 0.0, "kt_min must be > 0");
  require(cfg.kt_max >= cfg.kt_min, "kt_max must be >= kt_min");
  require(cfg.kt_steps >= 2, "kt_steps must be >= 2");
  require(cfg.bound_restarts >= 1, "bound_restarts must be >= 1");
  require(cfg.bound_components >= 1, "bound_components must be >= 1");
  require(cfg.bound_tol_yc > 0.0, "bound_tol_yc must be > 0");
  if (!cfg.bound_yc_grid.empty()) {
    bool increasing = cfg.bound_yc_grid.front() > 0.0;
    for (std::size_t i = 1; i < cfg.bound_yc_grid.size(); ++i)
      if (cfg.bound_yc_grid[i] <= cfg.bound_yc_grid[i - 1]) increasing = false;
    require(increasing, "bound_yc_grid must be positive and strictly increasing");
  }
  if (!errors.empty()) {
    std::string joined = "invalid configuration:";
    for (const auto& e : errors) joined += "\n  - " + e;
    throw std::runtime_error(joined);
  }
}

inline ExperimentConfig load_config(const std::string& path,
                                    std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  ExperimentConfig cfg = parse_config_text(buf.str(), warnings);
  validate_config(cfg);
  return cfg;
}

// Canonical echo: reparsing the output reproduces the configuration exactly.
inline std::string render_config(const ExperimentConfig& cfg) {
  char buf[512];
  std::ostringstream out;
  auto emit = [&](const char* key, const char* fmt, auto... v) {
    std::snprintf(buf, sizeof buf, fmt, v...);
    out << key << " = " << buf << "\n";
  };
  emit("xi", "%.12g", cfg.xi);
  emit("write_phases_deg", "%.12g,%.12g,%.12g,%.12g", cfg.write_phases_deg[0],
       cfg.write_phases_deg[1], cfg.write_phases_deg[2], cfg.write_phases_deg[3]);
  emit("herald_efficiency", "%.12g", cfg.herald_efficiency);
  emit("eta_read", "%.12g", cfg.eta_read);
  emit("detector_eta", "%.12g", cfg.detector_eta);
  emit("nu_read", "%.12g", cfg.nu_read);
  emit("nu_sub", "%.12g", cfg.nu_sub);
  emit("v0", "%.12g", cfg.v0);
  emit("tau_us", "%.12g", cfg.tau_us);
  emit("tau_m_us", "%.12g", cfg.tau_m_us);
  emit("cutoff", "%d", cfg.cutoff);
  emit("beta_phases_deg", "%.12g,%.12g,%.12g", cfg.beta_phases_deg[0], cfg.beta_phases_deg[1],
       cfg.beta_phases_deg[2]);
  emit("seed", "%llu", static_cast<unsigned long long>(cfg.seed));
  out << "sweep_variable = " << cfg.sweep.variable << "\n";
  emit("sweep_start", "%.12g", cfg.sweep.start);
  emit("sweep_stop", "%.12g", cfg.sweep.stop);
  emit("sweep_steps", "%d", cfg.sweep.steps);
  out << "thermal_model = " << cfg.thermal_model << "\n";
  emit("spin_j", "%.12g", cfg.spin_j);
  emit("spin_h_z", "%.12g", cfg.spin_h_z);
  emit("kt_min", "%.12g", cfg.kt_min);
  emit("kt_max", "%.12g", cfg.kt_max);
  emit("kt_steps", "%d", cfg.kt_steps);
  emit("bound_restarts", "%d", cfg.bound_restarts);
  emit("bound_components", "%d", cfg.bound_components);
  emit("bound_tol_yc", "%.12g", cfg.bound_tol_yc);
  if (!cfg.bound_yc_grid.empty()) {
    out << "bound_yc_grid = ";
    for (std::size_t i = 0; i < cfg.bound_yc_grid.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.12g", cfg.bound_yc_grid[i]);
      out << (i ? "," : "") << buf;
    }
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Conversions into the physics-model structs.

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

inline WriteConfig to_write_config(const ExperimentConfig& cfg) {
  WriteConfig w;
  w.xi = cfg.xi;
  for (std::size_t i = 0; i < 4; ++i) w.write_phases[i] = deg_to_rad(cfg.write_phases_deg[i]);
  w.cutoff = cfg.cutoff;
  return w;
}

inline StorageConfig to_storage_config(const ExperimentConfig& cfg) {
  StorageConfig s;
  s.tau_us = cfg.tau_us;
  s.tau_m_us = cfg.tau_m_us;
  s.nu_read = cfg.nu_read;
  s.nu_sub = cfg.nu_sub;
  s.eta_read = cfg.eta_read;
  s.detector_eta = cfg.detector_eta;
  s.v0 = cfg.v0;
  return s;
}

inline std::array<double, 3> beta_radians(const ExperimentConfig& cfg) {
  return {deg_to_rad(cfg.beta_phases_deg[0]), deg_to_rad(cfg.beta_phases_deg[1]),
          deg_to_rad(cfg.beta_phases_deg[2])};
}

inline PipelineSettings to_pipeline_settings(const ExperimentConfig& cfg, bool crossed = false) {
  PipelineSettings s;
  s.write = to_write_config(cfg);
  s.herald_eta = cfg.herald_efficiency;
  s.storage = to_storage_config(cfg);
  s.crossed = crossed;
  return s;
}

inline BoundOptions to_bound_options(const ExperimentConfig& cfg) {
  BoundOptions opt;
  opt.restarts = cfg.bound_restarts;
  opt.components = cfg.bound_components;
  opt.tol_yc = cfg.bound_tol_yc;
  opt.seed = cfg.seed;
  return opt;
}

}  // namespace quadwit
