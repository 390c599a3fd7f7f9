#pragma once
// Batch scenarios: parameter sweeps, bound-curve generation, thermal curves,
// and certification reports.  Every scenario writes a CSV (or structured
// text), a run manifest with the full resolved configuration, and a plot
// script consuming the CSV.  All outputs are deterministic given the seed.

#include "quadwit/analysis.hpp"
#include "quadwit/config.hpp"
#include "quadwit/thermal.hpp"
#include "quadwit/version.hpp"

#include <filesystem>

namespace quadwit {

// ---------------------------------------------------------------------------
// Scan evaluation.

struct ScanRow {
  double sweep_value = 0.0;
  double yc = 0.0;     // from number statistics
  double delta = 0.0;  // from the conditional verification measurement
  NumberStatistics stats;
  std::array<double, 4> p_singles{};
  double d_bar = 0.0;
  double v_eff = 0.0;
};

// One pipeline evaluation at the configured parameters; beta2_override (in
// radians) replaces the configured analyzer phase when set.
inline ScanRow evaluate_pipeline_row(const ExperimentConfig& cfg, bool crossed = false,
                                     std::optional<double> beta2_override = std::nullopt) {
  const auto pipe = run_pipeline(to_pipeline_settings(cfg, crossed));
  const auto beta = beta_radians(cfg);
  const double b2 = beta2_override.value_or(beta[1]);
  const auto outcome = verification_measurement(pipe.rho_photonic, beta[0], b2, beta[2]);
  const auto coh = coherence_summary(pipe.rho_photonic);
  ScanRow row;
  row.stats = number_statistics(pipe.rho_photonic);
  row.yc = yc(row.stats);
  row.delta = delta(outcome);
  row.p_singles = outcome.p_singles;
  row.d_bar = coh.d_bar;
  row.v_eff = coh.v_eff;
  return row;
}

inline WitnessPoint to_witness_point(const ScanRow& row) {
  WitnessPoint pt;
  pt.delta = row.delta;
  pt.yc = row.yc;
  pt.d_bar = row.d_bar;
  pt.v_eff = row.v_eff;
  return pt;
}

// ---------------------------------------------------------------------------
// Boundary-crossing times along the storage-time trajectory.

struct CrossingTimes {
  // [k-1]: first time Delta(tau) rises above Delta_b^(k)(y_c(tau)); absent if
  // no crossing inside the searched window.
  std::array<std::optional<double>, 3> tau_us{};
};

inline CrossingTimes find_boundary_crossings(const ExperimentConfig& cfg,
                                             const std::vector<BoundCurve>& curves,
                                             double tau_lo, double tau_hi, int coarse_steps = 37) {
  if (!(tau_hi > tau_lo) || coarse_steps < 2)
    throw std::invalid_argument("find_boundary_crossings: bad search window");

  auto bound_at = [&](const BoundCurve& curve, double yc_value) {
    const double lo = curve.samples.front().yc;
    const double hi = curve.samples.back().yc;
    return interpolate_bound(curve, std::clamp(yc_value, lo, hi)).value;
  };
  auto gap = [&](const BoundCurve& curve, double tau) {
    ExperimentConfig local = cfg;
    local.tau_us = tau;
    const auto row = evaluate_pipeline_row(local);
    return row.delta - bound_at(curve, row.yc);
  };

  CrossingTimes out;
  for (const auto& curve : curves) {
    if (curve.k < 1 || curve.k > 3) continue;
    double prev_tau = tau_lo;
    double prev_gap = gap(curve, tau_lo);
    std::optional<double> found;
    for (int i = 1; i < coarse_steps && !found; ++i) {
      const double tau = tau_lo + (tau_hi - tau_lo) * i / (coarse_steps - 1);
      const double g = gap(curve, tau);
      if (prev_gap < 0.0 && g >= 0.0) {
        double a = prev_tau, b = tau;
        for (int it = 0; it < 30; ++it) {
          const double mid = 0.5 * (a + b);
          (gap(curve, mid) >= 0.0 ? b : a) = mid;
        }
        found = 0.5 * (a + b);
      }
      prev_tau = tau;
      prev_gap = g;
    }
    out.tau_us[static_cast<std::size_t>(curve.k - 1)] = found;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output helpers.

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::string csv =
      "sweep_var,yc,delta,p0,p1,p_ge2,p1000,p0100,p0010,p0001,d_bar,v_eff\n";
  for (const auto& r : rows) {
    csv += format_number(r.sweep_value);
    for (double v : {r.yc, r.delta, r.stats.p0, r.stats.p1, r.stats.p_ge2, r.p_singles[0],
                     r.p_singles[1], r.p_singles[2], r.p_singles[3], r.d_bar, r.v_eff})
      csv += "," + format_number(v);
    csv += "\n";
  }
  return csv;
}

inline std::string manifest_text(const std::string& scenario, const ExperimentConfig& cfg,
                                 const std::vector<std::string>& outputs,
                                 const std::vector<std::string>& notes) {
  std::string m = "# quadwit run manifest\n";
  m += "scenario = " + scenario + "\n";
  m += "version = " + std::string(kVersion) + "\n";
  for (const auto& o : outputs) m += "output = " + o + "\n";
  for (const auto& n : notes) m += "note = " + n + "\n";
  m += "# resolved configuration\n";
  m += render_config(cfg);
  return m;
}

inline std::string plot_script(const std::string& csv_name, const std::string& x_col,
                               const std::string& x_label, const std::string& title) {
  std::string s;
  s += "#!/usr/bin/env python3\n";
  s += "\"\"\"Plot " + csv_name + " (written next to this script).\"\"\"\n";
  s += "import csv\n";
  s += "import os\n";
  s += "import matplotlib\n";
  s += "matplotlib.use(\"Agg\")\n";
  s += "import matplotlib.pyplot as plt\n\n";
  s += "here = os.path.dirname(os.path.abspath(__file__))\n";
  s += "rows = list(csv.DictReader(open(os.path.join(here, \"" + csv_name + "\"))))\n";
  s += "x = [float(r[\"" + x_col + "\"]) for r in rows]\n";
  s += "fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(7, 7))\n";
  s += "top.plot(x, [float(r[\"delta\"]) for r in rows], \"o-\", label=\"Delta\")\n";
  s += "top.set_ylabel(\"Delta\")\n";
  s += "top.legend()\n";
  s += "bottom.plot(x, [float(r[\"yc\"]) for r in rows], \"s-\", color=\"tab:orange\", label=\"y_c\")\n";
  s += "bottom.set_ylabel(\"y_c\")\n";
  s += "bottom.set_xlabel(\"" + x_label + "\")\n";
  s += "bottom.legend()\n";
  s += "top.set_title(\"" + title + "\")\n";
  s += "out = os.path.join(here, \"" + csv_name + "\".replace(\".csv\", \".png\"))\n";
  s += "fig.savefig(out, dpi=150, bbox_inches=\"tight\")\n";
  s += "print(out)\n";
  return s;
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  if (n == 1) {
    v.push_back(a);
    return v;
  }
  v.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}

inline std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> v = linspace(std::log(a), std::log(b), n);
  for (auto& x : v) x = std::exp(x);
  return v;
}

}  // namespace detail

struct ScenarioResult {
  std::vector<std::string> files;  // paths written, relative to out_dir
};

// ---------------------------------------------------------------------------
// Individual scenarios.

inline ScenarioResult scenario_xi_sweep(const ExperimentConfig& cfg,
                                        const std::filesystem::path& out) {
  std::vector<double> grid;
  if (cfg.sweep.variable == "xi" && cfg.sweep.steps > 0)
    grid = detail::linspace(cfg.sweep.start, cfg.sweep.stop, cfg.sweep.steps);
  else
    grid = detail::logspace(1e-3, 0.15, 25);
  std::vector<ScanRow> rows;
  for (double xi : grid) {
    ExperimentConfig local = cfg;
    local.xi = xi;
    validate_config(local);
    ScanRow row = evaluate_pipeline_row(local);
    row.sweep_value = xi;
    rows.push_back(row);
  }
  detail::write_text_file(out / "xi_sweep.csv", detail::scan_csv(rows));
  detail::write_text_file(out / "plot_xi_sweep.py",
                          detail::plot_script("xi_sweep.csv", "sweep_var", "excitation probability xi",
                                              "Witness coordinates vs excitation probability"));
  detail::write_text_file(out / "manifest.txt",
                          detail::manifest_text("xi-sweep", cfg,
                                                {"xi_sweep.csv", "plot_xi_sweep.py"}, {}));
  return {{"xi_sweep.csv", "plot_xi_sweep.py", "manifest.txt"}};
}

inline ScenarioResult scenario_fringe(const ExperimentConfig& cfg,
                                      const std::filesystem::path& out, bool crossed) {
  std::vector<double> grid_deg;
  if (cfg.sweep.variable == "beta2_deg" && cfg.sweep.steps > 0)
    grid_deg = detail::linspace(cfg.sweep.start, cfg.sweep.stop, cfg.sweep.steps);
  else
    grid_deg = detail::linspace(0.0, 360.0, 73);
  std::vector<ScanRow> rows;
  for (double b2 : grid_deg) {
    ScanRow row = evaluate_pipeline_row(cfg, crossed, deg_to_rad(b2));
    row.sweep_value = b2;
    rows.push_back(row);
  }
  const std::string csv_name = crossed ? "crossed.csv" : "fringe.csv";
  const std::string plot_name = crossed ? "plot_crossed.py" : "plot_fringe.py";
  const std::string title = crossed ? "Crossed control state: no fringe in beta2"
                                    : "Interference fringe in bipartite phase beta2";
  detail::write_text_file(out / csv_name, detail::scan_csv(rows));
  detail::write_text_file(out / plot_name,
                          detail::plot_script(csv_name, "sweep_var", "beta2 (degrees)", title));
  detail::write_text_file(out / "manifest.txt",
                          detail::manifest_text(crossed ? "crossed" : "fringe", cfg,
                                                {csv_name, plot_name}, {}));
  return {{csv_name, plot_name, "manifest.txt"}};
}

inline ScenarioResult scenario_decohere(const ExperimentConfig& cfg,
                                        const std::filesystem::path& out,
                                        const std::string& bounds_cache) {
  std::vector<double> grid;
  if (cfg.sweep.variable == "tau_us" && cfg.sweep.steps > 0)
    grid = detail::linspace(cfg.sweep.start, cfg.sweep.stop, cfg.sweep.steps);
  else
    grid = detail::linspace(0.2, 36.2, 41);
  std::vector<ScanRow> rows;
  for (double tau : grid) {
    ExperimentConfig local = cfg;
    local.tau_us = tau;
    ScanRow row = evaluate_pipeline_row(local);
    row.sweep_value = tau;
    rows.push_back(row);
  }
  detail::write_text_file(out / "decohere.csv", detail::scan_csv(rows));
  detail::write_text_file(out / "plot_decohere.py",
                          detail::plot_script("decohere.csv", "sweep_var", "storage time tau (us)",
                                              "Witness coordinates vs storage time"));
  std::vector<std::string> files{"decohere.csv", "plot_decohere.py"};
  std::vector<std::string> notes;

  if (!bounds_cache.empty() && std::filesystem::exists(bounds_cache)) {
    const auto curves = load_bound_cache(bounds_cache);
    const auto crossings =
        find_boundary_crossings(cfg, curves, grid.front(), grid.back());
    std::string txt = "# boundary crossings (us)\n";
    for (int k = 3; k >= 1; --k) {
      const auto& t = crossings.tau_us[static_cast<std::size_t>(k - 1)];
      txt += "tau_cross_k" + std::to_string(k) + " = " +
             (t ? detail::format_number(*t) : std::string("none")) + "\n";
    }
    detail::write_text_file(out / "crossings.txt", txt);
    files.push_back("crossings.txt");
    notes.push_back("crossing times computed against " + bounds_cache);
  } else {
    notes.push_back("no bounds cache supplied; crossing times not computed");
  }
  detail::write_text_file(out / "manifest.txt",
                          detail::manifest_text("decohere", cfg, files, notes));
  files.push_back("manifest.txt");
  return {files};
}

inline ScenarioResult scenario_bounds(const ExperimentConfig& cfg,
                                      const std::filesystem::path& out,
                                      const std::string& bounds_cache) {
  const auto beta = beta_radians(cfg);
  const auto ports = build_port_operators(beta[0], beta[1], beta[2]);
  const auto grid = cfg.bound_yc_grid.empty() ? default_yc_grid() : cfg.bound_yc_grid;
  BoundOptions opt = to_bound_options(cfg);
  std::vector<BoundCurve> curves =
      bound_curve_family(3, std::span<const double>(grid.data(), grid.size()), opt, ports);
  merge_nesting(curves);

  const std::filesystem::path cache_path =
      bounds_cache.empty() ? (out / "bounds_cache.txt") : std::filesystem::path(bounds_cache);
  save_bound_cache(cache_path.string(), curves);

  std::string csv = "k,yc,delta_b,restarts,agree\n";
  for (const auto& curve : curves)
    for (const auto& s : curve.samples)
      csv += std::to_string(curve.k) + "," + detail::format_number(s.yc) + "," +
             detail::format_number(s.delta_b) + "," + std::to_string(s.restarts) + "," +
             std::to_string(s.agree) + "\n";
  detail::write_text_file(out / "bounds.csv", csv);

  std::string plot;
  plot += "#!/usr/bin/env python3\n";
  plot += "\"\"\"Plot bounds.csv (written next to this script).\"\"\"\n";
  plot += "import csv\nimport os\nimport matplotlib\nmatplotlib.use(\"Agg\")\n";
  plot += "import matplotlib.pyplot as plt\n\n";
  plot += "here = os.path.dirname(os.path.abspath(__file__))\n";
  plot += "rows = list(csv.DictReader(open(os.path.join(here, \"bounds.csv\"))))\n";
  plot += "fig, ax = plt.subplots(figsize=(7, 5))\n";
  plot += "for k, color in ((1, \"tab:purple\"), (2, \"tab:green\"), (3, \"tab:red\")):\n";
  plot += "    pts = [(float(r[\"yc\"]), float(r[\"delta_b\"])) for r in rows if int(r[\"k\"]) == k]\n";
  plot += "    ax.plot([p[0] for p in pts], [p[1] for p in pts], \"o-\", color=color,\n";
  plot += "            label=f\"Delta_b^({k})\")\n";
  plot += "ax.set_xlabel(\"y_c\")\nax.set_ylabel(\"Delta_b\")\nax.legend()\n";
  plot += "ax.set_title(\"Minimal-uncertainty boundaries\")\n";
  plot += "out = os.path.join(here, \"bounds.png\")\n";
  plot += "fig.savefig(out, dpi=150, bbox_inches=\"tight\")\nprint(out)\n";
  detail::write_text_file(out / "plot_bounds.py", plot);

  detail::write_text_file(
      out / "manifest.txt",
      detail::manifest_text("bounds", cfg, {cache_path.string(), "bounds.csv", "plot_bounds.py"},
                            {"cache written to " + cache_path.string()}));
  return {{cache_path.string(), "bounds.csv", "plot_bounds.py", "manifest.txt"}};
}

inline ScenarioResult scenario_thermal(const ExperimentConfig& cfg,
                                       const std::filesystem::path& out) {
  std::vector<std::string> models;
  if (cfg.thermal_model == "both") models = {"heisenberg-prime", "lmg"};
  else models = {cfg.thermal_model};

  std::vector<double> grid = detail::logspace(cfg.kt_min, cfg.kt_max, cfg.kt_steps);
  grid.insert(grid.begin(), 0.0);  // exact ground-state point

  std::string csv = "model,kT_over_J,h_z_over_J,yc,delta,p0,p1,p_ge2,Z\n";
  std::vector<std::string> notes;
  for (const auto& model_name : models) {
    const auto H = build_hamiltonian(spin_model_from_string(model_name), cfg.spin_j, cfg.spin_h_z);
    notes.push_back(model_name + " spin operators: " + H.convention);
    const auto curve = thermal_curve(H, std::span<const double>(grid.data(), grid.size()));
    for (const auto& pt : curve) {
      csv += model_name;
      for (double v : {pt.kT, cfg.spin_h_z / cfg.spin_j, pt.point.yc, pt.point.delta, pt.stats.p0,
                       pt.stats.p1, pt.stats.p_ge2, pt.Z})
        csv += "," + detail::format_number(v);
      csv += "\n";
    }
  }
  detail::write_text_file(out / "thermal.csv", csv);

  std::string plot;
  plot += "#!/usr/bin/env python3\n";
  plot += "\"\"\"Plot thermal.csv (written next to this script).\"\"\"\n";
  plot += "import csv\nimport os\nimport matplotlib\nmatplotlib.use(\"Agg\")\n";
  plot += "import matplotlib.pyplot as plt\n\n";
  plot += "here = os.path.dirname(os.path.abspath(__file__))\n";
  plot += "rows = list(csv.DictReader(open(os.path.join(here, \"thermal.csv\"))))\n";
  plot += "fig, ax = plt.subplots(figsize=(7, 5))\n";
  plot += "for model, style in ((\"heisenberg-prime\", \"k--\"), (\"lmg\", \"y--\")):\n";
  plot += "    pts = [(float(r[\"yc\"]), float(r[\"delta\"])) for r in rows if r[\"model\"] == model]\n";
  plot += "    if pts:\n";
  plot += "        ax.plot([p[0] for p in pts], [p[1] for p in pts], style, label=model)\n";
  plot += "ax.set_xlabel(\"y_c\")\nax.set_ylabel(\"Delta\")\nax.legend()\n";
  plot += "ax.set_title(\"Thermal spin-model trajectories\")\n";
  plot += "out = os.path.join(here, \"thermal.png\")\n";
  plot += "fig.savefig(out, dpi=150, bbox_inches=\"tight\")\nprint(out)\n";
  detail::write_text_file(out / "plot_thermal.py", plot);
  detail::write_text_file(out / "manifest.txt",
                          detail::manifest_text("thermal", cfg, {"thermal.csv", "plot_thermal.py"},
                                                notes));
  return {{"thermal.csv", "plot_thermal.py", "manifest.txt"}};
}

inline ScenarioResult scenario_certify(const ExperimentConfig& cfg,
                                       const std::filesystem::path& out,
                                       const std::string& bounds_cache) {
  if (bounds_cache.empty() || !std::filesystem::exists(bounds_cache))
    throw std::runtime_error(
        "certify: no bounds cache found; run the bounds scenario first and pass its cache via "
        "--bounds-cache");
  const auto curves = load_bound_cache(bounds_cache);
  const auto row = evaluate_pipeline_row(cfg);
  const auto cert = certify(to_witness_point(row), curves);

  std::string txt = "# certification report\n";
  txt += "delta = " + detail::format_number(row.delta) + "\n";
  txt += "yc = " + detail::format_number(row.yc) + "\n";
  txt += "v_eff = " + detail::format_number(row.v_eff) + "\n";
  txt += "order = " + cert.order_label + "\n";
  for (const auto& curve : curves) {
    if (curve.k < 1 || curve.k > 3) continue;
    const auto eval = interpolate_bound(curve, row.yc);
    txt += "bound_k" + std::to_string(curve.k) + " = " + detail::format_number(eval.value) +
           " (gap " + detail::format_number(eval.value - row.delta) + ")\n";
  }
  detail::write_text_file(out / "certification.txt", txt);

  std::string csv = "yc,delta,order,gap_k1,gap_k2,gap_k3\n";
  csv += detail::format_number(row.yc) + "," + detail::format_number(row.delta) + "," +
         std::to_string(cert.order);
  for (int k = 1; k <= 3; ++k) {
    double gap = std::numeric_limits<double>::quiet_NaN();
    for (const auto& curve : curves)
      if (curve.k == k) gap = interpolate_bound(curve, row.yc).value - row.delta;
    csv += "," + detail::format_number(gap);
  }
  csv += "\n";
  detail::write_text_file(out / "certify.csv", csv);
  detail::write_text_file(
      out / "manifest.txt",
      detail::manifest_text("certify", cfg, {"certification.txt", "certify.csv"},
                            {"bounds cache: " + bounds_cache}));
  return {{"certification.txt", "certify.csv", "manifest.txt"}};
}

inline ScenarioResult scenario_report(const ExperimentConfig& cfg,
                                      const std::filesystem::path& out,
                                      const std::string& bounds_cache) {
  const auto pipe = run_pipeline(to_pipeline_settings(cfg));
  const auto beta = beta_radians(cfg);
  const auto outcome =
      verification_measurement(pipe.rho_photonic, beta[0], beta[1], beta[2]);
  const double delta_value = delta(outcome);
  const auto clicks = click_statistics(pipe.rho_photonic);
  const auto nstats = number_statistics(pipe.rho_photonic);
  const auto coh = coherence_summary(pipe.rho_photonic);
  const auto theta = heralded_w_phases(to_write_config(cfg).write_phases);
  const double fid_atomic = w_fidelity(pipe.herald.rho_atomic, theta);

  std::string txt = "# interface report\n";
  txt += "p_h = " + detail::format_number(pipe.herald.p_h) + "\n";
  txt += "atomic_w_fidelity = " + detail::format_number(fid_atomic) + "\n";
  txt += "delta = " + detail::format_number(delta_value) + "\n";
  txt += "yc_number = " + detail::format_number(yc(nstats)) + "\n";
  txt += "yc_click = " + detail::format_number(yc(clicks)) + "\n";
  txt += "d_bar = " + detail::format_number(coh.d_bar) + "\n";
  txt += "v_eff = " + detail::format_number(coh.v_eff) + "\n";

  const auto asym = asymptotics(cfg.xi);
  txt += "asymptote_yc = " + detail::format_number(asym.yc_th) + "\n";
  txt += "asymptote_delta = " + detail::format_number(asym.delta_th) + "\n";
  txt += "asymptote_fidelity = " + detail::format_number(asym.f_th) + "\n";

  if (delta_value <= 0.5) {
    const auto fr = fidelity_report(delta_value, clicks, cfg.eta_read);
    txt += "f1_lower = " + detail::format_number(fr.f1_lower) + "\n";
    txt += "p1_tilde = " + detail::format_number(fr.p1_tilde) + "\n";
    txt += "f_tilde_memory = " + detail::format_number(fr.f_tilde) + "\n";
    txt += "f_tilde_channel = " + detail::format_number(fr.f_tilde_channel) + "\n";
    if (fr.lambda) txt += "lambda = " + detail::format_number(*fr.lambda) + "\n";
  } else {
    txt += "f1_lower = not-applicable (Delta > 1/2)\n";
  }
  txt += "hexapartite_estimate = " +
         detail::format_number(swap_scaling(400.0, cfg.eta_read, pipe.herald.p_h)) + "\n";
  txt += "motional_tau_formula_us = " +
         detail::format_number(motional_tau(2.5, 0.14, 0.85)) + "\n";
  txt += "motional_tau_configured_us = " + detail::format_number(cfg.tau_m_us) + "\n";

  std::vector<std::string> notes;
  if (!bounds_cache.empty() && std::filesystem::exists(bounds_cache)) {
    const auto curves = load_bound_cache(bounds_cache);
    WitnessPoint pt;
    pt.delta = delta_value;
    pt.yc = yc(nstats);
    const auto cert = certify(pt, curves);
    txt += "certified_order = " + cert.order_label + "\n";
    notes.push_back("certification used " + bounds_cache);
  } else {
    txt += "certified_order = (no bounds cache supplied)\n";
  }
  detail::write_text_file(out / "report.txt", txt);
  detail::write_text_file(out / "manifest.txt",
                          detail::manifest_text("report", cfg, {"report.txt"}, notes));
  return {{"report.txt", "manifest.txt"}};
}

// ---------------------------------------------------------------------------
// Dispatcher.

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"xi-sweep", "fringe", "decohere", "crossed",
                                                 "bounds",   "thermal", "certify", "report"};
  return names;
}

inline ScenarioResult run_scenario(const std::string& name, const ExperimentConfig& cfg,
                                   const std::string& out_dir,
                                   const std::string& bounds_cache = "") {
  validate_config(cfg);
  const std::filesystem::path out(out_dir);
  std::filesystem::create_directories(out);
  if (name == "xi-sweep") return scenario_xi_sweep(cfg, out);
  if (name == "fringe") return scenario_fringe(cfg, out, false);
  if (name == "crossed") return scenario_fringe(cfg, out, true);
  if (name == "decohere") return scenario_decohere(cfg, out, bounds_cache);
  if (name == "bounds") return scenario_bounds(cfg, out, bounds_cache);
  if (name == "thermal") return scenario_thermal(cfg, out);
  if (name == "certify") return scenario_certify(cfg, out, bounds_cache);
  if (name == "report") return scenario_report(cfg, out, bounds_cache);
  std::string known;
  for (const auto& n : scenario_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown scenario '" + name + "' (known: " + known + ")");
}

}  // namespace quadwit
