// Acceptance harness for the four-memory interface simulator.  Each criterion
// prints exactly one PASS/FAIL line with measured values; the process exit
// code is the number of failed criteria.

#include "quadwit/scenarios.hpp"

#include "dense_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <vector>

using namespace quadwit;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Bound curves computed by criterion 5 (merged), reused by criteria 6 and 7.
std::vector<BoundCurve> g_curves;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::vector<oracle::Mat> lift_all(const std::vector<oracle::Mat>& ops, int mode, int d) {
  std::vector<oracle::Mat> out;
  for (const auto& k : ops) out.push_back(oracle::lift(k, mode, d));
  return out;
}

// Ideal shared-excitation state: zero uncertainty, unit visibility, and all
// conditional weight in the matched output port; a phase-randomized single
// photon has no coherence and sits at the 3/4 plateau.
Outcome criterion1() {
  const ModeRegister reg({"a", "b", "c", "d"}, 1);
  const std::array<double, 4> write_phases{0.4, -0.2, 0.9, 1.7};
  const auto theta = heralded_w_phases(write_phases);
  const auto beta = matched_beta(write_phases);
  const auto rho = to_density(w_state(reg, theta));
  const auto out = verification_measurement(rho, beta[0], beta[1], beta[2]);
  const double d = delta(out);
  const auto coh = coherence_summary(rho);

  bool ok = d <= 1e-10;
  ok = ok && std::abs(coh.v_eff - 1.0) <= 1e-10;
  ok = ok && std::abs(out.p_singles[0] - 1.0) <= 1e-10;
  for (int i = 1; i < 4; ++i) ok = ok && std::abs(out.p_singles[i]) <= 1e-10;

  Eigen::MatrixXcd mix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(reg.dim()),
                                                static_cast<Eigen::Index>(reg.dim()));
  for (int m = 0; m < 4; ++m) {
    std::array<int, 4> occ{0, 0, 0, 0};
    occ[static_cast<std::size_t>(m)] = 1;
    mix += 0.25 * to_density(basis_state(reg, std::span<const int>(occ.data(), 4))).mat;
  }
  const double d_rand = delta(verification_measurement({reg, mix}, beta[0], beta[1], beta[2]));
  ok = ok && std::abs(d_rand - 0.75) <= 1e-10;

  return {ok, fmt("ideal state: delta=%.1e, |v_eff-1|=%.1e, p_singles=(%.12g,%.1e,%.1e,%.1e); "
                  "phase-randomized photon: delta=%.12g (target 0.75)",
                  d, std::abs(coh.v_eff - 1.0), out.p_singles[0], out.p_singles[1],
                  out.p_singles[2], out.p_singles[3], d_rand)};
}

// Independent weak coherent beams are the benchmark y_c = 1 source.
Outcome criterion2() {
  const ModeRegister reg({"a", "b", "c", "d"}, 3);
  const double alpha = std::sqrt(1e-4);
  PureState s{reg, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(reg.dim()))};
  for (std::size_t idx = 0; idx < reg.dim(); ++idx) {
    double a = 1.0;
    for (int n : reg.occupations(idx)) a *= std::pow(alpha, n) / std::sqrt(std::tgamma(n + 1.0));
    s.amp[static_cast<Eigen::Index>(idx)] = a;
  }
  s.amp /= s.amp.norm();
  const double y = yc(click_statistics(to_density(s)));
  const bool ok = std::abs(y - 1.0) < 1e-3;
  return {ok, fmt("four balanced coherent modes (mean photon number 1e-4): yc=%.9f, "
                  "|yc-1|=%.2e < 1e-3", y, std::abs(y - 1.0))};
}

// Small-excitation asymptotics of the noiseless pipeline.
Outcome criterion3() {
  bool ok = true;
  std::string detail;
  for (double xi : {1e-3, 2e-3, 5e-3}) {
    PipelineSettings ps;
    ps.write.xi = xi;
    ps.storage.tau_us = 0.0;
    ps.storage.nu_read = 0.0;
    ps.storage.nu_sub = 0.0;
    ps.storage.v0 = 1.0;
    const auto pipe = run_pipeline(ps);
    const double y = yc(number_statistics(pipe.rho_photonic));
    const double d =
        delta(verification_measurement(pipe.rho_photonic, M_PI / 2, M_PI / 2, M_PI / 2));
    const double f = w_fidelity(pipe.herald.rho_atomic, heralded_w_phases(ps.write.write_phases));
    const double ry = y / (8.0 * xi);
    const double rd = d / (9.0 * xi);
    const double rf = f / (1.0 - 3.0 * xi);
    ok = ok && std::abs(ry - 1.0) <= 0.10 && std::abs(rd - 1.0) <= 0.10 &&
         std::abs(rf - 1.0) <= 0.005;
    detail += fmt("xi=%g: yc/(8 xi)=%.4f, delta/(9 xi)=%.4f, F/(1-3 xi)=%.5f; ", xi, ry, rd, rf);
  }
  return {ok, detail + "tolerances 10%/10%/0.5%"};
}

// Default (calibrated) configuration lands in the observed witness window.
// The stored-light visibility parameter is calibrated so that the observed
// interference visibility comes out near 0.95; setting the parameter itself
// to 0.95 double-counts the background and is reported for comparison.
Outcome criterion4() {
  ExperimentConfig cfg;
  const auto row = evaluate_pipeline_row(cfg);
  const bool ok =
      row.delta >= 0.05 && row.delta <= 0.09 && row.yc >= 0.03 && row.yc <= 0.05;

  ExperimentConfig literal = cfg;
  literal.v0 = 0.95;
  const auto lrow = evaluate_pipeline_row(literal);
  return {ok, fmt("delta=%.6f in [0.05,0.09], yc=%.6f in [0.03,0.05], observed v_eff=%.4f "
                  "(v0=%.2f, nu_read=%g); literal v0=0.95 would give delta=%.4f, v_eff=%.4f",
                  row.delta, row.yc, row.v_eff, cfg.v0, cfg.nu_read, lrow.delta, lrow.v_eff)};
}

// Numerically optimized separability boundaries: anchor values and raw
// (pre-merge) pointwise nesting across the default grid.
Outcome criterion5() {
  ExperimentConfig cfg;
  const auto beta = beta_radians(cfg);
  const auto ports = build_port_operators(beta[0], beta[1], beta[2]);
  const auto opt = to_bound_options(cfg);
  const auto grid = default_yc_grid();
  if (std::abs(grid[2] - 0.06) > 1e-12 || std::abs(grid[3] - 0.07) > 1e-12)
    return {false, "default y_c grid no longer contains the 0.06 and 0.07 anchor points"};

  std::vector<BoundCurve> raw =
      bound_curve_family(3, std::span<const double>(grid.data(), grid.size()), opt, ports);

  int nested = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double b1 = raw[0].samples[j].delta_b;
    const double b2 = raw[1].samples[j].delta_b;
    const double b3 = raw[2].samples[j].delta_b;
    if (b3 <= b2 + 1e-9 && b2 <= b1 + 1e-9) ++nested;
  }
  const double k3_at_006 = raw[2].samples[2].delta_b;
  const double k1_at_007 = raw[0].samples[3].delta_b;
  const bool ok = nested == static_cast<int>(grid.size()) && k3_at_006 >= 0.18 &&
                  k3_at_006 <= 0.24 && k1_at_007 >= 0.68 && k1_at_007 <= 0.72;

  g_curves = raw;
  merge_nesting(g_curves);
  return {ok, fmt("k=3 bound at yc=0.06: %.4f (window [0.18,0.24]); k=1 bound at yc=0.07: %.4f "
                  "(window [0.68,0.72]); raw nesting holds at %d/%d grid points (%d restarts)",
                  k3_at_006, k1_at_007, nested, static_cast<int>(grid.size()), opt.restarts)};
}

// Crossed-pair control: sits on the two-pair uncertainty floor, shows no
// fringe in the bipartite analyzer phase, and certifies order 2.  Extra local
// noise must not raise the certified order.
Outcome criterion6() {
  if (g_curves.empty())
    return {false, "bound curves unavailable (criterion 5 did not complete)"};
  ExperimentConfig cfg;
  const auto beta = beta_radians(cfg);
  const auto pipe = run_pipeline(to_pipeline_settings(cfg, true));
  const double d = delta(verification_measurement(pipe.rho_photonic, beta[0], beta[1], beta[2]));
  const double y = yc(number_statistics(pipe.rho_photonic));

  std::vector<double> b2_grid;
  for (int i = 0; i < 13; ++i) b2_grid.push_back(2.0 * M_PI * i / 12.0);
  const auto scan = fringe_scan(pipe.rho_photonic, b2_grid, beta[0], beta[2]);
  double lo = scan.front().second, hi = scan.front().second;
  for (const auto& [b2, dv] : scan) {
    lo = std::min(lo, dv);
    hi = std::max(hi, dv);
  }
  const double amplitude = hi - lo;

  WitnessPoint pt;
  pt.delta = d;
  pt.yc = y;
  const auto cert = certify(pt, g_curves);

  DensityOperator noisy = pipe.rho_photonic;
  const auto labels = noisy.reg.labels;
  for (const auto& lab : labels) {
    noisy = apply_loss(noisy, lab, 0.8);
    noisy = inject_background(noisy, lab, 1e-3);
  }
  WitnessPoint npt;
  npt.delta = delta(verification_measurement(noisy, beta[0], beta[1], beta[2]));
  npt.yc = yc(number_statistics(noisy));
  const auto ncert = certify(npt, g_curves);

  const bool ok = d >= 0.52 && d <= 0.55 && amplitude < 0.01 && cert.order == 2 &&
                  ncert.order <= 2;
  return {ok, fmt("crossed pairs: delta=%.4f in [0.52,0.55] at yc=%.4f, fringe amplitude=%.1e "
                  "< 0.01, certified %s; after extra local loss and background: %s "
                  "(order must not increase)",
                  d, y, amplitude, cert.order_label.c_str(), ncert.order_label.c_str())};
}

// Storage-time trajectory crosses the three boundaries in the expected order
// and window, while the visibility decays and the contamination grows.
Outcome criterion7() {
  if (g_curves.empty())
    return {false, "bound curves unavailable (criterion 5 did not complete)"};
  ExperimentConfig cfg;
  const auto crossings = find_boundary_crossings(cfg, g_curves, 0.2, 36.2);
  const auto& t1 = crossings.tau_us[0];
  const auto& t2 = crossings.tau_us[1];
  const auto& t3 = crossings.tau_us[2];

  ExperimentConfig late = cfg;
  late.tau_us = 36.2;
  const auto early_row = evaluate_pipeline_row(cfg);
  const auto late_row = evaluate_pipeline_row(late);

  bool ok = t3.has_value() && t2.has_value() && t1.has_value();
  if (ok)
    ok = *t3 >= 10.5 && *t3 <= 19.5 && *t2 >= 14.7 && *t2 <= 27.3 && *t1 >= 16.8 && *t1 <= 31.2;
  ok = ok && late_row.v_eff <= 0.35 && late_row.yc >= 0.4;

  auto show = [](const std::optional<double>& t) {
    return t ? fmt("%.2f", *t) : std::string("none");
  };
  return {ok, fmt("crossings (us): k=3 at %s (window [10.5,19.5]), k=2 at %s ([14.7,27.3]), "
                  "k=1 at %s ([16.8,31.2]); v_eff %.3f -> %.3f at 36.2 us (must be <= 0.35), "
                  "yc(36.2)=%.3f >= 0.4",
                  show(t3).c_str(), show(t2).c_str(), show(t1).c_str(), early_row.v_eff,
                  late_row.v_eff, late_row.yc)};
}

// Conditional fidelity chain: closed-form bound, memory-side estimate, and
// inferred memory-to-detection transfer.
Outcome criterion8() {
  const double f_at_007 = conditional_fidelity_bound(0.07);
  bool ok = std::abs(f_at_007 - 0.9637) <= 1e-4;

  ExperimentConfig cfg;
  const auto pipe = run_pipeline(to_pipeline_settings(cfg));
  const auto beta = beta_radians(cfg);
  const double d = delta(verification_measurement(pipe.rho_photonic, beta[0], beta[1], beta[2]));
  const auto report = fidelity_report(d, click_statistics(pipe.rho_photonic), cfg.eta_read);
  ok = ok && report.f_tilde >= 0.8 && report.f_tilde <= 1.0;
  ok = ok && report.lambda.has_value() &&
       std::abs(*report.lambda / cfg.eta_read - 1.0) <= 0.15;
  return {ok, fmt("conditional fidelity bound at delta=0.07: %.6f (0.9637 +- 1e-4); memory-side "
                  "estimate F~=%.4f in [0.8,1.0]; inferred transfer lambda=%.4f within 15%% of "
                  "eta_read=%.2f",
                  f_at_007, report.f_tilde, report.lambda ? *report.lambda : 0.0, cfg.eta_read)};
}

// Spin-model analogue: the ground state at h_z = J/2 is the shared-excitation
// state, and the thermal trajectory runs from the origin to the hot plateau.
Outcome criterion9() {
  const auto H = build_hamiltonian(SpinModel::heisenberg_prime, 1.0, 0.5);
  const auto ports = symmetric_port_operators();
  const auto ground = gibbs(H, 0.0);
  const double overlap = expectation(ground.rho, w_state(spin_register(), {0, 0, 0, 0}));
  const auto cold = spin_witness_point(ground.rho, ports);
  const auto hot = spin_witness_point(gibbs(H, 1e9).rho, ports);

  bool ok = overlap >= 1.0 - 1e-10;
  ok = ok && std::abs(cold.delta) <= 1e-6 && std::abs(cold.yc) <= 1e-6;
  ok = ok && std::abs(hot.delta - 0.75) <= 1e-6 && std::abs(hot.yc - 11.0 / 6.0) <= 1e-6;
  return {ok, fmt("ground-state overlap=%.12f (>= 1-1e-10); kT->0 point (%.1e, %.1e) -> (0,0); "
                  "kT->inf point (%.9f, %.9f) -> (0.75, 11/6)",
                  overlap, cold.delta, cold.yc, hot.delta, hot.yc)};
}

// The mode channels agree with a dense Kraus/unitary oracle, and the pipeline
// windows of criteria 3 and 4 survive a larger per-mode cutoff.
Outcome criterion10() {
  const ModeRegister reg({"a", "b"}, 2);
  std::mt19937_64 rng(20260816ull);
  const oracle::Mat raw = oracle::random_density(9, rng);
  const DensityOperator rho{reg, raw};
  double worst = 0.0;
  for (int mode = 0; mode < 2; ++mode) {
    const auto& label = reg.labels[static_cast<std::size_t>(mode)];
    const auto lossy = apply_loss(rho, label, 0.38);
    const oracle::Mat loss_ref =
        oracle::apply_kraus(raw, lift_all(oracle::loss_kraus(0.38, 2), mode, 3));
    worst = std::max(worst, (lossy.mat - loss_ref).cwiseAbs().maxCoeff());
    const auto bg = inject_background(rho, label, 2.5e-3);
    const oracle::Mat bg_ref =
        oracle::apply_kraus(raw, lift_all(oracle::background_kraus(2.5e-3, 2), mode, 3));
    worst = std::max(worst, (bg.mat - bg_ref).cwiseAbs().maxCoeff());
  }
  // Beamsplitter comparison on the total <= cutoff sector, where the
  // truncated unitary acts exactly and no clipping is involved.
  const oracle::Mat raw_low = oracle::random_density_low_total(2, 2, rng);
  const DensityOperator rho_low{reg, raw_low};
  const auto split =
      apply_circuit(rho_low, LinearOpticsCircuit{{Beamsplitter{"a", "b", 0.5, 0.3}}});
  const oracle::Mat u = oracle::bs_unitary(0.5, 0.3, 2);
  worst = std::max(worst, (split.mat - u * raw_low * u.adjoint()).cwiseAbs().maxCoeff());
  bool ok = worst <= 1e-10;

  // criterion 3 gates at cutoff 3
  bool gates = true;
  for (double xi : {1e-3, 2e-3, 5e-3}) {
    PipelineSettings ps;
    ps.write.xi = xi;
    ps.write.cutoff = 3;
    ps.storage.tau_us = 0.0;
    ps.storage.nu_read = 0.0;
    ps.storage.nu_sub = 0.0;
    ps.storage.v0 = 1.0;
    const auto pipe = run_pipeline(ps);
    const double y = yc(number_statistics(pipe.rho_photonic));
    const double d =
        delta(verification_measurement(pipe.rho_photonic, M_PI / 2, M_PI / 2, M_PI / 2));
    const double f = w_fidelity(pipe.herald.rho_atomic, heralded_w_phases(ps.write.write_phases));
    gates = gates && std::abs(y / (8.0 * xi) - 1.0) <= 0.10 &&
            std::abs(d / (9.0 * xi) - 1.0) <= 0.10 &&
            std::abs(f / (1.0 - 3.0 * xi) - 1.0) <= 0.005;
  }
  // criterion 4 gates at cutoff 3
  ExperimentConfig big;
  big.cutoff = 3;
  const auto row = evaluate_pipeline_row(big);
  gates = gates && row.delta >= 0.05 && row.delta <= 0.09 && row.yc >= 0.03 && row.yc <= 0.05;

  ok = ok && gates;
  return {ok, fmt("channel vs dense-oracle max deviation %.1e <= 1e-10; cutoff-3 reruns: "
                  "asymptotic gates %s, calibrated point delta=%.6f, yc=%.6f in window",
                  worst, gates ? "hold" : "FAIL", row.delta, row.yc)};
}

}  // namespace

int main(int argc, char** argv) {
  using Criterion = std::function<Outcome()>;
  const std::vector<Criterion> criteria = {
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, criterion10};

  // Optional arguments select a subset by number (e.g. "5 7"); default all.
  std::vector<bool> selected(criteria.size(), argc <= 1);
  for (int a = 1; a < argc; ++a) {
    const int n = std::atoi(argv[a]);
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s' (valid: 1..%d)\n", argv[a],
                   static_cast<int>(criteria.size()));
      return 1;
    }
    selected[static_cast<std::size_t>(n - 1)] = true;
  }

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i]();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu: %s - %s (%.1f s)\n", i + 1, out.pass ? "PASS" : "FAIL",
                out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  const int ran = static_cast<int>(std::count(selected.begin(), selected.end(), true));
  std::printf("acceptance: %d/%d criteria passed\n", ran - failures, ran);
  return failures;
}
