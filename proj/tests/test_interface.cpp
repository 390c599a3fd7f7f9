#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <numbers>
#include <vector>

#include "quadwit/interface_model.hpp"
#include "quadwit/witness.hpp"

using namespace quadwit;

namespace {

std::size_t idx_of(const ModeRegister& reg, std::initializer_list<int> occ) {
  std::vector<int> v(occ);
  return reg.compose(std::span<const int>(v.data(), v.size()));
}

StorageConfig clean_storage() {
  StorageConfig st;
  st.tau_us = 0.0;
  st.nu_read = 0.0;
  st.nu_sub = 0.0;
  st.v0 = 1.0;
  return st;
}

}  // namespace

TEST_CASE("write state structure") {
  WriteConfig cfg;
  cfg.xi = 0.04;
  cfg.write_phases = {0.3, -0.7, 1.1, 2.0};
  const auto s = write_state(cfg, 2);

  REQUIRE(s.reg.labels == std::vector<std::string>{"c_A", "c_1"});
  REQUIRE(s.norm_error() < 1e-12);

  // Atomic and field occupations are perfectly correlated.
  for (std::size_t idx = 0; idx < s.reg.dim(); ++idx) {
    if (std::abs(s.amp[static_cast<Eigen::Index>(idx)]) > 0.0)
      REQUIRE(s.reg.occupation(idx, 0) == s.reg.occupation(idx, 1));
  }

  const auto a11 = s.amp[static_cast<Eigen::Index>(idx_of(s.reg, {1, 1}))];
  const auto a22 = s.amp[static_cast<Eigen::Index>(idx_of(s.reg, {2, 2}))];
  REQUIRE(std::abs(std::norm(a22) / std::norm(a11) - cfg.xi) < 1e-12);
  REQUIRE(std::abs(std::arg(a11) - 1.1) < 1e-12);
  REQUIRE(std::abs(std::arg(a22) - 2.2) < 1e-12);

  // Zero excitation probability leaves the vacuum.
  WriteConfig off;
  off.xi = 0.0;
  const auto v = write_state(off, 0);
  REQUIRE(std::abs(v.amp[static_cast<Eigen::Index>(idx_of(v.reg, {0, 0}))] - 1.0) < 1e-15);
  REQUIRE(std::abs(v.norm() - 1.0) < 1e-15);
}

TEST_CASE("write state validation") {
  WriteConfig cfg;
  REQUIRE_THROWS_AS(write_state(cfg, -1), std::invalid_argument);
  REQUIRE_THROWS_AS(write_state(cfg, 4), std::invalid_argument);

  WriteConfig strong;
  strong.xi = 0.5;
  REQUIRE_THROWS_AS(write_state(strong, 0), std::invalid_argument);
  strong.xi = -0.1;
  REQUIRE_THROWS_AS(write_state(strong, 0), std::invalid_argument);

  WriteConfig bad_phase;
  bad_phase.write_phases[1] = std::nan("");
  REQUIRE_THROWS_AS(write_state(bad_phase, 0), std::invalid_argument);
}

TEST_CASE("heralding probability tracks the write strength") {
  WriteConfig cfg;
  cfg.xi = 1e-3;

  // One excitation among the four ensembles reaches the herald with
  // probability ~ 4 xi * (1/4) * eta = xi * eta.
  const auto weak = herald_W(cfg, 0.06);
  REQUIRE(weak.p_h > 0.0);
  REQUIRE(weak.p_h < 1.0);
  REQUIRE(std::abs(weak.p_h / (cfg.xi * 0.06) - 1.0) < 0.05);

  const auto unit = herald_W(cfg, 1.0);
  REQUIRE(std::abs(unit.p_h / cfg.xi - 1.0) < 0.05);

  REQUIRE(weak.rho_atomic.reg.labels == atomic_labels());
  REQUIRE(std::abs(weak.rho_atomic.trace() - 1.0) < 1e-12);
  REQUIRE(weak.rho_atomic.min_eigenvalue() > -1e-12);
}

TEST_CASE("heralded state approaches the W state") {
  for (double xi : {2e-3, 5e-3}) {
    WriteConfig cfg;
    cfg.xi = xi;
    const auto h = herald_W(cfg, 0.06);
    const double f = w_fidelity(h.rho_atomic, heralded_w_phases(cfg.write_phases));
    REQUIRE(std::abs(f / (1.0 - 3.0 * xi) - 1.0) < 0.005);
  }

  // Multi-excitation contamination scales as 5 xi.
  WriteConfig cfg;
  cfg.xi = 1e-3;
  const auto h = herald_W(cfg, 0.06);
  const auto ns = number_statistics(h.rho_atomic);
  REQUIRE(std::abs(ns.p_ge2 / (5.0 * cfg.xi) - 1.0) < 0.05);

  // The fidelity is covariant in the write phases.
  WriteConfig rot;
  rot.xi = 2e-3;
  rot.write_phases = {0.3, -0.7, 1.1, 2.0};
  const auto hr = herald_W(rot, 0.06);
  const double fr = w_fidelity(hr.rho_atomic, heralded_w_phases(rot.write_phases));
  REQUIRE(std::abs(fr / (1.0 - 3.0 * rot.xi) - 1.0) < 0.005);
}

TEST_CASE("multi excitation decoherence pinches the right coherences") {
  ModeRegister reg(atomic_labels(), 2);
  PureState s{reg, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(reg.dim()))};
  const auto i0 = idx_of(reg, {0, 0, 0, 0});
  const auto i1 = idx_of(reg, {1, 0, 0, 0});
  const auto i2 = idx_of(reg, {0, 1, 0, 0});
  const auto i3 = idx_of(reg, {1, 1, 0, 0});
  const auto i4 = idx_of(reg, {2, 0, 0, 0});
  for (auto i : {i0, i1, i2, i3, i4})
    s.amp[static_cast<Eigen::Index>(i)] = std::complex<double>(0.4, 0.2);
  s.amp /= s.norm();

  const auto rho = to_density(s);
  const auto out = detail::decohere_multiexcitation(rho);

  auto at = [&](std::size_t r, std::size_t c) {
    return out.mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  };

  // Coherences within the <=1 total excitation sector survive.
  REQUIRE(std::abs(at(i0, i1) - rho.mat(static_cast<Eigen::Index>(i0),
                                        static_cast<Eigen::Index>(i1))) < 1e-15);
  REQUIRE(std::abs(at(i1, i2) - rho.mat(static_cast<Eigen::Index>(i1),
                                        static_cast<Eigen::Index>(i2))) < 1e-15);

  // Any coherence touching a >=2 total excitation state is removed.
  REQUIRE(std::abs(at(i0, i3)) == 0.0);
  REQUIRE(std::abs(at(i1, i4)) == 0.0);
  REQUIRE(std::abs(at(i3, i4)) == 0.0);
  REQUIRE(std::abs(at(i4, i2)) == 0.0);

  // Populations, trace, and positivity are untouched.
  for (std::size_t i = 0; i < reg.dim(); ++i)
    REQUIRE(std::abs(at(i, i) - rho.mat(static_cast<Eigen::Index>(i),
                                        static_cast<Eigen::Index>(i))) < 1e-15);
  REQUIRE(std::abs(out.trace() - rho.trace()) < 1e-14);
  REQUIRE(out.hermiticity_error() < 1e-14);
  REQUIRE(out.min_eigenvalue() > -1e-12);
}

TEST_CASE("storage survival and dephasing") {
  REQUIRE(storage_survival(0.0, 17.0) == 1.0);
  REQUIRE(std::abs(storage_survival(17.0, 17.0) - std::exp(-1.0)) < 1e-15);
  REQUIRE(storage_survival(8.0, 17.0) > storage_survival(9.0, 17.0));

  ModeRegister atoms(atomic_labels(), 1);
  const auto rho = to_density(w_state(atoms, {0, 0, 0, 0}));

  // At tau = tau_m the retrievable excitation decays by exactly e^{-1}.
  const auto aged = dephase(rho, 17.0, 17.0);
  const auto ns = number_statistics(aged);
  REQUIRE(std::abs(ns.p1 - std::exp(-1.0)) < 1e-12);
  REQUIRE(std::abs(ns.p0 - (1.0 - std::exp(-1.0))) < 1e-12);

  const auto gone = dephase(rho, 50.0 * 17.0, 17.0);
  REQUIRE(std::abs(number_statistics(gone).p0 - 1.0) < 1e-12);

  double prev = 2.0;
  for (double tau : {0.0, 5.0, 12.0, 20.0, 40.0}) {
    const double p1 = number_statistics(dephase(rho, tau, 17.0)).p1;
    REQUIRE(p1 <= prev + 1e-14);
    prev = p1;
  }

  REQUIRE_THROWS_AS(dephase(rho, -1.0, 17.0), std::invalid_argument);
  REQUIRE_THROWS_AS(dephase(rho, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("effective background composition") {
  StorageConfig cfg;
  cfg.tau_us = 0.0;
  REQUIRE(std::abs(effective_background(cfg) - cfg.nu_read) < 1e-18);

  cfg.tau_us = cfg.tau_m_us;
  const double expected = cfg.nu_read + cfg.nu_sub * (1.0 - std::exp(-1.0));
  REQUIRE(std::abs(effective_background(cfg) - expected) < 1e-15);
}

TEST_CASE("readout maps atomic modes to photonic modes") {
  ModeRegister atoms(atomic_labels(), 1);
  const auto rho = to_density(w_state(atoms, {0.4, 1.3, -0.5, 2.2}));

  SECTION("label validation") {
    const auto wrong = with_labels(rho, readout_field_labels());
    REQUIRE_THROWS_AS(readout(wrong, StorageConfig{}), std::invalid_argument);
  }

  SECTION("lossless transparent settings act as a relabeling") {
    auto st = clean_storage();
    st.eta_read = 1.0;
    const auto out = readout(rho, st);
    REQUIRE(out.reg.labels == readout_field_labels());
    const auto expected = with_labels(rho, readout_field_labels());
    REQUIRE((out.mat - expected.mat).cwiseAbs().maxCoeff() < 1e-14);
  }

  SECTION("retrieval efficiency sets the single photon yield") {
    auto st = clean_storage();
    st.eta_read = 0.38;
    const auto ns = number_statistics(readout(rho, st));
    REQUIRE(std::abs(ns.p1 - 0.38) < 1e-12);
    REQUIRE(std::abs(ns.p0 - 0.62) < 1e-12);
    REQUIRE(std::abs(ns.p_ge2) < 1e-15);
  }

  SECTION("output is a valid state") {
    // The background shift saturates at the per-mode cutoff, which is exactly
    // trace preserving on number-diagonal states but lets top-level
    // coherences wobble the trace at order nu^2 (~1e-8 here).
    const auto out = readout(rho, StorageConfig{});
    REQUIRE(std::abs(out.trace() - 1.0) < 1e-6);
    REQUIRE(out.min_eigenvalue() > -1e-12);
  }
}

TEST_CASE("motional dephasing time formula") {
  REQUIRE(std::abs(motional_tau(2.5, 0.14, 0.85) - 22.147673) < 1e-3);
  REQUIRE_THROWS_AS(motional_tau(0.0, 0.14, 0.85), std::invalid_argument);
  REQUIRE_THROWS_AS(motional_tau(2.5, 0.0, 0.85), std::invalid_argument);
  REQUIRE_THROWS_AS(motional_tau(2.5, 0.14, -1.0), std::invalid_argument);
}

TEST_CASE("w state helpers") {
  ModeRegister reg(readout_field_labels(), 1);
  const std::array<double, 4> phases{0.1, -0.9, 1.7, 3.0};
  const auto w = w_state(reg, phases);
  REQUIRE(std::abs(w.norm() - 1.0) < 1e-14);
  int nonzero = 0;
  for (Eigen::Index i = 0; i < w.amp.size(); ++i)
    if (std::abs(w.amp[i]) > 0.0) {
      REQUIRE(std::abs(std::abs(w.amp[i]) - 0.5) < 1e-14);
      ++nonzero;
    }
  REQUIRE(nonzero == 4);
  REQUIRE(std::abs(w_fidelity(to_density(w), phases) - 1.0) < 1e-12);

  ModeRegister three({"x", "y", "z"}, 1);
  REQUIRE_THROWS_AS(w_state(three, phases), std::invalid_argument);

  const auto theta = heralded_w_phases({0, 0, 0, 0});
  const double pi = std::numbers::pi;
  REQUIRE(std::abs(theta[0] - 0.0) < 1e-12);
  REQUIRE(std::abs(theta[1] - pi / 2) < 1e-12);
  REQUIRE(std::abs(theta[2] - pi / 2) < 1e-12);
  REQUIRE(std::abs(theta[3] - pi) < 1e-12);

  const auto beta = matched_beta({0, 0, 0, 0});
  REQUIRE(std::abs(beta[0] - pi / 2) < 1e-12);
  REQUIRE(std::abs(beta[1] - pi / 2) < 1e-12);
  REQUIRE(std::abs(beta[2] - pi / 2) < 1e-12);
}

TEST_CASE("matched analyzer routes the heralded W state to one port") {
  const std::array<double, 4> wp{0.3, -0.7, 1.1, 2.0};
  ModeRegister reg(readout_field_labels(), 1);
  const auto w = to_density(w_state(reg, heralded_w_phases(wp)));
  const auto beta = matched_beta(wp);
  const auto m = verification_measurement(w, beta[0], beta[1], beta[2]);
  REQUIRE(std::abs(m.p_singles[0] - 1.0) < 1e-10);
  for (int p = 1; p < 4; ++p) REQUIRE(std::abs(m.p_singles[static_cast<std::size_t>(p)]) < 1e-10);
  REQUIRE(delta(m) < 1e-12);
}

TEST_CASE("pipeline equals manual staging") {
  PipelineSettings s;
  s.write.xi = 2e-3;
  s.storage.tau_us = 4.0;

  const auto pt = run_pipeline(s);
  const auto h = herald_W(s.write, s.herald_eta);
  const auto stored = dephase(h.rho_atomic, s.storage.tau_us, s.storage.tau_m_us);
  const auto photonic = readout(stored, s.storage);

  REQUIRE(std::abs(pt.herald.p_h - h.p_h) < 1e-15);
  REQUIRE((pt.herald.rho_atomic.mat - h.rho_atomic.mat).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE((pt.rho_stored.mat - stored.mat).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE((pt.rho_photonic.mat - photonic.mat).cwiseAbs().maxCoeff() < 1e-15);

  s.crossed = true;
  const auto cpt = run_pipeline(s);
  const auto ch = herald_crossed(s.write, s.herald_eta);
  const auto cstored = dephase(ch.rho_atomic, s.storage.tau_us, s.storage.tau_m_us);
  const auto cphotonic = readout(cstored, s.storage);
  REQUIRE(std::abs(cpt.herald.p_h - ch.p_h) < 1e-15);
  REQUIRE((cpt.rho_photonic.mat - cphotonic.mat).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("crossed state sits on the uncertainty floor") {
  WriteConfig cfg;
  cfg.xi = 1e-3;
  const auto h = herald_crossed(cfg, 1.0);
  const auto rho = readout(h.rho_atomic, clean_storage());
  const auto beta = matched_beta(cfg.write_phases);

  const double d = delta(verification_measurement(rho, beta[0], beta[1], beta[2]));
  REQUIRE(d >= 0.5 - 1e-9);
  REQUIRE(std::abs(d - 0.502465935148) < 1e-9);

  // No interference fringe survives in the second analyzer phase.
  double lo = 1.0;
  double hi = 0.0;
  for (int k = 0; k < 13; ++k) {
    const double b2 = 2.0 * std::numbers::pi * k / 13.0;
    const double dk = delta(verification_measurement(rho, beta[0], b2, beta[2]));
    lo = std::min(lo, dk);
    hi = std::max(hi, dk);
  }
  REQUIRE(hi - lo < 1e-10);
}

TEST_CASE("decoherence raises both witness coordinates") {
  double prev_d = -1.0;
  double prev_y = -1.0;
  for (double tau : {0.2, 8.0, 17.0, 28.0, 36.2}) {
    PipelineSettings s;
    s.storage.tau_us = tau;
    const auto pt = run_pipeline(s);
    const auto beta = matched_beta(s.write.write_phases);
    const double d =
        delta(verification_measurement(pt.rho_photonic, beta[0], beta[1], beta[2]));
    const double y = yc(number_statistics(pt.rho_photonic));
    REQUIRE(d >= prev_d - 1e-12);
    REQUIRE(y >= prev_y - 1e-12);
    prev_d = d;
    prev_y = y;
  }
}

TEST_CASE("noiseless pipeline matches the small excitation asymptotics") {
  WriteConfig cfg;
  cfg.xi = 1e-3;
  const auto h = herald_W(cfg, 0.06);
  const auto rho = readout(h.rho_atomic, clean_storage());
  const auto beta = matched_beta(cfg.write_phases);

  const double d = delta(verification_measurement(rho, beta[0], beta[1], beta[2]));
  const double y = yc(number_statistics(rho));
  REQUIRE(std::abs(d / (9.0 * cfg.xi) - 1.0) < 0.1);
  REQUIRE(std::abs(y / (8.0 * cfg.xi) - 1.0) < 0.1);
}
