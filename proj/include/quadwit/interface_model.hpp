#pragma once
// Physics model of the four-memory interface: per-ensemble write states,
// heralded W-state and crossed-state preparation, motional-dephasing storage,
// and readout into photonic modes.
//
// Pipeline order: write -> herald -> dephase(tau) -> readout -> (witness).

#include "quadwit/channels.hpp"

#include <numbers>

namespace quadwit {

inline constexpr std::array<const char*, 4> kEnsembles = {"a", "b", "c", "d"};

inline std::vector<std::string> atomic_labels() { return {"a_A", "b_A", "c_A", "d_A"}; }
inline std::vector<std::string> write_field_labels() { return {"a_1", "b_1", "c_1", "d_1"}; }
inline std::vector<std::string> readout_field_labels() { return {"a_2", "b_2", "c_2", "d_2"}; }

struct WriteConfig {
  double xi = 5e-3;                              // excitation probability per ensemble
  std::array<double, 4> write_phases{0, 0, 0, 0};  // radians, one per ensemble
  int cutoff = 2;
};

inline void validate(const WriteConfig& cfg) {
  if (!(cfg.xi >= 0.0 && cfg.xi < 0.5))
    throw std::invalid_argument("WriteConfig: xi must satisfy 0 <= xi < 0.5");
  for (double p : cfg.write_phases)
    if (!std::isfinite(p)) throw std::invalid_argument("WriteConfig: phases must be finite");
}

// Two-mode-squeezed-type write state of one ensemble, truncated and
// renormalized: amp(n, n) = xi^{n/2} e^{i n phi} / sqrt(sum_m xi^m).
inline PureState write_state(const WriteConfig& cfg, int ensemble) {
  validate(cfg);
  if (ensemble < 0 || ensemble > 3)
    throw std::invalid_argument("write_state: ensemble index must be 0..3");
  const std::string name = kEnsembles[static_cast<std::size_t>(ensemble)];
  ModeRegister reg({name + "_A", name + "_1"}, cfg.cutoff);
  PureState s{reg, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(reg.dim()))};
  double norm_sq = 0.0;
  for (int n = 0; n <= cfg.cutoff; ++n) norm_sq += std::pow(cfg.xi, n);
  for (int n = 0; n <= cfg.cutoff; ++n) {
    const std::array<int, 2> occ{n, n};
    s.amp[static_cast<Eigen::Index>(reg.compose(std::span<const int>(occ.data(), 2)))] =
        std::polar(std::pow(cfg.xi, 0.5 * n) / std::sqrt(norm_sq),
                   cfg.write_phases[static_cast<std::size_t>(ensemble)] * n);
  }
  return s;
}

namespace detail {

// Joint 8-mode product of the four write states over
// [a_A, b_A, c_A, d_A, a_1, b_1, c_1, d_1]; field occupations mirror the
// atomic ones exactly.
inline PureState joint_write_state(const WriteConfig& cfg) {
  validate(cfg);
  std::vector<std::string> labels = atomic_labels();
  for (const auto& l : write_field_labels()) labels.push_back(l);
  ModeRegister reg(labels, cfg.cutoff);
  PureState s{reg, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(reg.dim()))};
  double norm_sq = 0.0;
  for (int n = 0; n <= cfg.cutoff; ++n) norm_sq += std::pow(cfg.xi, n);
  const double inv_norm = 1.0 / std::sqrt(norm_sq);
  const int dpm = cfg.cutoff + 1;
  std::array<int, 8> occ{};
  const int total = dpm * dpm * dpm * dpm;
  for (int tuple = 0; tuple < total; ++tuple) {
    int rest = tuple;
    cplx amp(1.0, 0.0);
    for (int m = 3; m >= 0; --m) {
      const int n = rest % dpm;
      rest /= dpm;
      occ[static_cast<std::size_t>(m)] = n;
      occ[static_cast<std::size_t>(m + 4)] = n;
      amp *= std::polar(std::pow(cfg.xi, 0.5 * n) * inv_norm,
                        cfg.write_phases[static_cast<std::size_t>(m)] * n);
    }
    s.amp[static_cast<Eigen::Index>(reg.compose(std::span<const int>(occ.data(), 8)))] = amp;
  }
  return s;
}

}  // namespace detail

// Balanced tree combining the four write fields into one herald mode:
// a_1 (+) b_1, c_1 (+) d_1, then the two sums; the herald port sits in the
// a_1 slot.
inline LinearOpticsCircuit herald_tree_circuit() {
  LinearOpticsCircuit circ;
  circ.elements = {
      Beamsplitter{"a_1", "b_1", 0.5, 0.0},
      Beamsplitter{"c_1", "d_1", 0.5, 0.0},
      Beamsplitter{"a_1", "c_1", 0.5, 0.0},
  };
  return circ;
}

struct HeraldResult {
  DensityOperator rho_atomic;  // normalized conditional state over the 4 atomic modes
  double p_h = 0.0;            // heralding probability per write trial
};

namespace detail {

// Pinch away coherences that involve two or more total excitations: the
// multi-excitation remainder of the heralded state models uncorrelated atomic
// noise, so it carries no phase relation to the single-excitation sector or
// within itself.  Populations (and therefore all number statistics and the
// heralding probability) are untouched.
inline DensityOperator decohere_multiexcitation(DensityOperator rho) {
  const auto& reg = rho.reg;
  const std::size_t dim = reg.dim();
  std::vector<int> total(dim, 0);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    int n = 0;
    for (int m = 0; m < reg.modes(); ++m) n += reg.occupation(idx, m);
    total[idx] = n;
  }
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b)
      if (a != b && (total[a] >= 2 || total[b] >= 2))
        rho.mat(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = 0.0;
  return rho;
}

}  // namespace detail

// Heralded W preparation: click (with detector efficiency herald_eta) on the
// combined herald mode, all field modes traced out.
inline HeraldResult herald_W(const WriteConfig& cfg, double herald_eta = 1.0) {
  PureState joint = detail::joint_write_state(cfg);
  joint = apply_circuit(joint, herald_tree_circuit(), ClipPolicy::clip);
  auto cond = condition_on_click(joint, "a_1", atomic_labels(), herald_eta);
  return HeraldResult{detail::decohere_multiexcitation(std::move(cond.state)),
                      cond.probability};
}

// Crossed control state: which-path information retained between the pairs
// {a,b} and {c,d}.  Incoherent mixture, weighted by branch click
// probabilities, of a herald from a_1 (+) b_1 (pair {c,d} left unconditioned)
// and the mirror branch from c_1 (+) d_1.
inline HeraldResult herald_crossed(const WriteConfig& cfg, double herald_eta = 1.0) {
  PureState joint = detail::joint_write_state(cfg);

  LinearOpticsCircuit bs_ab{{Beamsplitter{"a_1", "b_1", 0.5, 0.0}}};
  auto branch_ab = condition_on_click(apply_circuit(joint, bs_ab, ClipPolicy::clip), "a_1",
                                      atomic_labels(), herald_eta);
  LinearOpticsCircuit bs_cd{{Beamsplitter{"c_1", "d_1", 0.5, 0.0}}};
  auto branch_cd = condition_on_click(apply_circuit(joint, bs_cd, ClipPolicy::clip), "c_1",
                                      atomic_labels(), herald_eta);

  const double p_total = branch_ab.probability + branch_cd.probability;
  DensityOperator rho{branch_ab.state.reg,
                      (branch_ab.probability * branch_ab.state.mat +
                       branch_cd.probability * branch_cd.state.mat) / p_total};
  return HeraldResult{detail::decohere_multiexcitation(std::move(rho)), p_total};
}

struct StorageConfig {
  double tau_us = 0.2;       // storage time
  double tau_m_us = 17.0;    // motional dephasing time
  double nu_read = 2e-4;     // static background photons per readout mode
  double nu_sub = 2.5e-3;    // background fed by the dephased (subradiant) fraction
  double eta_read = 0.38;    // retrieval efficiency
  double detector_eta = 1.0; // detection efficiency (product with eta_read calibrated)
  double v0 = 0.98;          // static inter-mode visibility factor
};

inline void validate(const StorageConfig& cfg) {
  if (cfg.tau_us < 0.0) throw std::invalid_argument("StorageConfig: tau must be >= 0");
  if (cfg.tau_m_us <= 0.0) throw std::invalid_argument("StorageConfig: tau_m must be > 0");
  if (cfg.eta_read < 0.0 || cfg.eta_read > 1.0)
    throw std::invalid_argument("StorageConfig: eta_read outside [0,1]");
  if (cfg.detector_eta < 0.0 || cfg.detector_eta > 1.0)
    throw std::invalid_argument("StorageConfig: detector_eta outside [0,1]");
  if (cfg.nu_read < 0.0 || cfg.nu_sub < 0.0)
    throw std::invalid_argument("StorageConfig: background rates must be >= 0");
  if (cfg.v0 < 0.0 || cfg.v0 > 1.0) throw std::invalid_argument("StorageConfig: v0 outside [0,1]");
}

// Retrievable-excitation survival probability after storage time tau.
inline double storage_survival(double tau_us, double tau_m_us) {
  const double x = tau_us / tau_m_us;
  return std::exp(-x * x);
}

// Motional dephasing during storage: each atomic mode couples to an
// inaccessible subradiant mode; the retrievable excitation decays as
// gamma(tau)^2 = exp(-tau^2 / tau_m^2).
inline DensityOperator dephase(const DensityOperator& rho_atomic, double tau_us,
                               double tau_m_us) {
  check_state_shape(rho_atomic);
  if (tau_us < 0.0) throw std::invalid_argument("dephase: tau must be >= 0");
  if (tau_m_us <= 0.0) throw std::invalid_argument("dephase: tau_m must be > 0");
  const double survival = storage_survival(tau_us, tau_m_us);
  DensityOperator out = rho_atomic;
  for (const auto& label : rho_atomic.reg.labels) out = apply_loss(out, label, survival);
  return out;
}

// Effective background per readout mode: a static floor plus the fraction of
// the stored excitation that dephased into subradiant modes and returns as
// uncorrelated noise.
inline double effective_background(const StorageConfig& cfg) {
  return cfg.nu_read + cfg.nu_sub * (1.0 - storage_survival(cfg.tau_us, cfg.tau_m_us));
}

// Readout into the photonic modes: relabels each atomic mode, applies
// retrieval/detection loss, the static visibility factor, and background
// injection.
inline DensityOperator readout(const DensityOperator& rho_atomic, const StorageConfig& cfg) {
  check_state_shape(rho_atomic);
  validate(cfg);
  if (rho_atomic.reg.labels != atomic_labels())
    throw std::invalid_argument("readout: expected the 4 atomic modes");
  DensityOperator rho = with_labels(rho_atomic, readout_field_labels());
  const double eta = cfg.eta_read * cfg.detector_eta;
  for (const auto& label : readout_field_labels()) rho = apply_loss(rho, label, eta);
  const double nu = effective_background(cfg);
  for (const auto& label : readout_field_labels()) rho = inject_background(rho, label, nu);
  rho = scale_off_diagonals(rho, cfg.v0);
  return rho;
}

// tau_m = lambda / (4 pi sin(theta/2) v_drift); lambda in um, v in m/s -> us.
inline double motional_tau(double theta_deg, double v_drift_m_per_s, double lambda_um) {
  if (theta_deg <= 0.0 || v_drift_m_per_s <= 0.0 || lambda_um <= 0.0)
    throw std::invalid_argument("motional_tau: inputs must be positive");
  const double theta_rad = theta_deg * std::numbers::pi / 180.0;
  return lambda_um / (4.0 * std::numbers::pi * std::sin(0.5 * theta_rad) * v_drift_m_per_s);
}

// ---------------------------------------------------------------------------
// W states and fidelity.

inline PureState w_state(const ModeRegister& reg, const std::array<double, 4>& phases) {
  if (reg.modes() != 4) throw std::invalid_argument("w_state: expected 4 modes");
  PureState s{reg, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(reg.dim()))};
  for (int m = 0; m < 4; ++m) {
    std::array<int, 4> occ{0, 0, 0, 0};
    occ[static_cast<std::size_t>(m)] = 1;
    s.amp[static_cast<Eigen::Index>(reg.compose(std::span<const int>(occ.data(), 4)))] =
        std::polar(0.5, phases[static_cast<std::size_t>(m)]);
  }
  return s;
}

// Phases of the W state the herald tree prepares for given write phases:
// theta_e = phi_e + arg(amplitude with which field e reaches the herald port).
inline std::array<double, 4> heralded_w_phases(const std::array<double, 4>& write_phases) {
  ModeRegister fields(write_field_labels(), 1);
  const auto circ = herald_tree_circuit();
  std::array<double, 4> theta{};
  for (int m = 0; m < 4; ++m) {
    std::array<int, 4> occ{0, 0, 0, 0};
    occ[static_cast<std::size_t>(m)] = 1;
    auto out = apply_circuit(basis_state(fields, std::span<const int>(occ.data(), 4)), circ);
    const std::array<int, 4> herald_occ{1, 0, 0, 0};
    const cplx amp = out.amp[static_cast<Eigen::Index>(
        fields.compose(std::span<const int>(herald_occ.data(), 4)))];
    theta[static_cast<std::size_t>(m)] = write_phases[static_cast<std::size_t>(m)] + std::arg(amp);
  }
  return theta;
}

// Analyzer phases that map the heralded W state onto port a with certainty.
inline std::array<double, 3> matched_beta(const std::array<double, 4>& write_phases) {
  const auto theta = heralded_w_phases(write_phases);
  return {theta[1] - theta[0], theta[2] - theta[0], theta[3] - theta[2]};
}

// Fidelity with the W state of the given phases, evaluated on the reduced
// (<=1 photon per mode, renormalized) state.
inline double w_fidelity(const DensityOperator& rho, const std::array<double, 4>& phases) {
  auto restricted = restrict_single_occupancy(rho);
  return expectation(restricted.state, w_state(restricted.state.reg, phases));
}

// Raw (unrestricted) overlap for structure checks.
inline double w_overlap_raw(const DensityOperator& rho, const std::array<double, 4>& phases) {
  return expectation(rho, w_state(rho.reg, phases));
}

// ---------------------------------------------------------------------------
// End-to-end pipeline.

struct PipelineSettings {
  WriteConfig write;
  double herald_eta = 0.06;
  StorageConfig storage;
  bool crossed = false;
};

struct PipelinePoint {
  HeraldResult herald;
  DensityOperator rho_stored;    // atomic state after storage
  DensityOperator rho_photonic;  // readout output over (a_2, b_2, c_2, d_2)
};

inline PipelinePoint run_pipeline(const PipelineSettings& s) {
  HeraldResult h = s.crossed ? herald_crossed(s.write, s.herald_eta)
                             : herald_W(s.write, s.herald_eta);
  DensityOperator stored = dephase(h.rho_atomic, s.storage.tau_us, s.storage.tau_m_us);
  DensityOperator photonic = readout(stored, s.storage);
  return PipelinePoint{std::move(h), std::move(stored), std::move(photonic)};
}

}  // namespace quadwit
