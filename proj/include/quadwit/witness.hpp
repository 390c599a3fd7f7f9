#pragma once
// Witness coordinates for four optical modes: on/off click statistics
// (q_ijkl, p0, p1, p_ge2, y_c) and coherence diagnostics (p_singles, Delta,
// d_bar, V_eff), plus fringe scans and the reduced single-occupancy port
// operators used by the bound optimizer and the spin-model curves.

#include "quadwit/channels.hpp"

#include <array>
#include <cstdint>
#include <optional>

namespace quadwit {

// ---------------------------------------------------------------------------
// Photon statistics.

struct ClickStatistics {
  // q[pattern]: pattern bit (M-1-m) is set iff mode m registered >= 1 photon,
  // so pattern = i*8 + j*4 + k*2 + l for outcome (i,j,k,l) on 4 modes.
  std::array<double, 16> q{};
  double p0 = 0.0;     // no mode clicked
  double p1 = 0.0;     // exactly one mode clicked
  double p_ge2 = 0.0;  // two or more distinct modes clicked
};

inline ClickStatistics click_statistics(const DensityOperator& rho) {
  check_state_shape(rho);
  if (rho.reg.modes() != 4)
    throw std::invalid_argument("click_statistics: expected 4 optical modes");
  ClickStatistics stats;
  for (std::size_t idx = 0; idx < rho.reg.dim(); ++idx) {
    unsigned pattern = 0;
    for (int m = 0; m < 4; ++m)
      if (rho.reg.occupation(idx, m) > 0) pattern |= 1u << (3 - m);
    stats.q[pattern] += rho.mat(static_cast<Eigen::Index>(idx),
                                static_cast<Eigen::Index>(idx)).real();
  }
  stats.p0 = stats.q[0];
  stats.p1 = stats.q[1] + stats.q[2] + stats.q[4] + stats.q[8];
  double total = 0.0;
  for (double v : stats.q) total += v;
  stats.p_ge2 = total - stats.p0 - stats.p1;
  return stats;
}

// Statistics over the total photon number, read from the state directly
// (the non-resolving detector model cannot distinguish two photons in one
// mode from one; these number-resolved aggregates can).
struct NumberStatistics {
  double p0 = 0.0;
  double p1 = 0.0;
  double p_ge2 = 0.0;
};

inline NumberStatistics number_statistics(const DensityOperator& rho) {
  const auto dist = total_number_distribution(rho);
  NumberStatistics stats;
  stats.p0 = dist[0];
  stats.p1 = dist.size() > 1 ? dist[1] : 0.0;
  for (std::size_t n = 2; n < dist.size(); ++n) stats.p_ge2 += dist[n];
  return stats;
}

// y_c = (8/3) p_ge2 p0 / p1^2: 0 for a single shared excitation, 1 for
// balanced coherent states (with on/off clicks).
inline double yc_formula(double p0, double p1, double p_ge2) {
  if (p1 <= 0.0)
    throw std::runtime_error("yc: p1 = 0, contamination measure undefined");
  return (8.0 / 3.0) * p_ge2 * p0 / (p1 * p1);
}

inline double yc(const ClickStatistics& stats) { return yc_formula(stats.p0, stats.p1, stats.p_ge2); }
inline double yc(const NumberStatistics& stats) { return yc_formula(stats.p0, stats.p1, stats.p_ge2); }

// ---------------------------------------------------------------------------
// Verification measurement.

struct VerificationOutcome {
  std::array<double, 4> p_singles{};  // conditional on exactly one click
  std::array<double, 3> beta{};       // analyzer phases (radians)
  double p1_event = 0.0;              // unconditional exactly-one-click probability
};

// Sends the four optical modes through the analyzer and conditions on the
// exactly-one-click event.  Mode order in the register is (a, b, c, d).
inline VerificationOutcome verification_measurement(const DensityOperator& rho_gamma,
                                                    double beta1, double beta2, double beta3,
                                                    ClipPolicy policy = ClipPolicy::clip) {
  check_state_shape(rho_gamma);
  if (rho_gamma.reg.modes() != 4)
    throw std::invalid_argument("verification_measurement: expected 4 optical modes");
  const auto& lab = rho_gamma.reg.labels;
  const auto circ = verification_circuit(lab[0], lab[1], lab[2], lab[3], beta1, beta2, beta3);
  const auto out = apply_circuit(rho_gamma, circ, policy);
  // Projector convention: the conditioning event is exactly one photon in
  // total, so p_singles[i] is the expectation of |W_i><W_i| renormalized over
  // the single-photon sector.
  std::array<double, 4> raw{};
  double p1_event = 0.0;
  for (int m = 0; m < 4; ++m) {
    const std::size_t idx = out.reg.stride(m);
    raw[static_cast<std::size_t>(m)] =
        std::real(out.mat(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx)));
    p1_event += raw[static_cast<std::size_t>(m)];
  }
  VerificationOutcome result;
  result.beta = {beta1, beta2, beta3};
  result.p1_event = p1_event;
  if (p1_event < 1e-15)
    throw std::runtime_error("verification_measurement: single-photon probability is zero");
  for (std::size_t m = 0; m < 4; ++m) result.p_singles[m] = raw[m] / p1_event;
  return result;
}

// Sum uncertainty of the four conditional port projectors:
// Delta = sum_i p_i (1 - p_i) = 1 - sum_i p_i^2.
inline double delta(const VerificationOutcome& outcome) {
  double sum_sq = 0.0;
  for (double p : outcome.p_singles) sum_sq += p * p;
  return 1.0 - sum_sq;
}

struct WitnessPoint {
  double delta = 0.0;
  double yc = 0.0;
  std::optional<double> d_bar;
  std::optional<double> v_eff;
  double sigma_delta = 0.0;  // optional 1-s.d. uncertainties for certification
  double sigma_yc = 0.0;
};

// ---------------------------------------------------------------------------
// Coherence diagnostics.

struct CoherenceSummary {
  double d_bar = 0.0;          // mean |rho(e_a, e_b)| / p1 over the 6 pairs
  double v_eff = 0.0;          // 4 d_bar
  double delta_ceiling = 0.0;  // (3/4)(1 - 16 d_bar^2)
  double p1_population = 0.0;  // single-excitation population
};

inline CoherenceSummary coherence_summary(const DensityOperator& rho_gamma) {
  check_state_shape(rho_gamma);
  if (rho_gamma.reg.modes() != 4)
    throw std::invalid_argument("coherence_summary: expected 4 optical modes");
  std::array<Eigen::Index, 4> e;
  for (int m = 0; m < 4; ++m) {
    std::array<int, 4> occ{0, 0, 0, 0};
    occ[static_cast<std::size_t>(m)] = 1;
    e[static_cast<std::size_t>(m)] = static_cast<Eigen::Index>(
        rho_gamma.reg.compose(std::span<const int>(occ.data(), 4)));
  }
  double p1 = 0.0;
  for (auto idx : e) p1 += rho_gamma.mat(idx, idx).real();
  if (p1 < 1e-15)
    throw std::runtime_error("coherence_summary: no single-excitation population");
  double sum = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      sum += std::abs(rho_gamma.mat(e[static_cast<std::size_t>(a)], e[static_cast<std::size_t>(b)]));
  CoherenceSummary s;
  s.p1_population = p1;
  s.d_bar = sum / 6.0 / p1;
  s.v_eff = 4.0 * s.d_bar;
  s.delta_ceiling = 0.75 * (1.0 - 16.0 * s.d_bar * s.d_bar);
  return s;
}

// Delta as a function of the bipartite phase beta2 with beta1, beta3 fixed.
inline std::vector<std::pair<double, double>> fringe_scan(const DensityOperator& rho_gamma,
                                                          const std::vector<double>& beta2_grid,
                                                          double beta1, double beta3) {
  std::vector<std::pair<double, double>> out;
  out.reserve(beta2_grid.size());
  for (double b2 : beta2_grid)
    out.emplace_back(b2, delta(verification_measurement(rho_gamma, beta1, b2, beta3)));
  return out;
}

// ---------------------------------------------------------------------------
// Reduced port operators on the <=1-photon-per-mode subspace.
//
// E[i](a,b) = <a| U† D_i U |b> over the 2^M single-occupancy basis, with D_i
// the "exactly one photon, at port i" projector.  Computed once by sending
// every basis pattern through the analyzer at a cutoff high enough to avoid
// clipping, so the matrices are exact on the subspace.

struct PortOperators {
  ModeRegister sub;                 // cutoff-1 register the operators act on
  std::vector<Eigen::MatrixXcd> E;  // one per port, dim 2^M
};

inline PortOperators build_port_operators(const ModeRegister& sub,
                                          const LinearOpticsCircuit& circuit) {
  if (sub.cutoff != 1)
    throw std::invalid_argument("build_port_operators: expected a cutoff-1 register");
  const int m_count = sub.modes();
  ModeRegister big(sub.labels, std::min(kMaxCutoff, m_count));
  const std::size_t dim_sub = sub.dim();
  std::vector<Eigen::VectorXcd> images(dim_sub);
  for (std::size_t b = 0; b < dim_sub; ++b) {
    PureState basis{sub, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim_sub))};
    basis.amp[static_cast<Eigen::Index>(b)] = 1.0;
    images[b] = apply_circuit(embed(basis, big), circuit, ClipPolicy::error).amp;
  }
  // Index sets: exactly one photon, sitting in this port.  The resulting
  // operators are rank-1 projectors |W_i><W_i| and mutually orthonormal.
  PortOperators ops{sub, {}};
  for (int port = 0; port < m_count; ++port) {
    std::vector<std::size_t> sel;
    for (std::size_t idx = 0; idx < big.dim(); ++idx) {
      bool single_here = big.occupation(idx, port) == 1;
      for (int m = 0; m < m_count && single_here; ++m)
        if (m != port && big.occupation(idx, m) != 0) single_here = false;
      if (single_here) sel.push_back(idx);
    }
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim_sub),
                                                static_cast<Eigen::Index>(dim_sub));
    for (std::size_t a = 0; a < dim_sub; ++a)
      for (std::size_t b = 0; b < dim_sub; ++b) {
        cplx sum(0.0, 0.0);
        for (std::size_t n : sel)
          sum += std::conj(images[a][static_cast<Eigen::Index>(n)]) *
                 images[b][static_cast<Eigen::Index>(n)];
        e(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = sum;
      }
    ops.E.push_back(std::move(e));
  }
  return ops;
}

// Standard four-mode analyzer operators at phases beta.
inline PortOperators build_port_operators(double beta1, double beta2, double beta3) {
  ModeRegister sub({"a", "b", "c", "d"}, 1);
  return build_port_operators(sub, verification_circuit("a", "b", "c", "d", beta1, beta2, beta3));
}

// Conditional Delta from port expectations T_i = tr(rho E_i).
inline double delta_from_port_expectations(std::span<const double> t) {
  double s = 0.0;
  for (double v : t) s += v;
  if (s < 1e-15)
    throw std::runtime_error("delta_from_port_expectations: zero single-click probability");
  double sum_sq = 0.0;
  for (double v : t) sum_sq += (v / s) * (v / s);
  return 1.0 - sum_sq;
}

}  // namespace quadwit
