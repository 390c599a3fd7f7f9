#pragma once
// Scalar analyses derived from witness measurements: conditional and
// entanglement fidelity lower bounds, the memory-to-channel transfer ratio,
// small-xi asymptotics, and the hexapartite scaling estimate.

#include "quadwit/witness.hpp"

namespace quadwit {

// Lower bound on the fidelity of the single-excitation component with the
// matched W state, from the sum uncertainty alone:
// F1 >= sqrt((1/2)(1/2 - Delta)) + 1/2.  Valid only for Delta <= 1/2.
inline double conditional_fidelity_bound(double delta_value) {
  if (!(delta_value >= 0.0 && delta_value <= 0.5))
    throw std::domain_error("conditional_fidelity_bound: requires 0 <= Delta <= 1/2");
  return std::sqrt(0.5 * (0.5 - delta_value)) + 0.5;
}

// F_tilde = p1_tilde * F1(Delta): entanglement fidelity lower bound for a
// state whose single-excitation weight is p1_tilde.
inline double entanglement_fidelity(double p1_tilde, double delta_value) {
  if (!(p1_tilde >= 0.0 && p1_tilde <= 1.0))
    throw std::domain_error("entanglement_fidelity: p1_tilde outside [0,1]");
  return p1_tilde * conditional_fidelity_bound(delta_value);
}

struct InferredP1 {
  double value = 0.0;  // capped at 1
  bool capped = false; // raw inversion exceeded 1 beyond tolerance
};

// First-order loss inversion: the memory-side single-excitation probability
// inferred by dividing the observed photonic one out of the retrieval
// efficiency.
inline InferredP1 infer_p1_atomic(const ClickStatistics& photonic, double eta_read) {
  if (eta_read <= 0.0) throw std::domain_error("infer_p1_atomic: eta_read must be > 0");
  const double raw = photonic.p1 / eta_read;
  return InferredP1{std::min(raw, 1.0), raw > 1.05};
}

inline double transfer_ratio(double f_tilde_channel, double f_tilde_memory) {
  if (f_tilde_memory <= 0.0)
    throw std::domain_error("transfer_ratio: memory-side fidelity must be > 0");
  return f_tilde_channel / f_tilde_memory;
}

// Leading-order predictions in the excitation probability xi.
struct Asymptotics {
  double yc_th = 0.0;     // 8 xi
  double delta_th = 0.0;  // 9 xi
  double f_th = 1.0;      // 1 - 3 xi
};

inline Asymptotics asymptotics(double xi) {
  if (!(xi >= 0.0 && xi < 0.1))
    throw std::domain_error("asymptotics: valid for 0 <= xi < 0.1");
  return Asymptotics{8.0 * xi, 9.0 * xi, 1.0 - 3.0 * xi};
}

// Success probability estimate for extending to six memories by connecting
// two heralded quadruples: 3 z eta_read p_h^2 / 8, with z the local
// enhancement factor.
inline double swap_scaling(double z, double eta_read, double p_h) {
  if (z <= 0.0 || eta_read <= 0.0 || p_h <= 0.0)
    throw std::domain_error("swap_scaling: inputs must be positive");
  return 3.0 * z * eta_read * p_h * p_h / 8.0;
}

// Full fidelity chain evaluated from the photonic measurement record.  The
// conditional bound from Delta applies to both sides; the memory-side
// excitation weight is inferred through the retrieval efficiency, the
// channel-side weight is the observed one.
struct FidelityReport {
  double f1_lower = 0.0;        // conditional fidelity bound from Delta
  double p1_tilde = 0.0;        // inferred memory-side single-excitation probability
  double f_tilde = 0.0;         // memory-side entanglement fidelity bound
  double p1_channel = 0.0;      // observed photonic single-excitation probability
  double f_tilde_channel = 0.0; // channel-side entanglement fidelity bound
  std::optional<double> lambda; // transfer ratio (absent if memory bound is 0)
  bool p1_capped = false;
};

inline FidelityReport fidelity_report(double delta_value, const ClickStatistics& photonic,
                                      double eta_read) {
  FidelityReport r;
  r.f1_lower = conditional_fidelity_bound(delta_value);
  const auto inferred = infer_p1_atomic(photonic, eta_read);
  r.p1_tilde = inferred.value;
  r.p1_capped = inferred.capped;
  r.f_tilde = entanglement_fidelity(r.p1_tilde, delta_value);
  r.p1_channel = photonic.p1;
  r.f_tilde_channel = entanglement_fidelity(std::min(r.p1_channel, 1.0), delta_value);
  if (r.f_tilde > 0.0) r.lambda = transfer_ratio(r.f_tilde_channel, r.f_tilde);
  return r;
}

}  // namespace quadwit
