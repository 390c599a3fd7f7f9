#pragma once
// Linear optics on truncated Fock states: beamsplitters, phase shifts,
// ordered circuits, and the four-port analyzer whose output projectors form
// four orthonormal W states.
//
// Beamsplitter convention: a† -> sqrt(t) a† + i sqrt(1-t) e^{i theta} b†,
//                          b† -> i sqrt(1-t) e^{-i theta} a† + sqrt(t) b†.
// Lossless elements conserve total photon number, so states supported on
// total <= cutoff transform exactly; components that would overflow a mode
// are an error unless clipping is requested.

#include "quadwit/fock.hpp"

#include <array>
#include <cmath>
#include <variant>

namespace quadwit {

struct Beamsplitter {
  std::string mode1;
  std::string mode2;
  double transmissivity = 0.5;
  double phase = 0.0;
};

struct PhaseShift {
  std::string mode;
  double phi = 0.0;
};

using CircuitElement = std::variant<Beamsplitter, PhaseShift>;

struct LinearOpticsCircuit {
  std::vector<CircuitElement> elements;
};

enum class ClipPolicy {
  error,  // throw if any component would exceed the per-mode cutoff
  clip,   // drop such components (trace/norm loss = dropped weight)
};

namespace detail {

inline double factorial(int n) {
  static constexpr std::array<double, 17> table = {
      1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0, 40320.0, 362880.0,
      3628800.0, 39916800.0, 479001600.0, 6227020800.0, 87178291200.0,
      1307674368000.0, 20922789888000.0};
  return table[static_cast<std::size_t>(n)];
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

// Amplitude of |k, K-k> in the image of |m, n> under the beamsplitter.
inline cplx beamsplitter_coeff(int m, int n, int k, double t, double theta) {
  const int K = m + n;
  const double r = 1.0 - t;
  const cplx i_unit(0.0, 1.0);
  cplx sum(0.0, 0.0);
  const int p_lo = std::max(0, k - n);
  const int p_hi = std::min(m, k);
  for (int p = p_lo; p <= p_hi; ++p) {
    const int q = k - p;                  // photons reflected from mode 2
    const int refl = (m - p) + q;         // total reflections, each carrying i
    const double mag = binomial(m, p) * binomial(n, q) *
                       std::pow(t, 0.5 * (p + n - q)) * std::pow(r, 0.5 * refl);
    cplx phase = std::polar(1.0, theta * static_cast<double>((m - p) - q));
    cplx ipow(1.0, 0.0);
    for (int u = 0; u < (refl & 3); ++u) ipow *= i_unit;
    sum += mag * ipow * phase;
  }
  return sum * std::sqrt(factorial(k) * factorial(K - k) / (factorial(m) * factorial(n)));
}

// Applies one element to a raw amplitude vector over `reg`.
inline void apply_element_to_vector(const ModeRegister& reg, const CircuitElement& el,
                                    const Eigen::VectorXcd& in, Eigen::VectorXcd& out,
                                    ClipPolicy policy) {
  const std::size_t dim = reg.dim();
  if (const auto* ps = std::get_if<PhaseShift>(&el)) {
    const int m = reg.index_of(ps->mode);
    out.resize(static_cast<Eigen::Index>(dim));
    for (std::size_t idx = 0; idx < dim; ++idx) {
      const int n = reg.occupation(idx, m);
      out[static_cast<Eigen::Index>(idx)] =
          in[static_cast<Eigen::Index>(idx)] * std::polar(1.0, ps->phi * n);
    }
    return;
  }
  const auto& bs = std::get<Beamsplitter>(el);
  if (bs.transmissivity < 0.0 || bs.transmissivity > 1.0)
    throw std::invalid_argument("Beamsplitter: transmissivity outside [0,1]");
  const int m1 = reg.index_of(bs.mode1);
  const int m2 = reg.index_of(bs.mode2);
  if (m1 == m2) throw std::invalid_argument("Beamsplitter: modes must differ");
  const std::size_t s1 = reg.stride(m1);
  const std::size_t s2 = reg.stride(m2);
  out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t idx = 0; idx < dim; ++idx) {
    const cplx a = in[static_cast<Eigen::Index>(idx)];
    if (a == cplx(0.0, 0.0)) continue;
    const int m = reg.occupation(idx, m1);
    const int n = reg.occupation(idx, m2);
    if (m == 0 && n == 0) {
      out[static_cast<Eigen::Index>(idx)] += a;
      continue;
    }
    const std::size_t base = idx - static_cast<std::size_t>(m) * s1 - static_cast<std::size_t>(n) * s2;
    const int K = m + n;
    for (int k = 0; k <= K; ++k) {
      if (k > reg.cutoff || K - k > reg.cutoff) {
        if (policy == ClipPolicy::error)
          throw std::runtime_error(
              "apply_circuit: beamsplitter output exceeds the per-mode cutoff "
              "(enable clipping or raise the cutoff)");
        continue;
      }
      const cplx c = beamsplitter_coeff(m, n, k, bs.transmissivity, bs.phase);
      out[static_cast<Eigen::Index>(base + static_cast<std::size_t>(k) * s1 +
                                    static_cast<std::size_t>(K - k) * s2)] += a * c;
    }
  }
}

}  // namespace detail

inline PureState apply_circuit(const PureState& state, const LinearOpticsCircuit& circuit,
                               ClipPolicy policy = ClipPolicy::error) {
  check_state_shape(state);
  PureState out = state;
  Eigen::VectorXcd tmp;
  for (const auto& el : circuit.elements) {
    detail::apply_element_to_vector(out.reg, el, out.amp, tmp, policy);
    out.amp.swap(tmp);
  }
  return out;
}

inline DensityOperator apply_circuit(const DensityOperator& rho,
                                     const LinearOpticsCircuit& circuit,
                                     ClipPolicy policy = ClipPolicy::error) {
  check_state_shape(rho);
  DensityOperator out = rho;
  const auto dim = static_cast<Eigen::Index>(rho.reg.dim());
  Eigen::VectorXcd col(dim), tmp(dim);
  for (const auto& el : circuit.elements) {
    // rho -> E rho E† in two column passes: C = E rho, then (E C†)†.
    Eigen::MatrixXcd c(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
      col = out.mat.col(j);
      detail::apply_element_to_vector(out.reg, el, col, tmp, policy);
      c.col(j) = tmp;
    }
    Eigen::MatrixXcd d = c.adjoint();
    for (Eigen::Index j = 0; j < dim; ++j) {
      col = d.col(j);
      detail::apply_element_to_vector(out.reg, el, col, tmp, policy);
      c.col(j) = tmp;
    }
    out.mat = c.adjoint();
  }
  return out;
}

// Element-wise inverse in reverse order; useful for unitarity checks.
inline LinearOpticsCircuit inverse_circuit(const LinearOpticsCircuit& circuit) {
  LinearOpticsCircuit inv;
  for (auto it = circuit.elements.rbegin(); it != circuit.elements.rend(); ++it) {
    if (const auto* ps = std::get_if<PhaseShift>(&*it)) {
      inv.elements.push_back(PhaseShift{ps->mode, -ps->phi});
    } else {
      const auto& bs = std::get<Beamsplitter>(*it);
      // Inverse of the convention above: swap the roles and flip the
      // reflected phase by pi (i -> -i) while keeping theta.
      inv.elements.push_back(PhaseShift{bs.mode1, M_PI});
      inv.elements.push_back(Beamsplitter{bs.mode1, bs.mode2, bs.transmissivity, bs.phase});
      inv.elements.push_back(PhaseShift{bs.mode1, M_PI});
    }
  }
  return inv;
}

// Four-port analyzer over modes (a, b, c, d) with tunable phases
// (beta1, beta2, beta3).  The matched single-photon input
//   (|a> + e^{i beta1}|b> + e^{i beta2}|c> + e^{i (beta2+beta3)}|d>) / 2
// exits port a with certainty, and the four output-port projectors are
// mutually orthonormal W-type states with all amplitudes of magnitude 1/2.
inline LinearOpticsCircuit verification_circuit(const std::string& a, const std::string& b,
                                                const std::string& c, const std::string& d,
                                                double beta1, double beta2, double beta3) {
  const double half_pi = 0.5 * M_PI;
  LinearOpticsCircuit circ;
  circ.elements = {
      PhaseShift{b, -beta1 - half_pi},
      PhaseShift{c, -beta2},
      PhaseShift{d, -beta2 - beta3 - half_pi},
      Beamsplitter{a, b, 0.5, 0.0},
      Beamsplitter{c, d, 0.5, 0.0},
      PhaseShift{c, -half_pi},
      Beamsplitter{a, c, 0.5, 0.0},
      Beamsplitter{b, d, 0.5, 0.0},
  };
  return circ;
}

}  // namespace quadwit
