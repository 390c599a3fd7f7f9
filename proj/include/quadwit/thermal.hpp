#pragma once
// Thermal spin analogues: four spin-1/2 particles on a tetrahedron (complete
// graph, 6 bonds) under a modified Heisenberg model or an LMG model.  Gibbs
// states are mapped into the witness via |down>,|up> -> |0>,|1>, so the
// 16-dim spin space doubles as the 4-mode <=1-photon space.

#include "quadwit/witness.hpp"

#include <limits>
#include <string>

namespace quadwit {

enum class SpinModel { heisenberg_prime, lmg };

inline const char* to_string(SpinModel m) {
  return m == SpinModel::heisenberg_prime ? "heisenberg-prime" : "lmg";
}

inline SpinModel spin_model_from_string(const std::string& s) {
  if (s == "heisenberg-prime") return SpinModel::heisenberg_prime;
  if (s == "lmg") return SpinModel::lmg;
  throw std::invalid_argument("unknown spin model: " + s);
}

struct SpinHamiltonian {
  Eigen::MatrixXcd matrix;  // 16x16 Hermitian, units of J
  SpinModel model = SpinModel::heisenberg_prime;
  double J = 1.0;
  double h_z = 0.5;
  std::string convention;  // spin-operator normalization that passed the ground check
};

inline ModeRegister spin_register() { return ModeRegister({"a", "b", "c", "d"}, 1); }

namespace detail {

// Single-site spin operator (S_x, S_y or S_z = scale * Pauli) embedded in the
// 16-dim space; site 0 is the most significant bit of the basis index.
inline Eigen::MatrixXcd site_operator(int site, char axis, double scale) {
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(16, 16);
  const int bit = 8 >> site;
  for (int b = 0; b < 16; ++b) {
    const bool up = (b & bit) != 0;
    switch (axis) {
      case 'x': op(b ^ bit, b) = scale; break;
      case 'y': op(b ^ bit, b) = up ? cplx(0, scale) : cplx(0, -scale); break;
      case 'z': op(b, b) = up ? scale : -scale; break;
      default: throw std::logic_error("site_operator: bad axis");
    }
  }
  return op;
}

inline Eigen::MatrixXcd assemble_hamiltonian(SpinModel model, double J, double h_z,
                                             double scale) {
  std::array<Eigen::MatrixXcd, 4> sx, sy, sz;
  for (int i = 0; i < 4; ++i) {
    sx[static_cast<std::size_t>(i)] = site_operator(i, 'x', scale);
    sy[static_cast<std::size_t>(i)] = site_operator(i, 'y', scale);
    sz[static_cast<std::size_t>(i)] = site_operator(i, 'z', scale);
  }
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(16, 16);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) {
      Eigen::MatrixXcd bond = sx[i] * sx[j] + sy[i] * sy[j];
      if (model == SpinModel::heisenberg_prime) bond += sz[i] * sz[j];
      H -= (J / 4.0) * bond;
    }
  for (std::size_t i = 0; i < 4; ++i) H += h_z * sz[i];
  if (model == SpinModel::heisenberg_prime) H(0, 0) += 2.0 * h_z;  // all-down projection term
  return H;
}

// Does the lowest eigenvector at h_z = J/2 coincide with the symmetric
// one-up W state?  This property fixes the physics; the operator
// normalization is chosen to satisfy it.
inline bool w_ground_check(SpinModel model, double scale) {
  const Eigen::MatrixXcd H = assemble_hamiltonian(model, 1.0, 0.5, scale);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(16);
  w[8] = w[4] = w[2] = w[1] = 0.5;
  const Eigen::VectorXcd ground = es.eigenvectors().col(0);
  const double overlap = std::norm(w.dot(ground));
  const double gap = es.eigenvalues()[1] - es.eigenvalues()[0];
  return overlap >= 1.0 - 1e-10 && gap > 1e-9;
}

}  // namespace detail

// Builds the model on the complete graph of 4 sites.  Spin operators default
// to Pauli/2; if that normalization fails the W-ground condition at
// h_z = J/2, the full-Pauli normalization is used instead, and the choice is
// recorded in `convention`.
inline SpinHamiltonian build_hamiltonian(SpinModel model, double J, double h_z) {
  if (J <= 0.0) throw std::invalid_argument("build_hamiltonian: J must be > 0 (ferromagnetic)");
  double scale = 0.5;
  std::string convention = "pauli/2";
  if (!detail::w_ground_check(model, scale)) {
    scale = 1.0;
    convention = "pauli";
    if (!detail::w_ground_check(model, scale))
      throw std::runtime_error("build_hamiltonian: no spin normalization gives a W ground state");
  }
  return SpinHamiltonian{detail::assemble_hamiltonian(model, J, h_z, scale), model, J, h_z,
                         std::move(convention)};
}

struct GibbsState {
  DensityOperator rho;  // over the spin register, |down>,|up> -> |0>,|1>
  double kT = 0.0;      // units of J
  double Z = 0.0;       // partition function; +inf when e^{-E/kT} overflows
};

// Gibbs state e^{-H/kT}/Z.  kT = 0 returns the normalized ground-space
// projector.  The state itself is computed with energies shifted by E_min,
// so it stays finite at any temperature; only the reported Z can overflow.
inline GibbsState gibbs(const SpinHamiltonian& H, double kT) {
  if (kT < 0.0) throw std::invalid_argument("gibbs: kT must be >= 0");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.matrix);
  const Eigen::VectorXd& e = es.eigenvalues();
  const Eigen::MatrixXcd& v = es.eigenvectors();
  const double e_min = e[0];

  Eigen::VectorXd weights(16);
  if (kT == 0.0) {
    for (int i = 0; i < 16; ++i) weights[i] = (e[i] - e_min <= 1e-12) ? 1.0 : 0.0;
  } else {
    for (int i = 0; i < 16; ++i) weights[i] = std::exp(-(e[i] - e_min) / kT);
  }
  const double shifted_sum = weights.sum();

  double Z;
  if (kT == 0.0) {
    Z = e_min < 0.0 ? std::numeric_limits<double>::infinity()
                    : (e_min > 0.0 ? 0.0 : shifted_sum);
  } else {
    Z = std::exp(-e_min / kT) * shifted_sum;  // may overflow to +inf
  }

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(16, 16);
  for (int i = 0; i < 16; ++i)
    if (weights[i] > 0.0) rho.noalias() += (weights[i] / shifted_sum) * v.col(i) * v.col(i).adjoint();
  return GibbsState{DensityOperator{spin_register(), std::move(rho)}, kT, Z};
}

// Witness quantities for a state on the spin register.  The analyzer is the
// symmetric one (all beta = 0), matched to the all-phases-zero W state the
// models single out.
inline WitnessPoint spin_witness_point(const DensityOperator& rho, const PortOperators& ports) {
  check_state_shape(rho);
  if (!rho.reg.same_shape(ports.sub))
    throw std::invalid_argument("spin_witness_point: register mismatch with port operators");
  const auto stats = number_statistics(rho);
  std::array<double, 4> raw{};
  for (std::size_t i = 0; i < 4; ++i)
    raw[i] = std::real((ports.E[i] * rho.mat).trace());
  WitnessPoint pt;
  pt.delta = delta_from_port_expectations(std::span<const double>(raw.data(), 4));
  pt.yc = yc(stats);
  return pt;
}

inline PortOperators symmetric_port_operators() { return build_port_operators(0.0, 0.0, 0.0); }

inline WitnessPoint thermal_witness_point(const GibbsState& g) {
  return spin_witness_point(g.rho, symmetric_port_operators());
}

struct ThermalCurvePoint {
  double kT = 0.0;  // units of J
  WitnessPoint point;
  NumberStatistics stats;
  double Z = 0.0;
};

inline std::vector<ThermalCurvePoint> thermal_curve(const SpinHamiltonian& H,
                                                    std::span<const double> kT_grid) {
  const PortOperators ports = symmetric_port_operators();
  std::vector<ThermalCurvePoint> out;
  out.reserve(kT_grid.size());
  for (double kT : kT_grid) {
    GibbsState g = gibbs(H, kT);
    ThermalCurvePoint pt;
    pt.kT = kT;
    pt.point = spin_witness_point(g.rho, ports);
    pt.stats = number_statistics(g.rho);
    pt.Z = g.Z;
    out.push_back(pt);
  }
  return out;
}

}  // namespace quadwit
