#pragma once
// Truncated multimode bosonic Fock space: mode registers, pure and mixed
// states, basis indexing, and occupancy diagnostics.
//
// Basis indexing is row-major over per-mode occupations with the first mode
// most significant: index = sum_i n_i * (cutoff+1)^(M-1-i).  All CSV dumps
// and operator matrices downstream rely on this order.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace quadwit {

using cplx = std::complex<double>;

inline constexpr double kNormTol = 1e-10;
inline constexpr int kMaxModes = 12;
inline constexpr int kMaxCutoff = 4;

struct ModeRegister {
  std::vector<std::string> labels;
  int cutoff = 2;

  ModeRegister() = default;

  ModeRegister(std::vector<std::string> labels_in, int cutoff_in)
      : labels(std::move(labels_in)), cutoff(cutoff_in) {
    if (labels.empty() || static_cast<int>(labels.size()) > kMaxModes)
      throw std::invalid_argument("ModeRegister: mode count must be 1..12");
    if (cutoff < 1 || cutoff > kMaxCutoff)
      throw std::invalid_argument("ModeRegister: cutoff must be 1..4");
    for (std::size_t i = 0; i < labels.size(); ++i)
      for (std::size_t j = i + 1; j < labels.size(); ++j)
        if (labels[i] == labels[j])
          throw std::invalid_argument("ModeRegister: duplicate label '" + labels[i] + "'");
  }

  int modes() const { return static_cast<int>(labels.size()); }
  int dim_per_mode() const { return cutoff + 1; }

  std::size_t dim() const {
    std::size_t d = 1;
    for (int m = 0; m < modes(); ++m) d *= static_cast<std::size_t>(dim_per_mode());
    return d;
  }

  int index_of(const std::string& label) const {
    for (int m = 0; m < modes(); ++m)
      if (labels[m] == label) return m;
    throw std::invalid_argument("ModeRegister: unknown mode '" + label + "'");
  }

  // (cutoff+1)^(M-1-mode); the first mode carries the largest stride.
  std::size_t stride(int mode) const {
    check_mode(mode);
    std::size_t s = 1;
    for (int m = modes() - 1; m > mode; --m) s *= static_cast<std::size_t>(dim_per_mode());
    return s;
  }

  int occupation(std::size_t index, int mode) const {
    check_mode(mode);
    return static_cast<int>((index / stride(mode)) % static_cast<std::size_t>(dim_per_mode()));
  }

  std::vector<int> occupations(std::size_t index) const {
    std::vector<int> occ(modes());
    for (int m = modes() - 1; m >= 0; --m) {
      occ[m] = static_cast<int>(index % static_cast<std::size_t>(dim_per_mode()));
      index /= static_cast<std::size_t>(dim_per_mode());
    }
    return occ;
  }

  std::size_t compose(std::span<const int> occ) const {
    if (static_cast<int>(occ.size()) != modes())
      throw std::invalid_argument("ModeRegister: occupation tuple has wrong length");
    std::size_t index = 0;
    for (int m = 0; m < modes(); ++m) {
      if (occ[m] < 0 || occ[m] > cutoff)
        throw std::invalid_argument("ModeRegister: occupation outside 0..cutoff");
      index = index * static_cast<std::size_t>(dim_per_mode()) + static_cast<std::size_t>(occ[m]);
    }
    return index;
  }

  bool same_shape(const ModeRegister& other) const {
    return cutoff == other.cutoff && labels == other.labels;
  }

 private:
  void check_mode(int mode) const {
    if (mode < 0 || mode >= modes())
      throw std::invalid_argument("ModeRegister: mode index out of range");
  }
};

struct PureState {
  ModeRegister reg;
  Eigen::VectorXcd amp;

  double norm() const { return amp.norm(); }
  double norm_error() const { return std::abs(amp.squaredNorm() - 1.0); }
};

struct DensityOperator {
  ModeRegister reg;
  Eigen::MatrixXcd mat;

  double trace() const { return mat.trace().real(); }
  double trace_error() const { return std::abs(mat.trace() - cplx(1.0, 0.0)); }

  double hermiticity_error() const {
    return (mat - mat.adjoint()).cwiseAbs().maxCoeff();
  }

  // Eigen-decomposition based; for tests and validation, not hot paths.
  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (mat + mat.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
};

inline void check_state_shape(const PureState& s) {
  if (s.amp.size() != static_cast<Eigen::Index>(s.reg.dim()))
    throw std::invalid_argument("PureState: amplitude size does not match register");
}

inline void check_state_shape(const DensityOperator& r) {
  const auto d = static_cast<Eigen::Index>(r.reg.dim());
  if (r.mat.rows() != d || r.mat.cols() != d)
    throw std::invalid_argument("DensityOperator: matrix shape does not match register");
}

inline PureState vacuum(const ModeRegister& reg) {
  PureState s{reg, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(reg.dim()))};
  s.amp[0] = 1.0;
  return s;
}

inline PureState basis_state(const ModeRegister& reg, std::span<const int> occ) {
  PureState s{reg, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(reg.dim()))};
  s.amp[static_cast<Eigen::Index>(reg.compose(occ))] = 1.0;
  return s;
}

inline PureState basis_state(const ModeRegister& reg, std::initializer_list<int> occ) {
  return basis_state(reg, std::span<const int>(occ.begin(), occ.size()));
}

inline DensityOperator to_density(const PureState& s) {
  check_state_shape(s);
  return DensityOperator{s.reg, s.amp * s.amp.adjoint()};
}

inline cplx overlap(const PureState& a, const PureState& b) {
  if (!a.reg.same_shape(b.reg))
    throw std::invalid_argument("overlap: register mismatch");
  return a.amp.dot(b.amp);  // conjugates the left argument
}

// <psi| rho |psi>, real by Hermiticity.
inline double expectation(const DensityOperator& rho, const PureState& psi) {
  if (!rho.reg.same_shape(psi.reg))
    throw std::invalid_argument("expectation: register mismatch");
  return (psi.amp.adjoint() * rho.mat * psi.amp)(0).real();
}

// P(total photon number = n) for n = 0..M*cutoff.
inline std::vector<double> total_number_distribution(const DensityOperator& rho) {
  check_state_shape(rho);
  std::vector<double> p(static_cast<std::size_t>(rho.reg.modes() * rho.reg.cutoff) + 1, 0.0);
  for (std::size_t idx = 0; idx < rho.reg.dim(); ++idx) {
    int total = 0;
    for (int n : rho.reg.occupations(idx)) total += n;
    p[static_cast<std::size_t>(total)] += rho.mat(static_cast<Eigen::Index>(idx),
                                                  static_cast<Eigen::Index>(idx)).real();
  }
  return p;
}

inline std::vector<double> total_number_distribution(const PureState& s) {
  check_state_shape(s);
  std::vector<double> p(static_cast<std::size_t>(s.reg.modes() * s.reg.cutoff) + 1, 0.0);
  for (std::size_t idx = 0; idx < s.reg.dim(); ++idx) {
    int total = 0;
    for (int n : s.reg.occupations(idx)) total += n;
    p[static_cast<std::size_t>(total)] += std::norm(s.amp[static_cast<Eigen::Index>(idx)]);
  }
  return p;
}

struct RestrictedState {
  DensityOperator state;  // register with cutoff 1, same labels
  double weight = 0.0;    // population retained by the restriction
};

// Restriction to the subspace with at most one photon per mode, renormalized.
// The result lives on a cutoff-1 register so its basis index doubles as a
// 4-bit occupancy pattern when M = 4.
inline RestrictedState restrict_single_occupancy(const DensityOperator& rho) {
  check_state_shape(rho);
  ModeRegister sub(rho.reg.labels, 1);
  const std::size_t dim_sub = sub.dim();
  std::vector<std::size_t> embed_idx(dim_sub);
  for (std::size_t q = 0; q < dim_sub; ++q) {
    auto occ = sub.occupations(q);
    embed_idx[q] = rho.reg.compose(occ);
  }
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(dim_sub), static_cast<Eigen::Index>(dim_sub));
  for (std::size_t a = 0; a < dim_sub; ++a)
    for (std::size_t b = 0; b < dim_sub; ++b)
      m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          rho.mat(static_cast<Eigen::Index>(embed_idx[a]), static_cast<Eigen::Index>(embed_idx[b]));
  const double w = m.trace().real();
  if (w < 1e-15)
    throw std::runtime_error("restrict_single_occupancy: no population with <=1 photon per mode");
  return RestrictedState{DensityOperator{sub, m / w}, w};
}

// Occupation-preserving injection into a register with the same labels and a
// larger (or equal) cutoff.
inline PureState embed(const PureState& s, const ModeRegister& target) {
  check_state_shape(s);
  if (target.labels != s.reg.labels || target.cutoff < s.reg.cutoff)
    throw std::invalid_argument("embed: target must share labels and not reduce the cutoff");
  PureState out{target, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(target.dim()))};
  for (std::size_t idx = 0; idx < s.reg.dim(); ++idx) {
    if (s.amp[static_cast<Eigen::Index>(idx)] == cplx(0.0, 0.0)) continue;
    auto occ = s.reg.occupations(idx);
    out.amp[static_cast<Eigen::Index>(target.compose(occ))] = s.amp[static_cast<Eigen::Index>(idx)];
  }
  return out;
}

inline DensityOperator embed(const DensityOperator& rho, const ModeRegister& target) {
  check_state_shape(rho);
  if (target.labels != rho.reg.labels || target.cutoff < rho.reg.cutoff)
    throw std::invalid_argument("embed: target must share labels and not reduce the cutoff");
  const std::size_t d = rho.reg.dim();
  std::vector<std::size_t> map(d);
  for (std::size_t idx = 0; idx < d; ++idx) map[idx] = target.compose(rho.reg.occupations(idx));
  DensityOperator out{target,
                      Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(target.dim()),
                                             static_cast<Eigen::Index>(target.dim()))};
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      out.mat(static_cast<Eigen::Index>(map[a]), static_cast<Eigen::Index>(map[b])) =
          rho.mat(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  return out;
}

// Same amplitudes under new mode names (e.g. atomic -> photonic relabeling).
inline DensityOperator with_labels(const DensityOperator& rho, std::vector<std::string> labels) {
  check_state_shape(rho);
  if (static_cast<int>(labels.size()) != rho.reg.modes())
    throw std::invalid_argument("with_labels: label count mismatch");
  return DensityOperator{ModeRegister(std::move(labels), rho.reg.cutoff), rho.mat};
}

}  // namespace quadwit
