#pragma once
// Completely positive trace-preserving maps and measurement primitives on
// truncated Fock states: photon loss, weak background injection, partial
// trace, click conditioning with non-resolving detectors, and uniform
// off-diagonal (visibility) scaling.

#include "quadwit/circuits.hpp"

#include <functional>

namespace quadwit {

namespace detail {

// out += sum_j K_j rho K_j† for Kraus operators acting on a single mode,
// each given as an amplitude map occupation n -> (n', coefficient).
using ModeKrausEntry = std::function<void(int n, int& n_out, double& coef)>;

inline DensityOperator apply_mode_kraus(const DensityOperator& rho, int mode,
                                        const std::vector<ModeKrausEntry>& kraus_ops) {
  const auto dim = static_cast<Eigen::Index>(rho.reg.dim());
  const std::size_t stride = rho.reg.stride(mode);
  const int dpm = rho.reg.dim_per_mode();
  DensityOperator out{rho.reg, Eigen::MatrixXcd::Zero(dim, dim)};
  Eigen::VectorXcd tmp(dim);
  Eigen::MatrixXcd c(dim, dim);
  for (const auto& k : kraus_ops) {
    auto apply_vec = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& res) {
      res.setZero(dim);
      for (Eigen::Index idx = 0; idx < dim; ++idx) {
        const cplx a = in[idx];
        if (a == cplx(0.0, 0.0)) continue;
        const int n = static_cast<int>((static_cast<std::size_t>(idx) / stride) %
                                       static_cast<std::size_t>(dpm));
        int n_out = -1;
        double coef = 0.0;
        k(n, n_out, coef);
        if (n_out < 0 || coef == 0.0) continue;
        const auto jdx = static_cast<Eigen::Index>(
            static_cast<std::size_t>(idx) + (static_cast<std::size_t>(n_out) -
                                             static_cast<std::size_t>(n)) * stride);
        res[jdx] += coef * a;
      }
    };
    for (Eigen::Index j = 0; j < dim; ++j) {
      tmp = rho.mat.col(j);
      Eigen::VectorXcd r;
      apply_vec(tmp, r);
      c.col(j) = r;
    }
    Eigen::MatrixXcd d = c.adjoint();
    for (Eigen::Index j = 0; j < dim; ++j) {
      tmp = d.col(j);
      Eigen::VectorXcd r;
      apply_vec(tmp, r);
      c.col(j) = r;
    }
    out.mat += c.adjoint();
  }
  return out;
}

}  // namespace detail

// Photon loss with retention probability eta: beamsplitter coupling to a
// traced-out ancilla, i.e. Kraus K_j |n> = sqrt(C(n,j) eta^{n-j} (1-eta)^j) |n-j>.
inline DensityOperator apply_loss(const DensityOperator& rho, const std::string& mode,
                                  double eta) {
  check_state_shape(rho);
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("apply_loss: eta outside [0,1]");
  const int m = rho.reg.index_of(mode);
  std::vector<detail::ModeKrausEntry> kraus;
  for (int j = 0; j <= rho.reg.cutoff; ++j) {
    kraus.push_back([j, eta](int n, int& n_out, double& coef) {
      if (j > n) { n_out = -1; coef = 0.0; return; }
      n_out = n - j;
      coef = std::sqrt(detail::binomial(n, j) * std::pow(eta, n - j) * std::pow(1.0 - eta, j));
    });
  }
  return detail::apply_mode_kraus(rho, m, kraus);
}

// Weak uncorrelated background: with probability nu one extra photon is
// injected into the mode (amplitudes raised with saturation at the cutoff,
// so the map stays exactly trace preserving):
//   rho -> (1-nu) rho + nu S rho S†,  S = sum_{n<cutoff} |n+1><n| + |c><c|.
// Terms beyond one extra photon are dropped at order nu^2, consistent with
// nu << 1 calibrations.
inline DensityOperator inject_background(const DensityOperator& rho, const std::string& mode,
                                         double nu) {
  check_state_shape(rho);
  if (nu < 0.0) throw std::invalid_argument("inject_background: nu must be >= 0");
  if (nu == 0.0) return rho;
  const int m = rho.reg.index_of(mode);
  const int cutoff = rho.reg.cutoff;
  std::vector<detail::ModeKrausEntry> kraus;
  kraus.push_back([nu](int n, int& n_out, double& coef) {
    n_out = n;
    coef = std::sqrt(1.0 - nu);
  });
  kraus.push_back([nu, cutoff](int n, int& n_out, double& coef) {
    n_out = std::min(n + 1, cutoff);
    coef = std::sqrt(nu);
  });
  return detail::apply_mode_kraus(rho, m, kraus);
}

inline DensityOperator partial_trace(const DensityOperator& rho,
                                     const std::vector<std::string>& keep) {
  check_state_shape(rho);
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be nonempty");
  std::vector<int> keep_modes;
  for (const auto& label : keep) keep_modes.push_back(rho.reg.index_of(label));
  std::vector<int> traced_modes;
  for (int m = 0; m < rho.reg.modes(); ++m)
    if (std::find(keep_modes.begin(), keep_modes.end(), m) == keep_modes.end())
      traced_modes.push_back(m);

  ModeRegister out_reg(keep, rho.reg.cutoff);
  const std::size_t dim_keep = out_reg.dim();
  const int dpm = rho.reg.dim_per_mode();

  // Offsets of every kept / traced sub-configuration in the full index.
  std::vector<std::size_t> keep_offsets(dim_keep, 0);
  for (std::size_t q = 0; q < dim_keep; ++q) {
    std::size_t rest = q, off = 0;
    for (int i = static_cast<int>(keep_modes.size()) - 1; i >= 0; --i) {
      off += (rest % static_cast<std::size_t>(dpm)) * rho.reg.stride(keep_modes[static_cast<std::size_t>(i)]);
      rest /= static_cast<std::size_t>(dpm);
    }
    keep_offsets[q] = off;
  }
  std::size_t dim_traced = 1;
  for (std::size_t i = 0; i < traced_modes.size(); ++i) dim_traced *= static_cast<std::size_t>(dpm);
  std::vector<std::size_t> traced_offsets(dim_traced, 0);
  for (std::size_t q = 0; q < dim_traced; ++q) {
    std::size_t rest = q, off = 0;
    for (int i = static_cast<int>(traced_modes.size()) - 1; i >= 0; --i) {
      off += (rest % static_cast<std::size_t>(dpm)) * rho.reg.stride(traced_modes[static_cast<std::size_t>(i)]);
      rest /= static_cast<std::size_t>(dpm);
    }
    traced_offsets[q] = off;
  }

  DensityOperator out{out_reg, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim_keep),
                                                      static_cast<Eigen::Index>(dim_keep))};
  for (std::size_t a = 0; a < dim_keep; ++a)
    for (std::size_t b = 0; b < dim_keep; ++b) {
      cplx sum(0.0, 0.0);
      for (std::size_t t = 0; t < dim_traced; ++t)
        sum += rho.mat(static_cast<Eigen::Index>(keep_offsets[a] + traced_offsets[t]),
                       static_cast<Eigen::Index>(keep_offsets[b] + traced_offsets[t]));
      out.mat(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = sum;
    }
  return out;
}

enum class ClickOutcome { click, no_click };

struct ConditionResult {
  DensityOperator state;  // normalized, detected mode traced out
  double probability = 0.0;
};

// Non-resolving on/off detection on one mode: click POVM element I - |0><0|.
inline ConditionResult condition_on_click(const DensityOperator& rho, const std::string& mode,
                                          ClickOutcome outcome) {
  check_state_shape(rho);
  const int m = rho.reg.index_of(mode);
  DensityOperator projected = rho;
  const std::size_t dim = rho.reg.dim();
  for (std::size_t idx = 0; idx < dim; ++idx) {
    const bool occupied = rho.reg.occupation(idx, m) > 0;
    const bool keep_row = (outcome == ClickOutcome::click) ? occupied : !occupied;
    if (!keep_row) {
      projected.mat.row(static_cast<Eigen::Index>(idx)).setZero();
      projected.mat.col(static_cast<Eigen::Index>(idx)).setZero();
    }
  }
  std::vector<std::string> keep;
  for (int i = 0; i < rho.reg.modes(); ++i)
    if (i != m) keep.push_back(rho.reg.labels[static_cast<std::size_t>(i)]);
  DensityOperator reduced = partial_trace(projected, keep);
  const double p = reduced.trace();
  if (p < 1e-15)
    throw std::runtime_error("condition_on_click: conditioning on a null event");
  reduced.mat /= p;
  return ConditionResult{std::move(reduced), p};
}

// Pure-state fast path: condition on a click (with detector efficiency eta)
// on one mode and return the normalized reduced state over `keep`; all modes
// outside `keep` are traced out.  The click weight for a component with n
// photons in the detected mode is 1 - (1-eta)^n.
inline ConditionResult condition_on_click(const PureState& psi, const std::string& click_mode,
                                          const std::vector<std::string>& keep,
                                          double detector_eta = 1.0) {
  check_state_shape(psi);
  if (detector_eta < 0.0 || detector_eta > 1.0)
    throw std::invalid_argument("condition_on_click: detector efficiency outside [0,1]");
  const int mc = psi.reg.index_of(click_mode);
  std::vector<int> keep_modes;
  for (const auto& label : keep) {
    const int km = psi.reg.index_of(label);
    if (km == mc) throw std::invalid_argument("condition_on_click: cannot keep the detected mode");
    keep_modes.push_back(km);
  }
  std::vector<int> rest_modes;
  for (int m = 0; m < psi.reg.modes(); ++m)
    if (std::find(keep_modes.begin(), keep_modes.end(), m) == keep_modes.end())
      rest_modes.push_back(m);

  ModeRegister out_reg(keep, psi.reg.cutoff);
  const std::size_t dim_keep = out_reg.dim();
  const int dpm = psi.reg.dim_per_mode();

  std::vector<std::size_t> keep_offsets(dim_keep, 0);
  for (std::size_t q = 0; q < dim_keep; ++q) {
    std::size_t rest = q, off = 0;
    for (int i = static_cast<int>(keep_modes.size()) - 1; i >= 0; --i) {
      off += (rest % static_cast<std::size_t>(dpm)) * psi.reg.stride(keep_modes[static_cast<std::size_t>(i)]);
      rest /= static_cast<std::size_t>(dpm);
    }
    keep_offsets[q] = off;
  }
  std::size_t dim_rest = 1;
  for (std::size_t i = 0; i < rest_modes.size(); ++i) dim_rest *= static_cast<std::size_t>(dpm);
  std::vector<std::size_t> rest_offsets(dim_rest, 0);
  std::vector<double> click_weight(dim_rest, 0.0);
  for (std::size_t q = 0; q < dim_rest; ++q) {
    std::size_t rest = q, off = 0;
    int n_click = 0;
    for (int i = static_cast<int>(rest_modes.size()) - 1; i >= 0; --i) {
      const int occ = static_cast<int>(rest % static_cast<std::size_t>(dpm));
      const int mode = rest_modes[static_cast<std::size_t>(i)];
      off += static_cast<std::size_t>(occ) * psi.reg.stride(mode);
      if (mode == mc) n_click = occ;
      rest /= static_cast<std::size_t>(dpm);
    }
    rest_offsets[q] = off;
    click_weight[q] = 1.0 - std::pow(1.0 - detector_eta, n_click);
  }

  DensityOperator rho{out_reg, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim_keep),
                                                      static_cast<Eigen::Index>(dim_keep))};
  Eigen::VectorXcd column(static_cast<Eigen::Index>(dim_keep));
  for (std::size_t t = 0; t < dim_rest; ++t) {
    if (click_weight[t] == 0.0) continue;
    for (std::size_t a = 0; a < dim_keep; ++a)
      column[static_cast<Eigen::Index>(a)] =
          psi.amp[static_cast<Eigen::Index>(keep_offsets[a] + rest_offsets[t])];
    rho.mat.noalias() += click_weight[t] * (column * column.adjoint());
  }
  const double p = rho.trace();
  if (p < 1e-15)
    throw std::runtime_error("condition_on_click: conditioning on a null event");
  rho.mat /= p;
  return ConditionResult{std::move(rho), p};
}

// Uniform scaling of all Fock-basis off-diagonal elements by factor v; the
// convex combination of rho with its dephased diagonal, hence CPTP for
// v in [0,1].  Models a static inter-mode visibility imperfection.
inline DensityOperator scale_off_diagonals(const DensityOperator& rho, double v) {
  check_state_shape(rho);
  if (v < 0.0 || v > 1.0)
    throw std::invalid_argument("scale_off_diagonals: factor outside [0,1]");
  DensityOperator out = rho;
  const auto dim = static_cast<Eigen::Index>(rho.reg.dim());
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      if (i != j) out.mat(i, j) *= v;
  return out;
}

}  // namespace quadwit
