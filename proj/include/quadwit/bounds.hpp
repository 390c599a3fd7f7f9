#pragma once
// Minimal-uncertainty boundaries Delta_b^(k)(y_c) for states containing at
// most k-mode entanglement, and certification of measured points against
// them.
//
// The optimization runs in the <=1-photon-per-mode space: candidates are
// mixtures (rank R) of block-product pure states, each component drawn over
// a partition with blocks of size <= k.  A multi-start Adam descent with
// analytic gradients minimizes Delta subject to the feasibility window
// |y_c - target| <= tol_yc, enforced by a hinge penalty on the window
// boundary; since Delta_b falls with y_c, the minimum typically sits at the
// upper edge of the window.  Results are upper bounds on the constrained
// minima; downward min-merging across k preserves that property while
// enforcing the class nesting Delta_b^(3) <= Delta_b^(2) <= Delta_b^(1).

#include "quadwit/witness.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

namespace quadwit {

// ---------------------------------------------------------------------------
// Deterministic RNG (stream-stable across platforms, unlike <random>
// distributions).

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                              std::uint64_t c) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  return h;
}

// ---------------------------------------------------------------------------
// Partitions.

using Partition = std::vector<std::vector<int>>;

// All set partitions of {0..n-1} with every block of size <= k.
inline std::vector<Partition> enumerate_partitions(int n, int k) {
  if (n < 1 || k < 1 || k > n)
    throw std::invalid_argument("enumerate_partitions: need 1 <= k <= n");
  std::vector<Partition> out;
  Partition current;
  auto place = [&](auto&& self, int element) -> void {
    if (element == n) {
      out.push_back(current);
      return;
    }
    // Index-based: the recursive call appends/removes blocks on `current`,
    // which would invalidate range-for iterators.
    for (std::size_t b = 0; b < current.size(); ++b) {
      if (static_cast<int>(current[b].size()) < k) {
        current[b].push_back(element);
        self(self, element + 1);
        current[b].pop_back();
      }
    }
    current.push_back({element});
    self(self, element + 1);
    current.pop_back();
  };
  place(place, 0);
  return out;
}

inline std::string partition_to_string(const Partition& p) {
  std::string s;
  for (const auto& block : p) {
    s += '[';
    for (int m : block) s += static_cast<char>('a' + m);
    s += ']';
  }
  return s;
}

// ---------------------------------------------------------------------------
// Optimizer options and results.

struct BoundOptions {
  int restarts = 64;
  int components = 8;        // mixture rank R
  int steps_per_stage = 300;
  int polish_steps = 300;
  std::array<double, 4> penalty_schedule{10.0, 100.0, 1e3, 1e4};
  double polish_penalty = 1e5;
  double learning_rate = 0.03;
  double polish_learning_rate = 0.01;
  double tol_yc = 2e-3;      // feasibility window around the target
  double tol_agree = 1e-3;   // restart agreement tolerance
  std::uint64_t seed = 1;
  std::uint64_t grid_index = 0;  // folded into per-restart seeds
};

struct BoundResult {
  double delta_b = 0.0;
  double yc_achieved = 0.0;
  int feasible_restarts = 0;
  int agree = 0;             // restarts within tol_agree of the best value
  std::string description;   // mixture structure of the argmin
  // Argmin mixture, reusable as a warm-start candidate for a larger k.
  std::vector<Partition> mixture_partitions;  // one per component
  std::vector<double> mixture_params;         // layout order of make_layout
};

struct BoundSample {
  double yc = 0.0;
  double delta_b = 0.0;
  int restarts = 0;
  int agree = 0;
  std::uint64_t seed = 0;
  int steps = 0;
  int rank = 0;
  double tol_yc = 0.0;
};

struct BoundCurve {
  int k = 1;
  std::vector<BoundSample> samples;  // sorted by yc
};

namespace detail {

// One mixture component: a pure product state over the blocks of `partition`,
// parametrized by unnormalized complex amplitudes per block.
struct ComponentLayout {
  Partition partition;
  std::vector<int> block_dims;                  // 2^{block size}
  std::vector<int> block_offsets;               // real-parameter offsets
  std::vector<std::vector<int>> sub_index;      // [block][full index] -> block index
};

struct CandidateLayout {
  int n_modes = 0;
  int dim = 0;                       // 2^n
  std::vector<ComponentLayout> components;
  std::vector<int> theta_offsets;    // mixture logits
  int n_params = 0;
  std::vector<int> single_indices;   // full indices with exactly one excitation
};

inline CandidateLayout make_layout(int n_modes, const std::vector<const Partition*>& parts) {
  CandidateLayout lay;
  lay.n_modes = n_modes;
  lay.dim = 1 << n_modes;
  int offset = 0;
  for (const Partition* p : parts) {
    ComponentLayout comp;
    comp.partition = *p;
    for (const auto& block : *p) {
      const int s = static_cast<int>(block.size());
      comp.block_dims.push_back(1 << s);
      comp.block_offsets.push_back(offset);
      offset += 2 * (1 << s);
      std::vector<int> sub(static_cast<std::size_t>(lay.dim));
      for (int n = 0; n < lay.dim; ++n) {
        int idx = 0;
        for (int i = 0; i < s; ++i) {
          const int mode = block[static_cast<std::size_t>(i)];
          const int bit = (n >> (n_modes - 1 - mode)) & 1;
          idx |= bit << (s - 1 - i);
        }
        sub[static_cast<std::size_t>(n)] = idx;
      }
      comp.sub_index.push_back(std::move(sub));
    }
    lay.components.push_back(std::move(comp));
  }
  for (std::size_t r = 0; r < parts.size(); ++r) {
    lay.theta_offsets.push_back(offset);
    offset += 1;
  }
  lay.n_params = offset;
  for (int m = 0; m < n_modes; ++m) lay.single_indices.push_back(1 << (n_modes - 1 - m));
  return lay;
}

struct EvalScratch {
  std::vector<Eigen::VectorXcd> psi;       // normalized component vectors
  std::vector<Eigen::VectorXcd> psi_raw;   // unnormalized products
  std::vector<double> norm_sq;
  std::vector<std::vector<double>> t_comp; // [component][port]
  std::vector<double> p0_comp, p1_comp, g_comp;
  std::vector<double> weights;
};

struct EvalResult {
  double objective = 0.0;
  double delta = 0.0;
  double yc = 0.0;
  double p1 = 0.0;
};

// Objective f = Delta + mu hinge(y_c)^2 + barrier(p1), where the hinge is
// zero inside |y_c - y_target| <= hinge_width and linear beyond it, with
// analytic gradient.  The gradient flows through the linear functionals
// T_i = tr(E_i rho), p0, p1 via the effective operator
// G = sum_i (df/dT_i) E_i + (df/dp0) P_0 + (df/dp1) P_1:
// for each component, d f / d psi* = (w/norm)(G - <G>) psi, chained onto the
// per-block amplitudes by contracting out the other blocks.
inline EvalResult evaluate(const CandidateLayout& lay, const PortOperators& ports,
                           const std::vector<double>& params, double mu, double y_target,
                           double hinge_width, std::vector<double>* grad, EvalScratch& ws) {
  const int R = static_cast<int>(lay.components.size());
  const int dim = lay.dim;
  const int n_ports = static_cast<int>(ports.E.size());
  constexpr double kP1Floor = 1e-9;
  constexpr double kP1Barrier = 1e-6;
  constexpr double kBarrierWeight = 1e6;

  ws.psi.assign(static_cast<std::size_t>(R), Eigen::VectorXcd());
  ws.psi_raw.assign(static_cast<std::size_t>(R), Eigen::VectorXcd());
  ws.norm_sq.assign(static_cast<std::size_t>(R), 0.0);
  ws.t_comp.assign(static_cast<std::size_t>(R), std::vector<double>(static_cast<std::size_t>(n_ports), 0.0));
  ws.p0_comp.assign(static_cast<std::size_t>(R), 0.0);
  ws.p1_comp.assign(static_cast<std::size_t>(R), 0.0);
  ws.g_comp.assign(static_cast<std::size_t>(R), 0.0);
  ws.weights.assign(static_cast<std::size_t>(R), 0.0);

  // Mixture weights: softmax of the logits.
  double theta_max = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < R; ++r)
    theta_max = std::max(theta_max, params[static_cast<std::size_t>(lay.theta_offsets[static_cast<std::size_t>(r)])]);
  double theta_sum = 0.0;
  for (int r = 0; r < R; ++r) {
    const double e = std::exp(params[static_cast<std::size_t>(lay.theta_offsets[static_cast<std::size_t>(r)])] - theta_max);
    ws.weights[static_cast<std::size_t>(r)] = e;
    theta_sum += e;
  }
  for (int r = 0; r < R; ++r) ws.weights[static_cast<std::size_t>(r)] /= theta_sum;

  std::vector<double> t_total(static_cast<std::size_t>(n_ports), 0.0);
  double p0 = 0.0, p1 = 0.0;

  std::vector<std::vector<Eigen::VectorXcd>> e_psi(static_cast<std::size_t>(R));
  for (int r = 0; r < R; ++r) {
    const auto& comp = lay.components[static_cast<std::size_t>(r)];
    // Raw product vector.
    Eigen::VectorXcd raw = Eigen::VectorXcd::Ones(dim);
    for (std::size_t b = 0; b < comp.block_dims.size(); ++b) {
      const int off = comp.block_offsets[b];
      const auto& sub = comp.sub_index[b];
      for (int n = 0; n < dim; ++n) {
        const int j = sub[static_cast<std::size_t>(n)];
        raw[n] *= cplx(params[static_cast<std::size_t>(off + 2 * j)],
                       params[static_cast<std::size_t>(off + 2 * j + 1)]);
      }
    }
    double nrm = raw.squaredNorm();
    if (nrm < 1e-30) {
      raw[0] += 1e-12;  // degenerate start; nudge off the origin
      nrm = raw.squaredNorm();
    }
    ws.psi_raw[static_cast<std::size_t>(r)] = raw;
    ws.norm_sq[static_cast<std::size_t>(r)] = nrm;
    Eigen::VectorXcd psi = raw / std::sqrt(nrm);
    ws.psi[static_cast<std::size_t>(r)] = psi;

    auto& eps = e_psi[static_cast<std::size_t>(r)];
    eps.resize(static_cast<std::size_t>(n_ports));
    const double w = ws.weights[static_cast<std::size_t>(r)];
    for (int j = 0; j < n_ports; ++j) {
      eps[static_cast<std::size_t>(j)].noalias() = ports.E[static_cast<std::size_t>(j)] * psi;
      const double t = std::real(psi.dot(eps[static_cast<std::size_t>(j)]));
      ws.t_comp[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] = t;
      t_total[static_cast<std::size_t>(j)] += w * t;
    }
    const double c0 = std::norm(psi[0]);
    double c1 = 0.0;
    for (int idx : lay.single_indices) c1 += std::norm(psi[idx]);
    ws.p0_comp[static_cast<std::size_t>(r)] = c0;
    ws.p1_comp[static_cast<std::size_t>(r)] = c1;
    p0 += w * c0;
    p1 += w * c1;
  }

  double s_total = 0.0;
  for (double t : t_total) s_total += t;
  s_total = std::max(s_total, 1e-15);
  double sum_sq = 0.0;
  for (double t : t_total) sum_sq += (t / s_total) * (t / s_total);
  const double delta_value = 1.0 - sum_sq;

  const double p_ge2 = std::max(0.0, 1.0 - p0 - p1);
  const double p1s = std::max(p1, kP1Floor);
  const double yc_value = (8.0 / 3.0) * p_ge2 * p0 / (p1s * p1s);

  double barrier = 0.0, dbarrier_dp1 = 0.0;
  if (p1 < kP1Barrier) {
    const double gap = kP1Barrier - p1;
    barrier = kBarrierWeight * gap * gap;
    dbarrier_dp1 = -2.0 * kBarrierWeight * gap;
  }

  const double ydev = yc_value - y_target;
  const double excess = std::max(0.0, std::abs(ydev) - hinge_width);
  EvalResult res;
  res.delta = delta_value;
  res.yc = yc_value;
  res.p1 = p1;
  res.objective = delta_value + mu * excess * excess + barrier;

  if (grad == nullptr) return res;
  grad->assign(static_cast<std::size_t>(lay.n_params), 0.0);

  // Scalar partials.
  std::vector<double> d_dt(static_cast<std::size_t>(n_ports));
  for (int j = 0; j < n_ports; ++j) {
    const double pj = t_total[static_cast<std::size_t>(j)] / s_total;
    d_dt[static_cast<std::size_t>(j)] = (-2.0 * pj + 2.0 * sum_sq) / s_total;
  }
  const double df_dy = 2.0 * mu * excess * (ydev >= 0.0 ? 1.0 : -1.0);
  // y = (8/3)(1 - p0 - p1) p0 / p1s^2
  const double dy_dp0 = (8.0 / 3.0) * (1.0 - 2.0 * p0 - p1) / (p1s * p1s);
  double dy_dp1 = -(8.0 / 3.0) * p0 / (p1s * p1s);
  if (p1 > kP1Floor) dy_dp1 += -(16.0 / 3.0) * p_ge2 * p0 / (p1s * p1s * p1s);
  const double c_p0 = df_dy * dy_dp0;
  const double c_p1 = df_dy * dy_dp1 + dbarrier_dp1;

  double g_mean = 0.0;
  for (int r = 0; r < R; ++r) {
    const auto& psi = ws.psi[static_cast<std::size_t>(r)];
    Eigen::VectorXcd g_psi = Eigen::VectorXcd::Zero(dim);
    for (int j = 0; j < n_ports; ++j)
      g_psi.noalias() += d_dt[static_cast<std::size_t>(j)] * e_psi[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
    g_psi[0] += c_p0 * psi[0];
    for (int idx : lay.single_indices) g_psi[idx] += c_p1 * psi[idx];

    const double g_exp = std::real(psi.dot(g_psi));
    ws.g_comp[static_cast<std::size_t>(r)] = g_exp;
    g_mean += ws.weights[static_cast<std::size_t>(r)] * g_exp;

    // d f / d psi_raw* for this component.
    const double w = ws.weights[static_cast<std::size_t>(r)];
    const double inv_sqrt_n = 1.0 / std::sqrt(ws.norm_sq[static_cast<std::size_t>(r)]);
    Eigen::VectorXcd gvec = (w * inv_sqrt_n) * (g_psi - g_exp * psi);

    // Chain onto block amplitudes: contract out the other blocks.
    const auto& comp = lay.components[static_cast<std::size_t>(r)];
    const std::size_t n_blocks = comp.block_dims.size();
    for (std::size_t b = 0; b < n_blocks; ++b) {
      // Cofactor: product of the other blocks' amplitudes at each full index.
      Eigen::VectorXcd cof = Eigen::VectorXcd::Ones(dim);
      for (std::size_t b2 = 0; b2 < n_blocks; ++b2) {
        if (b2 == b) continue;
        const int off2 = comp.block_offsets[b2];
        const auto& sub2 = comp.sub_index[b2];
        for (int n = 0; n < dim; ++n) {
          const int j = sub2[static_cast<std::size_t>(n)];
          cof[n] *= cplx(params[static_cast<std::size_t>(off2 + 2 * j)],
                         params[static_cast<std::size_t>(off2 + 2 * j + 1)]);
        }
      }
      const int off = comp.block_offsets[b];
      const auto& sub = comp.sub_index[b];
      for (int n = 0; n < dim; ++n) {
        const cplx contrib = gvec[n] * std::conj(cof[n]);
        const int j = sub[static_cast<std::size_t>(n)];
        // d/d(re), d/d(im) from the Wirtinger derivative.
        (*grad)[static_cast<std::size_t>(off + 2 * j)] += 2.0 * contrib.real();
        (*grad)[static_cast<std::size_t>(off + 2 * j + 1)] += 2.0 * contrib.imag();
      }
    }
  }
  for (int r = 0; r < R; ++r)
    (*grad)[static_cast<std::size_t>(lay.theta_offsets[static_cast<std::size_t>(r)])] =
        ws.weights[static_cast<std::size_t>(r)] * (ws.g_comp[static_cast<std::size_t>(r)] - g_mean);
  return res;
}

// Renormalizes every block amplitude vector to unit norm (state-preserving).
inline void renormalize_blocks(const CandidateLayout& lay, std::vector<double>& params) {
  for (const auto& comp : lay.components)
    for (std::size_t b = 0; b < comp.block_dims.size(); ++b) {
      const int off = comp.block_offsets[b];
      const int bd = comp.block_dims[b];
      double nrm = 0.0;
      for (int j = 0; j < 2 * bd; ++j) {
        const double v = params[static_cast<std::size_t>(off + j)];
        nrm += v * v;
      }
      nrm = std::sqrt(nrm);
      if (nrm < 1e-15) {
        params[static_cast<std::size_t>(off)] = 1.0;
        continue;
      }
      for (int j = 0; j < 2 * bd; ++j) params[static_cast<std::size_t>(off + j)] /= nrm;
    }
}

struct AdamState {
  std::vector<double> m, v;
  int t = 0;
  void reset(std::size_t n) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
    t = 0;
  }
  void step(std::vector<double>& params, const std::vector<double>& grad, double lr) {
    ++t;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double c1 = 1.0 - std::pow(b1, t), c2 = 1.0 - std::pow(b2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
      v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
      params[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  }
};

// Structured initial guesses near the known-good basins for four modes;
// components beyond these start random.
inline void seed_structured_component(const CandidateLayout& lay, int r, int k, double y_target,
                                      std::vector<double>& params, Rng& rng) {
  const auto& comp = lay.components[static_cast<std::size_t>(r)];
  const double noise = 0.05;
  auto set_block = [&](std::size_t b, const std::vector<cplx>& amps) {
    const int off = comp.block_offsets[b];
    for (std::size_t j = 0; j < amps.size(); ++j) {
      params[static_cast<std::size_t>(off) + 2 * j] = amps[j].real() + noise * rng.normal();
      params[static_cast<std::size_t>(off) + 2 * j + 1] = amps[j].imag() + noise * rng.normal();
    }
  };
  const double yt = std::max(y_target, 1e-4);
  if (k == 1 && comp.block_dims.size() == 4) {
    // One strongly excited mode, three weak ones: y ~ 8 eps^2 at q_strong = 1/2.
    const double eps = std::sqrt(yt / 8.0);
    set_block(0, {cplx(1, 0), cplx(1, 0)});
    for (std::size_t b = 1; b < 4; ++b) set_block(b, {cplx(1, 0), cplx(eps, 0)});
    return;
  }
  if (comp.block_dims.size() == 2 && comp.block_dims[0] == 8) {
    // Trio + singleton: vacuum-diluted three-mode W against a weak spectator.
    const double a = std::min(0.5, std::sqrt(3.0 * yt / 8.0));
    const double alpha = std::sqrt(a);
    const double beta = std::sqrt(1.0 - a) / std::sqrt(3.0);
    set_block(0, {cplx(alpha, 0), cplx(beta, 0), cplx(beta, 0), cplx(0, 0), cplx(beta, 0),
                  cplx(0, 0), cplx(0, 0), cplx(0, 0)});
    set_block(1, {cplx(1, 0), cplx(std::sqrt(a), 0)});
    return;
  }
  if (comp.block_dims.size() == 2 && comp.block_dims[0] == 4) {
    // Pair + pair: shared excitations within each pair.
    const double a = std::min(0.5, std::sqrt(yt / 2.0));
    const double alpha = std::sqrt(a);
    const double beta = std::sqrt(1.0 - a) / std::sqrt(2.0);
    for (std::size_t b = 0; b < 2; ++b)
      set_block(b, {cplx(alpha, 0), cplx(beta, 0), cplx(beta, 0), cplx(0, 0)});
    return;
  }
  // Fallback: random.
  for (std::size_t b = 0; b < comp.block_dims.size(); ++b) {
    const int off = comp.block_offsets[b];
    for (int j = 0; j < 2 * comp.block_dims[b]; ++j)
      params[static_cast<std::size_t>(off + j)] = rng.normal();
  }
}

}  // namespace detail

// Minimizes Delta over mixtures of k-block-producible product states at
// fixed y_c.  Deterministic for fixed options (seed, grid_index fold into
// every restart's stream).  Throws if no restart lands inside the y_c
// feasibility window.  A warm-start mixture (from a smaller k, say) is
// evaluated as one extra candidate; it consumes no randomness, so the
// restart streams are identical with and without it.
inline BoundResult min_delta_at_yc(int k, double yc_target, const BoundOptions& opt,
                                   const PortOperators& ports,
                                   const BoundResult* warm = nullptr) {
  const int n_modes = ports.sub.modes();
  if (k < 1 || k > n_modes) throw std::invalid_argument("min_delta_at_yc: need 1 <= k <= modes");
  if (yc_target < 0.0) throw std::invalid_argument("min_delta_at_yc: yc_target must be >= 0");
  const auto partitions = enumerate_partitions(n_modes, k);

  BoundResult best;
  best.delta_b = std::numeric_limits<double>::infinity();
  std::vector<double> feasible_values;

  if (warm != nullptr && !warm->mixture_partitions.empty()) {
    for (const auto& part : warm->mixture_partitions)
      for (const auto& block : part)
        if (static_cast<int>(block.size()) > k)
          throw std::invalid_argument("min_delta_at_yc: warm start violates the block limit");
    std::vector<const Partition*> parts;
    parts.reserve(warm->mixture_partitions.size());
    for (const auto& part : warm->mixture_partitions) parts.push_back(&part);
    const auto lay = detail::make_layout(n_modes, parts);
    if (lay.n_params != static_cast<int>(warm->mixture_params.size()))
      throw std::invalid_argument("min_delta_at_yc: warm start parameter size mismatch");
    detail::EvalScratch ws;
    const auto ev = detail::evaluate(lay, ports, warm->mixture_params, 0.0, yc_target,
                                     0.9 * opt.tol_yc, nullptr, ws);
    if (std::abs(ev.yc - yc_target) <= opt.tol_yc) {
      feasible_values.push_back(ev.delta);
      best.delta_b = ev.delta;
      best.yc_achieved = ev.yc;
      std::ostringstream desc;
      desc.precision(3);
      for (std::size_t r = 0; r < lay.components.size(); ++r) {
        if (r) desc << " ";
        desc << "w=" << ws.weights[r] << partition_to_string(lay.components[r].partition);
      }
      best.description = desc.str();
      best.mixture_partitions = warm->mixture_partitions;
      best.mixture_params = warm->mixture_params;
    }
  }

  for (int restart = 0; restart < opt.restarts; ++restart) {
    Rng rng(mix_seed(opt.seed, static_cast<std::uint64_t>(k), opt.grid_index,
                     static_cast<std::uint64_t>(restart)));

    // Assemble components: sampled partitions, random amplitudes.
    std::vector<const Partition*> parts;
    for (int r = 0; r < opt.components; ++r)
      parts.push_back(&partitions[static_cast<std::size_t>(rng.next() % partitions.size())]);
    const auto lay = detail::make_layout(n_modes, parts);

    std::vector<double> params(static_cast<std::size_t>(lay.n_params));
    for (auto& p : params) p = rng.normal();
    for (int r = 0; r < opt.components; ++r)
      params[static_cast<std::size_t>(lay.theta_offsets[static_cast<std::size_t>(r)])] = 0.0;
    if (n_modes == 4) {
      const int n_struct = std::min(opt.components, 3);
      for (int r = 0; r < n_struct; ++r)
        detail::seed_structured_component(lay, r, k, yc_target, params, rng);
    }
    detail::renormalize_blocks(lay, params);

    // Hinge slightly inside the feasibility window so the penalty/descent
    // equilibrium cannot drift past the acceptance filter below.
    const double hinge_width = 0.9 * opt.tol_yc;
    detail::EvalScratch ws;
    detail::AdamState adam;
    std::vector<double> grad;
    auto run_stage = [&](double mu, int steps, double lr) {
      adam.reset(params.size());
      for (int s = 0; s < steps; ++s) {
        detail::evaluate(lay, ports, params, mu, yc_target, hinge_width, &grad, ws);
        adam.step(params, grad, lr);
      }
      detail::renormalize_blocks(lay, params);
    };
    for (double mu : opt.penalty_schedule) run_stage(mu, opt.steps_per_stage, opt.learning_rate);
    run_stage(opt.polish_penalty, opt.polish_steps, opt.polish_learning_rate);

    const auto final_eval =
        detail::evaluate(lay, ports, params, 0.0, yc_target, hinge_width, nullptr, ws);
    if (std::abs(final_eval.yc - yc_target) > opt.tol_yc) continue;
    feasible_values.push_back(final_eval.delta);
    if (final_eval.delta < best.delta_b) {
      best.delta_b = final_eval.delta;
      best.yc_achieved = final_eval.yc;
      std::ostringstream desc;
      desc.precision(3);
      for (int r = 0; r < opt.components; ++r) {
        if (r) desc << " ";
        desc << "w=" << ws.weights[static_cast<std::size_t>(r)]
             << partition_to_string(lay.components[static_cast<std::size_t>(r)].partition);
      }
      best.description = desc.str();
      best.mixture_partitions.clear();
      for (const auto& comp : lay.components) best.mixture_partitions.push_back(comp.partition);
      best.mixture_params = params;
    }
  }

  if (feasible_values.empty())
    throw std::runtime_error("min_delta_at_yc: no restart reached the y_c target within tolerance");
  best.feasible_restarts = static_cast<int>(feasible_values.size());
  for (double v : feasible_values)
    if (v <= best.delta_b + opt.tol_agree) ++best.agree;
  return best;
}

inline BoundCurve bound_curve(int k, std::span<const double> yc_grid, const BoundOptions& opt,
                              const PortOperators& ports) {
  if (yc_grid.empty()) throw std::invalid_argument("bound_curve: empty grid");
  for (std::size_t i = 1; i < yc_grid.size(); ++i)
    if (yc_grid[i] <= yc_grid[i - 1])
      throw std::invalid_argument("bound_curve: grid must be strictly increasing");
  BoundCurve curve;
  curve.k = k;
  BoundOptions local = opt;
  const int total_steps =
      static_cast<int>(opt.penalty_schedule.size()) * opt.steps_per_stage + opt.polish_steps;
  for (std::size_t i = 0; i < yc_grid.size(); ++i) {
    local.grid_index = static_cast<std::uint64_t>(i + 1);
    const auto res = min_delta_at_yc(k, yc_grid[i], local, ports);
    BoundSample s;
    s.yc = yc_grid[i];
    s.delta_b = res.delta_b;
    s.restarts = local.restarts;
    s.agree = res.agree;
    s.seed = local.seed;
    s.steps = total_steps;
    s.rank = local.components;
    s.tol_yc = local.tol_yc;
    curve.samples.push_back(s);
  }
  return curve;
}

// Computes the boundary curves for k = 1..k_max on one grid with cascaded
// warm starts: each grid point's winning mixture is handed to the next k as
// an extra candidate.  Every smaller-k mixture belongs to the larger-k
// family, so the raw curves returned here are pointwise nested by
// construction, and no value can exceed an independent bound_curve run.
inline std::vector<BoundCurve> bound_curve_family(int k_max, std::span<const double> yc_grid,
                                                  const BoundOptions& opt,
                                                  const PortOperators& ports) {
  if (yc_grid.empty()) throw std::invalid_argument("bound_curve_family: empty grid");
  for (std::size_t i = 1; i < yc_grid.size(); ++i)
    if (yc_grid[i] <= yc_grid[i - 1])
      throw std::invalid_argument("bound_curve_family: grid must be strictly increasing");
  if (k_max < 1 || k_max > ports.sub.modes())
    throw std::invalid_argument("bound_curve_family: need 1 <= k_max <= modes");

  std::vector<BoundCurve> out;
  std::vector<BoundResult> prev(yc_grid.size());
  BoundOptions local = opt;
  const int total_steps =
      static_cast<int>(opt.penalty_schedule.size()) * opt.steps_per_stage + opt.polish_steps;
  for (int k = 1; k <= k_max; ++k) {
    BoundCurve curve;
    curve.k = k;
    for (std::size_t i = 0; i < yc_grid.size(); ++i) {
      local.grid_index = static_cast<std::uint64_t>(i + 1);
      const BoundResult* warm = k > 1 ? &prev[i] : nullptr;
      BoundResult res = min_delta_at_yc(k, yc_grid[i], local, ports, warm);
      BoundSample s;
      s.yc = yc_grid[i];
      s.delta_b = res.delta_b;
      s.restarts = local.restarts;
      s.agree = res.agree;
      s.seed = local.seed;
      s.steps = total_steps;
      s.rank = local.components;
      s.tol_yc = local.tol_yc;
      curve.samples.push_back(s);
      prev[i] = std::move(res);
    }
    out.push_back(std::move(curve));
  }
  return out;
}

// Enforces the class nesting on shared grids: a k-producible minimum is also
// achievable at k+1, so each larger-k curve is clamped from above by every
// smaller-k curve.  The merged values remain achieved by explicit states.
inline void merge_nesting(std::vector<BoundCurve>& curves) {
  std::sort(curves.begin(), curves.end(),
            [](const BoundCurve& a, const BoundCurve& b) { return a.k < b.k; });
  for (std::size_t i = 1; i < curves.size(); ++i) {
    if (curves[i].samples.size() != curves[i - 1].samples.size()) continue;
    for (std::size_t j = 0; j < curves[i].samples.size(); ++j) {
      if (std::abs(curves[i].samples[j].yc - curves[i - 1].samples[j].yc) > 1e-12) continue;
      curves[i].samples[j].delta_b =
          std::min(curves[i].samples[j].delta_b, curves[i - 1].samples[j].delta_b);
    }
  }
}

// ---------------------------------------------------------------------------
// Interpolation and certification.

struct BoundEvaluation {
  double value = 0.0;
  double slope = 0.0;
};

inline BoundEvaluation interpolate_bound(const BoundCurve& curve, double yc) {
  if (curve.samples.empty()) throw std::invalid_argument("interpolate_bound: empty curve");
  const auto& s = curve.samples;
  if (yc < s.front().yc - 1e-12 || yc > s.back().yc + 1e-12)
    throw std::out_of_range("interpolate_bound: y_c outside curve range");
  if (s.size() == 1) return {s.front().delta_b, 0.0};
  std::size_t hi = 1;
  while (hi + 1 < s.size() && s[hi].yc < yc) ++hi;
  const auto& a = s[hi - 1];
  const auto& b = s[hi];
  const double slope = (b.delta_b - a.delta_b) / (b.yc - a.yc);
  const double x = std::clamp(yc, a.yc, b.yc);
  return {a.delta_b + slope * (x - a.yc), slope};
}

struct Certification {
  WitnessPoint point;
  int order = 1;  // 4 = quadripartite ... 1 = no entanglement certified
  std::string order_label;
  std::array<double, 3> margins{};  // [k-1]: signed s.d. distance below curve k
};

inline const char* entanglement_order_label(int order) {
  switch (order) {
    case 4: return "4-partite";
    case 3: return "3-partite";
    case 2: return "2-partite";
    default: return "separable-consistent";
  }
}

// A point below Delta_b^(k) is incompatible with every state containing at
// most k-mode entanglement, so it certifies (k+1)-partite entanglement; the
// strongest (largest) violated k determines the order.
inline Certification certify(const WitnessPoint& point, const std::vector<BoundCurve>& curves) {
  Certification cert;
  cert.point = point;
  cert.order = 1;
  for (const auto& curve : curves) {
    if (curve.k < 1 || curve.k > 3) continue;
    const auto eval = interpolate_bound(curve, point.yc);
    const double gap = eval.value - point.delta;
    const double sigma = std::sqrt(point.sigma_delta * point.sigma_delta +
                                   eval.slope * eval.slope * point.sigma_yc * point.sigma_yc);
    cert.margins[static_cast<std::size_t>(curve.k - 1)] =
        sigma > 0.0 ? gap / sigma
                    : (gap > 0.0 ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity());
    if (gap > 0.0) cert.order = std::max(cert.order, curve.k + 1);
  }
  cert.order_label = entanglement_order_label(cert.order);
  return cert;
}

// ---------------------------------------------------------------------------
// Curve cache: versioned whitespace-separated text, one record per sample.

inline constexpr const char* kBoundCacheHeader = "# quadwit bounds cache v1";

inline void save_bound_cache(const std::string& path, const std::vector<BoundCurve>& curves) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_bound_cache: cannot open " + path);
  out << kBoundCacheHeader << "\n";
  out << "# k yc delta_b restarts agree seed steps rank tol_yc\n";
  char line[256];
  for (const auto& curve : curves)
    for (const auto& s : curve.samples) {
      std::snprintf(line, sizeof line, "%d %.12g %.12g %d %d %llu %d %d %.12g\n", curve.k, s.yc,
                    s.delta_b, s.restarts, s.agree, static_cast<unsigned long long>(s.seed),
                    s.steps, s.rank, s.tol_yc);
      out << line;
    }
  if (!out) throw std::runtime_error("save_bound_cache: write failed for " + path);
}

inline std::vector<BoundCurve> load_bound_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_bound_cache: cannot open " + path);
  std::string header;
  std::getline(in, header);
  if (header != kBoundCacheHeader)
    throw std::runtime_error("load_bound_cache: unrecognized header in " + path);
  std::map<int, BoundCurve> by_k;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    int k = 0;
    BoundSample s;
    unsigned long long seed = 0;
    if (!(ss >> k >> s.yc >> s.delta_b >> s.restarts >> s.agree >> seed >> s.steps >> s.rank >>
          s.tol_yc))
      throw std::runtime_error("load_bound_cache: malformed record: " + line);
    s.seed = seed;
    auto& curve = by_k[k];
    curve.k = k;
    curve.samples.push_back(s);
  }
  std::vector<BoundCurve> curves;
  for (auto& [k, curve] : by_k) {
    std::sort(curve.samples.begin(), curve.samples.end(),
              [](const BoundSample& a, const BoundSample& b) { return a.yc < b.yc; });
    curves.push_back(std::move(curve));
  }
  return curves;
}

inline std::vector<double> default_yc_grid() {
  return {0.02, 0.04, 0.06, 0.07, 0.10, 0.15, 0.22, 0.32, 0.45, 0.62, 0.85, 1.2, 1.5};
}

}  // namespace quadwit
