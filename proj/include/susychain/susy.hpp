#pragma once

// Darboux transformation of the decoupled seed operator
//   H = -i gamma d/dx + [[m + v, -iA, 0], [iA, -m + v, 0], [0, 0, lambda]]
// into H~ = -i gamma d/dx + V~ with V~ = V - i[gamma, U' U^-1] and L = U d/dx U^-1.

#include <algorithm>
#include <cmath>
#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "susychain/continuum.hpp"
#include "susychain/errors.hpp"
#include "susychain/numcore.hpp"

namespace susychain {

struct SeedData {
  double m = 0.0;
  double v = 0.0;
  double A = 0.0;
  double lambda = 0.0;
  double epsilon = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
  double W0 = 1.0;

  /// lambda measured from the AB-block offset v
  double lambda_ab() const noexcept { return lambda - v; }
  double kappa0_sq() const noexcept { return A * A + m * m - lambda_ab() * lambda_ab(); }
  double kappa0() const noexcept { return std::sqrt(kappa0_sq()); }
  /// phi2 psi1 - phi1 psi2 for the lambda states below (W0 enters through the phi1 integral).
  double wronskian() const noexcept { return W0 / (m - lambda_ab()); }

  void validate() const {
    for (double x : {m, v, A, lambda, epsilon, c0, c1, W0}) {
      if (!std::isfinite(x)) throw ParameterError("seed: non-finite parameter");
    }
    if (W0 == 0.0) throw ParameterError("seed: W0 must be nonzero (independent lambda states)");
    if (std::abs(lambda_ab()) == std::abs(m)) throw ParameterError("seed: require |lambda - v| != |m|");
    if (!(kappa0_sq() > 0.0)) {
      throw ParameterError("seed: kappa0^2 = A^2 + m^2 - (lambda - v)^2 must be positive (oscillatory seed unsupported)");
    }
  }
};

/// Seed potential [[m + v, -iA, 0], [iA, -m + v, 0], [0, 0, lambda]].
inline Mat3c seed_potential(const SeedData& s) {
  Mat3c v;
  v(0, 0) = s.m + s.v;
  v(1, 1) = -s.m + s.v;
  v(2, 2) = s.lambda;
  v(0, 1) = cplx(0.0, -s.A);
  v(1, 0) = cplx(0.0, s.A);
  return v;
}

/// Value and first derivative of a real function at one point.
struct Jet {
  double f = 0.0;
  double df = 0.0;
};

struct EpsilonState {
  Jet psi0, phi0;
};

struct LambdaStates {
  Jet phi1, phi2, psi1, psi2;
};

/// (i psi0, phi0, 0) with eigenvalue epsilon = m + v.
inline EpsilonState seed_epsilon_state(const SeedData& s, double x) {
  const double tol = 1e-14 * (1.0 + std::abs(s.m) + std::abs(s.v));
  if (std::abs(s.epsilon - (s.m + s.v)) > tol) {
    throw ParameterError("seed_epsilon_state: closed form requires epsilon = m + v");
  }
  const double e = std::exp(-s.A * x);
  return {{-s.m * e, s.m * s.A * e}, {s.A * e, -s.A * s.A * e}};
}

/// phi2 = cosh(k x), phi1 = phi2 (W0 tanh(k x)/k + c0), psi_a = (phi_a' + A phi_a)/(m - lambda).
inline LambdaStates seed_lambda_states(const SeedData& s, double x) {
  s.validate();
  const double k = s.kappa0();
  const double ch = std::cosh(k * x), sh = std::sinh(k * x);
  const double den = s.m - s.lambda_ab();
  LambdaStates out;
  out.phi2 = {ch, k * sh};
  out.phi1 = {s.W0 * sh / k + s.c0 * ch, s.W0 * ch + s.c0 * k * sh};
  // phi'' = k^2 phi for both
  auto psi = [&](const Jet& phi) {
    return Jet{(phi.df + s.A * phi.f) / den, (k * k * phi.f + s.A * phi.df) / den};
  };
  out.psi1 = psi(out.phi1);
  out.psi2 = psi(out.phi2);
  return out;
}

/// Choice of the free C-component function xi2. The cosh seed uses closed forms throughout;
/// any other nonvanishing function goes through numerical quadrature for xi1.
struct Xi2Seed {
  std::function<double(double)> f;
  std::function<double(double)> df;
  double kappa = 0.0;
  bool is_cosh = false;

  static Xi2Seed cosh(double kappa) {
    return {[kappa](double x) { return std::cosh(kappa * x); },
            [kappa](double x) { return kappa * std::sinh(kappa * x); }, kappa, true};
  }
  static Xi2Seed general(std::function<double(double)> f, std::function<double(double)> df) {
    return {std::move(f), std::move(df), 0.0, false};
  }
};

/// xi1 = xi2 (c1 - (epsilon - lambda) W int dx / xi2^2) sampled on the grid, with derivative.
/// W is the measured invariant phi2 psi1 - phi1 psi2.
inline std::vector<Jet> hermitize_xi1(const SeedData& s, const Xi2Seed& xi2, const Grid& grid) {
  const double k = (s.epsilon - s.lambda) * s.wronskian();
  std::vector<Jet> out(grid.size());
  if (xi2.is_cosh) {
    const double kap = xi2.kappa;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.x(i);
      const double ch = std::cosh(kap * x), sh = std::sinh(kap * x);
      out[i] = {s.c1 * ch - k * sh / kap, s.c1 * kap * sh - k * ch};
    }
    return out;
  }
  std::vector<double> inv_sq(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = xi2.f(grid.x(i));
    if (!std::isfinite(v) || v == 0.0) throw SingularError("hermitize_xi1: xi2 vanishes", grid.x(i));
    inv_sq[i] = 1.0 / (v * v);
  }
  const auto integral = integrate_cumulative(inv_sq, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.x(i);
    const double f = xi2.f(x), bracket = s.c1 - k * integral[i];
    out[i] = {f * bracket, xi2.df(x) * bracket - k / f};
  }
  return out;
}

enum class Xi1Mode {
  hermitized,  // the hermitizing choice above
  equal_xi2,   // xi1 = xi2, a deliberately non-Hermitian control
};

struct FrameOptions {
  Xi1Mode xi1 = Xi1Mode::hermitized;
  double singular_threshold = 1e-8;  // |det U| / prod(column norms)
  double warning_threshold = 1e-3;
};

/// Sampled seed functions and U(x) with analytic derivatives.
struct TransformationFrame {
  Grid grid;
  SeedData seed;
  std::vector<Jet> psi0, psi1, psi2, phi0, phi1, phi2, xi1, xi2;
  std::vector<double> det_rel;  // |det U| / prod of column norms
  double min_det_rel = 0.0;
  double min_det_x = 0.0;
  std::vector<std::string> warnings;

  Mat3c U(std::size_t i) const {
    const cplx I(0.0, 1.0);
    Mat3c u;
    u(0, 0) = I * psi0[i].f;
    u(0, 1) = I * psi1[i].f;
    u(0, 2) = I * psi2[i].f;
    u(1, 0) = phi0[i].f;
    u(1, 1) = phi1[i].f;
    u(1, 2) = phi2[i].f;
    u(2, 1) = xi1[i].f;
    u(2, 2) = xi2[i].f;
    return u;
  }
  Mat3c dU(std::size_t i) const {
    const cplx I(0.0, 1.0);
    Mat3c u;
    u(0, 0) = I * psi0[i].df;
    u(0, 1) = I * psi1[i].df;
    u(0, 2) = I * psi2[i].df;
    u(1, 0) = phi0[i].df;
    u(1, 1) = phi1[i].df;
    u(1, 2) = phi2[i].df;
    u(2, 1) = xi1[i].df;
    u(2, 2) = xi2[i].df;
    return u;
  }
  Mat3c U_inverse(std::size_t i) const {
    const Mat3c u = U(i);
    return (1.0 / u.det()) * u.adjugate();
  }
  Mat3c seed_potential() const { return susychain::seed_potential(seed); }
  std::array<double, 3> energies() const { return {seed.epsilon, seed.lambda, seed.lambda}; }
  std::size_t size() const noexcept { return grid.size(); }
};

inline double hadamard_ratio(const Mat3c& u) {
  double scale = 1.0;
  for (int c = 0; c < 3; ++c) {
    scale *= std::sqrt(std::norm(u(0, c)) + std::norm(u(1, c)) + std::norm(u(2, c)));
  }
  return scale > 0.0 ? std::abs(u.det()) / scale : 0.0;
}

inline TransformationFrame assemble_frame(const SeedData& s, const Grid& grid, const FrameOptions& opt = {},
                                          std::optional<Xi2Seed> xi2_seed = std::nullopt) {
  s.validate();
  const double k0 = s.kappa0();
  const double reach = std::max(std::abs(grid.x_min()), std::abs(grid.x_max()));
  if (k0 * reach > 350.0 || std::abs(s.A) * reach > 350.0) {
    throw ParameterError("assemble_frame: box too large for sampled seed functions (exponent > 350)");
  }
  const Xi2Seed xi2 = xi2_seed ? *xi2_seed : Xi2Seed::cosh(k0);

  TransformationFrame fr{grid, s, {}, {}, {}, {}, {}, {}, {}, {}, {}, 0.0, 0.0, {}};
  const std::size_t n = grid.size();
  for (auto* v : {&fr.psi0, &fr.psi1, &fr.psi2, &fr.phi0, &fr.phi1, &fr.phi2, &fr.xi2}) v->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(i);
    const auto e = seed_epsilon_state(s, x);
    const auto l = seed_lambda_states(s, x);
    fr.psi0[i] = e.psi0;
    fr.phi0[i] = e.phi0;
    fr.psi1[i] = l.psi1;
    fr.psi2[i] = l.psi2;
    fr.phi1[i] = l.phi1;
    fr.phi2[i] = l.phi2;
    fr.xi2[i] = {xi2.f(x), xi2.df(x)};
  }
  fr.xi1 = opt.xi1 == Xi1Mode::hermitized ? hermitize_xi1(s, xi2, grid) : fr.xi2;

  fr.det_rel.resize(n);
  fr.min_det_rel = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    fr.det_rel[i] = hadamard_ratio(fr.U(i));
    if (!(fr.det_rel[i] >= fr.min_det_rel)) {
      fr.min_det_rel = fr.det_rel[i];
      fr.min_det_x = grid.x(i);
    }
  }
  if (!(fr.min_det_rel >= opt.singular_threshold)) {
    throw SingularError("assemble_frame: |det U| below " + num_str(opt.singular_threshold) +
                            " relative (transformed potential singular)",
                        fr.min_det_x);
  }
  if (fr.min_det_rel < opt.warning_threshold) {
    fr.warnings.push_back("near-singular transformation: min |det U| relative = " +
                          num_str(fr.min_det_rel) + " at x = " + num_str(fr.min_det_x));
  }
  return fr;
}

/// Samples of the Wronskian-type invariant phi2 psi1 - phi1 psi2.
inline std::vector<double> wronskian_samples(const TransformationFrame& fr) {
  std::vector<double> w(fr.size());
  for (std::size_t i = 0; i < fr.size(); ++i) {
    w[i] = fr.phi2[i].f * fr.psi1[i].f - fr.phi1[i].f * fr.psi2[i].f;
  }
  return w;
}

/// stdev / |mean| of the invariant over the grid.
inline double wronskian_relative_stdev(const TransformationFrame& fr) {
  const auto w = wronskian_samples(fr);
  double mean = 0.0;
  for (double x : w) mean += x;
  mean /= static_cast<double>(w.size());
  double var = 0.0;
  for (double x : w) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(w.size())) / std::abs(mean);
}

using Spinor = std::vector<Vec3c>;

inline Spinor diff_spinor(const Spinor& s, const Grid& grid) {
  Spinor d(s.size());
  std::vector<cplx> comp(s.size());
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < s.size(); ++i) comp[i] = s[i][c];
    const auto dc = diff_central(comp, grid);
    for (std::size_t i = 0; i < s.size(); ++i) d[i][c] = dc[i];
  }
  return d;
}

/// (-i gamma d/dx + V(x)) s with the finite-difference derivative; V given per grid point.
inline Spinor apply_dirac(const std::vector<Mat3c>& potential, const Spinor& s, const Grid& grid) {
  const Spinor d = diff_spinor(s, grid);
  Spinor out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = minus_i_gamma(d[i]) + potential[i] * s[i];
  return out;
}

inline double max_norm(const Spinor& s) {
  double worst = 0.0;
  for (const auto& v : s) worst = std::max(worst, norm_inf(v));
  return worst;
}

inline Spinor frame_column(const TransformationFrame& fr, int col) {
  Spinor s(fr.size());
  for (std::size_t i = 0; i < fr.size(); ++i) {
    const Mat3c u = fr.U(i);
    s[i] = {u(0, col), u(1, col), u(2, col)};
  }
  return s;
}

/// max_x |(H - E_j) U_j| / (1 + max_x |U_j|) for each column j, derivatives by finite differences.
inline std::array<double, 3> frame_residuals(const TransformationFrame& fr) {
  const std::vector<Mat3c> v(fr.size(), fr.seed_potential());
  const auto energies = fr.energies();
  std::array<double, 3> out{};
  for (int c = 0; c < 3; ++c) {
    const Spinor col = frame_column(fr, c);
    const Spinor h = apply_dirac(v, col, fr.grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < col.size(); ++i) worst = std::max(worst, norm_inf(h[i] - energies[c] * col[i]));
    out[c] = worst / (1.0 + max_norm(col));
  }
  return out;
}

/// V~ = V - i[gamma, U' U^-1] at every grid point (no hermiticity assumed).
inline std::vector<Mat3c> commutator_potential(const TransformationFrame& fr) {
  const Mat3c g = gamma_matrix();
  const Mat3c v = fr.seed_potential();
  const cplx I(0.0, 1.0);
  std::vector<Mat3c> out(fr.size());
  for (std::size_t i = 0; i < fr.size(); ++i) {
    const Mat3c w = fr.dU(i) * fr.U_inverse(i);
    out[i] = v - I * (g * w - w * g);
  }
  return out;
}

/// Closed-form components of V~ in terms of the seed functions (common denominator
/// D = psi0 (xi2 phi1 - xi1 phi2) - phi0 (xi2 psi1 - xi1 psi2) = -i det U).
inline PotentialComponents transformed_potential(const TransformationFrame& fr, double singular_threshold = 1e-8) {
  const SeedData& s = fr.seed;
  const double el = s.epsilon - s.lambda;
  PotentialComponents out;
  out.v = s.v;
  out.lambda = s.lambda;
  for (std::size_t i = 0; i < fr.size(); ++i) {
    const double p0 = fr.psi0[i].f, p1 = fr.psi1[i].f, p2 = fr.psi2[i].f;
    const double f0 = fr.phi0[i].f, f1 = fr.phi1[i].f, f2 = fr.phi2[i].f;
    const double x1 = fr.xi1[i].f, x2 = fr.xi2[i].f;
    const double a = x2 * f1 - x1 * f2;  // xi2 phi1 - xi1 phi2
    const double b = x2 * p1 - x1 * p2;  // xi2 psi1 - xi1 psi2
    const double w = f1 * p2 - f2 * p1;
    const double den = p0 * a - f0 * b;
    if (!(hadamard_ratio(fr.U(i)) >= singular_threshold)) {
      throw SingularError("transformed_potential: vanishing denominator", fr.grid.x(i));
    }
    PotentialPoint pt;
    pt.v12 = -s.A + el * (p0 * b - f0 * a) / den;
    pt.v13 = el * p0 * w / den;
    pt.v23 = -el * f0 * w / den;
    pt.v11 = -s.m + el * (p0 * a + f0 * b) / den;
    out.push_back(fr.grid.x(i), pt);
  }
  return out;
}

struct PotentialChecks {
  double dual_path_max_diff = 0.0;      // |closed components - commutator form|, entrywise
  double max_relative_asymmetry = 0.0;  // max ‖V~ - V~^dagger‖ / (1 + ‖V~‖), commutator form
};

inline PotentialChecks check_potential(const TransformationFrame& fr) {
  const auto comm = commutator_potential(fr);
  PotentialChecks c;
  for (const auto& m : comm) {
    c.max_relative_asymmetry = std::max(c.max_relative_asymmetry, hermiticity_defect(m) / (1.0 + m.norm_inf()));
  }
  const auto comps = transformed_potential(fr);
  for (std::size_t i = 0; i < fr.size(); ++i) {
    c.dual_path_max_diff = std::max(c.dual_path_max_diff, (comps.matrix(i) - comm[i]).max_abs());
  }
  return c;
}

/// L s = U d/dx (U^-1 s).
inline Spinor apply_darboux(const TransformationFrame& fr, const Spinor& state) {
  if (state.size() != fr.size()) throw ParameterError("apply_darboux: state length does not match frame grid");
  Spinor w(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) w[i] = fr.U_inverse(i) * state[i];
  const Spinor dw = diff_spinor(w, fr.grid);
  Spinor out(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) out[i] = fr.U(i) * dw[i];
  return out;
}

/// max_x |(L H - H~ L) s| with every derivative taken by finite differences. The `margin` end
/// points on each side are skipped: there the one-sided stencils are composed with each other
/// and the nested difference is only first order.
inline double intertwining_residual(const TransformationFrame& fr, const Spinor& state, std::size_t margin = 2) {
  const std::vector<Mat3c> v(fr.size(), fr.seed_potential());
  const auto vt = commutator_potential(fr);
  const Spinor lhs = apply_darboux(fr, apply_dirac(v, state, fr.grid));
  const Spinor rhs = apply_dirac(vt, apply_darboux(fr, state), fr.grid);
  if (state.size() <= 2 * margin) throw ParameterError("intertwining_residual: grid too short for margin");
  double worst = 0.0;
  for (std::size_t i = margin; i + margin < state.size(); ++i) worst = std::max(worst, norm_inf(lhs[i] - rhs[i]));
  return worst;
}

/// log2 of successive ratios for residuals on grids refined by halving h.
inline std::vector<double> observed_orders(const std::vector<double>& residuals) {
  std::vector<double> out;
  for (std::size_t i = 1; i < residuals.size(); ++i) out.push_back(std::log2(residuals[i - 1] / residuals[i]));
  return out;
}

struct IntertwiningStudy {
  std::vector<double> h;
  std::vector<std::vector<double>> residuals;  // [state][level]
  std::vector<double> kernel_residuals;        // max |L U_j| per level
  std::vector<std::vector<double>> orders() const {
    std::vector<std::vector<double>> o;
    for (const auto& r : residuals) o.push_back(observed_orders(r));
    return o;
  }
};

inline IntertwiningStudy intertwining_study(const SeedData& s, const Grid& coarse,
                                            const std::vector<std::function<Vec3c(double)>>& states,
                                            std::size_t levels = 3) {
  IntertwiningStudy st;
  st.residuals.assign(states.size(), {});
  Grid g = coarse;
  for (std::size_t l = 0; l < levels; ++l, g = g.refined()) {
    const auto fr = assemble_frame(s, g);
    st.h.push_back(g.h());
    for (std::size_t j = 0; j < states.size(); ++j) {
      st.residuals[j].push_back(intertwining_residual(fr, sample(g, states[j])));
    }
    double kern = 0.0;
    for (int c = 0; c < 3; ++c) kern = std::max(kern, max_norm(apply_darboux(fr, frame_column(fr, c))));
    st.kernel_residuals.push_back(kern);
  }
  return st;
}

struct DualState {
  double energy = 0.0;
  Spinor values;
  double residual = 0.0;      // max |(H~ - E) s| / (1 + max |s|)
  double l2_mass = 0.0;       // trapezoidal integral of |s|^2 over the box
  double decay_left = 0.0;    // fitted rate of |s| ~ exp(-rate |x|) on the left tail
  double decay_right = 0.0;
};

struct DualStates {
  std::array<DualState, 3> states;
  double identity_defect = 0.0;  // max |U U^-1 - 1|
};

namespace detail {
/// Least-squares slope of log|s| against |x| over a contiguous index range.
inline double tail_rate(const Grid& g, const Spinor& s, std::size_t lo, std::size_t hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double cnt = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double amp = norm_inf(s[i]);
    if (!(amp > 0.0)) continue;
    const double x = std::abs(g.x(i)), y = std::log(amp);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    cnt += 1;
  }
  if (cnt < 2) return 0.0;
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return -slope;
}
}  // namespace detail

/// Columns of (U^-1)^dagger, candidate eigenstates of H~ with energies (epsilon, lambda, lambda).
inline DualStates inverse_dagger_states(const TransformationFrame& fr) {
  const std::size_t n = fr.size();
  const auto vt = commutator_potential(fr);
  const auto energies = fr.energies();
  DualStates out;
  std::array<Spinor, 3> cols;
  for (auto& c : cols) c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Mat3c u = fr.U(i);
    const Mat3c inv = fr.U_inverse(i);
    const Mat3c d = (u * inv) - Mat3c::identity();
    out.identity_defect = std::max(out.identity_defect, d.max_abs());
    const Mat3c dag = inv.adjoint();
    for (int c = 0; c < 3; ++c) cols[c][i] = {dag(0, c), dag(1, c), dag(2, c)};
  }
  const std::size_t tail = std::max<std::size_t>(n / 5, 2);
  for (int c = 0; c < 3; ++c) {
    DualState& st = out.states[c];
    st.energy = energies[c];
    st.values = cols[c];
    const Spinor h = apply_dirac(vt, cols[c], fr.grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, norm_inf(h[i] - st.energy * cols[c][i]));
    st.residual = worst / (1.0 + max_norm(cols[c]));
    std::vector<double> dens(n);
    for (std::size_t i = 0; i < n; ++i) {
      dens[i] = std::norm(cols[c][i][0]) + std::norm(cols[c][i][1]) + std::norm(cols[c][i][2]);
    }
    const auto cum = integrate_cumulative(dens, fr.grid);
    st.l2_mass = cum.back() - cum.front();
    st.decay_left = detail::tail_rate(fr.grid, cols[c], 0, tail);
    st.decay_right = detail::tail_rate(fr.grid, cols[c], n - tail, n);
  }
  return out;
}

}  // namespace susychain
