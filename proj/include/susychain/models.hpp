#pragma once

// The two closed-form coupled models generated from the cosh seed, their validity windows,
// asymptotics and spectra, and the map to a finite saw chain.
//
// Every sech/tanh/cosh is evaluated through e = exp(-2 kappa |x|) so that large boxes do not
// overflow: sech = 2e/(1+e^2), tanh = sign(x)(1-e^2)/(1+e^2), and cosh only ever appears
// divided out of a denominator.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "susychain/continuum.hpp"
#include "susychain/errors.hpp"
#include "susychain/lattice.hpp"
#include "susychain/susy.hpp"

namespace susychain {

enum class Model { I, II };

inline const char* model_name(Model m) { return m == Model::I ? "I" : "II"; }

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const noexcept { return violations.empty(); }
  std::string message() const {
    std::string s;
    for (const auto& v : violations) s += (s.empty() ? "" : "; ") + v;
    return s;
  }
};

struct ModelParams {
  Model model = Model::I;
  double m = 0.0;
  double lambda = 0.0;
  double W0 = 1.0;  // cancels from every potential
  double c1 = 0.0;

  double A() const {
    return model == Model::I ? std::sqrt(m * (m - lambda)) : m;
  }
  double kappa() const {
    return model == Model::I ? std::sqrt((m - lambda) * (2.0 * m + lambda)) : std::sqrt(2.0 * m * m - lambda * lambda);
  }
  double omega() const {
    if (model == Model::I) return -4.0 * m / (std::sqrt(m * (m - lambda)) * (2.0 * m + lambda));
    return -2.0 * (2.0 * m - lambda) / (2.0 * m * m - lambda * lambda);
  }
  double c0() const { return W0 * omega() + c1; }
};

inline ValidationReport validate_params(const ModelParams& p) {
  ValidationReport r;
  if (!std::isfinite(p.m) || !std::isfinite(p.lambda) || !std::isfinite(p.W0) || !std::isfinite(p.c1)) {
    r.violations.emplace_back("parameters must be finite");
    return r;
  }
  if (p.W0 == 0.0) r.violations.emplace_back("W0 != 0");
  if (p.model == Model::I) {
    if (!(p.m > 0.0)) r.violations.emplace_back("m > 0");
    if (!(p.m * (p.m - p.lambda) > 0.0)) r.violations.emplace_back("m(m - lambda) > 0");
    if (!(-2.0 * p.m < p.lambda)) r.violations.emplace_back("-2m < lambda");
    if (!(p.lambda < p.m)) r.violations.emplace_back("lambda < m");
  } else {
    if (!(p.lambda * p.lambda < 2.0 * p.m * p.m)) r.violations.emplace_back("lambda^2 < 2m^2");
  }
  if (!r.ok()) return r;
  const double kappa0 = std::sqrt(p.A() * p.A() + p.m * p.m - p.lambda * p.lambda);
  if (std::abs(p.kappa() - kappa0) > 1e-14 * std::max(1.0, kappa0)) {
    r.violations.emplace_back("kappa = sqrt(A^2 + m^2 - lambda^2)");
  }
  return r;
}

inline void require_valid(const ModelParams& p) {
  const auto r = validate_params(p);
  if (!r.ok()) throw ParameterError(std::string("model ") + model_name(p.model) + ": violated " + r.message());
}

namespace detail {
struct Hyperbolic {
  double sech, tanh;
};
inline Hyperbolic hyperbolic(double X) {
  const double e = std::exp(-std::abs(X));
  const double den = 1.0 + e * e;
  return {2.0 * e / den, std::copysign((1.0 - e * e) / den, X)};
}
}  // namespace detail

inline PotentialPoint model1_potential(const ModelParams& p, double x) {
  require_valid(p);
  if (p.model != Model::I) throw ParameterError("model1_potential: parameters are not Model I");
  const double m = p.m, l = p.lambda, k = p.kappa(), sa = p.A();
  const auto [sech, tanh] = detail::hyperbolic(2.0 * k * x);
  const double den = 2.0 * m - l + 4.0 * m * sech;
  const double den_c = 4.0 * m * sech + (2.0 * m - l);  // (4m + (2m - l) cosh) * sech
  PotentialPoint v;
  v.v12 = -l * (2.0 * sa * (1.0 + sech) - k * tanh) / den;
  v.v13 = std::sqrt(m * (2.0 * m + l)) * k * sech / den_c;
  v.v23 = k * k * sech / den_c;
  v.v11 = -(l * l + 4.0 * m * m * sech + 2.0 * sa * k * tanh) / den;
  return v;
}

inline PotentialPoint model2_potential(const ModelParams& p, double x) {
  require_valid(p);
  if (p.model != Model::II) throw ParameterError("model2_potential: parameters are not Model II");
  const double m = p.m, l = p.lambda, k = p.kappa();
  const double a = 2.0 * m - l, b = m - l;
  const auto [sech, tanh] = detail::hyperbolic(2.0 * k * x);
  PotentialPoint v;
  v.v12 = -l;
  v.v13 = v.v23 = b * k * k * sech / (a * a * sech + 2.0 * b * b);
  v.v11 = -k * (a * k * sech + 2.0 * b * b * tanh) / (2.0 * b * b + a * a * sech);
  return v;
}

inline PotentialPoint model_potential(const ModelParams& p, double x) {
  return p.model == Model::I ? model1_potential(p, x) : model2_potential(p, x);
}

inline PotentialComponents sample_model_potential(const ModelParams& p, const Grid& grid) {
  PotentialComponents out;
  out.lambda = p.lambda;
  for (std::size_t i = 0; i < grid.size(); ++i) out.push_back(grid.x(i), model_potential(p, grid.x(i)));
  return out;
}

/// Limits at x -> -inf (first) and x -> +inf (second).
inline std::pair<AsymptoticCell, AsymptoticCell> asymptotic_cells(const ModelParams& p) {
  require_valid(p);
  const double m = p.m, l = p.lambda, k = p.kappa();
  AsymptoticCell lo, hi;
  lo.lambda = hi.lambda = l;
  if (p.model == Model::I) {
    const double sa = p.A(), d = 2.0 * m - l;
    hi.v12 = (k * l - 2.0 * sa * l) / d;
    lo.v12 = (-k * l - 2.0 * sa * l) / d;
    hi.v11 = (-2.0 * k * sa - l * l) / d;
    lo.v11 = (2.0 * k * sa - l * l) / d;
  } else {
    hi.v12 = lo.v12 = -l;
    hi.v11 = -k;
    lo.v11 = k;
  }
  return {lo, hi};
}

struct AnalyticSpectrum {
  double lower = 0.0;
  double upper = 0.0;
  double flat = 0.0;
  bool derived = false;           // true when not stated in the source and obtained from asymptotics
  double identity_residual = 0.0; // |v11^2 + v12^2 - edge^2| on both sides
};

/// (-inf, -sqrt(m(2m - lambda))] U [sqrt(m(2m - lambda)), inf) U {lambda}.
inline AnalyticSpectrum model1_spectrum(const ModelParams& p) {
  require_valid(p);
  if (p.model != Model::I) throw ParameterError("model1_spectrum: parameters are not Model I");
  const double e2 = p.m * (2.0 * p.m - p.lambda);
  AnalyticSpectrum s{-std::sqrt(e2), std::sqrt(e2), p.lambda, false, 0.0};
  const auto [lo, hi] = asymptotic_cells(p);
  for (const auto& c : {lo, hi}) {
    s.identity_residual = std::max(s.identity_residual, std::abs(c.v11 * c.v11 + c.v12 * c.v12 - e2));
  }
  return s;
}

/// ±sqrt(kappa^2 + lambda^2) = ±sqrt(2)|m| from the asymptotic cells; flagged derived.
inline AnalyticSpectrum model2_thresholds(const ModelParams& p) {
  require_valid(p);
  if (p.model != Model::II) throw ParameterError("model2_thresholds: parameters are not Model II");
  const double k = p.kappa();
  const double e = std::sqrt(k * k + p.lambda * p.lambda);
  AnalyticSpectrum s{-e, e, p.lambda, true, 0.0};
  const auto [lo, hi] = asymptotic_cells(p);
  for (const auto& c : {lo, hi}) {
    s.identity_residual = std::max(s.identity_residual, std::abs(c.v11 * c.v11 + c.v12 * c.v12 - e * e));
  }
  return s;
}

inline AnalyticSpectrum model_spectrum(const ModelParams& p) {
  return p.model == Model::I ? model1_spectrum(p) : model2_thresholds(p);
}

/// Seed data reproducing the model through the general engine (epsilon = m, v = 0).
inline SeedData model_seed(const ModelParams& p) {
  require_valid(p);
  SeedData s;
  s.m = p.m;
  s.v = 0.0;
  s.A = p.A();
  s.lambda = p.lambda;
  s.epsilon = p.m;
  s.c0 = p.c0();
  s.c1 = p.c1;
  s.W0 = p.W0;
  return s;
}

/// Cell centres of a chain of n_cells spanning [-box/2, box/2].
inline std::vector<double> chain_positions(std::size_t n_cells, double box) {
  const double a = box / static_cast<double>(n_cells);
  std::vector<double> x(n_cells);
  for (std::size_t n = 0; n < n_cells; ++n) {
    x[n] = (static_cast<double>(n) - 0.5 * static_cast<double>(n_cells - 1)) * a;
  }
  return x;
}

/// Lattice regularization: a = box / n_cells, t̃_AB = 1/a and the potential sampled at cell
/// centres (one x per cell for all three sites).
inline ChainProfile sample_chain_profile(const ModelParams& p, std::size_t n_cells, double box) {
  require_valid(p);
  if (n_cells < 2) throw ParameterError("sample_chain_profile: need at least 2 cells");
  if (!(box > 0.0) || !std::isfinite(box)) throw ParameterError("sample_chain_profile: box must be positive");
  const double a = box / static_cast<double>(n_cells);
  const double tt = 1.0 / a;
  const auto xs = chain_positions(n_cells, box);
  ChainProfile c(n_cells);
  for (std::size_t n = 0; n < n_cells; ++n) {
    const auto v = model_potential(p, xs[n]);
    c.t_ab_inter[n] = tt;
    c.t_ab[n] = tt + v.v12;
    c.t_ac[n] = v.v13;
    c.t_bc[n] = v.v23;
    c.t_aa[n] = v.v11;
    c.t_bb[n] = -v.v11;
    c.t_cc[n] = p.lambda;
  }
  return c;
}

/// Closed-form model potential as a Dirac operator.
inline DiracOperatorSpec model_operator(const ModelParams& p) {
  require_valid(p);
  DiracOperatorSpec spec;
  spec.potential = [p](double x) { return potential_matrix(model_potential(p, x), 0.0, p.lambda); };
  return spec;
}

}  // namespace susychain
