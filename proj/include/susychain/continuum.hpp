#pragma once

// Dirac-type operators H = -i gamma d/dx + V(x) with three-component spinors: the low-energy
// limit of the saw chain, constant-coefficient symbols and a finite-difference realization.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "susychain/errors.hpp"
#include "susychain/lattice.hpp"
#include "susychain/numcore.hpp"

namespace susychain {

/// One point of the block potential
///   [[v11 + v, -i v12, -i v13], [i v12, -v11 + v, v23], [i v13, v23, lambda]].
struct PotentialPoint {
  double v11 = 0.0;
  double v12 = 0.0;
  double v13 = 0.0;
  double v23 = 0.0;
};

inline Mat3c potential_matrix(const PotentialPoint& p, double v, double lambda) {
  const cplx i(0.0, 1.0);
  Mat3c m;
  m(0, 0) = p.v11 + v;
  m(1, 1) = -p.v11 + v;
  m(2, 2) = lambda;
  m(0, 1) = -i * p.v12;
  m(1, 0) = i * p.v12;
  m(0, 2) = -i * p.v13;
  m(2, 0) = i * p.v13;
  m(1, 2) = m(2, 1) = p.v23;
  return m;
}

/// Sampled potential components on a grid, with the constants v and lambda.
struct PotentialComponents {
  std::vector<double> x, v11, v12, v13, v23;
  double v = 0.0;
  double lambda = 0.0;

  std::size_t size() const noexcept { return x.size(); }
  PotentialPoint at(std::size_t i) const { return {v11[i], v12[i], v13[i], v23[i]}; }
  Mat3c matrix(std::size_t i) const { return potential_matrix(at(i), v, lambda); }
  void push_back(double xv, const PotentialPoint& p) {
    x.push_back(xv);
    v11.push_back(p.v11);
    v12.push_back(p.v12);
    v13.push_back(p.v13);
    v23.push_back(p.v23);
  }
};

/// Largest |V(i,j) - conj(V(j,i))|.
inline double hermiticity_defect(const Mat3c& m) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
  return worst;
}

struct DiracOperatorSpec {
  std::function<Mat3c(double)> potential;
  double kinetic_scale = 1.0;  // coefficient of -i gamma d/dx
  std::optional<Grid> domain;  // empty for closed-form potentials

  static Mat3c gamma() { return gamma_matrix(); }
};

struct ContinuumLimit {
  DiracOperatorSpec spec;
  PotentialPoint components;
  double v = 0.0;
  double lambda = 0.0;
  double kinetic_scale = 1.0;  // t̃_AB a; x is measured in units of this scale
};

/// Low-energy operator of the saw chain near k = pi/a, after the diag(1, i, i) rotation.
inline ContinuumLimit continuum_limit(const TightBindingParams& p) {
  p.validate();
  if (p.t_ab_inter == 0.0) throw ParameterError("continuum_limit: t_ab_inter = 0, no Dirac expansion");
  ContinuumLimit c;
  c.v = 0.5 * (p.t_aa + p.t_bb);
  c.lambda = p.t_cc;
  c.components = {0.5 * (p.t_aa - p.t_bb), p.t_ab - p.t_ab_inter, p.t_ac, p.t_bc};
  c.kinetic_scale = p.t_ab_inter * p.a;
  const Mat3c vm = potential_matrix(c.components, c.v, c.lambda);
  c.spec.potential = [vm](double) { return vm; };
  c.spec.kinetic_scale = 1.0;
  return c;
}

/// Constant limit of the potential on one side of the real line.
struct AsymptoticCell {
  double v11 = 0.0;
  double v12 = 0.0;
  double v13 = 0.0;
  double v23 = 0.0;
  double lambda = 0.0;

  void validate() const {
    for (double x : {v11, v12, v13, v23, lambda}) {
      if (!std::isfinite(x)) throw ParameterError("asymptotic cell: non-finite entry");
    }
  }
};

/// Eigenvalues of the symbol gamma k + V for a constant cell, ascending.
inline std::array<double, 3> symbol_dispersion(const AsymptoticCell& c, double k) {
  c.validate();
  Mat3c m = potential_matrix({c.v11, c.v12, c.v13, c.v23}, 0.0, c.lambda);
  m(0, 1) += k;
  m(1, 0) += k;
  const auto es = eigh_small(HermitianMatrix(m));
  return {es.values[0], es.values[1], es.values[2]};
}

struct Thresholds {
  double lower = 0.0;
  double upper = 0.0;
  double flat = 0.0;
};

/// Gap edges of a decoupled cell: the dispersive branches ±sqrt(k^2 + v11^2 + v12^2) are
/// closest to zero at k = 0.
inline Thresholds threshold_scan(const AsymptoticCell& c) {
  c.validate();
  if (c.v13 != 0.0 || c.v23 != 0.0) {
    throw ParameterError("threshold_scan: coupled asymptotic cell (v13 or v23 nonzero) is unsupported");
  }
  const double e = std::hypot(c.v11, c.v12);
  return {-e, e, c.lambda};
}

/// Central-difference realization on a grid, index 3j + component. The kinetic stencil
/// -i (f[j+1] - f[j-1]) / 2h is Hermitian as stored; the ends are simply truncated.
inline BandedHermitian discretize(const DiracOperatorSpec& spec, const Grid& grid) {
  const std::size_t n = grid.size();
  BandedHermitian h(3 * n, 4);
  const cplx hop(0.0, -spec.kinetic_scale / (2.0 * grid.h()));
  for (std::size_t j = 0; j < n; ++j) {
    const double x = grid.x(j);
    const Mat3c v = spec.potential(x);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        if (!std::isfinite(v(r, c).real()) || !std::isfinite(v(r, c).imag())) {
          throw SingularError("discretize: non-finite potential sample", x);
        }
      }
    }
    const double asym = hermiticity_defect(v);
    if (asym > kHermitianTolerance * std::max(1.0, v.max_abs())) {
      throw NumericalError("discretize: non-Hermitian potential at x = " + num_str(x));
    }
    for (std::size_t r = 0; r < 3; ++r) {
      h.set(3 * j + r, 3 * j + r, v(static_cast<int>(r), static_cast<int>(r)).real());
      for (std::size_t c = 0; c < r; ++c) h.set(3 * j + r, 3 * j + c, v(static_cast<int>(r), static_cast<int>(c)));
    }
    if (j + 1 < n) {
      // rows of components 0 and 1 at j reach components 1 and 0 at j + 1
      h.set(3 * j, 3 * (j + 1) + 1, hop);
      h.set(3 * j + 1, 3 * (j + 1), hop);
    }
  }
  return h;
}

/// Weight of the grid-scale staggered branch: 1 - |sum of neighbour sums|^2 / (2 |psi|^2), i.e.
/// 0 for smooth states and 1 for states alternating in sign between neighbouring points. The
/// central difference has a spurious low-energy branch there (fermion doubling).
inline double staggered_fraction(const std::vector<cplx>& vec, std::size_t components = 3) {
  const std::size_t n = vec.size() / components;
  double smooth = 0.0, total = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    for (std::size_t c = 0; c < components; ++c) {
      const cplx a = vec[j * components + c], b = vec[(j + 1) * components + c];
      smooth += std::norm(a + b);
      total += std::norm(a) + std::norm(b);
    }
  }
  return total > 0.0 ? 1.0 - 0.5 * smooth / total : 0.0;
}

}  // namespace susychain
