#pragma once

// Saw-chain tight-binding model: Bloch Hamiltonian, bands, flat-band tuning of t_CC and
// finite open chains with cell-dependent couplings.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "susychain/errors.hpp"
#include "susychain/numcore.hpp"

namespace susychain {

struct TightBindingParams {
  double t_aa = 0.0;
  double t_bb = 0.0;
  double t_cc = 0.0;
  double t_ab = 0.0;
  double t_ab_inter = 0.0;  // t̃_AB, bond A_n - B_{n-1}
  double t_ac = 0.0;
  double t_bc = 0.0;
  double a = 1.0;

  void validate() const {
    const double vals[] = {t_aa, t_bb, t_cc, t_ab, t_ab_inter, t_ac, t_bc, a};
    const char* names[] = {"t_aa", "t_bb", "t_cc", "t_ab", "t_ab_inter", "t_ac", "t_bc", "a"};
    for (std::size_t i = 0; i < 8; ++i) {
      if (!std::isfinite(vals[i])) throw ParameterError(std::string(names[i]) + " must be finite");
    }
    if (!(a > 0.0)) throw ParameterError("a must be positive");
  }

  /// Same parameters with every on-site energy shifted by s.
  TightBindingParams shifted(double s) const {
    TightBindingParams p = *this;
    p.t_aa += s;
    p.t_bb += s;
    p.t_cc += s;
    return p;
  }
};

inline Mat3c bloch_matrix(const TightBindingParams& p, double k) {
  Mat3c h;
  const cplx hop = p.t_ab + p.t_ab_inter * std::exp(cplx(0.0, -k * p.a));
  h(0, 0) = p.t_aa;
  h(1, 1) = p.t_bb;
  h(2, 2) = p.t_cc;
  h(0, 1) = hop;
  h(1, 0) = std::conj(hop);
  h(0, 2) = h(2, 0) = p.t_ac;
  h(1, 2) = h(2, 1) = p.t_bc;
  return h;
}

inline HermitianMatrix bloch_hamiltonian(const TightBindingParams& p, double k) {
  p.validate();
  if (!std::isfinite(k)) throw ParameterError("bloch_hamiltonian: k must be finite");
  return HermitianMatrix(bloch_matrix(p, k));
}

/// Uniform grid over [-pi/a, pi/a] including both zone edges.
inline std::vector<double> default_k_grid(double a = 1.0, std::size_t n = 513) {
  if (n < 2) throw ParameterError("k grid needs at least 2 points");
  std::vector<double> k(n);
  const double kmax = std::numbers::pi / a;
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = i + 1 == n ? kmax : -kmax + 2.0 * kmax * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return k;
}

struct BandStructure {
  std::vector<double> k;
  std::array<std::vector<double>, 3> bands;  // sorted by value at each k

  double spread(std::size_t band) const {
    const auto [lo, hi] = std::minmax_element(bands[band].begin(), bands[band].end());
    return *hi - *lo;
  }
  double mean(std::size_t band) const {
    double s = 0.0;
    for (double e : bands[band]) s += e;
    return s / static_cast<double>(bands[band].size());
  }
  /// Flat when max_k E - min_k E <= 1e-8 (1 + |E|).
  bool is_flat(std::size_t band) const { return spread(band) <= 1e-8 * (1.0 + std::abs(mean(band))); }
};

inline BandStructure band_structure(const TightBindingParams& p, const std::vector<double>& k_grid) {
  p.validate();
  if (k_grid.empty()) throw ParameterError("band_structure: empty k grid");
  const double kmax = std::numbers::pi / p.a;
  for (double k : k_grid) {
    if (!std::isfinite(k) || std::abs(k) > kmax * (1.0 + 1e-12)) {
      throw ParameterError("band_structure: k outside the first Brillouin zone");
    }
  }
  BandStructure bs;
  bs.k = k_grid;
  for (auto& b : bs.bands) b.assign(k_grid.size(), 0.0);
  parallel_for(k_grid.size(), [&](std::size_t i) {
    const auto es = eigh_small(HermitianMatrix(bloch_matrix(p, k_grid[i])));
    for (std::size_t j = 0; j < 3; ++j) bs.bands[j][i] = es.values[j];
  });
  return bs;
}

struct FlatBandSolution {
  double t_cc = 0.0;
  double a2 = 0.0;  // flat-band energy
  double a1 = 0.0;
  double a0_const = 0.0;  // a0(k) = a0_const + a0_cos * cos(ka)
  double a0_cos = 0.0;
};

struct FlatBandTuning {
  std::vector<FlatBandSolution> solutions;
  double discriminant = 0.0;
};

/// det(H(k) - E) via cofactor expansion.
inline double secular_determinant(const TightBindingParams& p, double k, double e) {
  Mat3c h = bloch_matrix(p, k);
  for (int i = 0; i < 3; ++i) h(i, i) -= e;
  return h.det().real();
}

/// max_k |det(H(k) - E)| / (1 + max|H| + |E|)^3
inline double flat_band_residual(const TightBindingParams& p, double e, const std::vector<double>& k_grid) {
  double worst = 0.0;
  for (double k : k_grid) {
    const double scale = 1.0 + bloch_matrix(p, k).max_abs() + std::abs(e);
    worst = std::max(worst, std::abs(secular_determinant(p, k, e)) / (scale * scale * scale));
  }
  return worst;
}

/// Finds t_CC such that one band of H(k) is exactly flat.
///
/// det(H - E) carries cos(ka) only through -(t_CC - E)|h12|^2 + 2 t_AC t_BC Re h12, so at E = a2
/// the k-dependence vanishes iff t_CC - a2 = d = t_AC t_BC / t_AB. The k-independent remainder
/// is then a quadratic in a2. Solutions are ordered by distance from the AB-chain centre
/// (t_AA + t_BB)/2, so the first one is the flat band inside the AB spectrum.
inline FlatBandTuning tune_flat_band(const TightBindingParams& p) {
  p.validate();
  if (p.t_ab == 0.0 || p.t_ab_inter == 0.0) {
    throw ParameterError("tune_flat_band: t_ab and t_ab_inter must be nonzero (degenerate dispersion)");
  }
  if (p.t_ac == 0.0 && p.t_bc == 0.0) {
    throw ParameterError("tune_flat_band: t_ac = t_bc = 0 decouples the C sites; every t_cc is flat");
  }
  const double ta = p.t_aa, tb = p.t_bb, u = p.t_ac, w = p.t_bc, t = p.t_ab, tt = p.t_ab_inter;
  const double d = u * w / t;
  const double p2 = d;
  const double p1 = -d * (ta + tb) + w * w + u * u;
  const double p0 = d * ta * tb - ta * w * w - tb * u * u + 2.0 * t * u * w - d * (t * t + tt * tt);
  const QuadRoots q = quad_roots(p2, p1, p0);

  FlatBandTuning out;
  out.discriminant = q.discriminant;
  for (double a2 : q.roots) {
    FlatBandSolution s;
    s.a2 = a2;
    s.t_cc = a2 + d;
    s.a1 = a2 - (ta + tb + s.t_cc);
    s.a0_const = ta * tb + ta * s.t_cc + tb * s.t_cc - u * u - w * w - t * t - tt * tt + a2 * s.a1;
    s.a0_cos = -2.0 * t * tt;
    out.solutions.push_back(s);
  }
  const double centre = 0.5 * (ta + tb);
  std::stable_sort(out.solutions.begin(), out.solutions.end(), [&](const auto& x, const auto& y) {
    return std::abs(x.a2 - centre) < std::abs(y.a2 - centre);
  });
  return out;
}

/// Cell-resolved couplings of an open saw chain. Sites A_n, B_n, C_n; t_ab_inter[n] joins A_n
/// and B_{n-1} (unused for n = 0).
struct ChainProfile {
  std::vector<double> t_aa, t_bb, t_cc, t_ab, t_ab_inter, t_ac, t_bc;

  ChainProfile() = default;
  explicit ChainProfile(std::size_t n_cells)
      : t_aa(n_cells), t_bb(n_cells), t_cc(n_cells), t_ab(n_cells), t_ab_inter(n_cells), t_ac(n_cells),
        t_bc(n_cells) {}

  static ChainProfile uniform(const TightBindingParams& p, std::size_t n_cells) {
    ChainProfile c(n_cells);
    for (std::size_t n = 0; n < n_cells; ++n) {
      c.t_aa[n] = p.t_aa;
      c.t_bb[n] = p.t_bb;
      c.t_cc[n] = p.t_cc;
      c.t_ab[n] = p.t_ab;
      c.t_ab_inter[n] = p.t_ab_inter;
      c.t_ac[n] = p.t_ac;
      c.t_bc[n] = p.t_bc;
    }
    return c;
  }

  std::size_t n_cells() const noexcept { return t_aa.size(); }

  void validate() const {
    const std::size_t n = n_cells();
    for (const auto* v : {&t_aa, &t_bb, &t_cc, &t_ab, &t_ab_inter, &t_ac, &t_bc}) {
      if (v->size() != n) throw ParameterError("chain profile: arrays differ in length");
      for (double x : *v) {
        if (!std::isfinite(x)) throw ParameterError("chain profile: non-finite coupling");
      }
    }
  }
};

inline constexpr std::size_t kChainComponents = 3;

/// Open-boundary hopping matrix, site index 3n + {0: A, 1: B, 2: C}. Bandwidth 2.
inline BandedHermitian build_finite_chain(const ChainProfile& c) {
  c.validate();
  const std::size_t n = c.n_cells();
  if (n < 2) throw ParameterError("build_finite_chain: need at least 2 cells");
  BandedHermitian h(3 * n, 2);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t a = 3 * j, b = a + 1, cc = a + 2;
    h.set(a, a, c.t_aa[j]);
    h.set(b, b, c.t_bb[j]);
    h.set(cc, cc, c.t_cc[j]);
    h.set(b, a, c.t_ab[j]);
    h.set(cc, a, c.t_ac[j]);
    h.set(cc, b, c.t_bc[j]);
    if (j > 0) h.set(a, b - 3, c.t_ab_inter[j]);
  }
  return h;
}

struct SpectrumOptions {
  double target = 0.0;           // flat-band energy probed by the cluster count
  double cluster_tol = 1e-6;     // |E - target| below this counts as cluster
  double exclusion = 0.0;        // states with |E - target| < exclusion are kept out of gap edges
  double gap_center = 0.0;       // gap edges are searched on either side of this energy
  double edge_fraction = 0.10;   // outer fraction of cells (per end) defining the edge region
  double edge_mass = 0.5;        // mass in the edge region above which a state is edge-localized
  double flat_weight = 0.5;      // weight on the flat sublattice marking a flat-band state
  std::size_t components = 3;    // sites per cell
  std::size_t flat_component = 2;
};

struct StateInfo {
  double energy = 0.0;
  double ipr = 0.0;          // sum |psi_i|^4
  double edge_mass = 0.0;    // weight in the outer edge region
  double flat_weight = 0.0;  // weight on the flat sublattice
  bool edge = false;
  bool in_cluster = false;
};

struct SpectrumReport {
  std::vector<StateInfo> states;  // ascending energy
  std::size_t cluster_count = 0;
  std::size_t flat_state_count = 0;
  std::optional<double> gap_lower;  // largest bulk energy below the gap centre
  std::optional<double> gap_upper;  // smallest bulk energy above it
  double residual = 0.0;            // max eigenpair residual / ‖M‖

  std::vector<double> energies() const {
    std::vector<double> e;
    e.reserve(states.size());
    for (const auto& s : states) e.push_back(s.energy);
    return e;
  }

  /// Bulk (non-edge) eigenvalues strictly inside (lo, hi) and outside target ± exclusion.
  std::size_t count_bulk_in(double lo, double hi, double target, double exclusion) const {
    std::size_t n = 0;
    for (const auto& s : states) {
      if (!s.edge && s.energy > lo && s.energy < hi && std::abs(s.energy - target) >= exclusion) ++n;
    }
    return n;
  }
};

inline bool bulk_for_gap(const StateInfo& s, const SpectrumOptions& o) {
  return !s.edge && !s.in_cluster && std::abs(s.energy - o.target) >= o.exclusion;
}

/// Full spectrum of a chain-like banded matrix with localization tags.
inline SpectrumReport chain_spectrum(const BandedHermitian& m, const SpectrumOptions& o = {}) {
  const std::size_t dim = m.dimension();
  if (o.components == 0 || dim % o.components != 0 || o.flat_component >= o.components) {
    throw ParameterError("chain_spectrum: dimension is not a multiple of the cell size");
  }
  if (!(o.edge_fraction >= 0.0 && o.edge_fraction < 0.5)) {
    throw ParameterError("chain_spectrum: edge_fraction must lie in [0, 0.5)");
  }
  const std::size_t cells = dim / o.components;
  const auto outer = static_cast<std::size_t>(std::floor(o.edge_fraction * static_cast<double>(cells)));

  const BandedEigen es = eigh_banded(m, true);
  SpectrumReport r;
  r.residual = eigen_residual(m, es) / std::max(1.0, m.norm_inf());
  r.states.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    StateInfo& s = r.states[k];
    s.energy = es.values[k];
    for (std::size_t i = 0; i < dim; ++i) {
      const double p = std::norm(es.vectors[k][i]);
      const std::size_t cell = i / o.components;
      s.ipr += p * p;
      if (cell < outer || cell >= cells - outer) s.edge_mass += p;
      if (i % o.components == o.flat_component) s.flat_weight += p;
    }
    s.edge = s.edge_mass > o.edge_mass;
    s.in_cluster = std::abs(s.energy - o.target) < o.cluster_tol;
    if (s.in_cluster) ++r.cluster_count;
    if (s.flat_weight >= o.flat_weight) ++r.flat_state_count;
  }
  for (const auto& s : r.states) {
    if (!bulk_for_gap(s, o)) continue;
    if (s.energy < o.gap_center && (!r.gap_lower || s.energy > *r.gap_lower)) r.gap_lower = s.energy;
    if (s.energy > o.gap_center && (!r.gap_upper || s.energy < *r.gap_upper)) r.gap_upper = s.energy;
  }
  return r;
}

}  // namespace susychain
