#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "susychain/continuum.hpp"

using namespace susychain;

namespace {

TightBindingParams benchmark() {
  TightBindingParams p;
  p.t_ab = p.t_ab_inter = 1.0;
  p.t_ac = 0.2;
  p.t_bc = 0.01;
  p.t_cc = 1.0 / 500.0;
  return p;
}

DiracOperatorSpec constant_operator(const PotentialPoint& pt, double v, double lambda) {
  DiracOperatorSpec s;
  const Mat3c m = potential_matrix(pt, v, lambda);
  s.potential = [m](double) { return m; };
  return s;
}

}  // namespace

TEST(PotentialMatrix, BlockLayoutIsHermitian) {
  const Mat3c m = potential_matrix({0.3, -0.2, 0.7, 0.1}, 0.05, -0.4);
  EXPECT_EQ(hermiticity_defect(m), 0.0);
  EXPECT_EQ(m(0, 0), cplx(0.35, 0));
  EXPECT_EQ(m(1, 1), cplx(-0.25, 0));
  EXPECT_EQ(m(0, 1), cplx(0, 0.2));
  EXPECT_EQ(m(0, 2), cplx(0, -0.7));
  EXPECT_EQ(m(1, 2), cplx(0.1, 0));
  EXPECT_EQ(m(2, 2), cplx(-0.4, 0));
}

TEST(ContinuumLimit, Examples) {
  TightBindingParams p;
  p.t_ab = p.t_ab_inter = 0.9;
  EXPECT_EQ(continuum_limit(p).components.v12, 0.0);

  const auto c = continuum_limit(benchmark());
  EXPECT_EQ(c.components.v13, 0.2);
  EXPECT_EQ(c.components.v23, 0.01);
  EXPECT_EQ(c.lambda, 1.0 / 500.0);
  EXPECT_EQ(c.kinetic_scale, 1.0);

  TightBindingParams free;
  free.t_ab_inter = 1.0;
  const auto f = continuum_limit(free);
  EXPECT_EQ(f.spec.potential(3.0).max_abs(), 1.0);  // only the -i v12 = i entries of t_ab - t̃ = -1
  free.t_ab = 1.0;
  EXPECT_EQ(continuum_limit(free).spec.potential(-2.0).max_abs(), 0.0);

  TightBindingParams bad;
  EXPECT_THROW(continuum_limit(bad), ParameterError);
}

TEST(ContinuumLimit, DiagonalCarriesOnSiteEnergies) {
  TightBindingParams p = benchmark();
  p.t_aa = 0.3;
  p.t_bb = -0.1;
  const auto c = continuum_limit(p);
  const Mat3c m = c.spec.potential(0.0);
  EXPECT_DOUBLE_EQ(m(0, 0).real(), 0.3);
  EXPECT_DOUBLE_EQ(m(1, 1).real(), -0.1);
  EXPECT_DOUBLE_EQ(m(2, 2).real(), 0.002);
}

TEST(ContinuumLimit, SymbolMatchesBlochNearZoneCorner) {
  // eigenvalues of H(pi/a + q) and of the symbol at k = t̃ a q agree up to O(q^2)
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int t = 0; t < 20; ++t) {
    TightBindingParams p;
    p.t_aa = u(rng);
    p.t_bb = u(rng);
    p.t_cc = u(rng);
    p.t_ab_inter = 1.0 + u(rng);
    p.t_ab = p.t_ab_inter + u(rng);
    p.t_ac = u(rng);
    p.t_bc = u(rng);
    p.a = 1.0 + u(rng);
    const auto c = continuum_limit(p);
    double prev = 0.0;
    for (double q : {0.0, 0.02, 0.01}) {
      const auto bloch = eigh_small(bloch_hamiltonian(p, std::numbers::pi / p.a + q)).values;
      Mat3c symbol = c.spec.potential(0.0);
      symbol(0, 1) += c.kinetic_scale * q;
      symbol(1, 0) += c.kinetic_scale * q;
      const auto sym = eigh_small(HermitianMatrix(symbol)).values;
      double diff = 0.0;
      for (int j = 0; j < 3; ++j) diff = std::max(diff, std::abs(sym[j] - bloch[j]));
      if (q == 0.0) {
        EXPECT_LE(diff, 1e-14);
      } else if (q == 0.02) {
        prev = diff;
        EXPECT_LE(diff, 2.0 * q * q * (1 + p.t_ab_inter) * p.a * p.a);
      } else {
        EXPECT_LE(diff, 0.3 * prev + 1e-14);  // ~ quadratic decay
      }
    }
  }
}

TEST(SymbolDispersion, Examples) {
  const auto e = symbol_dispersion({}, 1.0);
  EXPECT_NEAR(e[0], -1.0, 1e-15);
  EXPECT_NEAR(e[1], 0.0, 1e-15);
  EXPECT_NEAR(e[2], 1.0, 1e-15);

  const AsymptoticCell cell{0.3, -0.4, 0.0, 0.0, 0.1};
  for (double k : {0.0, 0.5, 2.0}) {
    const double r = std::sqrt(k * k + 0.25);
    const auto s = symbol_dispersion(cell, k);
    EXPECT_NEAR(s[0], -r, 1e-14);
    EXPECT_NEAR(s[1], 0.1, 1e-14);
    EXPECT_NEAR(s[2], r, 1e-14);
  }
}

TEST(SymbolDispersion, EvenInMomentumForDecoupledCells) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 50; ++t) {
    const AsymptoticCell c{u(rng), u(rng), 0.0, 0.0, u(rng)};
    const double k = 3 * u(rng);
    const auto a = symbol_dispersion(c, k), b = symbol_dispersion(c, -k);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(a[j], b[j], 1e-14);
  }
}

TEST(ThresholdScan, MatchesFineMomentumScan) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 20; ++t) {
    const AsymptoticCell c{u(rng), u(rng), 0.0, 0.0, u(rng)};
    const auto th = threshold_scan(c);
    double best = std::numeric_limits<double>::infinity();
    for (int i = -2000; i <= 2000; ++i) {
      const auto s = symbol_dispersion(c, i * 1e-3);
      best = std::min({best, std::abs(s[0]), std::abs(s[2])});
    }
    EXPECT_NEAR(th.upper, best, 1e-10);
    EXPECT_NEAR(th.lower, -best, 1e-10);
    EXPECT_EQ(th.flat, c.lambda);
  }
  const auto zero = threshold_scan({});
  EXPECT_EQ(zero.lower, 0.0);
  EXPECT_EQ(zero.upper, 0.0);
  EXPECT_THROW(threshold_scan({0.1, 0.1, 0.01, 0.0, 0.0}), ParameterError);
}

TEST(Discretize, KineticStencilIsExactlyHermitian) {
  const Grid g(-1.0, 1.0, 11);
  const auto h = discretize(constant_operator({0.1, 0.2, 0.3, 0.4}, 0.0, 0.5), g);
  EXPECT_EQ(h.bandwidth(), 4u);
  const cplx hop(0.0, -1.0 / (2.0 * g.h()));
  for (std::size_t j = 0; j + 1 < g.size(); ++j) {
    EXPECT_EQ(h(3 * j, 3 * (j + 1) + 1), hop);
    EXPECT_EQ(h(3 * j + 1, 3 * (j + 1)), hop);
    EXPECT_EQ(h(3 * (j + 1) + 1, 3 * j), std::conj(hop));
  }
  for (std::size_t i = 0; i < 33; ++i)
    for (std::size_t j = 0; j < 33; ++j) EXPECT_EQ(h(i, j), std::conj(h(j, i)));
}

TEST(Discretize, FreeSpectrumIsChiral) {
  const auto es = eigh_banded(discretize(constant_operator({}, 0.0, 0.0), Grid::symmetric(20.0, 401))).values;
  const std::size_t n = es.size();
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(es[i], -es[n - 1 - i], 1e-10);
  EXPECT_GT(es.back(), 0.9 / Grid::symmetric(20.0, 401).h());
}

TEST(Discretize, ConstantGappedCellLeavesGapEmpty) {
  const PotentialPoint pt{-0.099, 0.02, 0.0, 0.0};
  const double lambda = 0.01;
  const double edge = std::hypot(pt.v11, pt.v12);
  const Grid g = Grid::symmetric(60.0, 1201);
  const double delta = 3.0 * std::numbers::pi / (g.x_max() - g.x_min());
  const auto es = eigh_banded(discretize(constant_operator(pt, 0.0, lambda), g)).values;
  std::size_t cluster = 0, stray = 0;
  for (double e : es) {
    if (std::abs(e - lambda) < 1e-12) {
      ++cluster;
    } else if (std::abs(e) < edge - delta) {
      ++stray;
    }
  }
  EXPECT_EQ(cluster, g.size());
  EXPECT_EQ(stray, 0u);
}

TEST(Discretize, DensityConvergesToSymbolBands) {
  // constant decoupled cell: the low-energy spectrum of the finite-difference operator approaches
  // the continuum density E / sqrt(E^2 - E0^2) as h shrinks (box fixed)
  const PotentialPoint pt{0.2, 0.0, 0.0, 0.0};
  const double e0 = 0.2, emax = 0.8;
  const int bins = 12;
  std::vector<double> ref(bins);
  {
    // expected fraction per bin from k(E) = sqrt(E^2 - e0^2)
    auto k = [&](double e) { return std::sqrt(std::max(0.0, e * e - e0 * e0)); };
    for (int b = 0; b < bins; ++b) {
      const double lo = e0 + (emax - e0) * b / bins, hi = e0 + (emax - e0) * (b + 1) / bins;
      ref[b] = (k(hi) - k(lo)) / k(emax);
    }
  }
  std::vector<double> dist;
  for (std::size_t n : {301u, 601u, 1201u}) {
    const auto es = eigh_banded(discretize(constant_operator(pt, 0.0, 5.0), Grid::symmetric(150.0, n))).values;
    std::vector<double> hist(bins, 0.0);
    double total = 0.0;
    for (double e : es) {
      if (e > e0 && e < emax) {
        hist[std::min(bins - 1, static_cast<int>((e - e0) / (emax - e0) * bins))] += 1.0;
        total += 1.0;
      }
    }
    double d = 0.0;
    for (int b = 0; b < bins; ++b) d += std::abs(hist[b] / total - ref[b]);
    dist.push_back(d);
  }
  EXPECT_LT(dist[1], dist[0]);
  EXPECT_LT(dist[2], dist[1]);
}

TEST(Discretize, RejectsSingularSampleNamingX) {
  DiracOperatorSpec s;
  s.potential = [](double x) {
    Mat3c m;
    m(0, 0) = x > 0.49 && x < 0.51 ? std::numeric_limits<double>::infinity() : 0.0;
    return m;
  };
  try {
    discretize(s, Grid(0.0, 1.0, 11));
    FAIL() << "expected SingularError";
  } catch (const SingularError& e) {
    EXPECT_NEAR(e.x(), 0.5, 1e-12);
  }
}

TEST(StaggeredFraction, SmoothAndAlternatingLimits) {
  std::vector<cplx> smooth(30), alt(30);
  for (std::size_t i = 0; i < 30; ++i) {
    smooth[i] = 1.0;
    alt[i] = (i / 3) % 2 ? -1.0 : 1.0;
  }
  EXPECT_NEAR(staggered_fraction(smooth), 0.0, 1e-15);
  EXPECT_NEAR(staggered_fraction(alt), 1.0, 1e-15);
}
