#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "susychain/lattice.hpp"

using namespace susychain;

namespace {

TightBindingParams benchmark(double t_cc) {
  TightBindingParams p;
  p.t_ab = p.t_ab_inter = 1.0;
  p.t_ac = 0.2;
  p.t_bc = 0.01;
  p.t_cc = t_cc;
  return p;
}

TightBindingParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_real_distribution<double> hop(0.3, 2.0);
  TightBindingParams p;
  p.t_aa = u(rng);
  p.t_bb = u(rng);
  p.t_cc = u(rng);
  p.t_ab = hop(rng) * (rng() % 2 ? 1 : -1);
  p.t_ab_inter = hop(rng);
  p.t_ac = u(rng);
  p.t_bc = u(rng);
  p.a = 0.5 + std::uniform_real_distribution<double>(0, 1.5)(rng);
  return p;
}

// det(H - E) from the eigenvalues: independent of the cofactor expansion.
double det_from_spectrum(const TightBindingParams& p, double k, double e) {
  const auto es = eigh_small(bloch_hamiltonian(p, k));
  return (es.values[0] - e) * (es.values[1] - e) * (es.values[2] - e);
}

std::vector<double> uniform_k(double a, std::size_t n) {
  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i) k[i] = -std::numbers::pi / a + 2 * std::numbers::pi / a * i / (n - 1.0);
  return k;
}

}  // namespace

TEST(BlochHamiltonian, EntriesFollowTheSawChainLayout) {
  TightBindingParams p;
  p.t_ab = p.t_ab_inter = 1.0;
  EXPECT_NEAR(std::abs(bloch_hamiltonian(p, 0.0)(0, 1) - cplx(2.0, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(bloch_hamiltonian(p, std::numbers::pi)(0, 1)), 0.0, 1e-15);

  const auto h = bloch_hamiltonian(benchmark(1.0 / 500.0), 0.37);
  EXPECT_EQ(h(0, 2), cplx(0.2, 0.0));
  EXPECT_EQ(h(1, 2), cplx(0.01, 0.0));
  EXPECT_EQ(h(2, 2), cplx(0.002, 0.0));
  EXPECT_EQ(h(2, 0), std::conj(h(0, 2)));
  EXPECT_EQ(h(1, 0), std::conj(h(0, 1)));

  p.a = 2.0;
  const double k = 0.3;
  const cplx expected = 1.0 + std::exp(cplx(0.0, -k * 2.0));
  EXPECT_NEAR(std::abs(bloch_hamiltonian(p, k)(0, 1) - expected), 0.0, 1e-15);
}

TEST(BlochHamiltonian, HermitianAndPeriodicProperty) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const auto p = random_params(rng);
    const double k = std::uniform_real_distribution<double>(-10, 10)(rng);
    const auto h1 = bloch_hamiltonian(p, k);
    const auto h2 = bloch_hamiltonian(p, k + 2 * std::numbers::pi / p.a);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_EQ(h1(i, j), std::conj(h1(j, i)));
        EXPECT_LE(std::abs(h1(i, j) - h2(i, j)), 1e-14 * (1 + std::abs(h1(i, j))) * (1 + std::abs(k)));
      }
    }
  }
}

TEST(BlochHamiltonian, RejectsInvalidParams) {
  TightBindingParams p;
  p.a = 0.0;
  EXPECT_THROW(bloch_hamiltonian(p, 0.0), ParameterError);
  p.a = 1.0;
  p.t_ac = std::numeric_limits<double>::infinity();
  EXPECT_THROW(bloch_hamiltonian(p, 0.0), ParameterError);
  EXPECT_THROW(bloch_hamiltonian(TightBindingParams{}, std::nan("")), ParameterError);
}

TEST(BandStructure, DecoupledAbChainAnalytic) {
  TightBindingParams p;
  p.t_ab = p.t_ab_inter = 1.0;
  const auto bs = band_structure(p, default_k_grid());
  ASSERT_EQ(bs.k.size(), 513u);
  EXPECT_DOUBLE_EQ(bs.k.front(), -std::numbers::pi);
  EXPECT_DOUBLE_EQ(bs.k.back(), std::numbers::pi);
  for (std::size_t i = 0; i < bs.k.size(); ++i) {
    const double e = 2.0 * std::abs(std::cos(bs.k[i] / 2.0));
    EXPECT_NEAR(bs.bands[0][i], -e, 1e-14);
    EXPECT_NEAR(bs.bands[1][i], 0.0, 1e-14);
    EXPECT_NEAR(bs.bands[2][i], e, 1e-14);
  }
}

TEST(BandStructure, BenchmarkFlatAndDispersiveCases) {
  const auto right = band_structure(benchmark(1.0 / 500.0), default_k_grid());
  for (double e : right.bands[1]) EXPECT_NEAR(e, 0.0, 1e-10);
  EXPECT_TRUE(right.is_flat(1));
  EXPECT_FALSE(right.is_flat(0));
  EXPECT_FALSE(right.is_flat(2));

  const auto left = band_structure(benchmark(0.2), default_k_grid());
  for (std::size_t b = 0; b < 3; ++b) {
    EXPECT_GT(left.spread(b), 1e-3) << "band " << b;
    EXPECT_FALSE(left.is_flat(b));
  }
}

TEST(BandStructure, EigenvaluePerKAndOrdering) {
  std::mt19937_64 rng(5);
  const auto p = random_params(rng);
  const auto bs = band_structure(p, uniform_k(p.a, 65));
  for (std::size_t i = 0; i < bs.k.size(); ++i) {
    EXPECT_LE(bs.bands[0][i], bs.bands[1][i]);
    EXPECT_LE(bs.bands[1][i], bs.bands[2][i]);
    for (std::size_t b = 0; b < 3; ++b) {
      EXPECT_LE(std::abs(det_from_spectrum(p, bs.k[i], bs.bands[b][i])), 1e-12);
    }
  }
  EXPECT_THROW(band_structure(p, {}), ParameterError);
  EXPECT_THROW(band_structure(p, {4.0 * std::numbers::pi / p.a}), ParameterError);
}

TEST(BandStructure, GaugeShiftMovesEveryBand) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const auto p = random_params(rng);
    const double s = std::uniform_real_distribution<double>(-3, 3)(rng);
    const auto k = uniform_k(p.a, 33);
    const auto b0 = band_structure(p, k);
    const auto b1 = band_structure(p.shifted(s), k);
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t i = 0; i < k.size(); ++i) EXPECT_NEAR(b1.bands[b][i], b0.bands[b][i] + s, 1e-12);
  }
}

TEST(BandStructure, AdjacentJumpShrinksUnderRefinement) {
  std::mt19937_64 rng(12);
  const auto p = random_params(rng);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t n : {65u, 129u, 257u, 513u}) {
    const auto bs = band_structure(p, uniform_k(p.a, n));
    double jump = 0.0;
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t i = 1; i < n; ++i) jump = std::max(jump, std::abs(bs.bands[b][i] - bs.bands[b][i - 1]));
    EXPECT_LT(jump, prev);
    prev = jump;
  }
}

TEST(TuneFlatBand, BenchmarkTuning) {
  const auto tuning = tune_flat_band(benchmark(123.0));  // t_cc input ignored
  ASSERT_EQ(tuning.solutions.size(), 2u);
  const auto& s = tuning.solutions.front();
  EXPECT_NEAR(s.t_cc, 1.0 / 500.0, 1e-12);
  EXPECT_NEAR(s.a2, 0.0, 1e-12);
  // second root of 0.002 a2^2 + 0.0401 a2 = 0
  EXPECT_NEAR(tuning.solutions[1].a2, -20.05, 1e-10);
  EXPECT_NEAR(tuning.solutions[1].t_cc, -20.048, 1e-10);
}

TEST(TuneFlatBand, FactorizationMatchesSpectrumDeterminant) {
  // det(E - H) = (E - a2)(E^2 + a1 E + a0_const + a0_cos cos ka), checked at arbitrary E
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ue(-3, 3);
  for (int t = 0; t < 50; ++t) {
    auto p = random_params(rng);
    for (const auto& s : tune_flat_band(p).solutions) {
      auto q = p;
      q.t_cc = s.t_cc;
      for (int r = 0; r < 5; ++r) {
        const double k = ue(rng), e = ue(rng);
        const double a0 = s.a0_const + s.a0_cos * std::cos(k * q.a);
        const double lhs = -det_from_spectrum(q, k, e);
        const double rhs = (e - s.a2) * (e * e + s.a1 * e + a0);
        EXPECT_NEAR(lhs, rhs, 1e-9 * (1 + std::abs(lhs)));
      }
    }
  }
}

TEST(TuneFlatBand, RandomizedDeterminantSweep) {
  std::mt19937_64 rng(2024);
  int solutions = 0;
  for (int t = 0; t < 200; ++t) {
    auto p = random_params(rng);
    const auto tuning = tune_flat_band(p);
    EXPECT_GE(tuning.discriminant, 0.0);
    for (const auto& s : tuning.solutions) {
      ++solutions;
      EXPECT_NEAR(s.t_cc - s.a2, p.t_ac * p.t_bc / p.t_ab, 1e-12 * (1 + std::abs(s.t_cc)));
      auto q = p;
      q.t_cc = s.t_cc;
      double worst = 0.0;
      const double scale = std::pow(1.0 + std::abs(s.a2) + std::abs(p.t_ab) + std::abs(p.t_ab_inter) +
                                        std::abs(p.t_ac) + std::abs(p.t_bc) + std::abs(p.t_aa) + std::abs(p.t_bb) +
                                        std::abs(s.t_cc),
                                    3);
      for (double k : uniform_k(q.a, 256)) worst = std::max(worst, std::abs(det_from_spectrum(q, k, s.a2)));
      EXPECT_LE(worst, 1e-10 * scale);
      EXPECT_LE(flat_band_residual(q, s.a2, uniform_k(q.a, 256)), 1e-10);
    }
  }
  EXPECT_GT(solutions, 300);
}

TEST(TuneFlatBand, GaugeShift) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    const auto p = random_params(rng);
    const double s = std::uniform_real_distribution<double>(-2, 2)(rng);
    const auto a = tune_flat_band(p).solutions;
    const auto b = tune_flat_band(p.shifted(s)).solutions;
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(b[i].a2, a[i].a2 + s, 1e-9 * (1 + std::abs(a[i].a2)));
      EXPECT_NEAR(b[i].t_cc, a[i].t_cc + s, 1e-9 * (1 + std::abs(a[i].t_cc)));
    }
  }
}

TEST(TuneFlatBand, DegenerateAndSingleRootCases) {
  auto p = benchmark(0.0);
  p.t_ab = 0.0;
  EXPECT_THROW(tune_flat_band(p), ParameterError);
  p = benchmark(0.0);
  p.t_ab_inter = 0.0;
  EXPECT_THROW(tune_flat_band(p), ParameterError);
  p = benchmark(0.0);
  p.t_ac = p.t_bc = 0.0;
  EXPECT_THROW(tune_flat_band(p), ParameterError);

  // one of t_ac, t_bc zero: the quadratic degenerates to a linear equation
  p = benchmark(0.0);
  p.t_bc = 0.0;
  p.t_aa = 0.4;
  p.t_bb = -0.3;
  const auto tuning = tune_flat_band(p);
  ASSERT_EQ(tuning.solutions.size(), 1u);
  EXPECT_NEAR(tuning.solutions[0].a2, -0.3, 1e-15);  // (t_aa t_bc^2 + t_bb t_ac^2)/(t_ac^2 + t_bc^2)
  EXPECT_NEAR(tuning.solutions[0].t_cc, -0.3, 1e-15);
}

TEST(TuneFlatBand, DiscriminantIsASumOfSquares) {
  // t_ab^2 D = (t_ab (t_ac^2 - t_bc^2) - (t_aa - t_bb) t_ac t_bc)^2 + 4 t̃^2 t_ac^2 t_bc^2, so no real
  // input can produce the empty-root branch.
  std::mt19937_64 rng(17);
  for (int t = 0; t < 200; ++t) {
    const auto p = random_params(rng);
    const double sq = p.t_ab * (p.t_ac * p.t_ac - p.t_bc * p.t_bc) - (p.t_aa - p.t_bb) * p.t_ac * p.t_bc;
    const double expected =
        (sq * sq + 4 * p.t_ab_inter * p.t_ab_inter * p.t_ac * p.t_ac * p.t_bc * p.t_bc) / (p.t_ab * p.t_ab);
    EXPECT_NEAR(tune_flat_band(p).discriminant, expected, 1e-12 * (1 + expected));
  }
}

TEST(DiracPoint, GapClosesAtZoneCorner) {
  TightBindingParams p;
  p.t_ab = p.t_ab_inter = 0.8;
  const auto bs = band_structure(p, {std::numbers::pi / p.a});
  EXPECT_LE(bs.bands[2][0] - bs.bands[0][0], 1e-12);
}

TEST(FiniteChain, HandWrittenTwoCellMatrix) {
  ChainProfile c(2);
  c.t_aa = {0.1, 0.2};
  c.t_bb = {-0.1, -0.2};
  c.t_cc = {0.5, 0.6};
  c.t_ab = {1.1, 1.2};
  c.t_ab_inter = {9.0, 0.9};
  c.t_ac = {0.3, 0.4};
  c.t_bc = {0.05, 0.06};
  const auto h = build_finite_chain(c);
  // sites A0 B0 C0 A1 B1 C1
  const double expected[6][6] = {
      {0.1, 1.1, 0.3, 0, 0, 0},      {1.1, -0.1, 0.05, 0.9, 0, 0}, {0.3, 0.05, 0.5, 0, 0, 0},
      {0, 0.9, 0, 0.2, 1.2, 0.4},    {0, 0, 0, 1.2, -0.2, 0.06},   {0, 0, 0, 0.4, 0.06, 0.6},
  };
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(h(i, j), cplx(expected[i][j], 0.0)) << i << "," << j;
  EXPECT_THROW(build_finite_chain(ChainProfile(1)), ParameterError);
  c.t_ac.pop_back();
  EXPECT_THROW(build_finite_chain(c), ParameterError);
}

TEST(FiniteChain, UniformFlatBandSurvivesOpenEnds) {
  const std::size_t n = 200;
  const auto h = build_finite_chain(ChainProfile::uniform(benchmark(1.0 / 500.0), n));
  const auto r = chain_spectrum(h);
  EXPECT_GE(r.cluster_count, static_cast<std::size_t>(0.9 * n));
  EXPECT_LE(r.residual, 1e-12);
}

TEST(FiniteChain, DecoupledCSitesSplitOff) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2, 2);
  const std::size_t n = 40;
  ChainProfile c(n);
  BandedHermitian ab(2 * n, 1);
  std::vector<double> expected;
  for (std::size_t j = 0; j < n; ++j) {
    c.t_aa[j] = u(rng);
    c.t_bb[j] = u(rng);
    c.t_cc[j] = u(rng);
    c.t_ab[j] = u(rng);
    c.t_ab_inter[j] = u(rng);
    expected.push_back(c.t_cc[j]);
    ab.set(2 * j, 2 * j, c.t_aa[j]);
    ab.set(2 * j + 1, 2 * j + 1, c.t_bb[j]);
    ab.set(2 * j + 1, 2 * j, c.t_ab[j]);
    if (j > 0) ab.set(2 * j, 2 * j - 1, c.t_ab_inter[j]);
  }
  for (double e : eigh_banded(ab).values) expected.push_back(e);
  std::sort(expected.begin(), expected.end());
  const auto got = eigh_banded(build_finite_chain(c)).values;
  ASSERT_EQ(got.size(), expected.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-12);
}

TEST(FiniteChain, DensityApproachesBlochBands) {
  TightBindingParams p;
  p.t_aa = 0.3;
  p.t_bb = -0.2;
  p.t_cc = 0.5;
  p.t_ab = 1.0;
  p.t_ab_inter = 0.7;
  p.t_ac = 0.4;
  p.t_bc = 0.25;
  const auto bloch = band_structure(p, uniform_k(1.0, 20001));
  double lo = 1e9, hi = -1e9;
  for (const auto& b : bloch.bands)
    for (double e : b) lo = std::min(lo, e), hi = std::max(hi, e);
  const int bins = 30;
  auto histogram = [&](const std::vector<double>& es) {
    std::vector<double> h(bins, 0.0);
    for (double e : es) {
      const int b = std::clamp(static_cast<int>((e - lo) / (hi - lo) * bins), 0, bins - 1);
      h[b] += 1.0 / es.size();
    }
    return h;
  };
  std::vector<double> all;
  for (const auto& b : bloch.bands) all.insert(all.end(), b.begin(), b.end());
  const auto ref = histogram(all);
  std::vector<double> dist;
  for (std::size_t n : {100u, 200u, 400u}) {
    const auto h = histogram(eigh_banded(build_finite_chain(ChainProfile::uniform(p, n))).values);
    double d = 0.0;
    for (int b = 0; b < bins; ++b) d += std::abs(h[b] - ref[b]);
    dist.push_back(d);
  }
  EXPECT_LT(dist[1], dist[0]);
  EXPECT_LT(dist[2], dist[1]);
}

TEST(ChainSpectrum, DecoupledClusterCountsEveryCSite) {
  TightBindingParams p;
  p.t_ab = 1.0;
  p.t_ab_inter = 0.5;
  p.t_cc = 0.25;
  const std::size_t n = 60;
  SpectrumOptions o;
  o.target = 0.25;
  const auto r = chain_spectrum(build_finite_chain(ChainProfile::uniform(p, n)), o);
  EXPECT_EQ(r.cluster_count, n);
  EXPECT_EQ(r.flat_state_count, n);
}

TEST(ChainSpectrum, SshGapEdges) {
  // trivial dimerization (intra > inter): no end states, gap edges at ±|t_ab - t̃|
  TightBindingParams p;
  p.t_ab = 1.0;
  p.t_ab_inter = 0.6;
  p.t_cc = 5.0;
  const auto r = chain_spectrum(build_finite_chain(ChainProfile::uniform(p, 200)));
  ASSERT_TRUE(r.gap_lower && r.gap_upper);
  EXPECT_NEAR(*r.gap_lower, -0.4, 1e-3);
  EXPECT_NEAR(*r.gap_upper, 0.4, 1e-3);

  // topological dimerization: two end states near zero, tagged and kept out of the gap edges
  std::swap(p.t_ab, p.t_ab_inter);
  const auto t = chain_spectrum(build_finite_chain(ChainProfile::uniform(p, 200)));
  std::size_t edge_states = 0;
  for (const auto& s : t.states) {
    if (std::abs(s.energy) < 0.1) {
      EXPECT_TRUE(s.edge);
      EXPECT_GT(s.ipr, 0.05);
      ++edge_states;
    }
  }
  EXPECT_EQ(edge_states, 2u);
  EXPECT_NEAR(*t.gap_lower, -0.4, 1e-3);
  EXPECT_NEAR(*t.gap_upper, 0.4, 1e-3);
}

TEST(ChainSpectrum, RejectsMismatchedCellSize) {
  BandedHermitian m(7, 1);
  EXPECT_THROW(chain_spectrum(m), ParameterError);
}
