#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "opgrowth/models.hpp"
#include "oracles.hpp"

using namespace opgrowth;
using std::numbers::pi;

TEST(StructureSpec, EnvelopesAndValidation) {
  EXPECT_DOUBLE_EQ(StructureSpec::flat().envelope(7.0), 1.0);
  EXPECT_NEAR(StructureSpec::exponential(0.5).envelope(2.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(StructureSpec::gaussian(2.0).envelope(2.0), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(StructureSpec::power(3.0).envelope(1.0), 0.125, 1e-15);
  EXPECT_NEAR(StructureSpec::gaussian(0.01).log_envelope(100.0), -5e7, 1e-6);
  EXPECT_THROW(StructureSpec::exponential(-1.0).validate(), Error);
  EXPECT_THROW(StructureSpec::gaussian(0.0).validate(), Error);
}

TEST(Harmonic, PositionElementsAndSpectrum) {
  const double m = 2.0, w = 0.7;
  ModelData h = harmonic_position(6, m, w);
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(h.spectrum[k], w * (k + 0.5), 1e-15);
  for (int k = 0; k + 1 < 6; ++k) {
    EXPECT_NEAR(h.op(k + 1, k), std::sqrt((k + 1) / (2.0 * m * w)), 1e-15);
    EXPECT_EQ(h.op(k, k + 1), h.op(k + 1, k));
  }
  EXPECT_EQ(h.op(0, 2), 0.0);
}

TEST(Harmonic, SquareMatchesLadderAlgebra) {
  // x^2 = (a + a^dag)^2 / 2 for m = w = 1
  const EigenbasisOperator x2 = harmonic_power(8, 2);
  for (int k = 0; k < 8; ++k) {
    EXPECT_NEAR(x2(k, k), (2.0 * k + 1.0) / 2.0, 1e-13);
    if (k + 2 < 8) {
      EXPECT_NEAR(x2(k, k + 2), std::sqrt((k + 1.0) * (k + 2.0)) / 2.0, 1e-13);
    }
    if (k + 1 < 8) {
      EXPECT_EQ(x2(k, k + 1), 0.0);
    }
  }
}

TEST(Harmonic, PowerBlockIsUntruncated) {
  // the top-left block of x^q must not depend on how far the basis is extended
  const int q = 5;
  const EigenbasisOperator small = harmonic_power(10, q);
  const EigenbasisOperator big = harmonic_power(30, q);
  EXPECT_LT((small.elements() - big.elements().topLeftCorner(10, 10)).norm(), 1e-9 * small.elements().norm());
}

TEST(UqBinomial, EqualsDirectMatrixPowerExactly) {
  for (int q = 1; q <= 12; ++q) {
    const int dim = 15, big = dim + q;
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(big, big);
    for (int i = 0; i + 1 < big; ++i) u(i, i + 1) = u(i + 1, i) = 1.0;
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(big, big);
    for (int i = 0; i < q; ++i) p = p * u;
    const EigenbasisOperator b = uq_binomial(dim, q);
    for (int l = 0; l < dim; ++l)
      for (int k = 0; k < dim; ++k) ASSERT_EQ(b(l, k), p(l, k)) << "q=" << q << " l=" << l << " k=" << k;
  }
}

TEST(UqBinomial, StirlingEstimateInBulk) {
  const int q = 100;
  for (long d = 0; d <= 10; d += 2) {
    const double exact = uq_binomial_element(q, 300, 300 + d);
    EXPECT_NEAR(gaussian_decay_estimate(q, 300, 300 + d) / exact, 1.0, 0.02) << d;
    // independent: central binomial from lgamma
    const double lg = std::lgamma(q + 1.0) - std::lgamma(q / 2.0 + d / 2.0 + 1.0) - std::lgamma(q / 2.0 - d / 2.0 + 1.0);
    EXPECT_NEAR(std::log(exact), lg, 1e-10);
  }
  EXPECT_EQ(uq_binomial_element(q, 300, 301), 0.0);
}

TEST(Box1d, ElementMatchesNumericalOverlap) {
  const double len = 1.3;
  ModelData b = box_position_1d(4, len);
  for (int n = 1; n <= 4; ++n)
    for (int m = n + 1; m <= 4; ++m) {
      const double overlap = oracle::simpson(
          [&](double x) {
            return 2.0 / len * std::sin(n * pi * x / len) * (x - len / 2.0) * std::sin(m * pi * x / len);
          },
          0.0, len);
      EXPECT_NEAR(std::abs(b.op(n - 1, m - 1)), std::abs(overlap), 1e-12);
    }
  EXPECT_NEAR(b.op(0, 1), 16.0 * len / (9.0 * pi * pi), 1e-15);
  EXPECT_NEAR(b.spectrum[2], 9.0 * pi * pi / (2.0 * len * len), 1e-12);
}

TEST(Box2d, SortedProductBasisAndDegeneracyWarning) {
  Box2dData sq = box_position_2d({4, 4}, {1.0, 1.0});
  EXPECT_FALSE(sq.warnings.empty());
  Box2dData r = box_position_2d({5, 4}, {1.0, pi / 3.0});
  EXPECT_TRUE(r.warnings.empty());
  ModelData one = box_position_1d(5, 1.0);
  for (std::size_t i = 0; i < r.labels.size(); ++i)
    for (std::size_t j = 0; j < r.labels.size(); ++j) {
      const auto [ax, ay] = r.labels[i];
      const auto [bx, by] = r.labels[j];
      const double expect = ay == by ? one.op(ax - 1, bx - 1) : 0.0;
      EXPECT_NEAR(r.op(i, j), expect, 1e-15);
    }
  for (std::size_t i = 1; i < r.labels.size(); ++i) EXPECT_LE(r.spectrum[i - 1], r.spectrum[i]);
}

TEST(Anharmonic, GridLevelsMatchShootingOracle) {
  AnharmonicConfig cfg;
  cfg.n_states = 20;
  cfg.grid_points = 3000;
  AnharmonicData d = anharmonic_solve(cfg);
  const double e0 = oracle::shooting_level(4, 1.0, 0, 0.3, 1.0, 4.0);
  const double e1 = oracle::shooting_level(4, 1.0, 1, 1.5, 3.0, 4.0);
  EXPECT_NEAR(d.spectrum[0], e0, 1e-5 * e0);
  EXPECT_NEAR(d.spectrum[1], e1, 1e-5 * e1);
  EXPECT_NEAR(d.spectrum[1] / d.spectrum[0], e1 / e0, 1e-5);
  EXPECT_LT(d.boundary_amplitude, cfg.boundary_tolerance);
  // parity selection: x couples only opposite parities
  EXPECT_LT(std::abs(d.op(0, 2)), 1e-10);
  EXPECT_GT(std::abs(d.op(0, 1)), 0.1);
}

TEST(Anharmonic, BoundaryLeakIsReported) {
  AnharmonicConfig cfg;
  cfg.n_states = 10;
  cfg.grid_points = 500;
  cfg.grid_halfwidth = 1.2;
  try {
    anharmonic_solve(cfg);
    FAIL() << "expected boundary_leak";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::boundary_leak);
  }
}

TEST(Anharmonic, FloorMaskFlagsTinyElements) {
  AnharmonicConfig cfg;
  cfg.n_states = 40;
  AnharmonicData d = anharmonic_solve(cfg);
  ASSERT_TRUE(d.op.below_floor().has_value());
  EXPECT_GT(d.op.below_floor_count(), 0u);
  const double cut = cfg.floor_rel * d.op.elements().cwiseAbs().maxCoeff();
  for (Eigen::Index l = 0; l < 40; ++l)
    for (Eigen::Index k = 0; k < 40; ++k)
      if ((*d.op.below_floor())(l, k)) {
        EXPECT_LT(std::abs(d.op(l, k)), cut);
      }
}

TEST(BohrSommerfeld, WithinTwoPercentOfGrid) {
  AnharmonicConfig cfg;
  cfg.n_states = 32;
  AnharmonicData d = anharmonic_solve(cfg);
  for (int n = 5; n <= 30; ++n)
    EXPECT_NEAR(bohr_sommerfeld_energy(4, n) / d.spectrum[n], 1.0, 0.02) << n;
  // V = x^2 with m = 1 is an oscillator of frequency sqrt(2); BS is exact there
  for (int n = 0; n < 5; ++n) EXPECT_NEAR(bohr_sommerfeld_energy(2, n), std::sqrt(2.0) * (n + 0.5), 1e-12);
  EXPECT_NEAR(bohr_sommerfeld_g(2), pi / 4.0, 1e-15);
}

TEST(Semiclassical, TunnellingIntegralTwoRoutes) {
  for (int p : {4, 6, 10})
    for (double u : {0.5, 3.0, 40.0})
      EXPECT_NEAR(tunnelling_integrand_quadrature(p, u, 1.3) / tunnelling_integrand(p, u, 1.3), 1.0, 1e-8);
}

TEST(Semiclassical, LogElementClosedFormAgreesWithNestedQuadrature) {
  for (int p : {4, 6, 8})
    for (auto [n, m] : {std::pair{0, 1}, {3, 8}, {10, 25}}) {
      const SemiclassicalLog s = semiclassical_log_element(p, n, m);
      EXPECT_LT(s.relative_difference(), 1e-6) << p << " " << n << " " << m;
      EXPECT_NEAR(s.closed_form, semiclassical_rate(p) * std::abs(n - m), 1e-10 * s.closed_form);
    }
  try {
    semiclassical_log_element(2, 0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::pole);
  }
}

TEST(Semiclassical, RateDecreasesTowardsZero) {
  double prev = semiclassical_rate(4);
  for (int p = 6; p <= 40; p += 2) {
    const double j = semiclassical_rate(p);
    EXPECT_LT(j, prev);
    prev = j;
  }
  EXPECT_LT(semiclassical_rate(400), 0.1);
  EXPECT_DOUBLE_EQ(semiclassical_rate(6, 1.0), semiclassical_rate(6, 3.0));
}

TEST(Semiclassical, OperatorCopiesExactNearestNeighbours) {
  AnharmonicConfig cfg;
  cfg.n_states = 20;
  AnharmonicData exact = anharmonic_solve(cfg);
  ModelData s = semiclassical_operator(4, 20, 1.0, 1.0, &exact.op);
  for (int k = 0; k + 1 < 20; ++k) EXPECT_EQ(s.op(k, k + 1), exact.op(k, k + 1));
  ModelData plain = semiclassical_operator(4, 20, 1.0, 2.0);
  EXPECT_NEAR(plain.op(2, 5), 2.0 * std::exp(-3.0 * semiclassical_rate(4)), 1e-14);
  EXPECT_EQ(plain.op(2, 4), 0.0);
}

TEST(RandomEnsemble, DeterministicSymmetricAndCorrectlyScaled) {
  const auto spec = StructureSpec::exponential(0.05);
  ModelData a = random_ensemble(300, spec, 50.0, 7);
  ModelData b = random_ensemble(300, spec, 50.0, 7);
  ModelData c = random_ensemble(300, spec, 50.0, 8);
  EXPECT_EQ((a.op.elements() - b.op.elements()).norm(), 0.0);
  EXPECT_GT((a.op.elements() - c.op.elements()).norm(), 0.0);
  EXPECT_EQ((a.op.elements() - a.op.elements().transpose()).norm(), 0.0);
  EXPECT_NEAR(a.spectrum.top(), 50.0, 1e-12);
  double s = 0.0;
  std::size_t n = 0;
  for (int l = 0; l < 300; ++l)
    for (int k = l + 1; k < 300; ++k) {
      const double f = spec.envelope(a.spectrum[k] - a.spectrum[l]);
      s += a.op(l, k) * a.op(l, k) * 300.0 / (f * f);
      ++n;
    }
  EXPECT_NEAR(s / n, 1.0, 0.02);
}
