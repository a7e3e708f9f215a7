#include <gtest/gtest.h>

#include <cmath>

#include "vcdim/rng.hpp"
#include "vcdim/vcbound.hpp"

using namespace vcdim;

namespace {

// Frozen high-precision reference values (30-digit evaluation).
constexpr double kPhi4_100 = 0.443261683678079536;
constexpr double kPhi10_100 = 0.632118048591716055;
constexpr double kLegacy10_100 = 0.194024327155046050;
constexpr double kLegacy1_1 = 0.721601153634176989;

XiCurve synthesize(std::size_t h, double c, const std::vector<std::size_t>& ns) {
  XiCurve curve;
  for (auto n : ns) curve.points.push_back({n, phi(h, n, c), 0.0});
  return curve;
}

}  // namespace

TEST(Phi, ReferenceValues) {
  EXPECT_NEAR(phi(4, 100, 1.0), kPhi4_100, 1e-6 * kPhi4_100);
  EXPECT_NEAR(phi(10, 100, 1.0), kPhi10_100, 1e-12);
  EXPECT_NEAR(phi(4, 100, 1.0), 0.4433, 1e-4);
  EXPECT_EQ(phi(4, 100, 0.0), 0.0);
}

TEST(Phi, LinearInC) {
  auto rng = substream(5, {});
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng.below(1000);
    const std::size_t h = 1 + rng.below(n);
    const double c = rng.uniform() * 10;
    EXPECT_NEAR(phi(h, n, c), c * phi(h, n, 1.0), 1e-12 * std::max(1.0, c));
  }
}

TEST(Phi, DomainErrors) {
  EXPECT_THROW(phi(0, 10, 1.0), Error);
  EXPECT_THROW(phi(1, 0, 1.0), Error);
  EXPECT_NO_THROW(phi(54, 10, 1.0));   // 2*10*e = 54.37
  EXPECT_THROW(phi(55, 10, 1.0), Error);
}

TEST(Phi, IncreasingInHDecreasingInN) {
  auto rng = substream(17, {});
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(2000);
    const std::size_t h = 1 + rng.below(2 * n - 2);
    ASSERT_LT(phi(h, n, 1.0), phi(h + 1, n, 1.0)) << h << ' ' << n;
    const std::size_t n0 = h / 2 + 1;
    const std::size_t m = n0 + rng.below(5000);
    ASSERT_GT(phi(h, m, 1.0), phi(h, m + 1, 1.0)) << h << ' ' << m;
  }
}

TEST(LegacyPhi, ReferenceValuesAndBranches) {
  EXPECT_NEAR(phi_vapnik_legacy(10, 100), kLegacy10_100, 1e-12);
  EXPECT_NEAR(phi_vapnik_legacy(1, 1), kLegacy1_1, 1e-12);
  EXPECT_EQ(phi_vapnik_legacy(100, 50), 1.0);
  EXPECT_EQ(phi_vapnik_legacy(7, 2), 1.0);
  EXPECT_THROW(phi_vapnik_legacy(0, 3), Error);
}

TEST(LegacyPhi, ContinuousAtHalf) {
  // Second branch evaluated at n/h = 0.5 exactly.
  using K = LegacyBoundConstants;
  const double lg = std::log(1.0) + 1.0;
  const double s = 0.5 - K::k;
  const double second = K::a * lg / s * (std::sqrt(1.0 + K::b * s / lg) + 1.0);
  EXPECT_NEAR(second, 1.0, 1e-3);
  EXPECT_NEAR(phi_vapnik_legacy(2001, 1001), 1.0, 1e-3);
}

TEST(Objective, Examples) {
  XiCurve c;
  c.points.push_back({100, 0.5, 0});
  const double p = phi(4, 100, 1.0);
  EXPECT_NEAR(objective(c, 4, 0.3 / p), 0.04, 1e-12);
  const XiCurve exact = synthesize(7, 2.0, {50, 100, 200});
  EXPECT_NEAR(objective(exact, 7, 2.0), 0.0, 1e-28);
  EXPECT_GT(objective(exact, 8, 2.0), 0.0);
}

TEST(CGrid, ExactMultiples) {
  CGrid g;
  EXPECT_EQ(g.size(), 10000u);
  EXPECT_EQ(g.at(0), 0.01);
  EXPECT_EQ(g.at(236), 2.37);
  EXPECT_EQ(g.at(9999), 100.0);
  EXPECT_EQ((CGrid{1.0, 0.5, 0.1}).size(), 0u);
}

TEST(CalibrateC, RecoversSynthesizedConstant) {
  const XiCurve curve = synthesize(10, 2.37, {50, 100, 200, 400});
  EXPECT_EQ(calibrate_c(curve, 10), 2.37);
}

TEST(CalibrateC, ZeroCurveGivesSmallestConstant) {
  XiCurve zeros;
  for (std::size_t n : {50, 100, 150}) zeros.points.push_back({n, 0.0, 0});
  EXPECT_EQ(calibrate_c(zeros, 5), 0.01);
  EXPECT_THROW(calibrate_c(zeros, 5, CGrid{2.0, 1.0, 0.01}), Error);
}

TEST(CalibrateC, MatchesClosedFormWithinOneStep) {
  // Least-squares constant: sum(xi*phi1) / sum(phi1^2), then clipped to the grid.
  auto rng = substream(31, {});
  for (int trial = 0; trial < 50; ++trial) {
    XiCurve curve;
    const std::size_t h = 1 + rng.below(40);
    double num = 0, den = 0;
    for (std::size_t n : {50, 100, 150, 200, 250}) {
      const double xi = rng.uniform() * 3;
      curve.points.push_back({n, xi, 0});
      num += xi * phi(h, n, 1.0);
      den += phi(h, n, 1.0) * phi(h, n, 1.0);
    }
    const double best = std::clamp(num / den, 0.01, 100.0);
    EXPECT_LE(std::abs(calibrate_c(curve, h) - best), 0.01 + 1e-12);
  }
}

TEST(HGrid, Modes) {
  const std::vector<std::size_t> ns{50, 100, 400};
  auto full = make_h_grid(ns);
  EXPECT_EQ(full.front(), 1u);
  EXPECT_EQ(full.back(), 271u);  // largest h with 2*50*e/h > 1
  auto capped = make_h_grid(ns, HGridMode::capped);
  EXPECT_EQ(capped.size(), 50u);
  EXPECT_EQ(capped.back(), 50u);
  auto from_min = make_h_grid(ns, HGridMode::from_min);
  EXPECT_EQ(from_min.front(), 50u);
  EXPECT_EQ(from_min.back(), 271u);
  EXPECT_EQ(make_h_grid({100, 200}).back(), 200u);
  EXPECT_THROW(make_h_grid({}), Error);
  for (auto h : full) EXPECT_NO_THROW(phi(h, 50, 1.0));
}

TEST(EstimateH, RecoversSynthesizedDimension) {
  const std::vector<std::size_t> ns{50, 100, 200};
  const XiCurve curve = synthesize(10, 1.0, ns);
  const VcFit fit = estimate_h(curve, 1.0, make_h_grid(ns));
  EXPECT_EQ(fit.h_hat, 10u);
  EXPECT_EQ(fit.c_hat, 1.0);
  for (double r : fit.residuals) EXPECT_NEAR(r, 0.0, 1e-14);
  EXPECT_EQ(fit.objective_at_h.size(), make_h_grid(ns).size());
}

TEST(EstimateH, ZeroCurvePicksSmallestCandidate) {
  XiCurve zeros;
  for (std::size_t n : {50, 100, 200}) zeros.points.push_back({n, 0.0, 0});
  EXPECT_EQ(estimate_h(zeros, 1.0, make_h_grid({50, 100, 200}, HGridMode::from_min)).h_hat, 50u);
  EXPECT_EQ(estimate_h(zeros, 1.0, make_h_grid({50, 100, 200})).h_hat, 1u);
  EXPECT_THROW(estimate_h(zeros, 1.0, {}), Error);
}

TEST(EstimateH, EqualsBruteForce) {
  auto rng = substream(8, {});
  for (int trial = 0; trial < 40; ++trial) {
    XiCurve curve;
    for (std::size_t n : {60, 120, 180, 240}) curve.points.push_back({n, rng.uniform() * 2, 0});
    const double c = 0.5 + rng.uniform() * 5;
    const auto grid = make_h_grid(curve.design_points());
    const VcFit fit = estimate_h(curve, c, grid);
    std::size_t best = 0;
    double bv = INFINITY;
    for (std::size_t h = 1; h <= grid.back(); ++h) {
      double s = 0;
      for (const auto& p : curve.points) s += std::pow(p.xi - c * std::sqrt(double(h) / double(p.n) * std::log(2.0 * double(p.n) * std::exp(1.0) / double(h))), 2);
      if (s < bv) {
        bv = s;
        best = h;
      }
    }
    EXPECT_EQ(fit.h_hat, best);
    for (const auto& o : fit.objective_at_h) EXPECT_GE(o.value, 0.0);
  }
}

TEST(FitVc, ExactRecoveryOfHAndC) {
  auto rng = substream(12, {});
  const std::vector<std::size_t> ns{50, 100, 150, 200, 250, 300, 350};
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t h0 = 1 + rng.below(50);
    const double c0 = static_cast<double>(1 + rng.below(2000)) / 100.0;
    const VcFit fit = fit_vc(synthesize(h0, c0, ns), h0, make_h_grid(ns));
    EXPECT_EQ(fit.h_hat, h0);
    EXPECT_NEAR(fit.c_hat, c0, 1e-12);
  }
}

TEST(FitVc, ScalingXiScalesC) {
  const std::vector<std::size_t> ns{50, 100, 200, 400};
  const XiCurve a = synthesize(12, 1.5, ns), b = synthesize(12, 3.0, ns);
  const VcFit fa = fit_vc(a, 12, make_h_grid(ns)), fb = fit_vc(b, 12, make_h_grid(ns));
  EXPECT_EQ(fa.h_hat, fb.h_hat);
  EXPECT_NEAR(fb.c_hat, 2 * fa.c_hat, 1e-12);
}

TEST(EstimateHLegacy, ReportsUnitConstantAndMinimizes) {
  const std::vector<std::size_t> ns{50, 100, 200};
  XiCurve curve;
  for (auto n : ns) curve.points.push_back({n, phi_vapnik_legacy(20, n), 0});
  const VcFit fit = estimate_h_legacy(curve, make_h_grid(ns));
  EXPECT_EQ(fit.h_hat, 20u);
  EXPECT_EQ(fit.c_hat, 1.0);
  for (const auto& o : fit.objective_at_h) EXPECT_NEAR(o.value, objective_legacy(curve, o.h), 0.0);
}
