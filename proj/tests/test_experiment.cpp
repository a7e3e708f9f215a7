#include <gtest/gtest.h>

#include <cmath>

#include "vcdim/experiment.hpp"

using namespace vcdim;

namespace {

SweepConfig small_sweep() {
  SweepConfig c;
  c.synthetic.p = 3;
  c.synthetic.n = 120;
  c.sizes = {2, 3, 5};
  c.xi.design_points = {30, 60, 90, 120};
  c.xi.b1 = 10;
  c.xi.b2 = 10;
  c.xi.threads = 4;
  c.seeds = {1, 2};
  return c;
}

}  // namespace

TEST(SummarizeH, Arithmetic) {
  const SeedStudy s = summarize_h({29, 31});
  EXPECT_DOUBLE_EQ(s.mean, 30.0);
  EXPECT_NEAR(s.sd, std::sqrt(2.0), 1e-15);
  const SeedStudy same = summarize_h({27, 27, 27});
  EXPECT_EQ(same.sd, 0.0);
  EXPECT_THROW(summarize_h({5}), Error);
}

TEST(DesignDefaults, FollowProblemSize) {
  SweepConfig c;
  c.synthetic.p = 15;
  apply_design_defaults(c);
  EXPECT_EQ(c.synthetic.n, 400u);
  EXPECT_EQ(c.xi.design_points, (std::vector<std::size_t>{50, 100, 150, 200, 250, 300, 350, 400}));
  c.synthetic.p = 50;
  apply_design_defaults(c);
  EXPECT_EQ(c.synthetic.n, 600u);
  EXPECT_EQ(c.xi.design_points.front(), 75u);
  EXPECT_EQ(c.xi.design_points.back(), 600u);
  EXPECT_EQ(c.xi.design_points.size(), 8u);
}

TEST(Sweep, RowCountAndOrder) {
  const SweepResult r = run_sweep(small_sweep());
  ASSERT_EQ(r.rows.size(), 6u);
  EXPECT_EQ(r.rows[0].seed, 1u);
  EXPECT_EQ(r.rows[3].seed, 2u);
  EXPECT_EQ(r.rows[4].size, 3u);
  for (double rate : {r.hit_rate_h, r.hit_rate_erm1, r.hit_rate_erm2, r.hit_rate_bic}) {
    EXPECT_GE(rate, 0.0);
    EXPECT_LE(rate, 1.0);
  }
}

TEST(Sweep, SingleRunEqualsPipeline) {
  SweepConfig c = small_sweep();
  c.sizes = {3};
  c.seeds = {5};
  const SweepResult r = run_sweep(c);
  XiConfig xc = c.xi;
  xc.seed = 5;
  const RiskReport rep = run_pipeline(sweep_dataset(c, 5), {ModelSpec::prefix(3)}, xc, c.risk, c.pipeline);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].h_hat, rep.rows[0].h_hat);
  EXPECT_EQ(r.rows[0].c_hat, rep.rows[0].c_hat);
  EXPECT_EQ(r.rows[0].erm1, rep.rows[0].erm1);
  EXPECT_EQ(r.rows[0].erm2, rep.rows[0].erm2);
  EXPECT_EQ(r.rows[0].bic, rep.rows[0].bic);
}

TEST(Sweep, DecoysDoNotAffectSmallModels) {
  SweepConfig narrow = small_sweep();
  narrow.sizes = {1, 2, 3};
  SweepConfig wide = narrow;
  wide.sizes = {1, 2, 3, 8};
  const SweepResult a = run_sweep(narrow), b = run_sweep(wide);
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_EQ(a.rows[s * 3 + k].h_hat, b.rows[s * 4 + k].h_hat);
      EXPECT_EQ(a.rows[s * 3 + k].c_hat, b.rows[s * 4 + k].c_hat);
    }
  }
}

TEST(Sweep, DecoyPermutationLeavesLargeModelsClose) {
  // Decoys are exchangeable: a model with the true columns plus one decoy
  // gives the same h-hat whichever decoy it is, up to bootstrap noise.
  SweepConfig c = small_sweep();
  c.sizes = {3, 4, 5};
  c.seeds = {3};
  const Dataset d = sweep_dataset(c, 3);
  XiConfig xc = c.xi;
  xc.seed = 3;
  const RiskReport rep = run_pipeline(d, {ModelSpec{{0, 1, 2, 3}, true}, ModelSpec{{0, 1, 2, 4}, true}}, xc, c.risk,
                                      c.pipeline);
  EXPECT_NEAR(static_cast<double>(rep.rows[0].h_hat), static_cast<double>(rep.rows[1].h_hat), 2.0);
}

TEST(Sweep, Validation) {
  SweepConfig c = small_sweep();
  c.sizes = {};
  EXPECT_THROW(run_sweep(c), Error);
  c = small_sweep();
  c.sizes = {0, 2};
  EXPECT_THROW(run_sweep(c), Error);
  c = small_sweep();
  c.seeds = {};
  EXPECT_THROW(run_sweep(c), Error);
  c = small_sweep();
  c.xi.design_points = {60, 240};
  EXPECT_THROW(run_sweep(c), Error);
  EXPECT_EQ(small_sweep().decoys(), 2u);
}

TEST(SeedStudy, MatchesIndividualFits) {
  SweepConfig c = small_sweep();
  c.seeds = {4, 9, 11};
  const SeedStudy s = seed_study(c);
  ASSERT_EQ(s.h_hats.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    SweepConfig one = c;
    one.sizes = {3};
    one.seeds = {c.seeds[i]};
    EXPECT_EQ(s.h_hats[i], run_sweep(one).rows[0].h_hat);
  }
  c.seeds = {1};
  EXPECT_THROW(seed_study(c), Error);
}
