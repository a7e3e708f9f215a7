#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "vcdim/linear_model.hpp"
#include "vcdim/rng.hpp"

using namespace vcdim;
using testing_support::make_dataset;

TEST(Fit, ExactLineWithoutIntercept) {
  const auto d = make_dataset({"x"}, {{1, 2, 3}}, {1, 2, 3});
  const FittedModel m = fit(d, {{0}, false});
  ASSERT_EQ(m.coefficients.size(), 1);
  EXPECT_NEAR(m.coefficients(0), 1.0, 1e-12);
  EXPECT_NEAR(m.training_rss, 0.0, 1e-20);
}

TEST(Fit, DegenerateColumnGivesMinimumNorm) {
  const auto d = make_dataset({"x"}, {{0, 0}}, {1, 1});
  const FittedModel m = fit(d, ModelSpec::prefix(1));
  EXPECT_NEAR(m.intercept(), 1.0, 1e-12);
  EXPECT_NEAR(m.coefficients(1), 0.0, 1e-12);
}

TEST(Fit, CollinearAndUnderdeterminedDoNotThrow) {
  const auto d = make_dataset({"a", "b"}, {{1, 2, 3}, {2, 4, 6}}, {1, 0, 2});
  EXPECT_NO_THROW(fit(d, ModelSpec::prefix(2)));
  const auto tiny = make_dataset({"a", "b", "c"}, {{1, 2}, {3, 1}, {0, 5}}, {1, 2});
  const FittedModel m = fit(tiny, ModelSpec::prefix(3));
  EXPECT_LT(m.training_rss, 1e-20);
}

TEST(Fit, BeatsRandomCoefficients) {
  SyntheticConfig cfg;
  cfg.p = 5;
  cfg.n = 50;
  cfg.seed = 11;
  const Dataset d = standardize(generate_synthetic(cfg));
  const FittedModel m = fit(d, ModelSpec::prefix(5));
  const Eigen::MatrixXd x = design_matrix(d, ModelSpec::prefix(5));
  auto rng = substream(99, {});
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd b(6);
    for (Eigen::Index j = 0; j < 6; ++j) b(j) = m.coefficients(j) + rng.normal(0.0, trial < 50 ? 0.01 : 1.0);
    EXPECT_LE(m.training_rss, (d.response - x * b).squaredNorm());
  }
}

TEST(Fit, NormalEquationsResidual) {
  SyntheticConfig cfg;
  cfg.p = 8;
  cfg.n = 120;
  const Dataset d = standardize(generate_synthetic(cfg));
  const FittedModel m = fit(d, ModelSpec::prefix(8));
  const Eigen::MatrixXd x = design_matrix(d, ModelSpec::prefix(8));
  EXPECT_LT((x.transpose() * (d.response - x * m.coefficients)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Fit, ScaleEquivariance) {
  SyntheticConfig cfg;
  cfg.p = 4;
  cfg.n = 60;
  Dataset d = standardize(generate_synthetic(cfg));
  const FittedModel a = fit(d, ModelSpec::prefix(4));
  const double s = 3.7;
  d.response *= s;
  const FittedModel b = fit(d, ModelSpec::prefix(4));
  for (Eigen::Index j = 0; j < a.coefficients.size(); ++j) {
    EXPECT_NEAR(b.coefficients(j), s * a.coefficients(j), 1e-8 * std::max(1.0, std::abs(s * a.coefficients(j))));
  }
  EXPECT_NEAR(b.training_rss, s * s * a.training_rss, 1e-8 * s * s * a.training_rss);
}

TEST(Predict, Examples) {
  FittedModel m;
  m.spec = ModelSpec::prefix(1);
  m.term_names = {"x"};
  m.coefficients = Eigen::Vector2d(1.0, 0.5);
  EXPECT_DOUBLE_EQ(predict(m, make_dataset({"x"}, {{3}}, {0}))(0), 2.5);

  m.coefficients = Eigen::Vector2d(2.0, 0.0);
  const auto yhat = predict(m, make_dataset({"x"}, {{1, -4, 9}}, {0, 0, 0}));
  for (double v : yhat) EXPECT_EQ(v, 2.0);
}

TEST(Predict, MatchesColumnsByName) {
  const auto train = make_dataset({"a", "b"}, {{1, 2, 3, 4}, {0, 1, 0, 2}}, {1, 4, 3, 9});
  const FittedModel m = fit(train, {{1}, true});
  const auto other = make_dataset({"b", "z"}, {{0, 1, 0, 2}, {7, 7, 7, 7}}, {1, 4, 3, 9});
  EXPECT_LT((predict(m, other) - predict(m, train)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_THROW(predict(m, make_dataset({"a"}, {{1}}, {0})), Error);
}

TEST(Predict, ReproducesNoiselessTruth) {
  const Dataset d = testing_support::noiseless(6, 50, 4);
  const FittedModel m = fit(d, ModelSpec::prefix(6));
  EXPECT_LT((predict(m, d) - d.response).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT(squared_losses(m, d).maxCoeff(), 1e-16);
}

TEST(SquaredLosses, ValuesAndIdentity) {
  FittedModel m;
  m.spec = {{}, true};
  m.coefficients = Eigen::VectorXd::Constant(1, 2.0);
  EXPECT_DOUBLE_EQ(squared_losses(m, make_dataset({}, {}, {5}))(0), 9.0);

  SyntheticConfig cfg;
  cfg.p = 3;
  cfg.n = 40;
  const Dataset d = generate_synthetic(cfg);
  const FittedModel f = fit(d, ModelSpec::prefix(2));
  const Eigen::VectorXd q = squared_losses(f, d);
  EXPECT_GE(q.minCoeff(), 0.0);
  EXPECT_NEAR(q.mean() * 40.0, f.training_rss, 1e-9 * f.training_rss);
}

TEST(Bic, Values) {
  EXPECT_NEAR(bic(4.0, 2, 4), 2.0 * std::log(4.0), 1e-12);
  EXPECT_NEAR(bic(4.0, 2, 4), 2.7725887222, 1e-9);
  EXPECT_TRUE(std::isfinite(bic(0.0, 2, 10)));
  EXPECT_DOUBLE_EQ(bic(0.0, 2, 10), bic(1e-12, 2, 10));
  EXPECT_NEAR(bic(3.0, 5, 20) - bic(3.0, 4, 20), std::log(20.0), 1e-12);
  EXPECT_THROW(bic(1.0, 1, 1), Error);
}

TEST(ModelSpec, Validation) {
  EXPECT_EQ(ModelSpec::prefix(3).known_vcd(), 4u);
  EXPECT_EQ(ModelSpec::prefix(3, false).known_vcd(), 3u);
  EXPECT_THROW((ModelSpec{{0, 0}, true}.validate(3)), Error);
  EXPECT_THROW((ModelSpec{{5}, true}.validate(3)), Error);
  EXPECT_THROW((ModelSpec{{}, false}.validate(3)), Error);
}
