#pragma once

// Bootstrap estimates of the expected gap between two empirical losses at a
// sequence of sample sizes (design points).
//
// estimate_xi is the cross-validated double bootstrap: for each design point
// n, b2 outer replicates each average b1 inner replicates of
//
//   draw 2n rows with replacement -> random halves G1, G2 -> fit the same
//   model on each half -> score model 1 on G2 and model 2 on G1 ->
//   discretize both loss vectors on a common grid -> |risk1_j - risk2_j|
//
// intervalwise, and sum the gaps of the b1 inner replicates over intervals
// (or average them, InnerReduction::mean). The curve value is the mean of the
// b2 outer values.
//
// estimate_xi_legacy is the older label-flip scheme adapted to regression:
// one model is fitted on both halves (optionally with the second half's
// centred response negated), and the replicate value is the absolute difference of the two
// halves' training MSEs under the true responses.
//
// Every replicate draws from its own substream keyed by (n, outer, inner), so
// results do not depend on the thread count.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vcdim/dataset.hpp"
#include "vcdim/discretize.hpp"
#include "vcdim/error.hpp"
#include "vcdim/linear_model.hpp"
#include "vcdim/parallel.hpp"
#include "vcdim/rng.hpp"

namespace vcdim {

/// How the loss bound B of the discretization grid is chosen.
enum class BoundMode {
  per_half,  // each half on its own grid, B_i = that half's largest loss
  common,    // one grid per replicate, B = largest loss of both halves
  global,    // one grid for every replicate, B from a pilot pass
};

/// How the b1 inner replicates are combined per interval before summing
/// over intervals.
enum class InnerReduction { sum, mean };

struct XiConfig {
  std::vector<std::size_t> design_points;
  std::size_t b1 = 50;
  std::size_t b2 = 50;
  std::size_t m = 10;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  BoundMode bound_mode = BoundMode::per_half;
  InnerReduction inner = InnerReduction::sum;
  /// Legacy scheme only: negate the second half's centred response before
  /// the merged fit.
  bool legacy_flip = false;

  void validate(std::size_t n_available) const {
    if (design_points.empty()) throw Error("xi: no design points");
    for (std::size_t i = 0; i < design_points.size(); ++i) {
      if (design_points[i] == 0) throw Error("xi: design points must be positive");
      if (i > 0 && design_points[i] <= design_points[i - 1]) {
        throw Error("xi: design points must be strictly increasing");
      }
    }
    if (design_points.back() > n_available) {
      throw Error("xi: design point " + std::to_string(design_points.back()) + " exceeds the " +
                  std::to_string(n_available) + " available rows");
    }
    if (b1 < 1 || b2 < 1) throw Error("xi: b1 and b2 must be at least 1");
    if (m < 1) throw Error("xi: m must be at least 1");
  }
};

struct XiPoint {
  std::size_t n = 0;
  double xi = 0.0;
  /// Largest loss bound B used at this design point.
  double max_bound = 0.0;
};

struct XiCurve {
  std::vector<XiPoint> points;

  [[nodiscard]] std::vector<std::size_t> design_points() const {
    std::vector<std::size_t> out;
    for (const auto& p : points) out.push_back(p.n);
    return out;
  }
};

namespace detail {

inline constexpr std::uint64_t kLegacyStream = 0x4c4547;  // "LEG"

/// Rows of one bootstrap replicate, already split into halves.
struct HalfSamples {
  Eigen::MatrixXd x1, x2;
  Eigen::VectorXd y1, y2;
};

inline void draw_halves(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::size_t n, Xoshiro256& rng,
                        std::vector<std::size_t>& rows, HalfSamples& out) {
  const auto total = static_cast<std::uint64_t>(y.size());
  rows.resize(2 * n);
  for (auto& r : rows) r = rng.below(total);
  // Random partition of the 2n draws: Fisher-Yates, then first n -> G1.
  for (std::size_t i = rows.size() - 1; i > 0; --i) std::swap(rows[i], rows[rng.below(i + 1)]);

  const auto k = x.cols();
  const auto nn = static_cast<Eigen::Index>(n);
  out.x1.resize(nn, k);
  out.x2.resize(nn, k);
  out.y1.resize(nn);
  out.y2.resize(nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    const auto a = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]);
    const auto b = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i + nn)]);
    out.x1.row(i) = x.row(a);
    out.y1(i) = y(a);
    out.x2.row(i) = x.row(b);
    out.y2(i) = y(b);
  }
}

struct CrossLosses {
  Eigen::VectorXd model1_on_g2;
  Eigen::VectorXd model2_on_g1;

  [[nodiscard]] double max() const { return std::max(model1_on_g2.maxCoeff(), model2_on_g1.maxCoeff()); }
};

inline CrossLosses cross_validated_losses(const HalfSamples& h) {
  const Eigen::VectorXd beta1 = least_squares(h.x1, h.y1);
  const Eigen::VectorXd beta2 = least_squares(h.x2, h.y2);
  return {(h.x2 * beta1 - h.y2).array().square().matrix(), (h.x1 * beta2 - h.y1).array().square().matrix()};
}

/// Adds |risk1_j - risk2_j| into acc. A zero bound means both halves fit
/// perfectly, which contributes nothing.
inline void accumulate_gaps(const CrossLosses& l, double bound, std::size_t m, std::vector<double>& acc) {
  if (!(bound > 0)) return;
  const IntervalGrid grid(m, bound);
  const auto r1 = interval_risks(std::span<const double>(l.model1_on_g2.data(), l.model1_on_g2.size()), grid);
  const auto r2 = interval_risks(std::span<const double>(l.model2_on_g1.data(), l.model2_on_g1.size()), grid);
  const auto g = gap(r1, r2);
  for (std::size_t j = 0; j < m; ++j) acc[j] += g[j];
}

inline void accumulate_gaps_per_half(const CrossLosses& l, std::size_t m, std::vector<double>& acc) {
  auto risks = [m](const Eigen::VectorXd& v) {
    const double b = v.maxCoeff();
    if (!(b > 0)) return std::vector<double>(m, 0.0);
    return interval_risks(std::span<const double>(v.data(), v.size()), IntervalGrid(m, b)).per_interval;
  };
  const auto r1 = risks(l.model1_on_g2);
  const auto r2 = risks(l.model2_on_g1);
  for (std::size_t j = 0; j < m; ++j) acc[j] += std::abs(r1[j] - r2[j]);
}

struct OuterResult {
  double xi = 0.0;
  double max_bound = 0.0;
};

/// One outer replicate: b1 inner replicates reduced intervalwise, then
/// summed over intervals. fixed_bound > 0 overrides the bound mode.
inline OuterResult outer_replicate(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::size_t n,
                                   std::size_t outer, const XiConfig& cfg, double fixed_bound) {
  std::vector<double> acc(cfg.m, 0.0);
  std::vector<std::size_t> rows;
  HalfSamples halves;
  double max_bound = 0.0;
  for (std::size_t inner = 0; inner < cfg.b1; ++inner) {
    auto rng = substream(cfg.seed, {n, outer, inner});
    draw_halves(x, y, n, rng, rows, halves);
    const auto losses = cross_validated_losses(halves);
    const double bound = fixed_bound > 0 ? fixed_bound : losses.max();
    max_bound = std::max(max_bound, bound);
    if (fixed_bound <= 0 && cfg.bound_mode == BoundMode::per_half) {
      accumulate_gaps_per_half(losses, cfg.m, acc);
    } else {
      accumulate_gaps(losses, bound, cfg.m, acc);
    }
  }
  double xi = 0.0;
  for (double a : acc) xi += a;
  if (cfg.inner == InnerReduction::mean) xi /= static_cast<double>(cfg.b1);
  return {xi, max_bound};
}

/// Largest cross-validated loss over every replicate of every design point.
inline double pilot_bound(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const XiConfig& cfg) {
  const std::size_t tasks = cfg.design_points.size() * cfg.b2;
  std::vector<double> maxima(tasks, 0.0);
  parallel_for(tasks, cfg.threads, [&](std::size_t t) {
    const std::size_t n = cfg.design_points[t / cfg.b2];
    const std::size_t outer = t % cfg.b2;
    std::vector<std::size_t> rows;
    HalfSamples halves;
    for (std::size_t inner = 0; inner < cfg.b1; ++inner) {
      auto rng = substream(cfg.seed, {n, outer, inner});
      draw_halves(x, y, n, rng, rows, halves);
      maxima[t] = std::max(maxima[t], cross_validated_losses(halves).max());
    }
  });
  return *std::max_element(maxima.begin(), maxima.end());
}

inline void check_inputs(const Dataset& d, const ModelSpec& spec, const XiConfig& cfg) {
  if (d.n_rows() == 0) throw Error("xi: empty dataset");
  spec.validate(d.n_covariates());
  cfg.validate(d.n_rows());
}

}  // namespace detail

inline XiCurve estimate_xi(const Dataset& d, const ModelSpec& spec, const XiConfig& cfg) {
  detail::check_inputs(d, spec, cfg);
  const Eigen::MatrixXd x = design_matrix(d, spec);
  const Eigen::VectorXd& y = d.response;

  double fixed_bound = 0.0;
  if (cfg.bound_mode == BoundMode::global) fixed_bound = detail::pilot_bound(x, y, cfg);

  const std::size_t n_points = cfg.design_points.size();
  std::vector<detail::OuterResult> results(n_points * cfg.b2);
  parallel_for(results.size(), cfg.threads, [&](std::size_t t) {
    results[t] = detail::outer_replicate(x, y, cfg.design_points[t / cfg.b2], t % cfg.b2, cfg, fixed_bound);
  });

  XiCurve curve;
  for (std::size_t l = 0; l < n_points; ++l) {
    XiPoint p;
    p.n = cfg.design_points[l];
    for (std::size_t i = 0; i < cfg.b2; ++i) {
      const auto& r = results[l * cfg.b2 + i];
      p.xi += r.xi;
      p.max_bound = std::max(p.max_bound, r.max_bound);
    }
    p.xi /= static_cast<double>(cfg.b2);
    curve.points.push_back(p);
  }
  return curve;
}

namespace detail {

struct LegacyReplicate {
  double gap = 0.0;
  double max_loss = 0.0;
};

}  // namespace detail

/// Single label-flip replicate on given halves: |MSE(G1) - MSE(G2)| of one
/// model fitted on G1 together with G2's flipped response.
inline detail::LegacyReplicate legacy_gap(const detail::HalfSamples& h, bool flip) {
  const auto n1 = h.x1.rows();
  const auto n2 = h.x2.rows();
  Eigen::MatrixXd merged_x(n1 + n2, h.x1.cols());
  merged_x << h.x1, h.x2;
  Eigen::VectorXd merged_y(n1 + n2);
  if (flip) {
    const double mean2 = h.y2.mean();
    merged_y << h.y1, (mean2 - h.y2.array()).matrix();
  } else {
    merged_y << h.y1, h.y2;
  }
  const Eigen::VectorXd beta = least_squares(merged_x, merged_y);
  const Eigen::VectorXd r1 = (h.y1 - h.x1 * beta).array().square().matrix();
  const Eigen::VectorXd r2 = (h.y2 - h.x2 * beta).array().square().matrix();
  return {std::abs(r1.mean() - r2.mean()), std::max(r1.maxCoeff(), r2.maxCoeff())};
}

namespace detail {

inline LegacyReplicate legacy_replicate(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::size_t n,
                                        std::size_t w, const XiConfig& cfg) {
  auto rng = substream(cfg.seed, {kLegacyStream, n, w});
  std::vector<std::size_t> rows;
  HalfSamples h;
  draw_halves(x, y, n, rng, rows, h);
  return legacy_gap(h, cfg.legacy_flip);
}

}  // namespace detail

/// Legacy curve: W = b1 * b2 label-flip replicates per design point.
inline XiCurve estimate_xi_legacy(const Dataset& d, const ModelSpec& spec, const XiConfig& cfg) {
  detail::check_inputs(d, spec, cfg);
  const Eigen::MatrixXd x = design_matrix(d, spec);
  const std::size_t w_count = cfg.b1 * cfg.b2;
  const std::size_t n_points = cfg.design_points.size();

  std::vector<detail::LegacyReplicate> results(n_points * w_count);
  parallel_for(results.size(), cfg.threads, [&](std::size_t t) {
    results[t] = detail::legacy_replicate(x, d.response, cfg.design_points[t / w_count], t % w_count, cfg);
  });

  XiCurve curve;
  for (std::size_t l = 0; l < n_points; ++l) {
    XiPoint p;
    p.n = cfg.design_points[l];
    for (std::size_t w = 0; w < w_count; ++w) {
      p.xi += results[l * w_count + w].gap;
      p.max_bound = std::max(p.max_bound, results[l * w_count + w].max_loss);
    }
    p.xi /= static_cast<double>(w_count);
    curve.points.push_back(p);
  }
  return curve;
}

}  // namespace vcdim
