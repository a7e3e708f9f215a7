#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vcdim/error.hpp"

namespace vcdim {

/// m equal-width intervals over [0, B]: interval j is [jB/m, (j+1)B/m), the
/// last one closed on the right.
struct IntervalGrid {
  std::size_t m = 10;
  double upper = 1.0;  // B

  IntervalGrid() = default;
  IntervalGrid(std::size_t intervals, double bound) : m(intervals), upper(bound) {
    if (m < 1) throw Error("interval grid: m must be at least 1");
    if (!(upper > 0) || !std::isfinite(upper)) throw Error("interval grid: B must be positive and finite");
  }

  [[nodiscard]] double width() const { return upper / static_cast<double>(m); }
  [[nodiscard]] double midpoint(std::size_t j) const {
    return static_cast<double>(2 * j + 1) * upper / static_cast<double>(2 * m);
  }

  friend bool operator==(const IntervalGrid&, const IntervalGrid&) = default;
};

struct DiscreteLoss {
  std::size_t interval;
  double midpoint;
};

/// Maps a loss to its interval and midpoint. Losses at or above B land in
/// the top interval.
inline DiscreteLoss discretize_loss(double q, const IntervalGrid& g) {
  if (!(q >= 0)) throw Error("discretize_loss: loss must be nonnegative");
  const double scaled = std::floor(q * static_cast<double>(g.m) / g.upper);
  const auto j = scaled >= static_cast<double>(g.m - 1) ? g.m - 1 : static_cast<std::size_t>(scaled);
  return {j, g.midpoint(j)};
}

/// Per-interval empirical risk: entry j is count_j * midpoint_j / n.
struct IntervalRisks {
  IntervalGrid grid;
  std::vector<double> per_interval;
  std::vector<std::size_t> counts;
  std::size_t n = 0;

  [[nodiscard]] double total() const {
    double s = 0;
    for (double v : per_interval) s += v;
    return s;
  }
};

inline IntervalRisks interval_risks(std::span<const double> losses, const IntervalGrid& g) {
  if (losses.empty()) throw Error("interval_risks: empty loss vector");
  IntervalRisks r;
  r.grid = g;
  r.n = losses.size();
  r.counts.assign(g.m, 0);
  for (double q : losses) ++r.counts[discretize_loss(q, g).interval];
  r.per_interval.resize(g.m);
  const double n = static_cast<double>(r.n);
  for (std::size_t j = 0; j < g.m; ++j) r.per_interval[j] = static_cast<double>(r.counts[j]) * g.midpoint(j) / n;
  return r;
}

/// Per-interval absolute differences |r1_j - r2_j|.
inline std::vector<double> gap(const IntervalRisks& r1, const IntervalRisks& r2) {
  if (!(r1.grid == r2.grid)) throw Error("gap: interval grids differ");
  std::vector<double> out(r1.per_interval.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::abs(r1.per_interval[j] - r2.per_interval[j]);
  return out;
}

}  // namespace vcdim
