#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "vcdim/error.hpp"
#include "vcdim/xi.hpp"

namespace vcdim {

/// c * sqrt((h/n) ln(2ne/h)). Requires 2ne/h > 1.
inline double phi(std::size_t h, std::size_t n, double c) {
  if (h == 0 || n == 0) throw Error("phi: h and n must be positive");
  const double hh = static_cast<double>(h);
  const double nn = static_cast<double>(n);
  const double ratio = 2.0 * nn * std::numbers::e / hh;
  if (!(ratio > 1.0)) {
    throw Error("phi: h = " + std::to_string(h) + " outside the bound's domain for n = " + std::to_string(n) +
                " (needs h < 2ne)");
  }
  return c * std::sqrt(hh / nn * std::log(ratio));
}

/// Constants of the older universal bound.
struct LegacyBoundConstants {
  static constexpr double a = 0.16;
  static constexpr double b = 1.2;
  static constexpr double k = 0.14927;
};

/// Older universal bound: 1 for n/h <= 0.5, otherwise
/// a (ln(2n/h)+1)/(n/h-k) (sqrt(1 + b (n/h-k)/(ln(2n/h)+1)) + 1).
inline double phi_vapnik_legacy(std::size_t h, std::size_t n) {
  if (h == 0 || n == 0) throw Error("phi_vapnik_legacy: h and n must be positive");
  using K = LegacyBoundConstants;
  const double r = static_cast<double>(n) / static_cast<double>(h);
  if (r <= 0.5) return 1.0;
  const double lg = std::log(2.0 * r) + 1.0;
  const double shifted = r - K::k;
  return K::a * lg / shifted * (std::sqrt(1.0 + K::b * shifted / lg) + 1.0);
}

/// Sum over design points of (xi(n_l) - phi(h, n_l, c))^2.
inline double objective(const XiCurve& curve, std::size_t h, double c) {
  double s = 0.0;
  for (const auto& p : curve.points) {
    const double r = p.xi - phi(h, p.n, c);
    s += r * r;
  }
  return s;
}

inline double objective_legacy(const XiCurve& curve, std::size_t h) {
  double s = 0.0;
  for (const auto& p : curve.points) {
    const double r = p.xi - phi_vapnik_legacy(h, p.n);
    s += r * r;
  }
  return s;
}

/// Evenly spaced candidate constants lo, lo+step, ..., hi. Values are
/// generated as integer multiples of step so that e.g. 2.37 is hit exactly.
struct CGrid {
  double lo = 0.01;
  double hi = 100.0;
  double step = 0.01;

  [[nodiscard]] std::size_t size() const {
    if (!(step > 0) || !(hi >= lo) || !(lo > 0)) return 0;
    return static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  }
  [[nodiscard]] double at(std::size_t i) const {
    return static_cast<double>(std::llround(lo / step) + static_cast<long long>(i)) * step;
  }
};

/// Constant minimizing the objective at the known VC dimension. Ties go to
/// the smallest constant.
inline double calibrate_c(const XiCurve& curve, std::size_t h_known, const CGrid& grid = {}) {
  const std::size_t count = grid.size();
  if (count == 0) throw Error("calibrate_c: empty c grid");
  std::vector<double> unit;
  for (const auto& p : curve.points) unit.push_back(phi(h_known, p.n, 1.0));

  double best_c = grid.at(0);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    const double c = grid.at(i);
    double s = 0.0;
    for (std::size_t l = 0; l < unit.size(); ++l) {
      const double r = curve.points[l].xi - c * unit[l];
      s += r * r;
    }
    if (s < best) {
      best = s;
      best_c = c;
    }
  }
  return best_c;
}

enum class HGridMode {
  full,      // 1 .. max(N_L), clipped to the bound's domain
  capped,    // 1 .. min(N_L)
  from_min,  // min(N_L) .. max(N_L), clipped to the bound's domain
};

/// Integer candidates for h. Every candidate satisfies h < 2e min(N_L), so
/// phi is defined at all design points.
inline std::vector<std::size_t> make_h_grid(const std::vector<std::size_t>& design_points,
                                            HGridMode mode = HGridMode::full) {
  if (design_points.empty()) throw Error("h grid: no design points");
  const auto [lo_it, hi_it] = std::minmax_element(design_points.begin(), design_points.end());
  const std::size_t n_min = *lo_it;
  const std::size_t n_max = *hi_it;
  // Largest h with 2 n_min e / h > 1.
  auto domain_max = static_cast<std::size_t>(std::ceil(2.0 * static_cast<double>(n_min) * std::numbers::e)) - 1;
  while (domain_max > 0 && !(2.0 * static_cast<double>(n_min) * std::numbers::e / static_cast<double>(domain_max) > 1.0)) {
    --domain_max;
  }

  std::size_t first = 1;
  std::size_t last = std::min(n_max, domain_max);
  switch (mode) {
    case HGridMode::full: break;
    case HGridMode::capped: last = n_min; break;
    case HGridMode::from_min: first = n_min; break;
  }
  std::vector<std::size_t> grid;
  for (std::size_t h = first; h <= last; ++h) grid.push_back(h);
  return grid;
}

struct ObjectivePoint {
  std::size_t h = 0;
  double value = 0.0;
};

struct VcFit {
  std::size_t h_hat = 0;
  double c_hat = 0.0;
  std::vector<ObjectivePoint> objective_at_h;
  /// xi(n_l) minus the fitted bound at h_hat, per design point.
  std::vector<double> residuals;
};

namespace detail {

template <class Objective, class Bound>
VcFit grid_search(const XiCurve& curve, const std::vector<std::size_t>& h_grid, double c, Objective&& f,
                  Bound&& bound) {
  if (h_grid.empty()) throw Error("estimate_h: empty h grid");
  VcFit fit;
  fit.c_hat = c;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t h : h_grid) {
    const double v = f(h);
    fit.objective_at_h.push_back({h, v});
    if (v < best || (v == best && h < fit.h_hat)) {
      best = v;
      fit.h_hat = h;
    }
  }
  for (const auto& p : curve.points) fit.residuals.push_back(p.xi - bound(fit.h_hat, p.n));
  return fit;
}

}  // namespace detail

/// Grid search for the h minimizing the objective at a fixed constant.
/// Ties go to the smallest h.
inline VcFit estimate_h(const XiCurve& curve, double c_hat, const std::vector<std::size_t>& h_grid) {
  return detail::grid_search(
      curve, h_grid, c_hat, [&](std::size_t h) { return objective(curve, h, c_hat); },
      [&](std::size_t h, std::size_t n) { return phi(h, n, c_hat); });
}

/// Legacy fit against the universal bound; no constant is calibrated and
/// c_hat is reported as 1.
inline VcFit estimate_h_legacy(const XiCurve& curve, const std::vector<std::size_t>& h_grid) {
  return detail::grid_search(
      curve, h_grid, 1.0, [&](std::size_t h) { return objective_legacy(curve, h); },
      [](std::size_t h, std::size_t n) { return phi_vapnik_legacy(h, n); });
}

/// Calibrate c at the known VC dimension, then search h with that constant.
inline VcFit fit_vc(const XiCurve& curve, std::size_t h_known, const std::vector<std::size_t>& h_grid,
                    const CGrid& c_grid = {}) {
  return estimate_h(curve, calibrate_c(curve, h_known, c_grid), h_grid);
}

}  // namespace vcdim
