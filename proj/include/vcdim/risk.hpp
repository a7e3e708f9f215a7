#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "vcdim/error.hpp"

namespace vcdim {

struct RiskConfig {
  double eta = 0.05;
  std::size_t m = 10;
  /// Use the cross-validated risk rather than the training MSE as r_emp.
  bool cross_validated_remp = false;

  void validate() const {
    if (!(eta > 0 && eta < 1)) throw Error("risk: eta must lie in (0, 1)");
    if (m < 1) throw Error("risk: m must be at least 1");
  }
};

namespace detail {

/// ln((2m/eta) (2ne/h)^h), evaluated in log space.
inline double capacity_log_term(std::size_t m, std::size_t n, double eta, std::size_t h) {
  if (!(eta > 0 && eta < 1)) throw Error("risk: eta must lie in (0, 1)");
  if (m == 0 || n == 0 || h == 0) throw Error("risk: m, n and h must be positive");
  const double nn = static_cast<double>(n);
  const double hh = static_cast<double>(h);
  const double ratio = 2.0 * nn * std::numbers::e / hh;
  if (!(ratio > 1.0)) throw Error("risk: h = " + std::to_string(h) + " outside the domain for n = " + std::to_string(n));
  return std::log(2.0 * static_cast<double>(m) / eta) + hh * std::log(ratio);
}

}  // namespace detail

/// m sqrt((1/n) ln((2m/eta)(2ne/h)^h)).
inline double epsilon_bound(std::size_t m, std::size_t n, double eta, std::size_t h) {
  return static_cast<double>(m) * std::sqrt(detail::capacity_log_term(m, n, eta, h) / static_cast<double>(n));
}

/// Additive bound: r_emp + epsilon.
inline double erm1(double r_emp, std::size_t m, std::size_t n, double eta, std::size_t h) {
  if (!(r_emp >= 0)) throw Error("erm1: empirical risk must be nonnegative");
  return r_emp + epsilon_bound(m, n, eta, h);
}

/// Multiplicative bound: r_emp + (m^2 L / 2n)(1 + sqrt(1 + 4 n r_emp / (m^2 L))).
inline double erm2(double r_emp, std::size_t m, std::size_t n, double eta, std::size_t h) {
  if (!(r_emp >= 0)) throw Error("erm2: empirical risk must be nonnegative");
  const double l = detail::capacity_log_term(m, n, eta, h);
  const double m2l = static_cast<double>(m) * static_cast<double>(m) * l;
  const double nn = static_cast<double>(n);
  return r_emp + m2l / (2.0 * nn) * (1.0 + std::sqrt(1.0 + 4.0 * nn * r_emp / m2l));
}

}  // namespace vcdim
