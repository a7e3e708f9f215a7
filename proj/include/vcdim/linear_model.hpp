#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "vcdim/dataset.hpp"
#include "vcdim/error.hpp"

namespace vcdim {

/// A linear model: an ordered subset of covariate columns plus an optional
/// intercept. Its VC dimension is the parameter count.
struct ModelSpec {
  std::vector<std::size_t> term_indices;
  bool include_intercept = true;

  [[nodiscard]] std::size_t known_vcd() const { return term_indices.size() + (include_intercept ? 1 : 0); }

  /// Model over the first `k` covariates.
  static ModelSpec prefix(std::size_t k, bool intercept = true) {
    ModelSpec s;
    s.include_intercept = intercept;
    for (std::size_t i = 0; i < k; ++i) s.term_indices.push_back(i);
    return s;
  }

  void validate(std::size_t n_covariates) const {
    std::unordered_set<std::size_t> seen;
    for (auto i : term_indices) {
      if (i >= n_covariates) {
        throw Error("model term index " + std::to_string(i) + " out of range (" + std::to_string(n_covariates) +
                    " covariates)");
      }
      if (!seen.insert(i).second) throw Error("model term index " + std::to_string(i) + " repeated");
    }
    if (known_vcd() == 0) throw Error("model has no parameters");
  }
};

struct FittedModel {
  Eigen::VectorXd coefficients;  // intercept first when present
  ModelSpec spec;
  std::vector<std::string> term_names;
  double training_rss = 0.0;

  [[nodiscard]] double intercept() const { return spec.include_intercept ? coefficients(0) : 0.0; }
};

/// Design matrix for `spec`: a leading column of ones when the model has an
/// intercept, then the selected covariates in spec order.
inline Eigen::MatrixXd design_matrix(const Dataset& d, const ModelSpec& spec) {
  spec.validate(d.n_covariates());
  const auto n = static_cast<Eigen::Index>(d.n_rows());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(spec.known_vcd()));
  Eigen::Index c = 0;
  if (spec.include_intercept) x.col(c++).setOnes();
  for (auto i : spec.term_indices) x.col(c++) = d.covariates.col(static_cast<Eigen::Index>(i));
  return x;
}

/// Minimum-norm least squares. Rank-deficient designs (collinear bootstrap
/// draws, n < k) are solved without failure.
inline Eigen::VectorXd least_squares(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                     const Eigen::Ref<const Eigen::VectorXd>& y) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
  return cod.solve(y);
}

inline FittedModel fit(const Dataset& d, const ModelSpec& spec) {
  if (d.n_rows() < 1) throw Error("fit: empty dataset");
  const Eigen::MatrixXd x = design_matrix(d, spec);
  FittedModel m;
  m.spec = spec;
  m.coefficients = least_squares(x, d.response);
  m.training_rss = (d.response - x * m.coefficients).squaredNorm();
  for (auto i : spec.term_indices) m.term_names.push_back(d.covariate_names[i]);
  return m;
}

/// Predictions on `d`. Covariates are matched by name, so `d` may have a
/// different column layout from the fitting data.
inline Eigen::VectorXd predict(const FittedModel& m, const Dataset& d) {
  const auto n = static_cast<Eigen::Index>(d.n_rows());
  Eigen::VectorXd yhat = Eigen::VectorXd::Constant(n, m.intercept());
  const Eigen::Index offset = m.spec.include_intercept ? 1 : 0;
  for (std::size_t j = 0; j < m.term_names.size(); ++j) {
    auto idx = d.covariate_index(m.term_names[j]);
    if (!idx) throw Error("predict: missing column \"" + m.term_names[j] + "\"");
    yhat += m.coefficients(offset + static_cast<Eigen::Index>(j)) * d.covariates.col(static_cast<Eigen::Index>(*idx));
  }
  return yhat;
}

/// Elementwise (yhat_i - y_i)^2.
inline Eigen::VectorXd squared_losses(const FittedModel& m, const Dataset& d) {
  return (predict(m, d) - d.response).array().square().matrix();
}

inline constexpr double kRssFloor = 1e-12;

/// Gaussian profile BIC: n ln(RSS/n) + k ln n, with RSS floored at 1e-12.
inline double bic(double rss, std::size_t n_params, std::size_t n) {
  if (n < 2) throw Error("bic: n must be at least 2");
  const double nn = static_cast<double>(n);
  return nn * std::log(std::max(rss, kRssFloor) / nn) + static_cast<double>(n_params) * std::log(nn);
}

inline double bic(const FittedModel& m, std::size_t n) { return bic(m.training_rss, m.spec.known_vcd(), n); }

}  // namespace vcdim
