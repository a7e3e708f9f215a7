#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vcdim/dataset.hpp"
#include "vcdim/error.hpp"
#include "vcdim/linear_model.hpp"
#include "vcdim/risk.hpp"
#include "vcdim/vcbound.hpp"
#include "vcdim/xi.hpp"

namespace vcdim {

/// Which integer plays the role of a linear model's VC dimension.
enum class VcdConvention {
  params,      // parameter count including the intercept
  covariates,  // covariate count
};

inline std::size_t model_vcd(const ModelSpec& spec, VcdConvention c) {
  return c == VcdConvention::params ? spec.known_vcd() : spec.term_indices.size();
}

/// Nested models over a dataset whose covariates are already in inclusion
/// order: model k uses the first k covariates.
struct NestedModels {
  Dataset data;
  std::vector<ModelSpec> models;
  /// Terms left out because they had zero variance.
  std::vector<std::string> excluded;
};

namespace detail {

inline NestedModels nest_in_order(Dataset data, std::vector<std::string> excluded) {
  NestedModels out;
  for (std::size_t k = 1; k <= data.n_covariates(); ++k) out.models.push_back(ModelSpec::prefix(k));
  out.data = std::move(data);
  out.excluded = std::move(excluded);
  return out;
}

inline Dataset select_columns(const Dataset& d, const std::vector<std::size_t>& order) {
  Dataset out;
  out.response_name = d.response_name;
  out.response = d.response;
  out.standardized = d.standardized;
  out.covariates.resize(d.covariates.rows(), static_cast<Eigen::Index>(order.size()));
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.covariates.col(static_cast<Eigen::Index>(k)) = d.covariates.col(static_cast<Eigen::Index>(order[k]));
    out.covariate_names.push_back(d.covariate_names[order[k]]);
  }
  return out;
}

inline double abs_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd ca = a.array() - a.mean();
  const Eigen::ArrayXd cb = b.array() - b.mean();
  const double denom = std::sqrt((ca * ca).sum() * (cb * cb).sum());
  if (!(denom > 0)) return 0.0;
  return std::abs((ca * cb).sum() / denom);
}

}  // namespace detail

/// Expands `t` on `d`, ranks the terms by decreasing |corr(term, response)|
/// (stable, so ties keep input order) and returns the nested prefixes. Terms
/// with zero variance are dropped and listed in `excluded`.
inline NestedModels order_by_correlation(const Dataset& d, const TermSet& t) {
  const Dataset expanded = expand_terms(d, t);
  std::vector<std::size_t> keep;
  std::vector<double> score(expanded.n_covariates(), 0.0);
  std::vector<std::string> excluded;
  for (std::size_t j = 0; j < expanded.n_covariates(); ++j) {
    const Eigen::VectorXd col = expanded.covariates.col(static_cast<Eigen::Index>(j));
    if (!(detail::sample_sd(col) > 0)) {
      excluded.push_back(expanded.covariate_names[j]);
      continue;
    }
    score[j] = detail::abs_correlation(col, expanded.response);
    keep.push_back(j);
  }
  std::stable_sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  Dataset ordered = detail::select_columns(expanded, keep);
  ordered.standardized = false;
  return detail::nest_in_order(std::move(ordered), std::move(excluded));
}

/// Nested list from a user-supplied inclusion order (e.g. from an external
/// shrinkage fit).
inline NestedModels order_as_given(const Dataset& d, const TermSet& order) {
  return detail::nest_in_order(expand_terms(d, order), {});
}

/// Reads one term label per line; blank lines and lines starting with '#'
/// are skipped.
inline TermSet read_order_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open order file \"" + path + "\"");
  TermSet ts;
  std::string line;
  while (std::getline(in, line)) {
    auto s = detail::trim(line);
    if (s.empty() || s.front() == '#') continue;
    ts.add(Term::parse(s));
  }
  if (ts.size() == 0) throw Error("order file \"" + path + "\" lists no terms");
  return ts;
}

struct HRow {
  std::size_t size = 0;
  std::size_t h_hat = 0;
};

/// Consistency-at-the-true-model rule: the smallest model whose estimated
/// VC dimension is within t of its nominal one; if none is, the model with
/// the smallest discrepancy (first one on ties).
inline std::size_t select_by_h(const std::vector<HRow>& rows, const std::function<std::size_t(std::size_t)>& vcd_of,
                               std::size_t t) {
  if (rows.empty()) throw Error("select_by_h: no models");
  auto discrepancy = [&](const HRow& r) {
    const auto v = vcd_of(r.size);
    return r.h_hat > v ? r.h_hat - v : v - r.h_hat;
  };
  std::size_t best = rows.size();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (discrepancy(rows[k]) > t) continue;
    if (best == rows.size() || rows[k].size < rows[best].size) best = k;
  }
  if (best != rows.size()) return best;
  best = 0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (discrepancy(rows[k]) < discrepancy(rows[best])) best = k;
  }
  return best;
}

inline std::size_t argmin_index(const std::vector<double>& v) {
  if (v.empty()) throw Error("argmin of an empty column");
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

struct PipelineOptions {
  std::size_t threshold = 2;
  HGridMode h_grid = HGridMode::full;
  CGrid c_grid{};
  VcdConvention vcd = VcdConvention::params;
  bool legacy = false;
};

struct ReportRow {
  std::size_t size = 0;  // number of terms
  std::size_t vcd = 0;   // nominal VC dimension under the chosen convention
  std::string terms;     // '+'-joined term labels
  std::size_t h_hat = 0;
  double c_hat = 0.0;
  double r_emp = 0.0;
  double erm1 = 0.0;
  double erm2 = 0.0;
  double bic = 0.0;
  XiCurve curve;
};

struct RiskReport {
  std::vector<ReportRow> rows;
  std::size_t selected_by_h = 0;
  std::size_t selected_by_erm1 = 0;
  std::size_t selected_by_erm2 = 0;
  std::size_t selected_by_bic = 0;
  std::size_t threshold_t = 2;
};

namespace detail {

/// Leave-one-out MSE of a least-squares fit via the hat-matrix shortcut.
inline double loo_mse(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
  const Eigen::VectorXd beta = cod.solve(y);
  const Eigen::VectorXd resid = y - x * beta;
  // Leverage h_ii = x_i . (X^+)_{:,i}, the diagonal of X X^+.
  const Eigen::MatrixXd pinv = cod.pseudoInverse();
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double lev = x.row(i).dot(pinv.col(i));
    const double denom = 1.0 - lev;
    const double e = denom > 1e-12 ? resid(i) / denom : 0.0;
    s += e * e;
  }
  return s / static_cast<double>(x.rows());
}

}  // namespace detail

/// Estimates h-hat, the ERM bounds and BIC for every model of the list, then
/// applies the four selectors.
inline RiskReport run_pipeline(const Dataset& d, const std::vector<ModelSpec>& models, const XiConfig& xi_cfg,
                               const RiskConfig& risk_cfg, const PipelineOptions& opt = {}) {
  if (models.empty()) throw Error("run_pipeline: empty model list");
  risk_cfg.validate();
  xi_cfg.validate(d.n_rows());
  const auto h_grid = make_h_grid(xi_cfg.design_points, opt.h_grid);
  const std::size_t n = d.n_rows();

  RiskReport report;
  report.threshold_t = opt.threshold;
  for (const auto& spec : models) {
    spec.validate(d.n_covariates());
    ReportRow row;
    row.size = spec.term_indices.size();
    row.vcd = model_vcd(spec, opt.vcd);
    if (row.vcd == 0) throw Error("run_pipeline: model with VC dimension 0 under the chosen convention");
    for (auto i : spec.term_indices) {
      if (!row.terms.empty()) row.terms += "+";
      row.terms += d.covariate_names[i];
    }

    VcFit vc;
    if (opt.legacy) {
      row.curve = estimate_xi_legacy(d, spec, xi_cfg);
      vc = estimate_h_legacy(row.curve, h_grid);
    } else {
      row.curve = estimate_xi(d, spec, xi_cfg);
      vc = fit_vc(row.curve, row.vcd, h_grid, opt.c_grid);
    }
    row.h_hat = vc.h_hat;
    row.c_hat = vc.c_hat;

    const FittedModel fm = fit(d, spec);
    row.r_emp = risk_cfg.cross_validated_remp ? detail::loo_mse(design_matrix(d, spec), d.response)
                                              : fm.training_rss / static_cast<double>(n);
    row.erm1 = erm1(row.r_emp, risk_cfg.m, n, risk_cfg.eta, row.h_hat);
    row.erm2 = erm2(row.r_emp, risk_cfg.m, n, risk_cfg.eta, row.h_hat);
    row.bic = bic(fm, n);
    report.rows.push_back(std::move(row));
  }

  std::vector<HRow> h_rows;
  std::vector<double> e1, e2, b;
  for (const auto& r : report.rows) {
    h_rows.push_back({r.size, r.h_hat});
    e1.push_back(r.erm1);
    e2.push_back(r.erm2);
    b.push_back(r.bic);
  }
  // The nominal VCD depends only on the size, so any row of that size answers.
  auto vcd_of = [&](std::size_t size) {
    for (const auto& r : report.rows) {
      if (r.size == size) return r.vcd;
    }
    return std::size_t{0};
  };
  report.selected_by_h = select_by_h(h_rows, vcd_of, opt.threshold);
  report.selected_by_erm1 = argmin_index(e1);
  report.selected_by_erm2 = argmin_index(e2);
  report.selected_by_bic = argmin_index(b);
  return report;
}

}  // namespace vcdim
