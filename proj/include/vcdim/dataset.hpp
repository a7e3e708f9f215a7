#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "vcdim/error.hpp"
#include "vcdim/rng.hpp"

namespace vcdim {

/// Numeric design matrix plus response. Covariates are stored column-major
/// in file order; the response is kept separately. The intercept is never a
/// data column, the fitter adds it.
struct Dataset {
  std::vector<std::string> covariate_names;
  Eigen::MatrixXd covariates;  // n_rows x n_covariates
  std::string response_name;
  Eigen::VectorXd response;
  bool standardized = false;
  /// Columns that had zero spread when standardized (left centred at 0).
  std::vector<std::string> constant_columns;

  [[nodiscard]] std::size_t n_rows() const { return static_cast<std::size_t>(response.size()); }
  [[nodiscard]] std::size_t n_covariates() const { return covariate_names.size(); }

  [[nodiscard]] std::optional<std::size_t> covariate_index(std::string_view name) const {
    auto it = std::find(covariate_names.begin(), covariate_names.end(), name);
    if (it == covariate_names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - covariate_names.begin());
  }

  /// Covariate or response column by name.
  [[nodiscard]] Eigen::VectorXd column(std::string_view name) const {
    if (name == response_name) return response;
    if (auto i = covariate_index(name)) return covariates.col(static_cast<Eigen::Index>(*i));
    throw Error("unknown column \"" + std::string(name) + "\"");
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_real(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline double sample_mean(const Eigen::Ref<const Eigen::VectorXd>& v) { return v.mean(); }

inline double sample_sd(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const auto n = v.size();
  if (n < 2) return 0.0;
  const double mu = v.mean();
  return std::sqrt((v.array() - mu).square().sum() / static_cast<double>(n - 1));
}

}  // namespace detail

/// Reads a comma-separated file with a header row. Every column must be
/// numeric; `response` names the response column.
inline Dataset load_csv(const std::string& path, const std::string& response) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open \"" + path + "\"");

  std::string line;
  if (!std::getline(in, line)) throw Error("\"" + path + "\": empty file, header row expected");
  std::vector<std::string> header;
  {
    std::unordered_set<std::string> seen;
    for (auto cell : detail::split_commas(line)) {
      std::string name(cell);
      if (name.empty()) throw Error("\"" + path + "\": empty column name in header");
      if (!seen.insert(name).second) throw Error("\"" + path + "\": duplicate column \"" + name + "\"");
      header.push_back(std::move(name));
    }
  }
  auto resp_it = std::find(header.begin(), header.end(), response);
  if (resp_it == header.end()) throw Error("\"" + path + "\": missing response column \"" + response + "\"");
  const auto resp_col = static_cast<std::size_t>(resp_it - header.begin());

  std::vector<std::vector<double>> cols(header.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_commas(line);
    if (cells.size() != header.size()) {
      throw Error("\"" + path + "\": row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                  " cells, expected " + std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      auto v = detail::parse_real(cells[c]);
      if (!v) {
        throw Error("\"" + path + "\": row " + std::to_string(line_no) + ", column \"" + header[c] +
                    "\": cannot parse \"" + std::string(cells[c]) + "\" as a finite real");
      }
      cols[c].push_back(*v);
    }
  }
  const std::size_t n = cols.front().size();
  if (n < 2) throw Error("\"" + path + "\": at least 2 data rows required, found " + std::to_string(n));

  Dataset d;
  d.response_name = response;
  d.response = Eigen::Map<const Eigen::VectorXd>(cols[resp_col].data(), static_cast<Eigen::Index>(n));
  d.covariates.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(header.size() - 1));
  Eigen::Index out = 0;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == resp_col) continue;
    d.covariate_names.push_back(header[c]);
    d.covariates.col(out++) = Eigen::Map<const Eigen::VectorXd>(cols[c].data(), static_cast<Eigen::Index>(n));
  }
  return d;
}

/// Centre and scale every column to mean 0 and sample sd 1 (n-1 denominator).
/// Columns with zero spread are centred only and recorded in
/// `constant_columns`. With `include_response = false` the response is left
/// on its original scale.
inline Dataset standardize(const Dataset& d, bool include_response = true) {
  if (d.n_rows() < 2) throw Error("standardize: at least 2 rows required");
  Dataset out = d;
  out.constant_columns.clear();

  auto scale = [&](Eigen::Ref<Eigen::VectorXd> v, const std::string& name) {
    const double mu = detail::sample_mean(v);
    const double sd = detail::sample_sd(v);
    if (!(sd > 1e-14 * std::max(1.0, std::abs(mu)))) {
      v.setZero();
      out.constant_columns.push_back(name);
      return;
    }
    v = (v.array() - mu) / sd;
  };

  for (Eigen::Index c = 0; c < out.covariates.cols(); ++c) {
    scale(out.covariates.col(c), out.covariate_names[static_cast<std::size_t>(c)]);
  }
  if (include_response) scale(out.response, out.response_name);
  out.standardized = true;
  return out;
}

// ---------------------------------------------------------------------------
// Terms

struct Term {
  enum class Kind { raw, square, product };
  Kind kind = Kind::raw;
  std::string a;
  std::string b;  // product only

  static Term raw(std::string name) { return {Kind::raw, std::move(name), {}}; }
  static Term square(std::string name) { return {Kind::square, std::move(name), {}}; }
  static Term product(std::string x, std::string y) { return {Kind::product, std::move(x), std::move(y)}; }

  /// Column label: "Y", "Y^2", "Y:D".
  [[nodiscard]] std::string label() const {
    switch (kind) {
      case Kind::raw: return a;
      case Kind::square: return a + "^2";
      case Kind::product: return a + ":" + b;
    }
    return a;
  }

  /// Inverse of label().
  static Term parse(std::string_view text) {
    text = detail::trim(text);
    if (text.empty()) throw Error("empty term");
    if (auto colon = text.find(':'); colon != std::string_view::npos) {
      auto x = detail::trim(text.substr(0, colon));
      auto y = detail::trim(text.substr(colon + 1));
      if (x.empty() || y.empty()) throw Error("malformed product term \"" + std::string(text) + "\"");
      return product(std::string(x), std::string(y));
    }
    if (text.size() > 2 && text.substr(text.size() - 2) == "^2") {
      return square(std::string(detail::trim(text.substr(0, text.size() - 2))));
    }
    return raw(std::string(text));
  }

  friend bool operator==(const Term&, const Term&) = default;
};

/// Ordered list of distinct terms.
class TermSet {
 public:
  TermSet() = default;
  explicit TermSet(std::vector<Term> terms) {
    for (auto& t : terms) add(std::move(t));
  }

  void add(Term t) {
    if (std::find(terms_.begin(), terms_.end(), t) != terms_.end()) {
      throw Error("duplicate term \"" + t.label() + "\"");
    }
    terms_.push_back(std::move(t));
  }

  /// Comma-separated labels, e.g. "Y,D,Y^2,Y:D".
  static TermSet parse(std::string_view list) {
    TermSet ts;
    for (auto cell : detail::split_commas(list)) {
      if (!cell.empty()) ts.add(Term::parse(cell));
    }
    return ts;
  }

  /// Every covariate of `d` as a raw term.
  static TermSet all_raw(const Dataset& d) {
    TermSet ts;
    for (const auto& n : d.covariate_names) ts.add(Term::raw(n));
    return ts;
  }

  [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }
  [[nodiscard]] std::size_t size() const { return terms_.size(); }

 private:
  std::vector<Term> terms_;
};

/// Evaluates each term on the covariates of `d`; the result has one
/// covariate column per term, in order, and is not standardized.
inline Dataset expand_terms(const Dataset& d, const TermSet& t) {
  auto lookup = [&](const std::string& name) -> Eigen::Index {
    if (name == d.response_name) throw Error("term \"" + name + "\" refers to the response column");
    auto i = d.covariate_index(name);
    if (!i) throw Error("unknown term name \"" + name + "\"");
    return static_cast<Eigen::Index>(*i);
  };

  Dataset out;
  out.response_name = d.response_name;
  out.response = d.response;
  out.covariates.resize(static_cast<Eigen::Index>(d.n_rows()), static_cast<Eigen::Index>(t.size()));
  Eigen::Index c = 0;
  for (const auto& term : t.terms()) {
    const auto a = d.covariates.col(lookup(term.a));
    switch (term.kind) {
      case Term::Kind::raw: out.covariates.col(c) = a; break;
      case Term::Kind::square: out.covariates.col(c) = a.array().square(); break;
      case Term::Kind::product: out.covariates.col(c) = a.array() * d.covariates.col(lookup(term.b)).array(); break;
    }
    out.covariate_names.push_back(term.label());
    ++c;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic data

/// Linear-model generator: beta_j ~ N(mu_beta, sigma_beta^2) for j = 0..p,
/// x_ij ~ N(mu_x, sigma_x^2), eps_i ~ N(0, sigma_eps^2).
struct SyntheticConfig {
  std::size_t p = 15;
  std::size_t n = 400;
  double sigma_eps = 0.4;
  double sigma_beta = 3.0;
  double mu_beta = 5.0;
  double sigma_x = 2.0;
  double mu_x = 5.0;
  std::uint64_t seed = 1;

  void validate() const {
    if (p == 0) throw Error("synthetic: p must be positive");
    if (n == 0) throw Error("synthetic: n must be positive");
    if (!(sigma_eps > 0) || !(sigma_beta > 0) || !(sigma_x > 0)) {
      throw Error("synthetic: all standard deviations must be strictly positive");
    }
  }
};

namespace detail {
// Substream keys for generate_synthetic.
inline constexpr std::uint64_t kBetaStream = 1;
inline constexpr std::uint64_t kCovariateStream = 2;
inline constexpr std::uint64_t kNoiseStream = 3;
}  // namespace detail

/// Draws a dataset with columns x1..x{p+n_decoys}, y. Decoys follow the
/// covariate law but carry coefficient 0. Column j always comes from the
/// substream (seed, covariate, j), so adding decoys leaves x1..xp, the
/// coefficients and the response unchanged.
inline Dataset generate_synthetic(const SyntheticConfig& cfg, std::size_t n_decoys = 0) {
  cfg.validate();
  const auto n = static_cast<Eigen::Index>(cfg.n);
  const std::size_t total = cfg.p + n_decoys;

  Eigen::VectorXd beta(static_cast<Eigen::Index>(cfg.p + 1));
  {
    auto rng = substream(cfg.seed, {detail::kBetaStream});
    for (Eigen::Index j = 0; j < beta.size(); ++j) beta(j) = rng.normal(cfg.mu_beta, cfg.sigma_beta);
  }

  Dataset d;
  d.covariates.resize(n, static_cast<Eigen::Index>(total));
  for (std::size_t j = 0; j < total; ++j) {
    auto rng = substream(cfg.seed, {detail::kCovariateStream, j});
    for (Eigen::Index i = 0; i < n; ++i) d.covariates(i, static_cast<Eigen::Index>(j)) = rng.normal(cfg.mu_x, cfg.sigma_x);
    d.covariate_names.push_back("x" + std::to_string(j + 1));
  }

  d.response_name = "y";
  d.response.resize(n);
  auto noise = substream(cfg.seed, {detail::kNoiseStream});
  const auto p = static_cast<Eigen::Index>(cfg.p);
  for (Eigen::Index i = 0; i < n; ++i) {
    double y = beta(0);
    for (Eigen::Index j = 0; j < p; ++j) y += beta(j + 1) * d.covariates(i, j);
    d.response(i) = y + noise.normal(0.0, cfg.sigma_eps);
  }
  return d;
}

}  // namespace vcdim
