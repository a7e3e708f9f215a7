#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include <json.hpp>

#include "vcdim/dataset.hpp"
#include "vcdim/error.hpp"
#include "vcdim/experiment.hpp"
#include "vcdim/select.hpp"
#include "vcdim/vcbound.hpp"
#include "vcdim/xi.hpp"

namespace vcdim {

/// Shortest decimal text that reads back to the same double.
inline std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return std::to_string(v);
  return {buf, ptr};
}

/// Writes via a sibling temporary file and a rename, so readers never see a
/// partial file.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write \"" + tmp.string() + "\"");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for \"" + tmp.string() + "\"");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at \"" + path + "\"");
  }
}

// ---------------------------------------------------------------------------
// Dataset

inline std::string dataset_csv(const Dataset& d) {
  std::ostringstream os;
  for (const auto& n : d.covariate_names) os << n << ',';
  os << d.response_name << '\n';
  for (Eigen::Index i = 0; i < d.response.size(); ++i) {
    for (Eigen::Index j = 0; j < d.covariates.cols(); ++j) os << format_real(d.covariates(i, j)) << ',';
    os << format_real(d.response(i)) << '\n';
  }
  return os.str();
}

inline nlohmann::json dataset_json(const Dataset& d) {
  nlohmann::json cols = nlohmann::json::object();
  for (std::size_t j = 0; j < d.n_covariates(); ++j) {
    const auto c = d.covariates.col(static_cast<Eigen::Index>(j));
    cols[d.covariate_names[j]] = std::vector<double>(c.data(), c.data() + c.size());
  }
  cols[d.response_name] = std::vector<double>(d.response.data(), d.response.data() + d.response.size());
  return {{"response", d.response_name}, {"n_rows", d.n_rows()}, {"columns", cols}};
}

// ---------------------------------------------------------------------------
// Xi curve

inline std::string xi_csv(const XiCurve& c) {
  std::ostringstream os;
  os << "n_l,xi\n";
  for (const auto& p : c.points) os << p.n << ',' << format_real(p.xi) << '\n';
  return os.str();
}

inline nlohmann::json xi_json(const XiCurve& c) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : c.points) pts.push_back({{"n_l", p.n}, {"xi", p.xi}});
  return {{"points", pts}};
}

/// Parses the n_l,xi CSV produced by xi_csv.
inline XiCurve parse_xi_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "n_l,xi") throw Error("xi csv: expected header n_l,xi");
  XiCurve c;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_commas(line);
    auto n = cells.size() == 2 ? detail::parse_real(cells[0]) : std::nullopt;
    auto xi = cells.size() == 2 ? detail::parse_real(cells[1]) : std::nullopt;
    if (!n || !xi || *n < 1 || *xi < 0) throw Error("xi csv: malformed row \"" + line + "\"");
    c.points.push_back({static_cast<std::size_t>(*n), *xi, 0.0});
  }
  return c;
}

// ---------------------------------------------------------------------------
// VC fit

inline std::string vcfit_csv(const VcFit& f) {
  std::ostringstream os;
  os << "h,objective\n";
  for (const auto& o : f.objective_at_h) os << o.h << ',' << format_real(o.value) << '\n';
  return os.str();
}

inline nlohmann::json vcfit_json(const VcFit& f, const XiCurve& curve) {
  nlohmann::json obj = nlohmann::json::array();
  for (const auto& o : f.objective_at_h) obj.push_back({{"h", o.h}, {"f", o.value}});
  return {{"h_hat", f.h_hat}, {"c_hat", f.c_hat}, {"objective", obj}, {"residuals", f.residuals},
          {"xi", xi_json(curve)["points"]}};
}

// ---------------------------------------------------------------------------
// Risk report

inline std::string report_csv(const RiskReport& r) {
  std::ostringstream os;
  os << "model,size,vcd,terms,h_hat,c_hat,r_emp,erm1,erm2,bic\n";
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    const auto& row = r.rows[k];
    os << k + 1 << ',' << row.size << ',' << row.vcd << ',' << row.terms << ',' << row.h_hat << ','
       << format_real(row.c_hat) << ',' << format_real(row.r_emp) << ',' << format_real(row.erm1) << ','
       << format_real(row.erm2) << ',' << format_real(row.bic) << '\n';
  }
  return os.str();
}

inline nlohmann::json report_json(const RiskReport& r, const nlohmann::json& config = nlohmann::json::object()) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"size", row.size},
                    {"vcd", row.vcd},
                    {"terms", row.terms},
                    {"h_hat", row.h_hat},
                    {"c_hat", row.c_hat},
                    {"r_emp", row.r_emp},
                    {"erm1", row.erm1},
                    {"erm2", row.erm2},
                    {"bic", row.bic},
                    {"xi", xi_json(row.curve)["points"]}});
  }
  // Selector indices are zero-based row positions.
  return {{"rows", rows},
          {"selected", {{"h", r.selected_by_h}, {"erm1", r.selected_by_erm1}, {"erm2", r.selected_by_erm2}, {"bic", r.selected_by_bic}}},
          {"threshold", r.threshold_t},
          {"config", config}};
}

// ---------------------------------------------------------------------------
// Sweeps

inline std::string sweep_csv(const SweepResult& s) {
  std::ostringstream os;
  os << "seed,size,h_hat,c_hat,erm1,erm2,bic\n";
  for (const auto& r : s.rows) {
    os << r.seed << ',' << r.size << ',' << r.h_hat << ',' << format_real(r.c_hat) << ',' << format_real(r.erm1)
       << ',' << format_real(r.erm2) << ',' << format_real(r.bic) << '\n';
  }
  return os.str();
}

inline nlohmann::json sweep_summary_json(const SweepResult& s, const nlohmann::json& config = nlohmann::json::object()) {
  return {{"rows", s.rows.size()},
          {"hit_rate", {{"h", s.hit_rate_h}, {"erm1", s.hit_rate_erm1}, {"erm2", s.hit_rate_erm2}, {"bic", s.hit_rate_bic}}},
          {"config", config}};
}

inline nlohmann::json sweep_json(const SweepResult& s, const nlohmann::json& config = nlohmann::json::object()) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : s.rows) {
    rows.push_back({{"seed", r.seed}, {"size", r.size}, {"h_hat", r.h_hat}, {"c_hat", r.c_hat},
                    {"erm1", r.erm1}, {"erm2", r.erm2}, {"bic", r.bic}});
  }
  auto j = sweep_summary_json(s, config);
  j["rows"] = rows;
  return j;
}

}  // namespace vcdim
