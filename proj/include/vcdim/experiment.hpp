#pragma once

// Simulation studies around a known linear truth: sweeps over conjectured
// model sizes (true covariates first, then zero-coefficient decoys) and
// seed-replication studies at the true model.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "vcdim/dataset.hpp"
#include "vcdim/error.hpp"
#include "vcdim/select.hpp"

namespace vcdim {

struct SweepConfig {
  SyntheticConfig synthetic;
  std::vector<std::size_t> sizes;
  XiConfig xi;
  RiskConfig risk;
  PipelineOptions pipeline;
  std::vector<std::uint64_t> seeds{1};
  bool standardize_response = false;

  void validate() const {
    synthetic.validate();
    if (sizes.empty()) throw Error("sweep: no model sizes");
    if (std::find(sizes.begin(), sizes.end(), std::size_t{0}) != sizes.end()) {
      throw Error("sweep: model sizes must be positive");
    }
    if (seeds.empty()) throw Error("sweep: no seeds");
    xi.validate(synthetic.n);
    risk.validate();
  }

  [[nodiscard]] std::size_t decoys() const {
    const auto largest = *std::max_element(sizes.begin(), sizes.end());
    return largest > synthetic.p ? largest - synthetic.p : 0;
  }
};

/// Paper-style defaults: p <= 30 uses N = 400 and N_L = 50, 100, ..., 400;
/// larger p uses N = 600 and N_L = 75, 150, ..., 600.
inline void apply_design_defaults(SweepConfig& cfg) {
  const bool large = cfg.synthetic.p > 30;
  cfg.synthetic.n = large ? 600 : 400;
  const std::size_t step = large ? 75 : 50;
  cfg.xi.design_points.clear();
  for (std::size_t n = step; n <= cfg.synthetic.n; n += step) cfg.xi.design_points.push_back(n);
}

struct SweepRow {
  std::uint64_t seed = 0;
  std::size_t size = 0;
  std::size_t h_hat = 0;
  double c_hat = 0.0;
  double erm1 = 0.0;
  double erm2 = 0.0;
  double bic = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Fraction of seeds for which each selector picked size p.
  double hit_rate_h = 0.0;
  double hit_rate_erm1 = 0.0;
  double hit_rate_erm2 = 0.0;
  double hit_rate_bic = 0.0;
};

/// Standardized synthetic data for one seed, with enough decoys for the
/// largest size.
inline Dataset sweep_dataset(const SweepConfig& cfg, std::uint64_t seed) {
  SyntheticConfig sc = cfg.synthetic;
  sc.seed = seed;
  return standardize(generate_synthetic(sc, cfg.decoys()), cfg.standardize_response);
}

/// Full pipeline for every (seed, size); rows are ordered seed-major.
inline SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepResult out;
  std::size_t hits_h = 0, hits_e1 = 0, hits_e2 = 0, hits_b = 0;
  for (std::uint64_t seed : cfg.seeds) {
    const Dataset d = sweep_dataset(cfg, seed);
    std::vector<ModelSpec> models;
    for (auto s : cfg.sizes) models.push_back(ModelSpec::prefix(s));
    XiConfig xc = cfg.xi;
    xc.seed = seed;
    const RiskReport rep = run_pipeline(d, models, xc, cfg.risk, cfg.pipeline);
    for (const auto& r : rep.rows) out.rows.push_back({seed, r.size, r.h_hat, r.c_hat, r.erm1, r.erm2, r.bic});
    const auto p = cfg.synthetic.p;
    hits_h += rep.rows[rep.selected_by_h].size == p;
    hits_e1 += rep.rows[rep.selected_by_erm1].size == p;
    hits_e2 += rep.rows[rep.selected_by_erm2].size == p;
    hits_b += rep.rows[rep.selected_by_bic].size == p;
  }
  const double k = static_cast<double>(cfg.seeds.size());
  out.hit_rate_h = static_cast<double>(hits_h) / k;
  out.hit_rate_erm1 = static_cast<double>(hits_e1) / k;
  out.hit_rate_erm2 = static_cast<double>(hits_e2) / k;
  out.hit_rate_bic = static_cast<double>(hits_b) / k;
  return out;
}

struct SeedStudy {
  std::vector<std::size_t> h_hats;  // one per seed, in seed order
  double mean = 0.0;
  double sd = 0.0;  // n-1 denominator
};

/// Mean and sample sd of a set of h-hat values.
inline SeedStudy summarize_h(std::vector<std::size_t> h_hats) {
  if (h_hats.size() < 2) throw Error("seed study: at least 2 seeds required");
  SeedStudy s;
  s.h_hats = std::move(h_hats);
  const double k = static_cast<double>(s.h_hats.size());
  for (auto h : s.h_hats) s.mean += static_cast<double>(h);
  s.mean /= k;
  double ss = 0.0;
  for (auto h : s.h_hats) ss += (static_cast<double>(h) - s.mean) * (static_cast<double>(h) - s.mean);
  s.sd = std::sqrt(ss / (k - 1.0));
  return s;
}

/// h-hat at the true model (size p) across seeds. `sizes` is ignored.
inline SeedStudy seed_study(const SweepConfig& cfg) {
  SweepConfig c = cfg;
  c.sizes = {cfg.synthetic.p};
  if (c.seeds.size() < 2) throw Error("seed study: at least 2 seeds required");
  c.validate();
  std::vector<std::size_t> h_hats(c.seeds.size());
  const auto h_grid = make_h_grid(c.xi.design_points, c.pipeline.h_grid);
  for (std::size_t i = 0; i < c.seeds.size(); ++i) {
    const Dataset d = sweep_dataset(c, c.seeds[i]);
    const ModelSpec truth = ModelSpec::prefix(c.synthetic.p);
    XiConfig xc = c.xi;
    xc.seed = c.seeds[i];
    if (c.pipeline.legacy) {
      h_hats[i] = estimate_h_legacy(estimate_xi_legacy(d, truth, xc), h_grid).h_hat;
    } else {
      h_hats[i] = fit_vc(estimate_xi(d, truth, xc), model_vcd(truth, c.pipeline.vcd), h_grid, c.pipeline.c_grid).h_hat;
    }
  }
  return summarize_h(std::move(h_hats));
}

}  // namespace vcdim
