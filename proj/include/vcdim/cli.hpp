#pragma once

// Command-line front end: argument parsing into a RunConfig and dispatch to
// the library. Kept header-only so tests can drive it in-process.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vcdim/vcdim.hpp"

namespace vcdim::cli {

/// Bad command line. exit_code is 0 for --help, 1 otherwise.
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& msg, int code) : std::runtime_error(msg), exit_code(code) {}
  int exit_code;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitModule = 2;
inline constexpr int kExitIo = 3;

struct RunConfig {
  std::string command;
  std::optional<std::string> input_path;
  std::string response;
  std::string terms;
  std::string order = "correlation";
  std::string output_path;
  std::string summary_path;
  std::string format = "csv";

  SyntheticConfig synthetic;
  bool synthetic_n_given = false;
  std::size_t decoys = 0;

  XiConfig xi;
  bool design_points_given = false;
  RiskConfig risk;
  PipelineOptions pipeline;

  std::vector<std::size_t> sizes;
  std::vector<std::uint64_t> seeds;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool standardize = true;
  bool standardize_response = false;
};

namespace detail {

/// "50,100,150" or "50:400:50" (inclusive range with step) or "9:23".
inline std::vector<std::uint64_t> parse_uint_list(const std::string& text, const std::string& flag) {
  std::vector<std::uint64_t> out;
  auto bad = [&] { return UsageError("--" + flag + ": cannot parse \"" + text + "\"", kExitUsage); };
  auto to_uint = [&](std::string_view s) {
    s = vcdim::detail::trim(s);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) throw bad();
    return v;
  };
  for (auto item : vcdim::detail::split_commas(text)) {
    if (item.empty()) continue;
    if (auto c1 = item.find(':'); c1 != std::string_view::npos) {
      const auto rest = item.substr(c1 + 1);
      const auto c2 = rest.find(':');
      const std::uint64_t lo = to_uint(item.substr(0, c1));
      const std::uint64_t hi = to_uint(c2 == std::string_view::npos ? rest : rest.substr(0, c2));
      const std::uint64_t step = c2 == std::string_view::npos ? 1 : to_uint(rest.substr(c2 + 1));
      if (step == 0 || hi < lo) throw bad();
      for (std::uint64_t v = lo; v <= hi; v += step) out.push_back(v);
    } else {
      out.push_back(to_uint(item));
    }
  }
  if (out.empty()) throw bad();
  return out;
}

inline std::vector<std::size_t> to_sizes(const std::vector<std::uint64_t>& v) { return {v.begin(), v.end()}; }

}  // namespace detail

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"simulate", "xi", "fit-h", "select", "sweep", "legacy-sweep"};
  return c;
}

/// Parses and validates a command line. Throws UsageError.
inline RunConfig parse_args(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"Empirical VC dimension estimation and model selection for linear regression", "vcdim"};
  app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
  app.get_formatter()->column_width(36);

  std::string command;
  app.add_option("command", command, "simulate | xi | fit-h | select | sweep | legacy-sweep")
      ->required()
      ->check(CLI::IsMember(commands()));

  std::string data, design_points, sizes, seeds, threads = "", order, vcd = "params", h_grid = "full";
  std::string bound_mode = "per-half", inner = "sum", legacy_flip = "off";
  long long threshold = 2;

  auto* data_opt = app.add_option("--data", data, "input CSV (header row, numeric cells)");
  auto* resp_opt = app.add_option("--response", cfg.response, "response column of --data");
  auto* terms_opt = app.add_option("--terms", cfg.terms, "comma-separated terms, e.g. Y,D,Y^2,Y:D (default: every covariate)");
  app.add_option("--order", order, "model order for select: correlation | file:<path>")->default_val("correlation");
  auto* dp_opt = app.add_option("--design-points", design_points, "sample sizes N_L, e.g. 50,100,150 or 50:400:50");
  app.add_option("--b1", cfg.xi.b1, "inner bootstrap replicates")->default_val(50)->check(CLI::PositiveNumber);
  app.add_option("--b2", cfg.xi.b2, "outer bootstrap replicates")->default_val(50)->check(CLI::PositiveNumber);
  app.add_option("--m", cfg.xi.m, "number of loss intervals")->default_val(10)->check(CLI::PositiveNumber);
  app.add_option("--eta", cfg.risk.eta, "confidence parameter of the ERM bounds")->default_val(0.05)->check(CLI::Range(0.0, 1.0));
  app.add_option("--threshold", threshold, "tolerance t of the h-hat selector")->default_val(2)->check(CLI::NonNegativeNumber);
  app.add_option("--seed", cfg.seed, "master seed")->default_val(1);
  app.add_option("--threads", threads, "worker threads or 'auto' (fallback: VCDIM_THREADS)");
  app.add_option("--out", cfg.output_path, "output file")->required();
  app.add_option("--summary", cfg.summary_path, "sweep summary JSON (default: <out>.summary.json)");
  app.add_option("--format", cfg.format, "csv | json")->default_val("csv")->check(CLI::IsMember({"csv", "json"}));
  auto* legacy_opt = app.add_flag("--legacy", cfg.pipeline.legacy, "use the label-flip estimator and universal bound");
  app.add_option("--vcd-convention", vcd, "params | covariates")->default_val("params")->check(CLI::IsMember({"params", "covariates"}));
  app.add_option("--h-grid", h_grid, "full | capped | from-min")->default_val("full")->check(CLI::IsMember({"full", "capped", "from-min"}));
  app.add_option("--bound-mode", bound_mode, "per-half | common | global")->default_val("per-half")->check(CLI::IsMember({"per-half", "common", "global"}));
  app.add_option("--inner", inner, "sum | mean of the b1 inner replicates")->default_val("sum")->check(CLI::IsMember({"sum", "mean"}));
  app.add_option("--legacy-flip", legacy_flip, "on | off")->default_val("off")->check(CLI::IsMember({"on", "off"}));
  app.add_option("--c-min", cfg.pipeline.c_grid.lo, "smallest candidate c")->default_val(0.01)->check(CLI::PositiveNumber);
  app.add_option("--c-max", cfg.pipeline.c_grid.hi, "largest candidate c")->default_val(100.0)->check(CLI::PositiveNumber);
  app.add_option("--c-step", cfg.pipeline.c_grid.step, "c grid step")->default_val(0.01)->check(CLI::PositiveNumber);
  app.add_flag("--cv-remp", cfg.risk.cross_validated_remp, "leave-one-out MSE as the empirical risk");
  auto* nostd_opt = app.add_flag("!--no-standardize", cfg.standardize, "skip centring and scaling");
  auto* stdy_opt = app.add_flag("--standardize-response", cfg.standardize_response, "also standardize the response");
  nostd_opt->excludes(stdy_opt);

  // Synthetic data.
  std::vector<CLI::Option*> synth;
  synth.push_back(app.add_option("--p", cfg.synthetic.p, "true covariates")->check(CLI::PositiveNumber));
  auto* n_opt = app.add_option("--n", cfg.synthetic.n, "sample size")->check(CLI::PositiveNumber);
  synth.push_back(n_opt);
  synth.push_back(app.add_option("--sigma-eps", cfg.synthetic.sigma_eps, "noise sd")->check(CLI::PositiveNumber));
  synth.push_back(app.add_option("--sigma-beta", cfg.synthetic.sigma_beta, "coefficient sd")->check(CLI::PositiveNumber));
  synth.push_back(app.add_option("--mu-beta", cfg.synthetic.mu_beta, "coefficient mean"));
  synth.push_back(app.add_option("--sigma-x", cfg.synthetic.sigma_x, "covariate sd")->check(CLI::PositiveNumber));
  synth.push_back(app.add_option("--mu-x", cfg.synthetic.mu_x, "covariate mean"));
  synth.push_back(app.add_option("--decoys", cfg.decoys, "zero-coefficient covariates appended (simulate)"));
  auto* sizes_opt = app.add_option("--sizes", sizes, "sweep model sizes, e.g. 9:23");
  auto* seeds_opt = app.add_option("--seeds", seeds, "sweep seeds, e.g. 1:20 (default: --seed)");
  // Config files split comma lists into several values; glue them back.
  for (auto* o : {terms_opt, dp_opt, sizes_opt, seeds_opt}) o->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::Join);
  for (auto* o : synth) data_opt->excludes(o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw UsageError(app.help(), kExitOk);
  } catch (const CLI::ParseError& e) {
    throw UsageError(std::string(e.what()) + "\n" + "Run with --help for usage.", kExitUsage);
  }

  cfg.command = command;
  if (!data.empty()) cfg.input_path = data;
  if (cfg.input_path && cfg.response.empty()) throw UsageError("--data requires --response", kExitUsage);
  if (!cfg.input_path && resp_opt->count() > 0) throw UsageError("--response requires --data", kExitUsage);
  const bool sweep = command == "sweep" || command == "legacy-sweep";
  if (cfg.input_path && (command == "simulate" || sweep)) {
    throw UsageError("--data cannot be used with " + command + " (it generates its own data)", kExitUsage);
  }
  if (command == "legacy-sweep") cfg.pipeline.legacy = true;
  if (cfg.pipeline.legacy && command == "simulate") throw UsageError("--legacy does not apply to simulate", kExitUsage);
  (void)legacy_opt;

  cfg.order = order;
  if (cfg.order != "correlation" && cfg.order.rfind("file:", 0) != 0) {
    throw UsageError("--order must be 'correlation' or 'file:<path>'", kExitUsage);
  }
  if (cfg.order == "file:") throw UsageError("--order file: needs a path", kExitUsage);

  cfg.pipeline.threshold = static_cast<std::size_t>(threshold);
  cfg.pipeline.vcd = vcd == "params" ? VcdConvention::params : VcdConvention::covariates;
  cfg.pipeline.h_grid = h_grid == "full" ? HGridMode::full : h_grid == "capped" ? HGridMode::capped : HGridMode::from_min;
  cfg.xi.bound_mode = bound_mode == "per-half" ? BoundMode::per_half : bound_mode == "common" ? BoundMode::common : BoundMode::global;
  cfg.xi.inner = inner == "sum" ? InnerReduction::sum : InnerReduction::mean;
  cfg.xi.legacy_flip = legacy_flip == "on";
  cfg.risk.m = cfg.xi.m;
  if (cfg.pipeline.c_grid.hi < cfg.pipeline.c_grid.lo) throw UsageError("--c-max must be at least --c-min", kExitUsage);

  if (threads.empty() || threads == "auto") {
    cfg.threads = default_thread_count();
  } else {
    auto v = detail::parse_uint_list(threads, "threads");
    if (v.size() != 1 || v[0] == 0) throw UsageError("--threads must be a positive integer or 'auto'", kExitUsage);
    cfg.threads = v[0];
  }
  cfg.xi.threads = cfg.threads;
  cfg.xi.seed = cfg.seed;
  cfg.synthetic.seed = cfg.seed;
  cfg.synthetic_n_given = n_opt->count() > 0;

  if (!design_points.empty()) {
    cfg.xi.design_points = detail::to_sizes(detail::parse_uint_list(design_points, "design-points"));
    cfg.design_points_given = true;
    for (std::size_t i = 1; i < cfg.xi.design_points.size(); ++i) {
      if (cfg.xi.design_points[i] <= cfg.xi.design_points[i - 1]) {
        throw UsageError("--design-points must be strictly increasing", kExitUsage);
      }
    }
    if (cfg.xi.design_points.front() == 0) throw UsageError("--design-points must be positive", kExitUsage);
  } else if (command == "xi" || command == "fit-h" || command == "select") {
    throw UsageError("--design-points is required for " + command, kExitUsage);
  }

  if (sweep) {
    if (!cfg.synthetic_n_given || !cfg.design_points_given) {
      SweepConfig defaults;
      defaults.synthetic = cfg.synthetic;
      apply_design_defaults(defaults);
      if (!cfg.synthetic_n_given) cfg.synthetic.n = defaults.synthetic.n;
      if (!cfg.design_points_given) cfg.xi.design_points = defaults.xi.design_points;
    }
    if (!sizes.empty()) {
      cfg.sizes = detail::to_sizes(detail::parse_uint_list(sizes, "sizes"));
    } else {
      const std::size_t p = cfg.synthetic.p;
      for (std::size_t s = p > 6 ? p - 6 : 1; s <= p + 8; ++s) cfg.sizes.push_back(s);
    }
    for (auto s : cfg.sizes) {
      if (s == 0) throw UsageError("--sizes must be positive", kExitUsage);
    }
    cfg.seeds = seeds.empty() ? std::vector<std::uint64_t>{cfg.seed} : detail::parse_uint_list(seeds, "seeds");
  } else if (!sizes.empty() || !seeds.empty()) {
    throw UsageError("--sizes/--seeds only apply to sweep and legacy-sweep", kExitUsage);
  }
  if (cfg.summary_path.empty()) cfg.summary_path = cfg.output_path + ".summary.json";
  return cfg;
}

inline nlohmann::json config_json(const RunConfig& c) {
  auto hg = c.pipeline.h_grid == HGridMode::full ? "full" : c.pipeline.h_grid == HGridMode::capped ? "capped" : "from-min";
  auto bm = c.xi.bound_mode == BoundMode::per_half ? "per-half" : c.xi.bound_mode == BoundMode::common ? "common" : "global";
  return {{"command", c.command},
          {"data", c.input_path.value_or("")},
          {"response", c.response},
          {"terms", c.terms},
          {"order", c.order},
          {"design_points", c.xi.design_points},
          {"b1", c.xi.b1},
          {"b2", c.xi.b2},
          {"m", c.xi.m},
          {"eta", c.risk.eta},
          {"threshold", c.pipeline.threshold},
          {"seed", c.seed},
          {"legacy", c.pipeline.legacy},
          {"legacy_flip", c.xi.legacy_flip},
          {"vcd_convention", c.pipeline.vcd == VcdConvention::params ? "params" : "covariates"},
          {"h_grid", hg},
          {"bound_mode", bm},
          {"inner", c.xi.inner == InnerReduction::sum ? "sum" : "mean"},
          {"c_grid", {c.pipeline.c_grid.lo, c.pipeline.c_grid.hi, c.pipeline.c_grid.step}},
          {"standardize", c.standardize},
          {"standardize_response", c.standardize_response},
          {"synthetic",
           {{"p", c.synthetic.p},
            {"n", c.synthetic.n},
            {"sigma_eps", c.synthetic.sigma_eps},
            {"sigma_beta", c.synthetic.sigma_beta},
            {"mu_beta", c.synthetic.mu_beta},
            {"sigma_x", c.synthetic.sigma_x},
            {"mu_x", c.synthetic.mu_x}}},
          {"sizes", c.sizes},
          {"seeds", c.seeds}};
}

namespace detail {

inline Dataset raw_input(const RunConfig& c) {
  if (c.input_path) return load_csv(*c.input_path, c.response);
  return generate_synthetic(c.synthetic, c.decoys);
}

inline Dataset prepare(const RunConfig& c, Dataset d) {
  return c.standardize ? standardize(d, c.standardize_response) : d;
}

inline TermSet terms_for(const RunConfig& c, const Dataset& d) {
  return c.terms.empty() ? TermSet::all_raw(d) : TermSet::parse(c.terms);
}

/// Model data for xi / fit-h: expanded terms, all of them in one model.
inline Dataset single_model_data(const RunConfig& c) {
  const Dataset raw = raw_input(c);
  return prepare(c, expand_terms(raw, terms_for(c, raw)));
}

inline void emit(const RunConfig& c, const std::string& csv, const nlohmann::json& json) {
  write_file_atomic(c.output_path, c.format == "json" ? json.dump(2) + "\n" : csv);
}

}  // namespace detail

/// Executes a parsed command. Returns the process exit status.
inline int run(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    const auto echo = config_json(c);
    if (c.command == "simulate") {
      const Dataset d = generate_synthetic(c.synthetic, c.decoys);
      detail::emit(c, dataset_csv(d), dataset_json(d));
      out << "simulate: " << d.n_rows() << " rows, " << d.n_covariates() << " covariates -> " << c.output_path << '\n';
    } else if (c.command == "xi" || c.command == "fit-h") {
      const Dataset d = detail::single_model_data(c);
      const ModelSpec spec = ModelSpec::prefix(d.n_covariates());
      const XiCurve curve = c.pipeline.legacy ? estimate_xi_legacy(d, spec, c.xi) : estimate_xi(d, spec, c.xi);
      if (c.command == "xi") {
        auto j = xi_json(curve);
        j["config"] = echo;
        detail::emit(c, xi_csv(curve), j);
        out << "xi: " << curve.points.size() << " design points, xi(" << curve.points.front().n
            << ")=" << format_real(curve.points.front().xi) << ", xi(" << curve.points.back().n
            << ")=" << format_real(curve.points.back().xi) << '\n';
      } else {
        const auto grid = make_h_grid(c.xi.design_points, c.pipeline.h_grid);
        const VcFit fit = c.pipeline.legacy ? estimate_h_legacy(curve, grid)
                                            : fit_vc(curve, model_vcd(spec, c.pipeline.vcd), grid, c.pipeline.c_grid);
        auto j = vcfit_json(fit, curve);
        j["config"] = echo;
        detail::emit(c, vcfit_csv(fit), j);
        out << "fit-h: model " << spec.known_vcd() << " parameters, h_hat=" << fit.h_hat
            << ", c_hat=" << format_real(fit.c_hat) << '\n';
      }
    } else if (c.command == "select") {
      const Dataset raw = detail::raw_input(c);
      NestedModels nested = c.order == "correlation" ? order_by_correlation(raw, detail::terms_for(c, raw))
                                                     : order_as_given(raw, read_order_file(c.order.substr(5)));
      for (const auto& e : nested.excluded) err << "warning: term " << e << " has zero variance and was dropped\n";
      const Dataset d = detail::prepare(c, nested.data);
      const RiskReport rep = run_pipeline(d, nested.models, c.xi, c.risk, c.pipeline);
      detail::emit(c, report_csv(rep), report_json(rep, echo));
      const auto& sel = rep.rows[rep.selected_by_h];
      out << "select: model " << rep.selected_by_h + 1 << " (" << sel.terms << "), h_hat=" << sel.h_hat
          << ", c_hat=" << format_real(sel.c_hat) << '\n';
    } else {
      SweepConfig sc;
      sc.synthetic = c.synthetic;
      sc.sizes = c.sizes;
      sc.xi = c.xi;
      sc.risk = c.risk;
      sc.pipeline = c.pipeline;
      sc.seeds = c.seeds;
      sc.standardize_response = c.standardize_response;
      const SweepResult res = run_sweep(sc);
      if (c.format == "json") {
        detail::emit(c, {}, sweep_json(res, echo));
      } else {
        detail::emit(c, sweep_csv(res), {});
        write_file_atomic(c.summary_path, sweep_summary_json(res, echo).dump(2) + "\n");
      }
      out << c.command << ": " << res.rows.size() << " rows, selector hit rate h=" << format_real(res.hit_rate_h)
          << " erm1=" << format_real(res.hit_rate_erm1) << " erm2=" << format_real(res.hit_rate_erm2)
          << " bic=" << format_real(res.hit_rate_bic) << '\n';
    }
    return kExitOk;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitModule;
  }
}

/// parse_args + run, mapping usage errors to their exit status.
inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig cfg;
  try {
    cfg = parse_args(argc, argv);
  } catch (const UsageError& e) {
    (e.exit_code == kExitOk ? out : err) << e.what() << '\n';
    return e.exit_code;
  }
  return run(cfg, out, err);
}

}  // namespace vcdim::cli
