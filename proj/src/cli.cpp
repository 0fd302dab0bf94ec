#include "carinfo/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "carinfo/io.hpp"
#include "carinfo/simulation.hpp"
#include "carinfo/summaries.hpp"
#include "carinfo/version.hpp"

namespace carinfo {
namespace {

constexpr const char* kCountsFormat =
    "Counts CSV: header 'region_id,stratum,n,y', one row per (region, stratum), integer n >= y >= 0.";
constexpr const char* kAdjacencyFormat =
    "Adjacency file: one line per region, 'id: neighbor1,neighbor2,...'; '#' starts a comment; the relation must be "
    "symmetric.";
constexpr const char* kConfigFormat =
    "Config file: 'key = value' lines with the long flag names as keys (seed, iterations, burn-in, thin, constrain-a0, "
    "a0-min, m0, sigma2-shape, sigma2-scale, tau2-shape, tau2-scale, a-lo, a-hi, stratum, quantiles). Flags given on "
    "the command line override the file.";
constexpr const char* kOutputFormat =
    "Output: samples.csv (one row per retained draw), diagnostics.csv, summary.csv (region_id, n, y, crude rate, "
    "posterior mean, sd, quantiles, informativeness summary) and metadata.txt (flat 'key = value' sidecar).";

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags shared by the three fit subcommands. Unset optionals fall back to the
// config file, then to the built-in defaults.
struct FitFlags {
  std::string counts;
  std::string adjacency;
  std::string config;
  std::optional<std::string> stratum;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iterations;
  std::optional<std::size_t> burn_in;
  std::optional<std::size_t> thin;
  std::optional<double> a0_max;
  std::optional<double> a0_min;
  std::optional<int> m0;
  std::optional<double> a_lo;
  std::optional<double> a_hi;
  std::vector<double> quantiles;
  std::string out_dir = "carinfo_out";
};

void add_schedule_flags(CLI::App* cmd, FitFlags& f) {
  cmd->add_option("--seed", f.seed, "Master random seed (default 1)");
  cmd->add_option("--iterations", f.iterations, "Total MCMC iterations (default 20000)");
  cmd->add_option("--burn-in", f.burn_in, "Discarded initial iterations (default 5000)");
  cmd->add_option("--thin", f.thin, "Keep every k-th post-burn-in draw (default 3)");
}

void add_fit_flags(CLI::App* cmd, FitFlags& f) {
  cmd->add_option("--counts", f.counts, "Counts CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--stratum", f.stratum, "Stratum to fit (optional when the file holds one stratum)");
  cmd->add_option("--config", f.config, "Config file")->check(CLI::ExistingFile);
  add_schedule_flags(cmd, f);
  cmd->add_option("--quantiles", f.quantiles, "Summary quantile probabilities (default 0.025,0.5,0.975)")->delimiter(',');
  cmd->add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();
  cmd->footer(std::string(kCountsFormat) + "\n" + kConfigFormat + "\n" + kOutputFormat);
}

FitConfig resolve_config(const FitFlags& f) {
  FitConfig cfg;
  if (!f.config.empty()) cfg = parse_config_file(f.config, cfg);
  if (f.stratum) cfg.stratum = f.stratum;
  if (f.seed) cfg.chain.seed = *f.seed;
  if (f.iterations) cfg.chain.iterations = *f.iterations;
  if (f.burn_in) cfg.chain.burn_in = *f.burn_in;
  if (f.thin) cfg.chain.thin = *f.thin;
  if (f.a0_max) cfg.a0_max = f.a0_max;
  if (f.a0_min) cfg.a0_min = *f.a0_min;
  if (f.m0) cfg.m0 = *f.m0;
  if (f.a_lo) cfg.a_lo = *f.a_lo;
  if (f.a_hi) cfg.a_hi = *f.a_hi;
  if (!f.quantiles.empty()) cfg.quantiles = f.quantiles;
  for (double p : cfg.quantiles)
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("quantile probabilities must lie in (0, 1)");
  if (cfg.a0_max && !(*cfg.a0_max > cfg.a0_min)) throw ValidationError("--constrain-a0 must exceed --a0-min");
  if (cfg.a0_min < 0.0) throw ValidationError("--a0-min must be non-negative");
  try {
    cfg.chain.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  return cfg;
}

CountData load_stratum(const FitFlags& f, FitConfig& cfg, const RegionGraph* graph, std::ostream& err) {
  const auto table = load_counts_file(f.counts);
  for (const auto& w : table.warnings) err << "warning: " << w << '\n';
  const auto strata = table.strata();
  if (!cfg.stratum) {
    if (strata.size() != 1) throw ValidationError("--stratum is required when the counts file holds several strata");
    cfg.stratum = strata.front();
  }
  return table.select(*cfg.stratum, graph);
}

void report_fit(const FitResult& fit, const SummaryTable& summary, const std::vector<std::filesystem::path>& files,
                std::ostream& out) {
  const auto& s = summary.informativeness;
  char line[256];
  std::snprintf(line, sizeof line, "%s: %zu regions, %zu draws; %s mean %.3f, median %.3f, 95%% interval (%.3f, %.3f)\n",
                std::string(model_name(fit.kind)).c_str(), fit.regions(), fit.draws(), fit.informativeness_column.c_str(),
                s.mean, s.median, s.q025, s.q975);
  out << line;
  for (const auto& a : fit.diagnostics.acceptance) {
    std::snprintf(line, sizeof line, "  acceptance %-10s %.3f\n", a.name.c_str(), a.rate());
    out << line;
  }
  for (const auto& p : files) out << "wrote " << p.string() << '\n';
}

int finish_fit(const FitResult& fit, const FitConfig& cfg, const std::string& out_dir, std::ostream& out) {
  const auto summary = summarize(fit, cfg.quantiles);
  ResultBundle bundle;
  bundle.fit = &fit;
  bundle.summary = &summary;
  bundle.metadata = fit_metadata(fit, cfg);
  const auto files = write_results(bundle, out_dir);
  report_fit(fit, summary, files, out);
  return 0;
}

std::optional<ModelKind> kind_from_name(const std::string& s) {
  if (s == "beta-binomial" || s == "bb") return ModelKind::beta_binomial;
  if (s == "logitnormal" || s == "ln") return ModelKind::logitnormal;
  if (s == "car") return ModelKind::car;
  return std::nullopt;
}

ModelKind infer_kind(const PosteriorSamples& s) {
  if (s.find("a_hat0")) return ModelKind::car;
  if (s.find("a_hat")) return ModelKind::logitnormal;
  if (s.find("a")) return ModelKind::beta_binomial;
  throw ValidationError("cannot infer the model from the samples columns; pass --model");
}

FitResult load_fit(const std::string& path, const std::string& model) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open samples file '" + path + "'");
  auto samples = load_samples_csv(in);
  ModelKind kind;
  if (model.empty()) {
    kind = infer_kind(samples);
  } else {
    const auto k = kind_from_name(model);
    if (!k) throw ValidationError("unknown model '" + model + "'");
    kind = *k;
  }
  auto fit = fit_from_samples(std::move(samples), kind);
  // Constraint settings travel in the sidecar next to the samples.
  const auto meta_path = std::filesystem::path(path).parent_path() / "metadata.txt";
  if (std::ifstream meta_in(meta_path); meta_in) {
    for (const auto& [k, v] : load_metadata(meta_in)) {
      if (k == "stratum") fit.stratum = v;
    }
  }
  return fit;
}

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Informativeness-aware small-area rate estimation", "carinfo"};
  app.set_version_flag("--version", std::string("carinfo ") + kVersion);
  app.require_subcommand(1, 1);

  FitFlags f;

  auto* bb = app.add_subcommand("fit-bb", "Fit the hierarchical beta-binomial model");
  add_fit_flags(bb, f);

  auto* ln = app.add_subcommand("fit-ln", "Fit the hierarchical logitnormal model");
  add_fit_flags(ln, f);
  ln->add_option("--a-lo", f.a_lo, "Lower bound of the implied informativeness (default 0)");
  ln->add_option("--a-hi", f.a_hi, "Upper bound of the implied informativeness (default 100)");

  auto* car = app.add_subcommand("fit-car", "Fit the BYM/CAR model, optionally constraining the global informativeness");
  add_fit_flags(car, f);
  car->add_option("--adjacency", f.adjacency, "Adjacency file")->required()->check(CLI::ExistingFile);
  car->add_option("--constrain-a0", f.a0_max, "Upper bound on the global informativeness a_hat0 (off by default)");
  car->add_option("--a0-min", f.a0_min, "Lower bound on a_hat0 (default 0)");
  car->add_option("--m0", f.m0, "Reference neighbor count for a_hat0 (default 3)");
  car->footer(std::string(kCountsFormat) + "\n" + kAdjacencyFormat + "\n" + kConfigFormat + "\n" + kOutputFormat);

  ScenarioGrid grid;
  std::size_t jobs = 1;
  auto* sim = app.add_subcommand("simulate", "Beta-binomial simulation study comparing the two non-spatial models");
  sim->add_option("--I", grid.regions, "Region counts (comma-separated)")->delimiter(',');
  sim->add_option("--a", grid.a, "True informativeness values")->delimiter(',');
  sim->add_option("--pi0", grid.pi0, "True overall rates")->delimiter(',');
  sim->add_option("--L", grid.replicates, "Replicates per cell")->capture_default_str();
  sim->add_option("--jobs", jobs, "Parallel workers")->capture_default_str()->check(CLI::PositiveNumber);
  sim->add_option("--config", f.config, "Config file (schedule keys)")->check(CLI::ExistingFile);
  add_schedule_flags(sim, f);
  sim->add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();
  sim->footer(
      "Trials per region are uniform on [ceil(1/pi0), floor(20/pi0)]. Output: study_replicates.csv (one row per "
      "replicate and model), study_cells.csv (means and RMSE ratios per cell) and metadata.txt.");

  std::optional<double> mu, sigma2, a_in, b_in, xbeta, tau2;
  int m = kReferenceNeighbors;
  auto* inf = app.add_subcommand("informativeness", "Evaluate the informativeness of a prior");
  inf->add_option("--mu", mu, "Logitnormal location");
  inf->add_option("--sigma2", sigma2, "Logitnormal or CAR unstructured variance");
  inf->add_option("--a", a_in, "Beta shape a");
  inf->add_option("--b", b_in, "Beta shape b");
  inf->add_option("--xbeta", xbeta, "CAR linear predictor");
  inf->add_option("--tau2", tau2, "CAR spatial variance");
  inf->add_option("--m", m, "CAR neighbor count")->capture_default_str();
  inf->footer(
      "Give --mu and --sigma2 (logitnormal), --a and --b (beta), or --xbeta, --sigma2, --tau2 and --m (CAR bound).");

  std::string draws_path, model;
  auto* sum = app.add_subcommand("summarize", "Summarize posterior draws written by a fit");
  sum->add_option("--draws", draws_path, "samples.csv from a fit")->required()->check(CLI::ExistingFile);
  sum->add_option("--model", model, "Model (bb, ln, car); inferred from the columns when omitted");
  sum->add_option("--counts", f.counts, "Counts CSV, to attach n, y and crude rates")->check(CLI::ExistingFile);
  sum->add_option("--stratum", f.stratum, "Stratum of the counts to attach");
  sum->add_option("--quantiles", f.quantiles, "Quantile probabilities")->delimiter(',');
  sum->add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();
  sum->footer(std::string(kCountsFormat) + "\n" + kOutputFormat);

  std::string comparison, reference;
  auto* disp = app.add_subcommand("disparity", "Per-region rate ratio between two fitted strata");
  disp->add_option("--comparison", comparison, "samples.csv of the numerator stratum")->required()->check(CLI::ExistingFile);
  disp->add_option("--reference", reference, "samples.csv of the denominator stratum")->required()->check(CLI::ExistingFile);
  disp->add_option("--model", model, "Model of both fits; inferred when omitted");
  disp->add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();
  disp->footer(
      "Draws are paired by index. A region is flagged significant when the equal-tailed 95% interval of the ratio "
      "excludes 1. Output: disparity.csv and metadata.txt.");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  if (*bb || *ln) {
    auto cfg = resolve_config(f);
    const auto data = load_stratum(f, cfg, nullptr, err);
    FitResult fit;
    if (*bb) {
      cfg.model = "beta-binomial";
      fit = fit_beta_binomial(data, cfg.chain);
    } else {
      cfg.model = "logitnormal";
      LogitNormalOptions opt;
      opt.a_lo = cfg.a_lo;
      opt.a_hi = cfg.a_hi;
      fit = fit_logitnormal(data, cfg.chain, opt);
    }
    return finish_fit(fit, cfg, f.out_dir, out);
  }

  if (*car) {
    auto cfg = resolve_config(f);
    cfg.model = "car";
    const auto graph = load_adjacency_file(f.adjacency);
    for (const auto& w : graph.warnings()) err << "warning: " << w << '\n';
    const auto data = load_stratum(f, cfg, &graph, err);
    CarModelSpec spec{.graph = graph};
    spec.sigma2_prior = cfg.sigma2_prior;
    spec.tau2_prior = cfg.tau2_prior;
    spec.constraint = cfg.constraint();
    spec.m0 = cfg.m0;
    const auto fit = fit_car(data, spec, cfg.chain);
    return finish_fit(fit, cfg, f.out_dir, out);
  }

  if (*sim) {
    auto cfg = resolve_config(f);
    cfg.model = "simulate";
    grid.seed = cfg.chain.seed;
    try {
      grid.validate();
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
    const auto study = run_study(grid, cfg.chain, jobs, [&](std::size_t done, std::size_t total) {
      if (done == total || done % 50 == 0) err << "simulate: " << done << "/" << total << " replicates\n";
    });
    ResultBundle bundle;
    bundle.study = &study;
    std::string grid_text;
    auto list = [](const auto& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(static_cast<double>(v[i]));
      return s;
    };
    grid_text = "I=" + list(grid.regions) + ";a=" + list(grid.a) + ";pi0=" + list(grid.pi0) + ";L=" + std::to_string(grid.replicates);
    bundle.metadata = {
        {"software", std::string("carinfo ") + kVersion},
        {"study", "beta-binomial simulation"},
        {"grid", grid_text},
        {"seed", std::to_string(grid.seed)},
        {"iterations", std::to_string(cfg.chain.iterations)},
        {"burn_in", std::to_string(cfg.chain.burn_in)},
        {"thin", std::to_string(cfg.chain.thin)},
        {"config_hash", config_hash(cfg.canonical() + grid_text)},
        {"trials_rule", "n_i uniform on [ceil(1/pi0), floor(20/pi0)] so that E[y_i] lies in [1, 20]"},
        {"seed_rule", "per-fit seeds derived from (seed, cell, replicate); results do not depend on --jobs"},
    };
    const auto files = write_results(bundle, f.out_dir);
    const auto a_cmp = rmse_ratio(study, StudyTarget::informativeness);
    const auto p_cmp = rmse_ratio(study, StudyTarget::pi0);
    out << "cell  I     a      pi0    used  rmse_ratio_a  rmse_ratio_pi0\n";
    for (std::size_t i = 0; i < a_cmp.size(); ++i) {
      char line[160];
      const auto& s = a_cmp[i].scenario;
      std::snprintf(line, sizeof line, "%-5zu %-5zu %-6g %-6g %-5zu %-13s %s\n", s.index, s.regions, s.a, s.pi0, a_cmp[i].used,
                    a_cmp[i].defined ? fixed3(a_cmp[i].ratio).c_str() : "NA",
                    p_cmp[i].defined ? fixed3(p_cmp[i].ratio).c_str() : "NA");
      out << line;
    }
    for (const auto& p : files) out << "wrote " << p.string() << '\n';
    return 0;
  }

  if (*inf) {
    if (mu && sigma2 && !xbeta) {
      const LogitNormalParams p{*mu, *sigma2};
      const double a_hat = logitnormal_informativeness(p);
      out << "a_hat = " << fixed3(a_hat) << '\n';
      if (a_hat > 0.0) {
        const auto beta = logitnormal_to_beta(p);
        out << "equivalent beta prior: a = " << fixed3(beta.a) << ", b = " << fixed3(beta.b) << '\n';
      }
      return 0;
    }
    if (a_in && b_in && !mu && !sigma2) {
      const BetaParams beta{*a_in, *b_in};
      const auto ln_p = beta_to_logitnormal(beta);
      out << "mu = " << format_number(ln_p.mu) << ", sigma2 = " << format_number(ln_p.sigma2) << '\n';
      out << "a_hat = " << fixed3(logitnormal_informativeness(ln_p)) << '\n';
      return 0;
    }
    if (xbeta && sigma2 && tau2) {
      const double a_hat = car_informativeness(CarHyperState{*xbeta, *sigma2, *tau2, m});
      out << "a_hat = " << fixed3(a_hat) << '\n';
      return 0;
    }
    throw ValidationError("informativeness needs --mu/--sigma2, --a/--b, or --xbeta/--sigma2/--tau2");
  }

  if (*sum) {
    auto fit = load_fit(draws_path, model);
    FitConfig cfg;
    if (!f.quantiles.empty()) cfg.quantiles = f.quantiles;
    if (!f.counts.empty()) {
      const auto table = load_counts_file(f.counts);
      std::string stratum = f.stratum.value_or(fit.stratum);
      if (stratum.empty()) {
        const auto strata = table.strata();
        if (strata.size() != 1) throw ValidationError("--stratum is required when the counts file holds several strata");
        stratum = strata.front();
      }
      const auto data = table.select(stratum);
      fit.stratum = stratum;
      for (std::size_t i = 0; i < fit.regions(); ++i) {
        const auto it = std::find(data.region_ids.begin(), data.region_ids.end(), fit.region_ids[i]);
        if (it == data.region_ids.end()) throw ValidationError("counts lack region '" + fit.region_ids[i] + "'");
        const auto k = static_cast<std::size_t>(it - data.region_ids.begin());
        fit.n[i] = data.n[k];
        fit.y[i] = data.y[k];
      }
    }
    const auto summary = summarize(fit, cfg.quantiles);
    ResultBundle bundle;
    bundle.summary = &summary;
    bundle.metadata = {{"software", std::string("carinfo ") + kVersion},
                       {"source", draws_path},
                       {"model", std::string(model_name(fit.kind))},
                       {"stratum", fit.stratum},
                       {"draws", std::to_string(fit.draws())}};
    const auto files = write_results(bundle, f.out_dir);
    out << fit.informativeness_column << " mean " << fixed3(summary.informativeness.mean) << ", median "
        << fixed3(summary.informativeness.median) << '\n';
    for (const auto& p : files) out << "wrote " << p.string() << '\n';
    return 0;
  }

  if (*disp) {
    const auto num = load_fit(comparison, model);
    const auto den = load_fit(reference, model);
    const auto rows = disparity(num, den);
    std::size_t flagged = 0;
    for (const auto& r : rows) flagged += r.significant ? 1 : 0;
    ResultBundle bundle;
    bundle.disparities = &rows;
    bundle.metadata = {
        {"software", std::string("carinfo ") + kVersion},
        {"comparison", comparison},
        {"comparison_stratum", num.stratum},
        {"reference", reference},
        {"reference_stratum", den.stratum},
        {"draws", std::to_string(num.draws())},
        {"significance_rule", "equal-tailed 95% interval of the rate ratio excludes 1"},
        {"caveat", "race groups in the source data are not mutually exclusive; ratios are descriptive and uncorrected"},
    };
    const auto files = write_results(bundle, f.out_dir);
    out << rows.size() << " regions, " << flagged << " flagged significant\n";
    for (const auto& p : files) out << "wrote " << p.string() << '\n';
    return 0;
  }
  return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run(args, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const GraphError& e) {
    err << "error: adjacency: " << e.what() << '\n';
    return 1;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const ChainError& e) {
    err << "fit failed: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "fit failed: " << e.what() << '\n';
    return 2;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace carinfo
