#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "fbp/backtest.hpp"
#include "fbp/dgp.hpp"
#include "fbp/error.hpp"
#include "fbp/numeric.hpp"
#include "fbp/posterior.hpp"
#include "fbp/random.hpp"
#include "fbp/report.hpp"
#include "fbp/series.hpp"

namespace fbp::cli {

namespace {

using Keys = std::map<std::string, std::set<std::string>>;

const std::set<std::string> kChainKeys{"burn_in", "iterations", "thin", "initial_step",
                                       "adapt_interval", "grid_size"};
const std::set<std::string> kDgpKeys{"a", "h_bar", "sigma_h", "gamma", "fz_sample_size",
                                     "fz_seed", "n", "write_latent"};

struct Context {
  Config cfg;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool verbose = false;
  std::filesystem::path out;
};

Context open(const GlobalOptions& opts, const Keys& allowed) {
  if (opts.config.empty()) throw InvalidInput("--config is required");
  Context c;
  c.cfg = Config::load(opts.config);
  c.cfg.check_keys(allowed);
  if (opts.seed) c.cfg.set("run", "seed", std::to_string(*opts.seed));
  if (!c.cfg.has("run", "seed")) throw InvalidInput("missing config key: run.seed (or pass --seed)");
  c.seed = c.cfg.unsigned_integer("run", "seed", 0);
  c.threads = opts.threads ? opts.threads : default_thread_count();
  c.verbose = opts.verbose;
  c.out = opts.out;
  std::error_code ec;
  std::filesystem::create_directories(c.out, ec);
  if (ec || !std::filesystem::is_directory(c.out))
    throw IoError("cannot create output directory " + c.out.string());
  return c;
}

void finish(const Context& c) { write_config_echo(c.out / "config.resolved.ini", c.cfg.echo()); }

ChainSettings read_chain(const Config& cfg) {
  ChainSettings s;
  s.burn_in = static_cast<int>(cfg.integer("chain", "burn_in", s.burn_in));
  s.iterations = static_cast<int>(cfg.integer("chain", "iterations", s.iterations));
  s.thin = static_cast<int>(cfg.integer("chain", "thin", s.thin));
  s.initial_step = cfg.number("chain", "initial_step", s.initial_step);
  s.adapt_interval = static_cast<int>(cfg.integer("chain", "adapt_interval", s.adapt_interval));
  s.grid_size = static_cast<std::size_t>(cfg.integer("chain", "grid_size", static_cast<long long>(s.grid_size)));
  s.validate();
  return s;
}

SvSkewConfig read_dgp(const Config& cfg) {
  SvSkewConfig d;
  d.a = cfg.number("dgp", "a", d.a);
  d.h_bar = cfg.number("dgp", "h_bar", d.h_bar);
  d.sigma_h = cfg.number("dgp", "sigma_h", d.sigma_h);
  d.gamma = cfg.number("dgp", "gamma", d.gamma);
  d.fz_sample_size = static_cast<std::size_t>(
      cfg.integer("dgp", "fz_sample_size", static_cast<long long>(d.fz_sample_size)));
  d.fz_seed = cfg.unsigned_integer("dgp", "fz_seed", d.fz_seed);
  d.validate();
  return d;
}

std::size_t positive_size(const Config& cfg, const std::string& s, const std::string& k, long long fallback) {
  const long long v = cfg.integer(s, k, fallback);
  if (v < 1) throw InvalidInput("config key " + s + "." + k + " must be at least 1");
  return static_cast<std::size_t>(v);
}

TimeSeries load_series(const Config& cfg) {
  const auto p = cfg.path("data", "path");
  if (!std::filesystem::exists(p)) throw IoError("data file not found: " + p.string());
  return read_series_csv(p);
}

void log(const Context& c, const std::string& msg) {
  if (c.verbose) std::cerr << msg << '\n';
}

}  // namespace

int cmd_simulate(const GlobalOptions& opts) {
  auto c = open(opts, {{"run", {"seed"}}, {"dgp", kDgpKeys}});
  if (!c.cfg.has_section("dgp")) throw InvalidInput("simulate needs a [dgp] section");
  const auto dgp = read_dgp(c.cfg);
  const auto n = positive_size(c.cfg, "dgp", "n", 2500);
  const bool latent = c.cfg.flag("dgp", "write_latent", false);
  log(c, "simulating " + std::to_string(n) + " observations");
  const auto path = simulate_sv_skew(dgp, n, derive_seed(c.seed, {hash_tag("simulate")}));
  write_series_csv(c.out / "series.csv", path.y.values, "y");
  if (latent) write_series_csv(c.out / "latent.csv", path.h, "h");
  finish(c);
  return kOk;
}

int cmd_fit(const GlobalOptions& opts) {
  auto c = open(opts, {{"run", {"seed"}}, {"data", {"path"}}, {"model", {"class"}},
                       {"fit", {"rule", "sample"}}, {"chain", kChainKeys}});
  const auto series = load_series(c.cfg);
  const auto model = parse_model_class(c.cfg.text("model", "class", "arch1"));
  nlohmann::ordered_json j;
  j["model"] = std::string(to_string(model));
  j["observations"] = series.size();
  PredictiveClass cls;
  switch (model) {
    case ModelClass::arch1:
    case ModelClass::garch11:
    case ModelClass::skew_arch1: {
      const auto fit = fit_mle(model, series);
      for (std::size_t i = 0; i < fit.names.size(); ++i) j["theta"][fit.names[i]] = fit.theta[i];
      j["log_likelihood"] = fit.log_likelihood;
      j["boundary"] = fit.boundary;
      if (model == ModelClass::arch1) cls = PredictiveClass::arch1();
      if (model == ModelClass::garch11) cls = PredictiveClass::garch11();
      break;
    }
    case ModelClass::mixture: {
      const auto mc = fit_mixture_constituents(series);
      j["psi1"] = {mc.psi1.theta1, mc.psi1.theta2, mc.psi1.theta3, mc.psi1.gamma};
      j["psi2"] = {mc.psi2.theta1, mc.psi2.theta2, mc.psi2.theta3, mc.psi2.theta4};
      cls = PredictiveClass::linear_pool(mc);
      break;
    }
    case ModelClass::ets: {
      const auto spec = ets_select_and_fit(series);
      j["spec"] = spec.label();
      const auto th = spec.smoothing();
      const auto names = spec.smoothing_names();
      for (std::size_t i = 0; i < th.size(); ++i) j["theta"][names[i]] = th[i];
      j["level0"] = spec.level0;
      j["trend0"] = spec.trend0;
      j["sigma2"] = spec.sigma2;
      j["aic"] = spec.aic;
      cls = PredictiveClass::exponential_smoothing(spec);
      break;
    }
  }
  if (c.cfg.flag("fit", "sample", false)) {
    if (model == ModelClass::skew_arch1) throw InvalidInput("skew_arch1 has no posterior sampler");
    const auto id = RuleId::parse(c.cfg.text("fit", "rule", "ls"));
    auto chain = read_chain(c.cfg);
    chain.seed = derive_seed(c.seed, {hash_tag("fit"), hash_tag(id.name)});
    ScaleFactor w;
    if (id.kind == RuleKind::crps) {
      ChainSettings cal = chain;
      cal.seed = derive_seed(c.seed, {hash_tag("calibrate"), hash_tag(id.name)});
      w = calibrate_w_crps(series.view(), cls, cal);
    } else if (id.kind == RuleKind::msis) {
      w = calibrate_w_msis(series.view(), *cls.ets);
    }
    const auto draws = sample_posterior(cls, series.view(), resolve_rule(id, series.view()), w, chain);
    write_draws_csv(c.out / "draws.csv", draws);
    j["posterior"] = {{"rule", id.name},
                      {"w", draws.w.w},
                      {"w_method", std::string(to_string(draws.w.method))},
                      {"acceptance_rate", draws.acceptance_rate},
                      {"draws", draws.size()}};
  }
  j["seed"] = c.seed;
  std::ofstream out(c.out / "fit.json", std::ios::binary);
  if (!out) throw IoError("cannot write " + (c.out / "fit.json").string());
  out << j.dump(2) << '\n';
  finish(c);
  return kOk;
}

int cmd_backtest(const GlobalOptions& opts) {
  auto c = open(opts, {{"run", {"seed"}},
                       {"data", {"path"}},
                       {"dgp", kDgpKeys},
                       {"model", {"class"}},
                       {"backtest",
                        {"n0", "final_index", "update_rules", "eval_rules", "var_levels", "es_levels",
                         "es_mc_draws", "warm_burn_in", "w_recalibrate_every", "es_density_windows"}},
                       {"chain", kChainKeys}});
  TimeSeries series;
  if (c.cfg.has_section("data")) {
    series = load_series(c.cfg);
  } else if (c.cfg.has_section("dgp")) {
    const auto dgp = read_dgp(c.cfg);
    const auto n = positive_size(c.cfg, "dgp", "n", 2500);
    series = simulate_sv_skew(dgp, n, derive_seed(c.seed, {hash_tag("simulate")})).y;
    write_series_csv(c.out / "series.csv", series.values, "y");
  } else {
    throw InvalidInput("backtest needs a [data] or [dgp] section");
  }
  const auto model = parse_model_class(c.cfg.text("model", "class", "arch1"));
  BacktestConfig bc;
  bc.n0 = static_cast<std::size_t>(c.cfg.integer("backtest", "n0", static_cast<long long>(bc.n0)));
  bc.final_index = static_cast<std::size_t>(c.cfg.integer("backtest", "final_index", 0));
  bc.update_rules = c.cfg.list("backtest", "update_rules", bc.update_rules);
  bc.eval_rules = c.cfg.list("backtest", "eval_rules", bc.eval_rules);
  bc.var_levels = c.cfg.numbers("backtest", "var_levels", bc.var_levels);
  bc.es_levels = c.cfg.numbers("backtest", "es_levels", bc.es_levels);
  bc.es_mc_draws = static_cast<std::size_t>(
      c.cfg.integer("backtest", "es_mc_draws", static_cast<long long>(bc.es_mc_draws)));
  bc.warm_burn_in = static_cast<int>(c.cfg.integer("backtest", "warm_burn_in", bc.warm_burn_in));
  bc.w_recalibrate_every =
      static_cast<int>(c.cfg.integer("backtest", "w_recalibrate_every", bc.w_recalibrate_every));
  for (double v : c.cfg.numbers("backtest", "es_density_windows", {}))
    bc.es_density_windows.push_back(static_cast<std::size_t>(v));
  bc.chain = read_chain(c.cfg);
  bc.seed = c.seed;
  bc.threads = c.threads;
  log(c, "backtest: " + std::to_string(series.size()) + " observations");
  const auto report = expanding_backtest(series, model, bc);
  write_backtest_outputs(report, c.out, c.cfg.echo());
  finish(c);
  return report.valid ? kOk : kNumerical;
}

int cmd_murphy(const GlobalOptions& opts) {
  auto c = open(opts, {{"run", {"seed"}},
                       {"murphy",
                        {"forecasts_a", "forecasts_b", "actuals", "alpha", "tail", "eta_points",
                         "block_length", "replications", "level"}}});
  const auto pa = c.cfg.path("murphy", "forecasts_a");
  const auto pb = c.cfg.path("murphy", "forecasts_b");
  const auto py = c.cfg.path("murphy", "actuals");
  for (const auto& p : {pa, pb, py})
    if (!std::filesystem::exists(p)) throw IoError("file not found: " + p.string());
  const auto ta = read_csv_table(pa);
  const auto tb = read_csv_table(pb);
  const auto actuals = read_series_csv(py);
  if (actuals.size() == 0) throw InvalidInput("actuals file has no rows: " + py.string());
  if (ta.rows.size() != actuals.size() || tb.rows.size() != actuals.size())
    throw InvalidInput("misaligned rows: forecasts_a=" + std::to_string(ta.rows.size()) +
                       " forecasts_b=" + std::to_string(tb.rows.size()) +
                       " actuals=" + std::to_string(actuals.size()));
  const double alpha = c.cfg.number("murphy", "alpha", 0.1);
  const std::string tail_name = c.cfg.text("murphy", "tail", alpha < 0.5 ? "lower" : "upper");
  if (tail_name != "lower" && tail_name != "upper") throw InvalidInput("murphy.tail must be lower or upper");
  const Tail tail = tail_name == "lower" ? Tail::lower : Tail::upper;
  BootstrapSettings bs;
  bs.block_length = positive_size(c.cfg, "murphy", "block_length", 10);
  bs.replications = positive_size(c.cfg, "murphy", "replications", 1000);
  bs.level = c.cfg.number("murphy", "level", 0.95);
  bs.seed = derive_seed(c.seed, {hash_tag("murphy")});
  const auto points = positive_size(c.cfg, "murphy", "eta_points", 101);
  const TailForecasts a{ta.column_values("var"), ta.column_values("es")};
  const TailForecasts b{tb.column_values("var"), tb.column_values("es")};
  const auto grid = default_eta_grid(actuals.view(), points);
  const auto m = murphy_diagram(a, b, actuals.view(), alpha, tail, grid, bs);
  write_murphy_csv(c.out / "murphy.csv", m, c.cfg.echo());
  finish(c);
  return kOk;
}

int cmd_msis_batch(const GlobalOptions& opts) {
  auto c = open(opts, {{"run", {"seed"}},
                       {"msis", {"directory", "horizon", "alpha", "m"}},
                       {"chain", kChainKeys}});
  const auto dir = c.cfg.path("msis", "directory");
  if (!std::filesystem::is_directory(dir)) throw IoError("series directory not found: " + dir.string());
  MsisConfig mc;
  mc.level.horizon_cap = static_cast<int>(c.cfg.integer("msis", "horizon", 6));
  mc.level.alpha = c.cfg.number("msis", "alpha", 0.05);
  mc.m = static_cast<int>(c.cfg.integer("msis", "m", 1));
  mc.level.validate();
  mc.chain = read_chain(c.cfg);

  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InvalidInput("no .csv series in " + dir.string());

  std::vector<std::optional<MsisOutcome>> results(files.size());
  std::vector<std::string> errors(files.size());
  parallel_for(files.size(), c.threads, [&](std::size_t i) {
    const auto name = files[i].stem().string();
    try {
      auto series = read_series_csv(files[i]);
      series.name = name;
      MsisConfig cfg = mc;
      cfg.seed = derive_seed(c.seed, {hash_tag("msis"), hash_tag(name)});
      results[i] = msis_backtest(series, cfg);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  std::vector<MsisOutcome> ok;
  std::vector<MsisFailure> failed;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (results[i]) {
      ok.push_back(std::move(*results[i]));
    } else {
      failed.push_back({files[i].stem().string(), errors[i]});
      std::cerr << "skipped " << files[i].filename().string() << ": " << errors[i] << '\n';
    }
  }
  if (ok.empty()) throw InvalidInput("no series could be processed in " + dir.string());
  write_msis_outputs(c.out, ok, failed, c.cfg.echo());
  finish(c);
  return kOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Score-weighted Bayesian updating and forecast evaluation"};
  app.require_subcommand(1);
  GlobalOptions opts;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "Configuration file")->required();
    sub->add_option("--out", opts.out, "Output directory");
    sub->add_option("--seed", seed, "Master seed (overrides run.seed)");
    sub->add_option("--threads", opts.threads, "Worker threads (default: hardware threads)");
    sub->add_flag("--verbose", opts.verbose, "Progress on stderr");
  };
  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const GlobalOptions&);
  };
  const Entry entries[] = {
      {"simulate", "Simulate the stochastic-volatility skew-normal process", cmd_simulate},
      {"fit", "Fit a model class by maximum likelihood (optionally sample its posterior)", cmd_fit},
      {"backtest", "Expanding-window out-of-sample evaluation", cmd_backtest},
      {"murphy", "Murphy diagram for two VaR/ES forecast series", cmd_murphy},
      {"msis-batch", "ETS interval forecasts scored by MSIS over a directory of series", cmd_msis_batch},
  };
  std::vector<std::pair<CLI::App*, int (*)(const GlobalOptions&)>> subs;
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    add_common(sub);
    subs.emplace_back(sub, e.fn);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }
  auto report = [](const char* kind, const std::exception& e, int code) {
    nlohmann::json j{{"error", kind}, {"message", e.what()}};
    std::cerr << j.dump() << '\n';
    return code;
  };
  try {
    for (auto& [sub, fn] : subs) {
      if (!sub->parsed()) continue;
      if (sub->count("--seed")) opts.seed = seed;
      return fn(opts);
    }
  } catch (const InvalidInput& e) {
    return report("validation", e, kValidation);
  } catch (const InvalidParameter& e) {
    return report("validation", e, kValidation);
  } catch (const NumericalError& e) {
    return report("numerical", e, kNumerical);
  } catch (const IoError& e) {
    return report("io", e, kIo);
  } catch (const std::filesystem::filesystem_error& e) {
    return report("io", e, kIo);
  }
  return kValidation;
}

}  // namespace fbp::cli
