#include "fbp/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "fbp/error.hpp"
#include "fbp/numeric.hpp"

namespace fbp {

namespace {

using nlohmann::ordered_json;

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json echo_json(const ConfigEcho& echo) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : echo) j[k] = v;
  return j;
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

}  // namespace

void write_config_echo(const std::filesystem::path& path, const ConfigEcho& echo) {
  auto out = open_out(path);
  for (const auto& [k, v] : echo) out << k << " = " << v << '\n';
  finish(out, path);
}

void write_backtest_outputs(const EvaluationReport& report, const std::filesystem::path& dir,
                            const ConfigEcho& echo) {
  std::filesystem::create_directories(dir);
  const auto& cfg = report.config;
  {
    const auto p = dir / "scores.csv";
    auto out = open_out(p);
    out << "window,update_rule,eval_rule,score\n";
    for (const auto& t : report.tracks)
      for (const auto& w : t.windows) {
        if (w.failed) continue;
        for (std::size_t j = 0; j < report.eval_rules.size(); ++j)
          out << w.target << ',' << t.update_rule << ',' << report.eval_rules[j] << ','
              << format_double(w.scores[j]) << '\n';
      }
    finish(out, p);
  }
  {
    const auto p = dir / "cumavg.csv";
    auto out = open_out(p);
    out << "step,update_rule,eval_rule,cumavg\n";
    for (const auto& t : report.tracks)
      for (std::size_t j = 0; j < report.eval_rules.size(); ++j)
        for (std::size_t k = 0; k < t.cumulative[j].size(); ++k)
          out << k + 1 << ',' << t.update_rule << ',' << report.eval_rules[j] << ','
              << format_double(t.cumulative[j][k]) << '\n';
    finish(out, p);
  }
  {
    const auto p = dir / "exceedances.csv";
    auto out = open_out(p);
    out << "window,update_rule,level,tail,var,actual,hit\n";
    for (const auto& t : report.tracks)
      for (const auto& w : t.windows) {
        if (w.failed) continue;
        for (std::size_t l = 0; l < cfg.var_levels.size(); ++l) {
          const double a = cfg.var_levels[l];
          const bool lower = a < 0.5;
          const bool hit = lower ? w.actual < w.var[l] : w.actual > w.var[l];
          out << w.target << ',' << t.update_rule << ',' << format_double(a) << ','
              << (lower ? "lower" : "upper") << ',' << format_double(w.var[l]) << ','
              << format_double(w.actual) << ',' << hit << '\n';
        }
      }
    finish(out, p);
  }
  {
    const auto p = dir / "es_forecasts.csv";
    auto out = open_out(p);
    out << "window,update_rule,level,tail,var,es,actual\n";
    for (const auto& t : report.tracks)
      for (const auto& w : t.windows) {
        if (w.failed) continue;
        for (std::size_t l = 0; l < cfg.es_levels.size(); ++l) {
          const double a = cfg.es_levels[l];
          // the matching VaR is the quantile at the same level when configured
          double var = std::nan("");
          for (std::size_t v = 0; v < cfg.var_levels.size(); ++v)
            if (cfg.var_levels[v] == a) var = w.var[v];
          out << w.target << ',' << t.update_rule << ',' << format_double(a) << ','
              << (a < 0.5 ? "lower" : "upper") << ',' << format_double(var) << ','
              << format_double(w.es[l]) << ',' << format_double(w.actual) << '\n';
        }
      }
    finish(out, p);
  }
  {
    const auto p = dir / "es_posterior_density.csv";
    auto out = open_out(p);
    out << "window,update_rule,level,tail,x,density\n";
    for (const auto& t : report.tracks)
      for (const auto& d : t.es_densities)
        for (std::size_t i = 0; i < d.grid.x.size(); ++i)
          out << d.target << ',' << t.update_rule << ',' << format_double(d.level) << ','
              << to_string(d.tail) << ',' << format_double(d.grid.x[i]) << ','
              << format_double(d.grid.density[i]) << '\n';
    finish(out, p);
  }

  ordered_json j;
  j["model"] = report.model;
  j["seed"] = cfg.seed;
  j["valid"] = report.valid;
  j["windows"] = report.tracks.empty() ? 0 : report.tracks.front().windows.size();
  j["update_rules"] = cfg.update_rules;
  j["eval_rules"] = report.eval_rules;
  ordered_json matrix = ordered_json::object();
  for (const auto& t : report.tracks) {
    ordered_json row = ordered_json::object();
    for (std::size_t e = 0; e < report.eval_rules.size(); ++e) row[report.eval_rules[e]] = num(t.average[e]);
    matrix[t.update_rule] = row;
  }
  j["average_scores"] = matrix;
  ordered_json failures = ordered_json::object();
  for (const auto& t : report.tracks) failures[t.update_rule] = t.failures;
  j["failures"] = failures;
  ordered_json var = ordered_json::object();
  for (const auto& t : report.tracks) {
    ordered_json levels = ordered_json::array();
    for (std::size_t l = 0; l < t.exceedances.size(); ++l) {
      const auto& rec = t.exceedances[l];
      ordered_json e;
      e["level"] = rec.alpha;
      e["tail"] = std::string(to_string(rec.tail));
      e["exceedance"] = rec.hits.empty() ? ordered_json(nullptr) : num(var_exceedance(rec));
      if (t.christoffersen[l]) {
        e["lr_uc"] = num(t.christoffersen[l]->lr_uc);
        e["lr_ind"] = num(t.christoffersen[l]->lr_ind);
        e["lr_cc"] = num(t.christoffersen[l]->lr_cc);
        e["reject_1pct"] = t.christoffersen[l]->reject_1pct;
      }
      levels.push_back(e);
    }
    var[t.update_rule] = levels;
  }
  j["var_backtest"] = var;
  if (report.constituents) {
    const auto& c = *report.constituents;
    j["mixture_constituents"] = {
        {"psi1", {c.psi1.theta1, c.psi1.theta2, c.psi1.theta3, c.psi1.gamma}},
        {"psi2", {c.psi2.theta1, c.psi2.theta2, c.psi2.theta3, c.psi2.theta4}}};
  }
  j["config"] = echo_json(echo);
  write_json(dir / "summary.json", j);
}

void write_murphy_csv(const std::filesystem::path& path, const MurphyGrid& grid,
                      const ConfigEcho& echo) {
  auto out = open_out(path);
  for (const auto& [k, v] : echo) out << "# " << k << '=' << v << '\n';
  out << "eta,delta,lo,hi\n";
  for (std::size_t i = 0; i < grid.eta.size(); ++i)
    out << format_double(grid.eta[i]) << ',' << format_double(grid.delta[i]) << ','
        << format_double(grid.lower[i]) << ',' << format_double(grid.upper[i]) << '\n';
  finish(out, path);
}

MsisSummary summarize_msis(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("no MSIS values to summarize");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  MsisSummary s;
  s.count = v.size();
  s.mean = mean(v);
  s.median = quantile_sorted(v, 0.5);
  s.sd = v.size() > 1 ? std::sqrt(variance(v)) : 0.0;
  for (int q : {1, 10, 25, 50, 75, 90, 99}) s.quantiles.emplace_back(q, quantile_sorted(v, q / 100.0));
  return s;
}

void write_msis_outputs(const std::filesystem::path& dir, const std::vector<MsisOutcome>& results,
                        const std::vector<MsisFailure>& failures, const ConfigEcho& echo) {
  std::filesystem::create_directories(dir);
  const auto p = dir / "msis_results.csv";
  {
    auto out = open_out(p);
    out << "series,spec,w,acceptance,fbp_msis,mle_msis\n";
    for (const auto& r : results)
      out << r.name << ',' << r.spec.label() << ',' << format_double(r.w.w) << ','
          << format_double(r.acceptance) << ',' << format_double(r.fbp_msis) << ','
          << format_double(r.mle_msis) << '\n';
    finish(out, p);
  }
  ordered_json j;
  j["series"] = results.size();
  auto panel = [&](auto pick) {
    ordered_json o = ordered_json::object();
    if (results.empty()) return o;
    std::vector<double> v;
    for (const auto& r : results) v.push_back(pick(r));
    const auto s = summarize_msis(v);
    o["Mean"] = num(s.mean);
    o["Median"] = num(s.median);
    o["SD"] = num(s.sd);
    for (const auto& [q, val] : s.quantiles) o["Quant " + std::to_string(q) + "%"] = num(val);
    return o;
  };
  j["fbp"] = panel([](const MsisOutcome& r) { return r.fbp_msis; });
  j["mle"] = panel([](const MsisOutcome& r) { return r.mle_msis; });
  j["failure_count"] = failures.size();
  ordered_json f = ordered_json::array();
  for (const auto& x : failures) f.push_back({{"series", x.name}, {"reason", x.reason}});
  j["failures"] = f;
  j["config"] = echo_json(echo);
  write_json(dir / "summary.json", j);
}

}  // namespace fbp
