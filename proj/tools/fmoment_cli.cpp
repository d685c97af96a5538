// fmoment: batch front-end. Each subcommand writes <out>/report.json plus
// CSV tables; the exit status is 0 whenever the run completed, whatever the
// verdict. Configuration errors exit 2, runtime failures 3, both with a JSON
// error object on stderr.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fmoment/bounds.hpp"
#include "fmoment/charfunc.hpp"
#include "fmoment/clt.hpp"
#include "fmoment/criterion.hpp"
#include "fmoment/io.hpp"
#include "fmoment/levy.hpp"

using namespace fmoment;
using io::json;

namespace {

struct Common {
  std::string f = "p=1,A=1";
  std::optional<std::uint64_t> seed;
  std::size_t replicates = 50000;
  unsigned threads = 1;
  std::string out = ".";
};

struct Grid {
  int points = 32;
  double h0 = 0.1;
  int levels = 8;
  double delta = 0.1;
  double slack = 3.0;
};

int error_exit(const std::string& kind, const std::string& msg, int code) {
  std::cerr << json{{"error", msg}, {"kind", kind}}.dump() << "\n";
  return code;
}

void add_common(CLI::App* sub, Common& c, bool with_f = true) {
  if (with_f) sub->add_option("--f", c.f, "characterizing function, e.g. \"p=1.3,A=1,B=0,C=0\"");
  sub->add_option("--seed", c.seed, "master seed (required)")->required();
  sub->add_option("--replicates", c.replicates, "Monte Carlo replicates");
  sub->add_option("--threads", c.threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  sub->add_option("--out", c.out, "output directory");
}

void add_grid(CLI::App* sub, Grid& g) {
  sub->add_option("--points", g.points, "s grid size");
  sub->add_option("--h0", g.h0, "largest ladder step");
  sub->add_option("--levels", g.levels, "ladder depth J (h0 2^-j, j <= J)");
  sub->add_option("--delta", g.delta, "pass fraction");
  sub->add_option("--slack", g.slack, "slack in combined standard errors");
}

// dyadic:N -> 2^-n, pow4:N -> 4^-n (n = 1..N); otherwise a comma list.
std::vector<double> parse_tseq(const std::string& text) {
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const auto kind = text.substr(0, colon);
    int N = 0;
    try {
      N = std::stoi(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw io::ConfigError("--tseq: bad count in '" + text + "'");
    }
    if (N < 1 || N > 60) throw io::ConfigError("--tseq: count must lie in [1, 60]");
    double base = 0.0;
    if (kind == "dyadic") base = 2.0;
    else if (kind == "pow4") base = 4.0;
    else throw io::ConfigError("--tseq: unknown sequence kind '" + kind + "'");
    std::vector<double> t;
    for (int n = 1; n <= N; ++n) t.push_back(std::pow(base, -n));
    return t;
  }
  std::vector<double> t;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      t.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw io::ConfigError("--tseq: '" + item + "' is not a number");
    }
  }
  if (t.empty()) throw io::ConfigError("--tseq: empty sequence");
  return t;
}

CriterionConfig make_config(const CharFn& f, const Common& c, const Grid& g) {
  if (g.points < 1 || g.levels < 0 || !(g.h0 > 0.0 && g.h0 <= 1.0)) {
    throw io::ConfigError("grid: need points >= 1, levels >= 0 and 0 < h0 <= 1");
  }
  CriterionConfig cfg = CriterionConfig::standard(f, c.replicates, g.h0, g.levels, g.points);
  cfg.pass_fraction = g.delta;
  cfg.slack = g.slack;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw io::ConfigError(e.what());
  }
  return cfg;
}

CharFn resolve_f(const std::string& text) {
  try {
    return CharFn::family(io::parse_f_params(text));
  } catch (const io::ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw io::ConfigError(std::string("--f: ") + e.what());
  }
}

json base_config(const std::string& command, const Common& c, const CharFn& f) {
  return {{"command", command},
          {"f", io::to_json(f)},
          {"seed", io::to_json(SeedSpec{*c.seed, 0})},
          {"replicates", c.replicates}};
}

void emit(const Common& c, const std::string& command, json config, json result,
          const std::vector<std::pair<std::string, std::string>>& tables) {
  std::filesystem::create_directories(c.out);
  const json report{{"schema_version", io::kSchemaVersion},
                    {"command", command},
                    {"config", std::move(config)},
                    {"result", std::move(result)}};
  io::write_text_file((std::filesystem::path(c.out) / "report.json").string(), io::dump(report));
  for (const auto& [name, text] : tables) {
    io::write_text_file((std::filesystem::path(c.out) / name).string(), text);
  }
}

json bounds_bench(const CharFn& f) {
  json checks = json::array();
  const auto record = [&](const std::string& name, json value) {
    checks.push_back({{"check", name}, {"result", std::move(value)}});
  };
  const auto gauge = [](const CharFn& g) { return Gauge([g](double x) { return g(x); }); };

  IndicatorPairFamily single{{{Distribution::constant(1.0), 0.5}}, 1.0, "single"};
  record("klass_nowicki:single", io::to_json(klass_nowicki_exact(gauge(CharFn::abs()), single)));
  IndicatorPairFamily three;
  for (int k = 0; k < 3; ++k) three.pairs.push_back({Distribution::constant(1.0), 0.2});
  three.A_bound = 1.0;
  record("klass_nowicki:binomial3", io::to_json(klass_nowicki_exact(gauge(CharFn::power(1.5)), three)));

  const auto family = builtin_kn_family();
  for (const auto& [label, H] : std::vector<std::pair<std::string, CharFn>>{
           {"abs", CharFn::abs()}, {"power1.5", CharFn::power(1.5)},
           {"power1.9", CharFn::power(1.9)}, {"user_f", f}}) {
    record("klass_nowicki_family:" + label, io::to_json(kn_family_ratios(gauge(H), family)));
  }

  const auto pm2 = Distribution::discrete({-2.0, 2.0}, {0.5, 0.5});
  const std::vector<Distribution> one{pm2};
  const std::vector<Distribution> two{pm2, pm2};
  const std::vector<Distribution> small{Distribution::discrete({-0.5, 0.5}, {0.5, 0.5})};
  record("burkholder:single", io::to_json(burkholder_check(one, CharFn::abs())));
  record("burkholder:two", io::to_json(burkholder_check(two, CharFn::abs())));
  record("burkholder:below_threshold", io::to_json(burkholder_check(small, CharFn::abs())));
  record("burkholder:two:user_f", io::to_json(burkholder_check(two, f)));

  record("glemma_d:rademacher", io::to_json(glemma_d_check(Distribution::discrete({-1.0, 1.0}, {0.5, 0.5}), CharFn::abs())));
  record("glemma_d:zero", io::to_json(glemma_d_check(Distribution::constant(0.0), CharFn::abs())));
  record("glemma_d:skewed", io::to_json(glemma_d_check(Distribution::discrete({-2.0, 1.0, 1.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3}), CharFn::power(1.5))));

  for (const auto& [label, F] : std::vector<std::pair<std::string, Curve>>{
           {"linear", Curve::linear(1.0)}, {"step", Curve::step(0.5, 1.0)}, {"sqrt", Curve::power(1.0, 0.5)}}) {
    for (double K : {0.5, 2.0, 10.0}) {
      record("vitali:" + label + ":K=" + io::fmt(K), io::to_json(vitali_bound_check(F, K, 4096)));
    }
  }
  std::vector<double> s_grid;
  for (int i = 1; i <= 32; ++i) s_grid.push_back(i / 33.0 * (1.0 - 0.1));
  const auto ladder = dyadic_ladder(0.1, 16);
  record("drift_liminf:linear", io::to_json(drift_liminf_profile(Curve::linear(1.0), s_grid, ladder)));
  record("drift_liminf:sqrt", io::to_json(drift_liminf_profile(Curve::power(1.0, 0.5), s_grid, ladder)));
  return checks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"f-moment Brownian-motion criterion and self-normalized CLT toolkit"};
  app.require_subcommand(1);

  Common crit_c, sub_c, neg_c, clt_c, bnd_c, ce_c;
  Grid crit_g, neg_g;
  std::string crit_spec, sub_spec, neg_spec, clt_model;
  std::string sub_tseq = "dyadic:10", ce_tseq = "pow4:10";

  auto* crit = app.add_subcommand("criterion", "increment-moment criterion over an (s, h) grid");
  crit->add_option("--spec", crit_spec, "process spec JSON")->required();
  add_common(crit, crit_c);
  add_grid(crit, crit_g);

  auto* sub = app.add_subcommand("subsequence", "criterion along a sequence t_n -> 0 (homogeneous specs)");
  sub->add_option("--spec", sub_spec, "process spec JSON")->required();
  sub->add_option("--tseq", sub_tseq, "dyadic:N, pow4:N or a comma list");
  add_common(sub, sub_c);

  auto* neg = app.add_subcommand("negligibility", "f-negligibility profile of a jump/drift spec");
  neg->add_option("--spec", neg_spec, "process spec JSON")->required();
  add_common(neg, neg_c);
  add_grid(neg, neg_g);

  CltConfig clt_cfg;
  std::string series_path;
  std::size_t block_len = 64, boot_n = 1024, resamples = 2000;
  bool with_c15 = false;
  auto* clt = app.add_subcommand("clt", "self-normalized CLT diagnostics for a sequence model");
  clt->add_option("--model", clt_model, "sequence model JSON");
  clt->add_option("--p", clt_cfg.p, "moment order in [1, 2)");
  clt->add_option("--ladder", clt_cfg.n_ladder, "n ladder")->delimiter(',');
  clt->add_option("--K", clt_cfg.K, "ratio factor");
  clt->add_option("--x-grid", clt_cfg.x_grid, "WII arguments")->delimiter(',');
  clt->add_option("--k-grid", clt_cfg.k_grid, "WII block counts")->delimiter(',');
  clt->add_option("--thresholds", clt_cfg.ui_thresholds, "UI thresholds")->delimiter(',');
  clt->add_option("--wii-n", clt_cfg.wii_n, "n values for WII (default: largest)")->delimiter(',');
  clt->add_flag("--corollary15", with_c15, "also report ||S_n||_p / sigma_n consistency");
  clt->add_option("--series", series_path, "single-column CSV for the block bootstrap");
  clt->add_option("--block-len", block_len, "bootstrap block length");
  clt->add_option("--bootstrap-n", boot_n, "bootstrap partial-sum length");
  clt->add_option("--resamples", resamples, "bootstrap resamples");
  add_common(clt, clt_c, false);
  clt_c.replicates = 20000;

  auto* bnd = app.add_subcommand("bounds", "exact inequality bench");
  add_common(bnd, bnd_c);

  auto* ce = app.add_subcommand("counterexample", "non-Gaussian process passing the subsequence criterion");
  ce->add_option("--tseq", ce_tseq, "dyadic:N, pow4:N or a comma list");
  add_common(ce, ce_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return error_exit("config", e.what(), 2);
  }

  try {
    if (crit->parsed()) {
      const CharFn f = resolve_f(crit_c.f);
      const auto spec_json = io::read_json_file(crit_spec);
      const ProcessSpec spec = io::process_spec_from_json(spec_json);
      const auto cfg = make_config(f, crit_c, crit_g);
      const auto r = run_criterion(spec, cfg, {*crit_c.seed, 0}, {crit_c.threads});
      auto conf = base_config("criterion", crit_c, f);
      conf["spec"] = io::to_json(spec);
      conf["criterion"] = io::to_json(cfg);
      emit(crit_c, "criterion", conf, io::to_json(r), {{"criterion_cells.csv", io::criterion_csv(r)}});
    } else if (sub->parsed()) {
      const CharFn f = resolve_f(sub_c.f);
      const ProcessSpec spec = io::process_spec_from_json(io::read_json_file(sub_spec));
      if (!spec.is_homogeneous()) throw io::ConfigError("subsequence: spec must be homogeneous");
      if (sub_c.replicates < 1000) throw io::ConfigError("--replicates must be >= 1000");
      const auto t = parse_tseq(sub_tseq);
      const auto r = subsequence_criterion(spec, f, t, sub_c.replicates, {*sub_c.seed, 0}, {sub_c.threads});
      auto conf = base_config("subsequence", sub_c, f);
      conf["spec"] = io::to_json(spec);
      conf["t_seq"] = t;
      emit(sub_c, "subsequence", conf, io::to_json(r), {{"subsequence.csv", io::subsequence_csv(r)}});
    } else if (neg->parsed()) {
      const CharFn f = resolve_f(neg_c.f);
      const ProcessSpec spec = io::process_spec_from_json(io::read_json_file(neg_spec));
      if (spec.has_gaussian_component()) throw io::ConfigError("negligibility: spec must have no Gaussian component");
      const auto cfg = make_config(f, neg_c, neg_g);
      const auto p = negligibility_profile(spec, cfg, {*neg_c.seed, 0}, {neg_c.threads});
      auto conf = base_config("negligibility", neg_c, f);
      conf["spec"] = io::to_json(spec);
      conf["criterion"] = io::to_json(cfg);
      emit(neg_c, "negligibility", conf, io::to_json(p), {{"negligibility.csv", io::negligibility_csv(p)}});
    } else if (clt->parsed()) {
      if (clt_model.empty() && series_path.empty()) throw io::ConfigError("clt: need --model and/or --series");
      clt_cfg.replicates = clt_c.replicates;
      json conf{{"command", "clt"}, {"seed", io::to_json(SeedSpec{*clt_c.seed, 0})}};
      json result = json::object();
      std::vector<std::pair<std::string, std::string>> tables;
      const SeedSpec seed{*clt_c.seed, 0};
      if (!clt_model.empty()) {
        try {
          clt_cfg.validate();
        } catch (const std::invalid_argument& e) {
          throw io::ConfigError(e.what());
        }
        const auto model = io::sequence_model_from_json(io::read_json_file(clt_model));
        const auto r = run_clt(model, clt_cfg, seed.child(1), {clt_c.threads});
        conf["model"] = io::to_json(model);
        conf["clt"] = io::to_json(clt_cfg);
        result["clt"] = io::to_json(r);
        tables.push_back({"clt.csv", io::clt_csv(r)});
        if (with_c15) {
          result["corollary15"] = io::to_json(corollary15_consistency(
              model, clt_cfg.p, clt_cfg.n_ladder, clt_cfg.replicates, seed.child(1), {clt_c.threads}));
        }
      }
      if (!series_path.empty()) {
        const auto series = io::read_series_csv(series_path);
        const auto b = block_bootstrap_rho(series, block_len, boot_n, clt_cfg.p, resamples, seed.child(2));
        conf["bootstrap"] = {{"series_length", series.size()}, {"block_len", block_len},
                             {"n", boot_n}, {"p", clt_cfg.p}, {"resamples", resamples}};
        result["bootstrap_rho"] = io::to_json(b);
      }
      emit(clt_c, "clt", conf, result, tables);
    } else if (bnd->parsed()) {
      const CharFn f = resolve_f(bnd_c.f);
      auto conf = base_config("bounds", bnd_c, f);
      emit(bnd_c, "bounds", conf, {{"checks", bounds_bench(f)}}, {});
    } else if (ce->parsed()) {
      const CharFn f = resolve_f(ce_c.f);
      if (ce_c.replicates < 1000) throw io::ConfigError("--replicates must be >= 1000");
      const auto t = parse_tseq(ce_tseq);
      const auto cx = counterexample(f, t);
      const SeedSpec seed{*ce_c.seed, 0};
      const auto r = subsequence_criterion(cx, f, ce_c.replicates, seed, {ce_c.threads});
      const auto x1 = EmpiricalSample::draw([&](CounterRng& rng) { return cx.sample_at(1.0, rng); },
                                            ce_c.replicates, seed.child(7), {ce_c.threads});
      const auto fit = min_normal_ks(x1);
      auto conf = base_config("counterexample", ce_c, f);
      conf["t_seq"] = t;
      json result{{"b", cx.b()},
                  {"calibrated_moment", cx.calibrated_moment()},
                  {"k_values", cx.k_values()},
                  {"subsequence", io::to_json(r)},
                  {"x1_normal_fit",
                   {{"best_search_ks", fit.best_search},
                    {"atom_lower_bound", fit.atom_lower_bound},
                    {"best_mean", fit.best_mean},
                    {"best_stdev", fit.best_stdev}}}};
      std::string csv = "n,t,k,mean,std_error\n";
      for (std::size_t i = 0; i < t.size(); ++i) {
        csv += std::to_string(i + 1) + "," + io::fmt(t[i]) + "," + io::fmt(cx.k_values()[i]) + "," +
               io::fmt(r.values[i].mean) + "," + io::fmt(r.values[i].std_error) + "\n";
      }
      emit(ce_c, "counterexample", conf, result, {{"counterexample.csv", csv}});
    }
  } catch (const io::ConfigError& e) {
    return error_exit("config", e.what(), 2);
  } catch (const std::invalid_argument& e) {
    return error_exit("config", e.what(), 2);
  } catch (const std::exception& e) {
    return error_exit("runtime", e.what(), 3);
  }
  return 0;
}
