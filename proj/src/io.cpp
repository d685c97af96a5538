#include "fmoment/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fmoment::io {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

double num(const json& j, const char* key) {
  if (!j.contains(key)) fail(std::string("missing field '") + key + "'");
  if (!j.at(key).is_number()) fail(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

double num_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? num(j, key) : fallback;
}

std::vector<double> nums(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) fail(std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) fail(std::string("field '") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string str(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) fail(std::string("missing string field '") + key + "'");
  return j.at(key).get<std::string>();
}

template <class F>
auto wrap(const char* what, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    fail(std::string(what) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    fail(std::string(what) + ": " + e.what());
  }
}

json estimates(const std::vector<EstimateWithError>& v) {
  json a = json::array();
  for (const auto& e : v) a.push_back(to_json(e));
  return a;
}

}  // namespace

json to_json(const Distribution& d) {
  const auto& p = d.params();
  switch (d.kind()) {
    case Distribution::Kind::constant: return {{"kind", "constant"}, {"value", p[0]}};
    case Distribution::Kind::uniform: return {{"kind", "uniform"}, {"lo", p[0]}, {"hi", p[1]}};
    case Distribution::Kind::normal: return {{"kind", "normal"}, {"mean", p[0]}, {"sd", p[1]}};
    case Distribution::Kind::cauchy: return {{"kind", "cauchy"}, {"location", p[0]}, {"scale", p[1]}};
    case Distribution::Kind::discrete:
      return {{"kind", "discrete"}, {"values", d.support()}, {"probs", d.probabilities()}};
  }
  return {};
}

Distribution distribution_from_json(const json& j) {
  return wrap("distribution", [&] {
    if (!j.is_object()) fail("distribution must be an object");
    const auto kind = str(j, "kind");
    if (kind == "constant") return Distribution::constant(num(j, "value"));
    if (kind == "uniform") return Distribution::uniform(num(j, "lo"), num(j, "hi"));
    if (kind == "normal") return Distribution::normal(num_or(j, "mean", 0.0), num_or(j, "sd", 1.0));
    if (kind == "cauchy") return Distribution::cauchy(num_or(j, "location", 0.0), num_or(j, "scale", 1.0));
    if (kind == "discrete") return Distribution::discrete(nums(j, "values"), nums(j, "probs"));
    fail("unknown distribution kind '" + kind + "'");
  });
}

json to_json(const Curve& c) {
  const auto& p = c.params();
  switch (c.kind()) {
    case Curve::Kind::zero: return {{"kind", "zero"}};
    case Curve::Kind::linear: return {{"kind", "linear"}, {"slope", p[0]}};
    case Curve::Kind::power: return {{"kind", "power"}, {"scale", p[0]}, {"exponent", p[1]}};
    case Curve::Kind::polynomial: return {{"kind", "polynomial"}, {"coeffs", p}};
    case Curve::Kind::step: return {{"kind", "step"}, {"at", p[0]}, {"height", p[1]}};
    case Curve::Kind::custom: return {{"kind", "custom"}, {"label", c.label()}};
  }
  return {};
}

Curve curve_from_json(const json& j) {
  return wrap("curve", [&] {
    if (!j.is_object()) fail("curve must be an object");
    const auto kind = str(j, "kind");
    if (kind == "zero") return Curve::zero();
    if (kind == "linear") {
      // sigma2 reads naturally for variance functions
      return Curve::linear(j.contains("sigma2") ? num(j, "sigma2") : num(j, "slope"));
    }
    if (kind == "power") return Curve::power(num(j, "scale"), num(j, "exponent"));
    if (kind == "polynomial") return Curve::polynomial(nums(j, "coeffs"));
    if (kind == "step") return Curve::step(num(j, "at"), num(j, "height"));
    if (kind == "custom") fail("custom curves cannot be read from JSON");
    fail("unknown curve kind '" + kind + "'");
  });
}

json to_json(const ProcessSpec& s) {
  json jumps = json::array();
  for (const auto& fj : s.fixed_jumps) jumps.push_back({{"time", fj.time}, {"jump", to_json(fj.jump)}});
  return {{"variance_fn", to_json(s.variance_fn)},
          {"drift", to_json(s.drift)},
          {"fixed_jumps", jumps},
          {"jump_rate", s.jump_rate},
          {"jump_dist", to_json(s.jump_dist)},
          {"truncation", s.truncation}};
}

ProcessSpec process_spec_from_json(const json& j) {
  return wrap("process spec", [&] {
    if (!j.is_object()) fail("process spec must be an object");
    ProcessSpec s;
    if (j.contains("preset")) {
      const auto preset = str(j, "preset");
      if (preset == "brownian") {
        s = brownian(num_or(j, "sigma", 1.0), num_or(j, "drift", 0.0));
      } else if (preset == "compound_poisson") {
        s = compound_poisson(num(j, "rate"), distribution_from_json(j.at("jump_dist")));
      } else {
        fail("unknown process preset '" + preset + "'");
      }
      s.truncation = num_or(j, "truncation", 0.0);
    } else {
      if (j.contains("variance_fn")) s.variance_fn = curve_from_json(j.at("variance_fn"));
      if (j.contains("drift")) s.drift = curve_from_json(j.at("drift"));
      if (j.contains("fixed_jumps")) {
        for (const auto& fj : j.at("fixed_jumps")) {
          s.fixed_jumps.push_back({num(fj, "time"), distribution_from_json(fj.at("jump"))});
        }
      }
      s.jump_rate = num_or(j, "jump_rate", 0.0);
      if (j.contains("jump_dist")) s.jump_dist = distribution_from_json(j.at("jump_dist"));
      s.truncation = num_or(j, "truncation", 0.0);
    }
    s.validate();
    return s;
  });
}

json to_json(const SequenceModel& m) {
  switch (m.kind()) {
    case SequenceModel::Kind::iid: return {{"kind", "iid"}, {"dist", to_json(m.innovation())}};
    case SequenceModel::Kind::moving_average:
      return {{"kind", "moving_average"}, {"weights", m.weights()}, {"innovation", to_json(m.innovation())}};
    case SequenceModel::Kind::autoregressive:
      return {{"kind", "autoregressive"}, {"phi", m.phi()}, {"innovation", to_json(m.innovation())}};
    case SequenceModel::Kind::markov_functional:
      return {{"kind", "markov_functional"},
              {"transition", m.transition()},
              {"values", m.raw_state_values()},
              {"period", m.period()}};
  }
  return {};
}

SequenceModel sequence_model_from_json(const json& j) {
  return wrap("sequence model", [&] {
    if (!j.is_object()) fail("sequence model must be an object");
    const auto kind = str(j, "kind");
    const auto innovation = [&](const char* key) {
      return j.contains(key) ? distribution_from_json(j.at(key)) : Distribution::normal(0.0, 1.0);
    };
    if (kind == "iid") return SequenceModel::iid(innovation("dist"));
    if (kind == "moving_average") return SequenceModel::moving_average(nums(j, "weights"), innovation("innovation"));
    if (kind == "autoregressive") return SequenceModel::autoregressive(num(j, "phi"), innovation("innovation"));
    if (kind == "markov_functional") {
      std::vector<std::vector<double>> P;
      if (!j.contains("transition") || !j.at("transition").is_array()) fail("field 'transition' must be an array of rows");
      for (const auto& row : j.at("transition")) P.push_back(row.get<std::vector<double>>());
      return SequenceModel::markov_functional(std::move(P), nums(j, "values"),
                                              static_cast<int>(num(j, "period")));
    }
    fail("unknown sequence model kind '" + kind + "'");
  });
}

json to_json(const CharFn& f) {
  if (!f.is_family()) {
    return {{"kind", "custom"}, {"label", f.label()}, {"p", f.p()}, {"p_prime", f.p_prime()}, {"K0", f.K0()}};
  }
  return {{"p", f.p()}, {"A", f.A()}, {"B", f.B()}, {"C", f.C()}, {"p_prime", f.p_prime()}, {"K0", f.K0()}};
}

CharFn charfn_from_json(const json& j) {
  return wrap("f", [&] {
    CharFnParams p;
    p.p = num_or(j, "p", 1.0);
    p.A = num_or(j, "A", 1.0);
    p.B = num_or(j, "B", 0.0);
    p.C = num_or(j, "C", 0.0);
    if (j.contains("p_prime")) p.p_prime = num(j, "p_prime");
    if (j.contains("K0")) p.K0 = num(j, "K0");
    return CharFn::family(p);
  });
}

CharFnParams parse_f_params(const std::string& text) {
  CharFnParams p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail("f parameter '" + item + "' is not key=value");
    const auto key = item.substr(0, eq);
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail("f parameter '" + item + "' has a non-numeric value");
    }
    if (key == "p") p.p = v;
    else if (key == "A") p.A = v;
    else if (key == "B") p.B = v;
    else if (key == "C") p.C = v;
    else if (key == "pprime" || key == "p_prime") p.p_prime = v;
    else if (key == "K0") p.K0 = v;
    else fail("unknown f parameter '" + key + "'");
  }
  return p;
}

json to_json(const SeedSpec& s) {
  return {{"master_seed", s.master_seed}, {"stream_id", s.stream_id}};
}

json to_json(const EstimateWithError& e) {
  return {{"mean", e.mean}, {"std_error", e.std_error}, {"n_replicates", e.n_replicates}};
}

json to_json(const CriterionConfig& c) {
  return {{"s_grid", c.s_grid},     {"h_ladder", c.h_ladder},
          {"replicates", c.replicates}, {"f", to_json(c.f)},
          {"pass_fraction", c.pass_fraction}, {"slack", c.slack}};
}

json to_json(const CriterionReport& r) {
  json m = json::array();
  for (const auto& row : r.m_hat) m.push_back(estimates(row));
  json passes = json::array();
  for (bool b : r.passes) passes.push_back(b);
  return {{"s_grid", r.s_grid},
          {"h_ladder", r.h_ladder},
          {"m_hat", m},
          {"liminf_proxy", r.liminf_proxy},
          {"argmin", r.argmin},
          {"passes", passes},
          {"pass_share", r.pass_share},
          {"ef_x1", to_json(r.ef_x1)},
          {"sigma_hat", r.sigma_hat},
          {"verdict", to_string(r.verdict)},
          {"diagnostics", r.diagnostics}};
}

json to_json(const SubsequenceReport& r) {
  return {{"t_seq", r.t_seq},
          {"values", estimates(r.values)},
          {"ef_x1", to_json(r.ef_x1)},
          {"liminf_proxy", r.liminf_proxy},
          {"argmin", r.argmin},
          {"sigma_hat", r.sigma_hat},
          {"verdict", to_string(r.verdict)}};
}

json to_json(const NegligibilityProfile& p) {
  json m = json::array();
  for (const auto& row : p.m_hat) m.push_back(estimates(row));
  return {{"h_ladder", p.h_ladder},
          {"sup_mean", p.sup_mean},
          {"sup_std_error", p.sup_std_error},
          {"sup_at", p.sup_at},
          {"m_hat", m},
          {"decrease_fraction", p.decrease_fraction}};
}

json to_json(const GaussianVarianceReport& r) {
  return {{"grid", r.grid},
          {"lower_bound_violations", r.lower_bound_violations},
          {"lower_bound_holds", r.lower_bound_holds},
          {"equality_at_one", r.equality_at_one},
          {"linear_equality", r.linear_equality},
          {"max_equality_deviation", r.max_equality_deviation}};
}

json to_json(const CltConfig& c) {
  return {{"p", c.p},
          {"n_ladder", c.n_ladder},
          {"K", c.K},
          {"replicates", c.replicates},
          {"x_grid", c.x_grid},
          {"k_grid", c.k_grid},
          {"ui_thresholds", c.ui_thresholds},
          {"wii_n", c.wii_n}};
}

CltConfig clt_config_from_json(const json& j) {
  return wrap("clt config", [&] {
    CltConfig c;
    if (j.contains("p")) c.p = num(j, "p");
    if (j.contains("n_ladder")) c.n_ladder = j.at("n_ladder").get<std::vector<std::size_t>>();
    if (j.contains("K")) c.K = j.at("K").get<std::size_t>();
    if (j.contains("replicates")) c.replicates = j.at("replicates").get<std::size_t>();
    if (j.contains("x_grid")) c.x_grid = nums(j, "x_grid");
    if (j.contains("k_grid")) c.k_grid = j.at("k_grid").get<std::vector<std::size_t>>();
    if (j.contains("ui_thresholds")) c.ui_thresholds = nums(j, "ui_thresholds");
    if (j.contains("wii_n")) c.wii_n = j.at("wii_n").get<std::vector<std::size_t>>();
    c.validate();
    return c;
  });
}

json to_json(const CltReport& r) {
  json rho = json::array();
  for (const auto& [n, e] : r.rho) {
    rho.push_back({{"n", n}, {"mean", e.mean}, {"std_error", e.std_error}, {"sigma_n", r.sigma_n.at(n)}, {"ks", r.ks.at(n)}});
  }
  json ratio = json::array();
  for (const auto& [n, d] : r.ratio_dev) ratio.push_back({{"n", n}, {"deviation", d}});
  json wii = json::array();
  for (const auto& [key, d] : r.wii_defect) {
    wii.push_back({{"n", std::get<0>(key)}, {"k", std::get<1>(key)}, {"x", std::get<2>(key)}, {"defect", d}});
  }
  json ui = json::array();
  for (const auto& [key, v] : r.ui_tail) ui.push_back({{"n", key.first}, {"T", key.second}, {"tail", v}});
  return {{"config", to_json(r.config)}, {"rho", rho}, {"ratio_dev", ratio}, {"wii_defect", wii}, {"ui_tail", ui}};
}

json to_json(const Corollary15Report& r) {
  json e = json::array();
  for (const auto& [n, x] : r.entries) e.push_back({{"n", n}, {"ratio", x.ratio}, {"sigma_n", x.sigma_n}, {"ks", x.ks}});
  return {{"entries", e}, {"c_hat", r.c_hat}, {"limit_sd", r.limit_sd}};
}

json to_json(const SandwichResult& r) {
  return {{"lower_sum", r.lower_sum}, {"middle", r.middle}, {"upper_sum", r.upper_sum},
          {"ratio_low", r.ratio_low}, {"ratio_high", r.ratio_high}};
}

json to_json(const GLemmaResult& r) {
  json c1 = r.realized_C1 ? json(*r.realized_C1) : json(nullptr);
  return {{"lhs", r.lhs}, {"mid", r.mid}, {"left_holds", r.left_holds}, {"realized_C1", c1}};
}

json to_json(const VitaliResult& r) {
  return {{"measure_estimate", r.measure_estimate}, {"bound", r.bound}, {"tolerance", r.tolerance},
          {"holds", r.holds}, {"min_scale", r.min_scale}, {"max_scale", r.max_scale}};
}

json to_json(const DriftProfile& p) {
  return {{"s_grid", p.s_grid}, {"minima", p.minima}, {"threshold", p.threshold}, {"fraction_below", p.fraction_below}};
}

json to_json(const FamilyRatioSummary& s) {
  return {{"min_ratio", s.min_ratio}, {"max_ratio", s.max_ratio}, {"instances", s.instances}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string criterion_csv(const CriterionReport& r) {
  std::string out = "s,h,mean,std_error\n";
  for (std::size_t i = 0; i < r.m_hat.size(); ++i) {
    for (std::size_t j = 0; j < r.m_hat[i].size(); ++j) {
      out += fmt(r.s_grid[i]) + "," + fmt(r.h_ladder[j]) + "," + fmt(r.m_hat[i][j].mean) + "," +
             fmt(r.m_hat[i][j].std_error) + "\n";
    }
  }
  return out;
}

std::string negligibility_csv(const NegligibilityProfile& p) {
  std::string out = "h,sup_mean,sup_std_error,sup_s_index\n";
  for (std::size_t j = 0; j < p.h_ladder.size(); ++j) {
    out += fmt(p.h_ladder[j]) + "," + fmt(p.sup_mean[j]) + "," + fmt(p.sup_std_error[j]) + "," +
           std::to_string(p.sup_at[j]) + "\n";
  }
  return out;
}

std::string subsequence_csv(const SubsequenceReport& r) {
  std::string out = "n,t,mean,std_error\n";
  for (std::size_t i = 0; i < r.t_seq.size(); ++i) {
    out += std::to_string(i) + "," + fmt(r.t_seq[i]) + "," + fmt(r.values[i].mean) + "," +
           fmt(r.values[i].std_error) + "\n";
  }
  return out;
}

std::string clt_csv(const CltReport& r) {
  std::string out = "n,diagnostic,value,std_error\n";
  const auto row = [&](std::size_t n, const std::string& d, double v, const std::string& se) {
    out += std::to_string(n) + "," + d + "," + fmt(v) + "," + se + "\n";
  };
  for (const auto& [n, e] : r.rho) {
    row(n, "rho", e.mean, fmt(e.std_error));
    row(n, "sigma_n", r.sigma_n.at(n), "");
    row(n, "ks", r.ks.at(n), "");
    if (r.ratio_dev.count(n)) row(n, "ratio_dev", r.ratio_dev.at(n), "");
  }
  for (const auto& [key, v] : r.ui_tail) row(key.first, "ui_tail:T=" + fmt(key.second), v, "");
  for (const auto& [key, d] : r.wii_defect) {
    row(std::get<0>(key), "wii:k=" + std::to_string(std::get<1>(key)) + ":x=" + fmt(std::get<2>(key)), d, "");
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<double> read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(line, &used);
      out.push_back(v);
    } catch (const std::exception&) {
      if (lineno == 1) continue;  // header
      fail("'" + path + "' line " + std::to_string(lineno) + " is not a number");
    }
  }
  if (out.empty()) fail("'" + path + "' holds no values");
  return out;
}

}  // namespace fmoment::io
