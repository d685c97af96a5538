#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fmoment/bounds.hpp"
#include "fmoment/charfunc.hpp"
#include "fmoment/clt.hpp"
#include "fmoment/criterion.hpp"
#include "fmoment/curve.hpp"
#include "fmoment/distribution.hpp"
#include "fmoment/levy.hpp"
#include "fmoment/mc.hpp"

namespace fmoment::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Parse and validation failures of user documents.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

json to_json(const Distribution& d);
Distribution distribution_from_json(const json& j);

// Custom curves serialize with their label but cannot be read back.
json to_json(const Curve& c);
Curve curve_from_json(const json& j);

// Accepts the full field form or a preset:
//   {"preset": "brownian", "sigma": 1, "drift": 0}
//   {"preset": "compound_poisson", "rate": 1, "jump_dist": {...}}
json to_json(const ProcessSpec& s);
ProcessSpec process_spec_from_json(const json& j);

json to_json(const SequenceModel& m);
SequenceModel sequence_model_from_json(const json& j);

json to_json(const CharFn& f);  // resolved params incl. p' and K0
CharFn charfn_from_json(const json& j);
// "p=1.3,A=1,B=0,C=0,pprime=1.3,K0=2"
CharFnParams parse_f_params(const std::string& text);

json to_json(const SeedSpec& s);
json to_json(const EstimateWithError& e);
json to_json(const CriterionConfig& c);
json to_json(const CriterionReport& r);
json to_json(const SubsequenceReport& r);
json to_json(const NegligibilityProfile& p);
json to_json(const GaussianVarianceReport& r);
json to_json(const CltConfig& c);
CltConfig clt_config_from_json(const json& j);
json to_json(const CltReport& r);
json to_json(const Corollary15Report& r);
json to_json(const SandwichResult& r);
json to_json(const GLemmaResult& r);
json to_json(const VitaliResult& r);
json to_json(const DriftProfile& p);
json to_json(const FamilyRatioSummary& s);

// Two-space indented dump with a trailing newline; doubles in shortest
// round-trip form, so equal inputs give byte-identical text.
std::string dump(const json& j);

// %.17g
std::string fmt(double x);

// s,h,mean,std_error
std::string criterion_csv(const CriterionReport& r);
// h,sup_mean,sup_std_error,sup_s_index
std::string negligibility_csv(const NegligibilityProfile& p);
// n,t,mean,std_error
std::string subsequence_csv(const SubsequenceReport& r);
// n,diagnostic,value,std_error
std::string clt_csv(const CltReport& r);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
// Single-column CSV; an optional non-numeric header line is skipped.
std::vector<double> read_series_csv(const std::string& path);

}  // namespace fmoment::io
