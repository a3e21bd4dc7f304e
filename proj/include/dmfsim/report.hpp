#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmfsim/config.hpp"

namespace dmfsim {

// A named pass/fail judgement, always carrying the value observed and the
// tolerance it was judged against.
struct Verdict {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string criterion;
};

inline nlohmann::json verdict_json(const Verdict& v) {
  return nlohmann::json{
      {"name", v.name}, {"pass", v.pass}, {"value", v.value}, {"criterion", v.criterion}};
}

struct SuiteReport {
  std::string name;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<Verdict> verdicts;
  std::map<std::string, std::string> tables;  // file name -> CSV content
  double wall_seconds = 0.0;                  // never part of the payload

  bool all_pass() const {
    for (const auto& v : verdicts)
      if (!v.pass) return false;
    return true;
  }

  nlohmann::json payload() const {
    nlohmann::json vs = nlohmann::json::array();
    for (const auto& v : verdicts) vs.push_back(verdict_json(v));
    return nlohmann::json{{"summary", summary}, {"verdicts", vs}};
  }
};

struct VerifyReport {
  ExperimentConfig config;
  std::vector<SuiteReport> suites;

  bool all_pass() const {
    for (const auto& s : suites)
      if (!s.all_pass()) return false;
    return true;
  }

  // Deterministic report body: identical for identical (config, seed)
  // regardless of worker count. Wall times live in a separate document.
  nlohmann::json payload() const {
    nlohmann::json suite_obj = nlohmann::json::object();
    for (const auto& s : suites) suite_obj[s.name] = s.payload();
    return nlohmann::json{{"schema_version", 1},
                          {"version", kVersion},
                          {"config_hash", config_hash(config)},
                          {"master_seed", config.master_seed},
                          {"config", serialize_config(config, /*include_threads=*/false)},
                          {"suites", suite_obj},
                          {"all_pass", all_pass()}};
  }

  nlohmann::json timings() const {
    nlohmann::json t = nlohmann::json::object();
    for (const auto& s : suites) t[s.name] = s.wall_seconds;
    return nlohmann::json{{"wall_seconds", t}};
  }
};

// CSV assembly with a provenance comment line; all numerics at 17
// significant digits.
class CsvBuilder {
 public:
  CsvBuilder(const std::string& header, const std::string& hash, std::uint64_t seed) {
    body_ += "# dmfsim " + std::string(kVersion) + " config=" + hash +
             " seed=" + std::to_string(seed) + "\n";
    body_ += header + "\n";
  }
  void raw_row(const std::string& row) { body_ += row + "\n"; }
  const std::string& str() const { return body_; }

 private:
  std::string body_;
};

}  // namespace dmfsim
