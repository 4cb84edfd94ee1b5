#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qka/adversary.hpp"
#include "qka/protocol.hpp"

namespace qka {

inline constexpr const char* kVersionTag = "qka-sim 0.1.0";

enum class Scenario {
  HonestOriginal,
  HonestImproved,
  CollusionOriginal,
  CollusionImproved,
  EveOriginal,
  EveImproved,
};

Scenario scenario_from_name(const std::string& name);
const char* scenario_name(Scenario s);
bool scenario_uses_original_flow(Scenario s);

// "uniform", "skewed", or four comma-separated amplitudes (normalized here).
ClusterParams parse_params(const std::string& text);

struct ScenarioSpec {
  Scenario scenario = Scenario::HonestOriginal;
  ProtocolConfig config;
  int trials = 1;
  // Collusion scenarios: hex target key, or empty for a fresh random target
  // every trial.
  std::optional<std::string> target_key_hex;
  PartyId collusion_anchor = 0;
  double eve_fraction = 1.0;
  bool include_transcript = false;

  void validate() const;  // throws std::invalid_argument naming the field
};

struct ScenarioAggregates {
  int trials = 0;
  int aborted_runs = 0;
  int hop_checks = 0;
  int hop_detections = 0;
  double agreement_rate = 0.0;
  double xor_correct_rate = 0.0;
  double abort_rate = 0.0;
  double per_hop_detection_rate = 0.0;
  double manipulation_success_rate = 0.0;
  double extraction_accuracy_mean = 0.0;
  double extraction_accuracy_stddev = 0.0;
  double mean_valid_fraction = 1.0;
};

struct RunReport {
  ScenarioSpec spec;
  ScenarioAggregates aggregates;
  nlohmann::ordered_json trial_results;
};

// Runs all trials; trial t uses a random stream derived from (seed, t), so
// the whole report is reproducible from the spec alone.
RunReport run_scenario(const ScenarioSpec& spec);

// `with_timestamp` stamps the wall clock; everything else depends only on the
// spec and seed.
nlohmann::ordered_json report_to_json(const RunReport& report,
                                      bool with_timestamp = true);

// Inspector dumps.
std::string dump_transition_table(const ClusterParams& params);
std::string dump_povm_stats(const ClusterParams& params);

}  // namespace qka
