#include "qka/scenario.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <sstream>

namespace qka {

namespace {

using nlohmann::ordered_json;

int count_hop_checks(const Transcript& transcript) {
  int checks = 0;
  for (const TranscriptEvent& ev : transcript)
    if (ev.type == TranscriptEvent::Type::Classical &&
        ev.message->kind == MsgKind::DecoyResults)
      ++checks;
  return checks;
}

ordered_json transcript_to_json(const Transcript& transcript) {
  ordered_json events = ordered_json::array();
  for (const TranscriptEvent& ev : transcript) {
    ordered_json e;
    if (ev.type == TranscriptEvent::Type::Quantum) {
      e["type"] = "quantum";
      e["from"] = ev.from;
      e["to"] = ev.to;
      e["delivered_to"] = ev.delivered_to;
      e["photons"] = ev.photon_count;
      e["ring"] = ev.seq_origin;
      e["substituted"] = ev.substituted;
    } else {
      const ClassicalMessage& m = *ev.message;
      e["type"] = "classical";
      e["from"] = m.sender;
      if (m.receiver)
        e["to"] = *m.receiver;
      else
        e["to"] = "broadcast";
      e["kind"] = msg_kind_name(m.kind);
      e["ring"] = m.ring;
      e["positions"] = m.positions;
      e["bits"] = m.bits;
      ordered_json bases = ordered_json::array();
      for (Basis b : m.bases) bases.push_back(b == Basis::Z ? "Z" : "X");
      e["bases"] = bases;
    }
    events.push_back(std::move(e));
  }
  return events;
}

}  // namespace

Scenario scenario_from_name(const std::string& name) {
  if (name == "honest-original") return Scenario::HonestOriginal;
  if (name == "honest-improved") return Scenario::HonestImproved;
  if (name == "collusion-original") return Scenario::CollusionOriginal;
  if (name == "collusion-improved") return Scenario::CollusionImproved;
  if (name == "eve-original") return Scenario::EveOriginal;
  if (name == "eve-improved") return Scenario::EveImproved;
  throw std::invalid_argument(
      "scenario: unknown value '" + name +
      "' (expected honest-original, honest-improved, collusion-original, "
      "collusion-improved, eve-original or eve-improved)");
}

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::HonestOriginal:
      return "honest-original";
    case Scenario::HonestImproved:
      return "honest-improved";
    case Scenario::CollusionOriginal:
      return "collusion-original";
    case Scenario::CollusionImproved:
      return "collusion-improved";
    case Scenario::EveOriginal:
      return "eve-original";
    case Scenario::EveImproved:
      return "eve-improved";
  }
  return "?";
}

bool scenario_uses_original_flow(Scenario s) {
  return s == Scenario::HonestOriginal || s == Scenario::CollusionOriginal ||
         s == Scenario::EveOriginal;
}

ClusterParams parse_params(const std::string& text) {
  if (text.empty() || text == "uniform") return ClusterParams::uniform();
  if (text == "skewed") return ClusterParams::skewed();
  std::stringstream ss(text);
  std::vector<double> values;
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("params: '" + item + "' is not a number");
    }
  }
  if (values.size() != 4)
    throw std::invalid_argument(
        "params: expected 'uniform', 'skewed' or four comma-separated values");
  double norm = 0.0;
  for (double v : values) {
    if (!(v >= 0.0))
      throw std::invalid_argument("params: amplitudes must be non-negative");
    norm += v * v;
  }
  if (norm <= 0.0)
    throw std::invalid_argument("params: amplitudes must not all be zero");
  const double scale = 1.0 / std::sqrt(norm);
  return ClusterParams{values[0] * scale, values[1] * scale, values[2] * scale,
                       values[3] * scale};
}

void ScenarioSpec::validate() const {
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (trials < 1) throw std::invalid_argument("trials: must be at least 1");
  const bool collusion = scenario == Scenario::CollusionOriginal ||
                         scenario == Scenario::CollusionImproved;
  if (!collusion && target_key_hex)
    throw std::invalid_argument(
        "target_key: only valid for collusion scenarios");
  if (collusion) {
    if (collusion_anchor < 0 || collusion_anchor >= config.parties)
      throw std::invalid_argument("colluders: anchor out of range");
    if (target_key_hex) {
      const int key_bits = scenario == Scenario::CollusionOriginal
                               ? 4 * config.clusters
                               : config.photons;
      hex_to_bits(*target_key_hex, key_bits);  // validates, throws if bad
    }
  }
  const bool eve =
      scenario == Scenario::EveOriginal || scenario == Scenario::EveImproved;
  if (eve && (!(eve_fraction >= 0.0) || eve_fraction > 1.0))
    throw std::invalid_argument("eve_fraction: must be in [0, 1]");
}

RunReport run_scenario(const ScenarioSpec& spec) {
  spec.validate();
  const bool original = scenario_uses_original_flow(spec.scenario);
  const int key_bits =
      original ? 4 * spec.config.clusters : spec.config.photons;
  const RandomSource seed_root(spec.config.seed);

  RunReport report;
  report.spec = spec;
  report.trial_results = ordered_json::array();
  ScenarioAggregates& agg = report.aggregates;
  agg.trials = spec.trials;

  int agreement = 0, xor_correct = 0, manipulation = 0;
  std::vector<double> accuracies;
  double valid_fraction_sum = 0.0;

  for (int t = 0; t < spec.trials; ++t) {
    ProtocolConfig config = spec.config;
    config.seed = seed_root.child(0x10000 + t).raw();

    std::unique_ptr<Adversary> adversary;
    switch (spec.scenario) {
      case Scenario::HonestOriginal:
      case Scenario::HonestImproved:
        break;
      case Scenario::CollusionOriginal:
      case Scenario::CollusionImproved: {
        BitString target;
        if (spec.target_key_hex) {
          target = hex_to_bits(*spec.target_key_hex, key_bits);
        } else {
          RandomSource target_rng = seed_root.child(0x20000 + t);
          target = random_bits(key_bits, target_rng);
        }
        adversary = std::make_unique<CollusionAdversary>(
            config.parties,
            CollusionPlan::make(config.parties, spec.collusion_anchor,
                                std::move(target)),
            original ? ProtocolFlow::Original : ProtocolFlow::Improved);
        break;
      }
      case Scenario::EveOriginal:
      case Scenario::EveImproved:
        adversary = std::make_unique<InterceptResendEve>(spec.eve_fraction);
        break;
    }

    const RunOutcome outcome = original
                                   ? run_original(config, adversary.get())
                                   : run_improved(config, adversary.get());

    agg.hop_checks += count_hop_checks(outcome.transcript);
    agg.hop_detections += static_cast<int>(outcome.detections.size());
    if (outcome.aborted) ++agg.aborted_runs;
    const bool agree = outcome.keys_agree();
    if (agree) ++agreement;
    const bool xor_ok = !outcome.aborted && !outcome.final_keys.empty() &&
                        [&] {
                          const BitString expected = outcome.expected_xor_key();
                          for (const BitString& k : outcome.final_keys)
                            if (k != expected) return false;
                          return true;
                        }();
    if (xor_ok) ++xor_correct;
    if (outcome.adversary.manipulation_success) ++manipulation;
    if (outcome.adversary.extraction_bits > 0)
      accuracies.push_back(outcome.adversary.extraction_accuracy());

    const int total_positions = original ? spec.config.clusters : 1;
    const double valid_fraction =
        outcome.aborted
            ? 0.0
            : 1.0 - static_cast<double>(outcome.discarded_positions.size()) /
                        total_positions;
    valid_fraction_sum += valid_fraction;

    ordered_json trial;
    trial["trial"] = t;
    trial["aborted"] = outcome.aborted;
    if (outcome.abort_event) {
      trial["abort_ring"] = outcome.abort_event->ring_owner;
      trial["abort_hop"] = outcome.abort_event->hop;
      trial["abort_error_rate"] = outcome.abort_event->error_rate;
    }
    trial["detections"] = outcome.detections.size();
    trial["agreement"] = agree;
    trial["xor_correct"] = xor_ok;
    if (!outcome.aborted && !outcome.final_keys.empty())
      trial["final_key"] = bits_to_hex(outcome.final_keys.front());
    trial["discarded_positions"] = outcome.discarded_positions;
    if (outcome.adversary.active) {
      trial["manipulation_success"] = outcome.adversary.manipulation_success;
      if (outcome.adversary.extraction_bits > 0)
        trial["extraction_accuracy"] = outcome.adversary.extraction_accuracy();
      if (!outcome.adversary.target_key.empty())
        trial["target_key"] = bits_to_hex(outcome.adversary.target_key);
    }
    if (spec.include_transcript)
      trial["transcript"] = transcript_to_json(outcome.transcript);
    report.trial_results.push_back(std::move(trial));
  }

  const double n = spec.trials;
  agg.agreement_rate = agreement / n;
  agg.xor_correct_rate = xor_correct / n;
  agg.abort_rate = agg.aborted_runs / n;
  agg.per_hop_detection_rate =
      agg.hop_checks > 0
          ? static_cast<double>(agg.hop_detections) / agg.hop_checks
          : 0.0;
  agg.manipulation_success_rate = manipulation / n;
  agg.mean_valid_fraction = valid_fraction_sum / n;
  if (!accuracies.empty()) {
    double mean = 0.0;
    for (double a : accuracies) mean += a;
    mean /= accuracies.size();
    double var = 0.0;
    for (double a : accuracies) var += (a - mean) * (a - mean);
    var = accuracies.size() > 1 ? var / (accuracies.size() - 1) : 0.0;
    agg.extraction_accuracy_mean = mean;
    agg.extraction_accuracy_stddev = std::sqrt(var);
  }
  return report;
}

nlohmann::ordered_json report_to_json(const RunReport& report,
                                      bool with_timestamp) {
  const ScenarioSpec& spec = report.spec;
  ordered_json j;
  j["version"] = kVersionTag;
  j["scenario"] = scenario_name(spec.scenario);

  ordered_json s;
  s["participants"] = spec.config.parties;
  s["clusters"] = spec.config.clusters;
  s["photons"] = spec.config.photons;
  s["decoys_per_hop"] = spec.config.decoys_per_hop;
  s["error_threshold"] = spec.config.error_threshold;
  s["params"] = {spec.config.params.a, spec.config.params.b,
                 spec.config.params.c, spec.config.params.d};
  s["h_shield"] = spec.config.h_shield;
  s["trials"] = spec.trials;
  s["seed"] = spec.config.seed;
  if (spec.scenario == Scenario::CollusionOriginal ||
      spec.scenario == Scenario::CollusionImproved) {
    s["target_key"] = spec.target_key_hex ? ordered_json(*spec.target_key_hex)
                                          : ordered_json("random");
    const CollusionPlan plan =
        CollusionPlan::make(spec.config.parties, spec.collusion_anchor, {});
    s["colluders"] = plan.colluders;
  }
  if (spec.scenario == Scenario::EveOriginal ||
      spec.scenario == Scenario::EveImproved)
    s["eve_fraction"] = spec.eve_fraction;
  j["spec"] = std::move(s);

  const ScenarioAggregates& a = report.aggregates;
  ordered_json ja;
  ja["trials"] = a.trials;
  ja["agreement_rate"] = a.agreement_rate;
  ja["xor_correct_rate"] = a.xor_correct_rate;
  ja["abort_rate"] = a.abort_rate;
  ja["hop_checks"] = a.hop_checks;
  ja["hop_detections"] = a.hop_detections;
  ja["per_hop_detection_rate"] = a.per_hop_detection_rate;
  ja["manipulation_success_rate"] = a.manipulation_success_rate;
  ja["extraction_accuracy_mean"] = a.extraction_accuracy_mean;
  ja["extraction_accuracy_stddev"] = a.extraction_accuracy_stddev;
  ja["mean_valid_fraction"] = a.mean_valid_fraction;
  j["aggregates"] = std::move(ja);

  j["trials"] = report.trial_results;
  if (with_timestamp) {
    const auto now = std::chrono::system_clock::now();
    j["timestamp"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                         now.time_since_epoch())
                         .count();
  }
  return j;
}

std::string dump_transition_table(const ClusterParams& params) {
  const TransitionTable table(params);
  std::ostringstream out;
  out << "from  nibble  to  phase\n";
  for (const Transition& t : table.entries()) {
    out << t.from << "  ";
    for (int k = 3; k >= 0; --k) out << ((t.nibble >> k) & 1);
    out << "  " << t.to << "  " << (t.phase.real() >= 0 ? "+1" : "-1") << "\n";
  }
  return out.str();
}

std::string dump_povm_stats(const ClusterParams& params) {
  std::ostringstream out;
  out << "params: a=" << params.a << " b=" << params.b << " c=" << params.c
      << " d=" << params.d << "\n";
  for (int f = 1; f <= 4; ++f) {
    const UsdPovm povm = build_usd_povm(params, f);
    double min_ev = 0.0;
    for (const CMatrix& e : povm.conclusive)
      min_ev = std::min(min_ev, min_eigenvalue(e));
    min_ev = std::min(min_ev, min_eigenvalue(povm.inconclusive));

    CMatrix sum = povm.inconclusive;
    for (const CMatrix& e : povm.conclusive) sum += e;
    CMatrix projector(16);
    for (int idx : family_support(f)) projector.at(idx, idx) = cx{1, 0};
    const double completeness = sum.max_abs_deviation_from(projector);

    out << "family " << f << ": conclusive=" << povm.conclusive_probability
        << " inconclusive=" << 1.0 - povm.conclusive_probability
        << " min_eigenvalue=" << min_ev
        << " completeness_deviation=" << completeness << "\n";
  }
  return out.str();
}

}  // namespace qka
