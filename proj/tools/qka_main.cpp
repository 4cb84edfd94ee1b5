#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "qka/scenario.hpp"

namespace {

// Maps an explicit colluder list like "0,2" onto the anchor generating it.
qka::PartyId anchor_for_colluders(int parties, const std::string& text) {
  std::vector<qka::PartyId> ids;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      ids.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("colluders: '" + item + "' is not a number");
    }
  }
  std::sort(ids.begin(), ids.end());
  for (qka::PartyId anchor = 0; anchor < parties; ++anchor) {
    qka::CollusionPlan probe = qka::CollusionPlan::make(parties, anchor, {});
    if (probe.colluders == ids) return anchor;
  }
  throw std::invalid_argument(
      "colluders: set does not match the antipodal pattern");
}

int execute_run(const qka::ScenarioSpec& spec, const std::string& out_path) {
  const qka::RunReport report = qka::run_scenario(spec);
  const std::string text = qka::report_to_json(report).dump(2);
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("out: cannot open " + out_path);
    out << text << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for a ring-based multiparty quantum key agreement "
               "protocol, an insider collusion attack on it, and the "
               "single-photon countermeasure"};
  app.require_subcommand(1);

  std::string scenario_text, params_text = "uniform", target_key_text,
              colluders_text, out_path;
  int participants = 4, clusters = 8, photons = 32, decoys = 16, trials = 1;
  double threshold = 0.0, eve_fraction = 1.0;
  std::uint64_t seed = 0;
  bool with_transcript = false, no_shield = false;

  CLI::App* run = app.add_subcommand(
      "run", "Run a scenario and emit a JSON report");
  run->add_option("--scenario", scenario_text,
                  "honest-original | honest-improved | collusion-original | "
                  "collusion-improved | eve-original | eve-improved")
      ->required();
  run->add_option("--participants", participants, "Ring size N (default 4)");
  run->add_option("--clusters", clusters,
                  "Cluster states per party; 4 key bits each (default 8)");
  run->add_option("--photons", photons,
                  "Single photons per party in the improved flow (default 32)");
  run->add_option("--decoys", decoys, "Decoy photons per hop (default 16)");
  run->add_option("--threshold", threshold,
                  "Decoy error rate above which a run aborts (default 0)");
  run->add_option("--params", params_text,
                  "'uniform', 'skewed' or a,b,c,d (default uniform)");
  run->add_option("--target-key", target_key_text,
                  "Collusion target key as hex, or 'random' (default random "
                  "per trial)");
  run->add_option("--colluders", colluders_text,
                  "Explicit colluder ids, e.g. 0,2 (default anchored at 0)");
  run->add_option("--trials", trials, "Number of seeded trials (default 1)");
  run->add_option("--seed", seed, "Root seed (default 0)");
  run->add_option("--eve-fraction", eve_fraction,
                  "Fraction of photons the eavesdropper measures (default 1)");
  run->add_flag("--no-shield", no_shield,
                "Disable the random H layer of the improved flow");
  run->add_option("--out", out_path, "Write the report here instead of stdout");
  run->add_flag("--transcript", with_transcript,
                "Embed full channel transcripts in the report");

  std::string table_params = "uniform";
  CLI::App* table = app.add_subcommand(
      "table", "Print the 256-entry state transition table");
  table->add_option("--params", table_params, "'uniform', 'skewed' or a,b,c,d");

  std::string povm_params = "uniform";
  CLI::App* povm = app.add_subcommand(
      "povm", "Print per-family discrimination statistics and checks");
  povm->add_option("--params", povm_params, "'uniform', 'skewed' or a,b,c,d");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (run->parsed()) {
      qka::ScenarioSpec spec;
      spec.scenario = qka::scenario_from_name(scenario_text);
      spec.config.parties = participants;
      spec.config.clusters = clusters;
      spec.config.photons = photons;
      spec.config.decoys_per_hop = decoys;
      spec.config.error_threshold = threshold;
      spec.config.params = qka::parse_params(params_text);
      spec.config.h_shield = !no_shield;
      spec.config.seed = seed;
      spec.trials = trials;
      spec.eve_fraction = eve_fraction;
      spec.include_transcript = with_transcript;
      if (!target_key_text.empty() && target_key_text != "random")
        spec.target_key_hex = target_key_text;
      if (!colluders_text.empty())
        spec.collusion_anchor = anchor_for_colluders(participants,
                                                     colluders_text);
      spec.validate();
      return execute_run(spec, out_path);
    }
    if (table->parsed()) {
      std::cout << qka::dump_transition_table(qka::parse_params(table_params));
      return 0;
    }
    if (povm->parsed()) {
      std::cout << qka::dump_povm_stats(qka::parse_params(povm_params));
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid spec: " << e.what() << "\n";
    return 1;
  } catch (const qka::LinearlyDependentError& e) {
    std::cerr << "invalid spec: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
