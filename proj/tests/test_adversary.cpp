#include "qka/adversary.hpp"

#include <cmath>
#include <set>

#include "doctest.h"

using namespace qka;

namespace {

ProtocolConfig attack_config(int parties, int clusters, std::uint64_t seed) {
  ProtocolConfig c;
  c.parties = parties;
  c.clusters = clusters;
  c.photons = 16;
  c.decoys_per_hop = 8;
  c.seed = seed;
  return c;
}

BitString fixed_target(int bits) {
  BitString t(bits, 0);
  for (int i = 0; i < bits; i += 3) t[i] = 1;
  return t;
}

}  // namespace

TEST_CASE("collusion plans follow the antipodal pattern") {
  CHECK(CollusionPlan::make(4, 0, {}).colluders == std::vector<PartyId>{0, 2});
  CHECK(CollusionPlan::make(4, 1, {}).colluders == std::vector<PartyId>{1, 3});
  CHECK(CollusionPlan::make(5, 0, {}).colluders ==
        std::vector<PartyId>{0, 2, 3});
  CHECK(CollusionPlan::make(6, 0, {}).colluders == std::vector<PartyId>{0, 3});
  CHECK(CollusionPlan::make(6, 4, {}).colluders == std::vector<PartyId>{1, 4});

  CollusionPlan bad;
  bad.colluders = {0, 1};
  CHECK_THROWS_AS(bad.validate(4), std::invalid_argument);
  bad.colluders = {0, 2, 3};
  CHECK_NOTHROW(bad.validate(5));
  bad.colluders = {0, 1, 2};
  CHECK_THROWS_AS(bad.validate(5), std::invalid_argument);
}

TEST_CASE("four-party collusion fixes every honest key silently") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    const ProtocolConfig c = attack_config(4, 4, seed);
    const BitString target = fixed_target(16);
    CollusionAdversary adversary(
        4, CollusionPlan::make(4, 0, target), ProtocolFlow::Original);
    const RunOutcome out = run_original(c, &adversary);

    REQUIRE_FALSE(out.aborted);
    CHECK(out.detections.empty());
    CHECK_FALSE(out.adversary.detected);
    CHECK(out.adversary.manipulation_success);
    CHECK(out.discarded_positions.empty());
    // Honest parties 1 and 3 decode exactly the chosen target.
    CHECK(out.final_keys[1] == target);
    CHECK(out.final_keys[3] == target);
    CHECK(out.adversary.extraction_bits > 0);
    CHECK(out.adversary.extraction_accuracy() == doctest::Approx(1.0));
  }
}

TEST_CASE("five-party triple and six-party pair also succeed") {
  for (int parties : {5, 6}) {
    for (std::uint64_t seed : {7ull, 8ull}) {
      const ProtocolConfig c = attack_config(parties, 2, seed);
      const BitString target = fixed_target(8);
      CollusionAdversary adversary(parties,
                                   CollusionPlan::make(parties, 0, target),
                                   ProtocolFlow::Original);
      const RunOutcome out = run_original(c, &adversary);
      REQUIRE_FALSE(out.aborted);
      CHECK(out.detections.empty());
      CHECK(out.adversary.manipulation_success);
      for (PartyId p = 0; p < parties; ++p)
        CHECK(out.final_keys[p] == target);
    }
  }
}

TEST_CASE("collusion anchored away from party zero still works") {
  const ProtocolConfig c = attack_config(4, 3, 11);
  const BitString target = fixed_target(12);
  CollusionAdversary adversary(4, CollusionPlan::make(4, 1, target),
                               ProtocolFlow::Original);
  const RunOutcome out = run_original(c, &adversary);
  REQUIRE_FALSE(out.aborted);
  CHECK(out.adversary.manipulation_success);
  CHECK(out.final_keys[0] == target);
  CHECK(out.final_keys[2] == target);
}

TEST_CASE("collusion survives non-uniform parameters via discards") {
  int runs_with_discards = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    ProtocolConfig c = attack_config(4, 6, 40 + seed);
    c.params = ClusterParams::skewed();
    const BitString target = fixed_target(24);
    CollusionAdversary adversary(4, CollusionPlan::make(4, 0, target),
                                 ProtocolFlow::Original);
    const RunOutcome out = run_original(c, &adversary);
    REQUIRE_FALSE(out.aborted);
    CHECK(out.detections.empty());
    CHECK(out.adversary.manipulation_success);
    if (!out.discarded_positions.empty()) ++runs_with_discards;
    // Honest keys equal the target restricted to surviving positions.
    BitString expected;
    std::set<int> dropped(out.discarded_positions.begin(),
                          out.discarded_positions.end());
    for (int i = 0; i < 24; ++i)
      if (!dropped.count(i / 4)) expected.push_back(target[i]);
    CHECK(out.final_keys[1] == expected);
    CHECK(out.final_keys[3] == expected);
  }
  CHECK(runs_with_discards > 0);  // the inconclusive path actually ran
}

TEST_CASE("eve at fraction zero changes nothing") {
  const ProtocolConfig c = attack_config(4, 4, 19);
  InterceptResendEve eve(0.0);
  const RunOutcome honest = run_original(c);
  const RunOutcome with_eve = run_original(c, &eve);
  REQUIRE_FALSE(with_eve.aborted);
  CHECK(with_eve.final_keys == honest.final_keys);
  CHECK(with_eve.detections.empty());

  CHECK_THROWS_AS(InterceptResendEve(1.5), std::invalid_argument);
}

TEST_CASE("intercept-resend statistics: quarter mismatch per decoy") {
  ProtocolConfig c = attack_config(3, 1, 4242);
  InterceptResendEve eve(1.0);
  RunContext ctx(c, &eve);
  QuantumArena& arena = ctx.arena();
  RandomSource decoy_rng(901), measure_rng(902);

  int mismatches = 0, decoys = 0, hops_passed = 0;
  const int hop_trials = 2500;
  const int d = 4;
  for (int trial = 0; trial < hop_trials; ++trial) {
    PhotonSequence empty;
    empty.origin = 0;
    auto [padded, ledger] = insert_decoys(arena, empty, d, decoy_rng);
    QuantumDelivery delivery =
        eve.on_quantum_send(ctx, 0, 1, std::move(padded));
    std::vector<int> results;
    for (const DecoyRecord& rec : ledger.decoys) {
      const Photon& ph = delivery.seq.photons.at(rec.position);
      results.push_back(arena.measure(ph.reg, ph.qubit, rec.basis, measure_rng));
    }
    const double err = check_decoys(ledger, results);
    mismatches += static_cast<int>(std::lround(err * d));
    decoys += d;
    if (err == 0.0) ++hops_passed;
  }

  const double mismatch_rate = mismatches / static_cast<double>(decoys);
  const double sigma_quarter = std::sqrt(0.25 * 0.75 / decoys);
  CHECK(std::abs(mismatch_rate - 0.25) <= 3 * sigma_quarter);

  const double pass_rate = hops_passed / static_cast<double>(hop_trials);
  const double expect_pass = std::pow(0.75, d);
  const double sigma_pass =
      std::sqrt(expect_pass * (1 - expect_pass) / hop_trials);
  CHECK(std::abs(pass_rate - expect_pass) <= 3 * sigma_pass);
}

TEST_CASE("replayed collusion against the improved flow extracts noisy bits") {
  int bits = 0, correct = 0;
  int successes = 0;
  const int runs = 60;
  for (int r = 0; r < runs; ++r) {
    ProtocolConfig c = attack_config(4, 1, 700 + r);
    c.photons = 32;
    const BitString target = fixed_target(32);
    CollusionAdversary adversary(4, CollusionPlan::make(4, 0, target),
                                 ProtocolFlow::Improved);
    const RunOutcome out = run_improved(c, &adversary);
    REQUIRE_FALSE(out.aborted);
    CHECK(out.detections.empty());
    bits += out.adversary.extraction_bits;
    correct += out.adversary.extraction_correct;
    if (out.adversary.manipulation_success) ++successes;
    // Honest parties still agree with each other even when the attack misses.
    CHECK(out.final_keys[1] == out.final_keys[3]);
  }
  // One honest encoder shields each half of the path: accuracy 3/4.
  const double accuracy = correct / static_cast<double>(bits);
  const double sigma = std::sqrt(0.75 * 0.25 / bits);
  CHECK(std::abs(accuracy - 0.75) <= 3 * sigma);
  // At 32 photons a perfect guess of every bit is essentially impossible.
  CHECK(successes == 0);
}

TEST_CASE("manipulation success shrinks as the photon count grows") {
  std::vector<double> rates;
  double pooled_accuracy_numer = 0, pooled_accuracy_denom = 0;
  for (int photons : {4, 8, 16, 32}) {
    int successes = 0;
    const int runs = 300;
    for (int r = 0; r < runs; ++r) {
      ProtocolConfig c = attack_config(4, 1, 3000 + photons * 1000 + r);
      c.photons = photons;
      const BitString target = fixed_target(photons);
      CollusionAdversary adversary(4, CollusionPlan::make(4, 0, target),
                                   ProtocolFlow::Improved);
      const RunOutcome out = run_improved(c, &adversary);
      REQUIRE_FALSE(out.aborted);
      if (out.adversary.manipulation_success) ++successes;
      pooled_accuracy_numer += out.adversary.extraction_correct;
      pooled_accuracy_denom += out.adversary.extraction_bits;
    }
    rates.push_back(successes / static_cast<double>(runs));
  }
  // Monotone decrease within noise: each doubling of L cuts the rate.
  CHECK(rates[0] > rates[2]);
  CHECK(rates[1] >= rates[3]);
  CHECK(rates[0] > rates[1]);
  CHECK(rates[3] == doctest::Approx(0.0));
  // Shielded extraction never reaches perfect accuracy.
  CHECK(pooled_accuracy_numer / pooled_accuracy_denom < 1.0);
}

TEST_CASE("disabling the H shield restores the original vulnerability") {
  for (std::uint64_t seed : {91ull, 92ull, 93ull}) {
    ProtocolConfig c = attack_config(4, 1, seed);
    c.photons = 24;
    c.h_shield = false;
    const BitString target = fixed_target(24);
    CollusionAdversary adversary(4, CollusionPlan::make(4, 0, target),
                                 ProtocolFlow::Improved);
    const RunOutcome out = run_improved(c, &adversary);
    REQUIRE_FALSE(out.aborted);
    CHECK(out.detections.empty());
    CHECK(out.adversary.manipulation_success);
    CHECK(out.final_keys[1] == target);
    CHECK(out.final_keys[3] == target);
    CHECK(out.adversary.extraction_accuracy() == doctest::Approx(1.0));
  }
}

TEST_CASE("state access is fenced to controlled parties") {
  ProtocolConfig c = attack_config(4, 1, 50);
  RunContext bare(c, nullptr);
  CHECK_THROWS_AS(bare.controlled_party(0), std::logic_error);

  InterceptResendEve eve(0.5);
  RunContext with_eve(c, &eve);
  CHECK_THROWS_AS(with_eve.controlled_party(1), std::logic_error);
}
