#include "qka/adversary.hpp"

#include <algorithm>
#include <stdexcept>

namespace qka {

CollusionPlan CollusionPlan::make(int parties, PartyId anchor,
                                  BitString target_key) {
  if (parties < 3) throw std::invalid_argument("collusion needs >= 3 parties");
  if (anchor < 0 || anchor >= parties)
    throw std::invalid_argument("anchor out of range");
  CollusionPlan plan;
  if (parties % 2 == 0) {
    plan.colluders = {anchor, (anchor + parties / 2) % parties};
  } else {
    plan.colluders = {anchor, (anchor + (parties - 1) / 2) % parties,
                      (anchor + (parties + 1) / 2) % parties};
  }
  std::sort(plan.colluders.begin(), plan.colluders.end());
  plan.target_key = std::move(target_key);
  plan.validate(parties);
  return plan;
}

void CollusionPlan::validate(int parties) const {
  const auto matches_anchor = [&](PartyId anchor) {
    std::vector<PartyId> expect;
    if (parties % 2 == 0) {
      expect = {anchor, (anchor + parties / 2) % parties};
    } else {
      expect = {anchor, (anchor + (parties - 1) / 2) % parties,
                (anchor + (parties + 1) / 2) % parties};
    }
    std::sort(expect.begin(), expect.end());
    return expect == colluders;
  };
  for (PartyId anchor = 0; anchor < parties; ++anchor)
    if (matches_anchor(anchor)) return;
  throw std::invalid_argument(
      "colluder set does not match the antipodal pattern");
}

CollusionAdversary::CollusionAdversary(int parties, CollusionPlan plan,
                                       ProtocolFlow flow)
    : parties_(parties), plan_(std::move(plan)), flow_(flow) {
  plan_.validate(parties_);
  std::sort(plan_.colluders.begin(), plan_.colluders.end());
}

bool CollusionAdversary::is_colluder(PartyId p) const {
  return std::binary_search(plan_.colluders.begin(), plan_.colluders.end(), p);
}

PartyId CollusionAdversary::designated_corrector(PartyId ring_owner) const {
  PartyId best = -1;
  int best_offset = -1;
  for (PartyId c : plan_.colluders) {
    const int offset = (c - ring_owner + parties_) % parties_;
    if (offset > best_offset) {
      best_offset = offset;
      best = c;
    }
  }
  return best;
}

void CollusionAdversary::begin_run(RunContext& ctx) {
  const int count = flow_ == ProtocolFlow::Original ? ctx.config().clusters
                                                    : ctx.config().photons;
  const int key_bits = flow_ == ProtocolFlow::Original ? 4 * count : count;
  if (static_cast<int>(plan_.target_key.size()) != key_bits)
    throw std::invalid_argument("target key length does not match the run");
  k_all_estimate_.assign(count, std::nullopt);
  chain_intact_.clear();
  unresolved_positions_.clear();
}

std::vector<PartyId> CollusionAdversary::ring_order(int parties) const {
  std::vector<PartyId> order = plan_.colluders;
  for (PartyId p = 0; p < parties; ++p)
    if (!is_colluder(p)) order.push_back(p);
  return order;
}

QuantumDelivery CollusionAdversary::on_quantum_send(RunContext& ctx,
                                                    PartyId from, PartyId to,
                                                    PhotonSequence seq) {
  const PartyId origin = seq.origin;
  const bool divert = is_colluder(from) && is_colluder(origin) &&
                      origin != from && to != origin;
  if (!divert) return {to, std::move(seq)};
  return flow_ == ProtocolFlow::Original
             ? intercept_original(ctx, to, std::move(seq))
             : intercept_improved(ctx, to, std::move(seq));
}

QuantumDelivery CollusionAdversary::intercept_original(RunContext& ctx,
                                                       PartyId to,
                                                       PhotonSequence seq) {
  const PartyId owner_id = seq.origin;
  Participant& owner = ctx.controlled_party(owner_id);
  const int n = ctx.config().clusters;

  // The owner holds qubits 1 and 3 of every register and just got 2 and 4
  // back, so it can run the full measurement mid-circulation.
  std::vector<std::optional<int>> measured(n);
  for (int j = 0; j < n; ++j) {
    const DiscriminationOutcome out = ctx.discriminator().discriminate(
        ctx.arena().state(owner.own_regs[j]), ctx.adversary_rng());
    if (out) measured[j] = ctx.transitions().decode(1, *out);
  }
  ctx.record_extraction_guesses(owner_id, measured, 4);

  auto& intact = chain_intact_[owner_id];
  if (intact.empty()) intact.assign(n, true);

  // Replace the consumed registers with fresh ones carrying the same
  // accumulated encoding, so the ring continues as if nothing happened.
  const StateVector psi1 = make_cluster_state(ctx.config().params, 1);
  std::vector<RegHandle> fresh(n);
  for (int j = 0; j < n; ++j) {
    if (!measured[j]) intact[j] = false;
    StateVector state =
        encode_nibble(psi1, static_cast<Nibble>(measured[j].value_or(0)));
    fresh[j] = ctx.arena().alloc(std::move(state));
  }
  owner.own_regs = fresh;

  int payload_index = 0;
  for (Photon& ph : seq.photons) {
    if (ph.role != PhotonRole::Payload) continue;
    const int j = payload_index % n;
    const int qubit = payload_index < n ? 1 : 3;
    ph = Photon{fresh[j], qubit, PhotonRole::Payload};
    ++payload_index;
  }
  return {to, std::move(seq)};
}

QuantumDelivery CollusionAdversary::intercept_improved(RunContext& ctx,
                                                       PartyId to,
                                                       PhotonSequence seq) {
  const PartyId owner_id = seq.origin;
  Participant& owner = ctx.controlled_party(owner_id);
  const int count = ctx.config().photons;

  // Colluders share their H records, so the owner can strip the known part of
  // the shield. The honest encoders' H choices stay unknown; measuring in the
  // preparation basis is the best available guess before the announcements.
  std::vector<std::uint8_t> known_h(count, 0);
  for (PartyId c : plan_.colluders) {
    if (c == owner_id) continue;
    const Participant& peer = ctx.controlled_party(c);
    const auto it = peer.h_applied.find(owner_id);
    if (it == peer.h_applied.end()) continue;
    for (int l = 0; l < count; ++l) known_h[l] ^= it->second[l];
  }

  std::vector<std::optional<int>> guesses(count);
  int payload_index = 0;
  for (Photon& ph : seq.photons) {
    if (ph.role != PhotonRole::Payload) continue;
    const int l = payload_index++;
    if (known_h[l]) ctx.arena().apply(ph.reg, ph.qubit, Gate::H);
    const int bit = ctx.arena().measure(ph.reg, ph.qubit, owner.prep[l].basis,
                                        ctx.adversary_rng());
    guesses[l] = bit ^ owner.prep[l].bit;
    if (known_h[l]) ctx.arena().apply(ph.reg, ph.qubit, Gate::H);
  }
  ctx.record_extraction_guesses(owner_id, guesses, 1);
  // Collapsed photons travel on; unknown states cannot be re-prepared.
  return {to, std::move(seq)};
}

std::vector<Nibble> CollusionAdversary::encode_nibbles(
    RunContext&, PartyId encoder, PartyId ring_owner,
    std::vector<Nibble> honest) {
  if (is_colluder(ring_owner) || encoder != designated_corrector(ring_owner))
    return honest;
  // Correction value: own key XOR everyone's key XOR target, so the owner's
  // decode lands exactly on the target key.
  for (int j = 0; j < static_cast<int>(honest.size()); ++j) {
    if (!k_all_estimate_[j]) {
      unresolved_positions_.insert(j);
      continue;  // position will be discarded; any value is fine
    }
    const Nibble target_nibble = nibble_at(plan_.target_key, j);
    honest[j] = static_cast<Nibble>(honest[j] ^ *k_all_estimate_[j] ^
                                    target_nibble);
  }
  return honest;
}

BitString CollusionAdversary::encode_bits(RunContext&, PartyId encoder,
                                          PartyId ring_owner,
                                          BitString honest) {
  if (is_colluder(ring_owner) || encoder != designated_corrector(ring_owner))
    return honest;
  for (int l = 0; l < static_cast<int>(honest.size()); ++l) {
    const int estimate = k_all_estimate_[l].value_or(0);
    honest[l] =
        static_cast<std::uint8_t>(honest[l] ^ estimate ^ plan_.target_key[l]);
  }
  return honest;
}

std::vector<int> CollusionAdversary::invalid_positions(
    RunContext&, PartyId /*ring_owner*/, std::vector<int> honest) {
  std::set<int> merged(honest.begin(), honest.end());
  merged.insert(unresolved_positions_.begin(), unresolved_positions_.end());
  for (int j = 0; j < static_cast<int>(k_all_estimate_.size()); ++j)
    if (!k_all_estimate_[j]) merged.insert(j);
  return {merged.begin(), merged.end()};
}

void CollusionAdversary::on_ring_complete(RunContext& ctx,
                                          PartyId ring_owner) {
  if (!is_colluder(ring_owner)) return;
  Participant& owner = ctx.controlled_party(ring_owner);

  if (flow_ == ProtocolFlow::Original) {
    // All keys XOR to own key XOR the final decode, position by position,
    // provided every mid-ring measurement on that position was conclusive.
    const auto intact_it = chain_intact_.find(ring_owner);
    for (int j = 0; j < static_cast<int>(k_all_estimate_.size()); ++j) {
      if (k_all_estimate_[j]) continue;
      const bool intact =
          intact_it == chain_intact_.end() || intact_it->second[j];
      if (!intact || !owner.measured_nibbles[j]) continue;
      k_all_estimate_[j] =
          nibble_at(owner.key, j) ^ *owner.measured_nibbles[j];
    }
    return;
  }

  // Single-photon flow: measure the returned photons right away, before any H
  // announcement, stripping only the colluder-known part of the shield.
  const int count = ctx.config().photons;
  std::vector<std::uint8_t> known_h(count, 0);
  for (PartyId c : plan_.colluders) {
    if (c == ring_owner) continue;
    const Participant& peer = ctx.controlled_party(c);
    const auto it = peer.h_applied.find(ring_owner);
    if (it == peer.h_applied.end()) continue;
    for (int l = 0; l < count; ++l) known_h[l] ^= it->second[l];
  }
  for (int l = 0; l < count; ++l) {
    if (k_all_estimate_[l]) continue;
    const RegHandle reg = owner.own_photons[l];
    if (known_h[l]) ctx.arena().apply(reg, 0, Gate::H);
    const int bit =
        ctx.arena().measure(reg, 0, owner.prep[l].basis, ctx.adversary_rng());
    k_all_estimate_[l] = owner.key[l] ^ owner.prep[l].bit ^ bit;
  }
}

InterceptResendEve::InterceptResendEve(double fraction) : fraction_(fraction) {
  if (!(fraction >= 0.0) || fraction > 1.0)
    throw std::invalid_argument("fraction must be in [0, 1]");
}

QuantumDelivery InterceptResendEve::on_quantum_send(RunContext& ctx, PartyId,
                                                    PartyId to,
                                                    PhotonSequence seq) {
  for (const Photon& ph : seq.photons) {
    if (!ctx.adversary_rng().chance(fraction_)) continue;
    const Basis basis = ctx.adversary_rng().bit() ? Basis::X : Basis::Z;
    ctx.arena().measure(ph.reg, ph.qubit, basis, ctx.adversary_rng());
  }
  return {to, std::move(seq)};
}

}  // namespace qka
