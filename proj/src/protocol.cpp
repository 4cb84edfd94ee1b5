#include "qka/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace qka {

namespace {

constexpr PrepRecord kSinglePhotonStates[4] = {
    {Basis::Z, 0}, {Basis::Z, 1}, {Basis::X, 0}, {Basis::X, 1}};

StateVector prepared_state(const PrepRecord& prep) {
  if (prep.basis == Basis::Z)
    return prep.bit ? StateVector::ket1() : StateVector::ket0();
  return prep.bit ? StateVector::ket_minus() : StateVector::ket_plus();
}

PhotonSequence strip_decoys(PhotonSequence seq,
                            const std::vector<int>& positions) {
  std::set<int> drop(positions.begin(), positions.end());
  PhotonSequence out;
  out.origin = seq.origin;
  out.round = seq.round;
  for (int i = 0; i < static_cast<int>(seq.photons.size()); ++i)
    if (!drop.count(i)) out.photons.push_back(seq.photons[i]);
  return out;
}

bool contains(const std::vector<PartyId>& v, PartyId id) {
  return std::find(v.begin(), v.end(), id) != v.end();
}

BitString restrict_to_clusters(const BitString& bits,
                               const std::set<int>& discarded) {
  BitString out;
  for (int i = 0; i < static_cast<int>(bits.size()); ++i)
    if (!discarded.count(i / 4)) out.push_back(bits[i]);
  return out;
}

}  // namespace

BitString random_bits(int length, RandomSource& rng) {
  BitString bits(length);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
  return bits;
}

BitString xor_bits(const BitString& a, const BitString& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("xor_bits: length mismatch");
  BitString out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

std::string bits_to_hex(const BitString& bits) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    int v = 0;
    for (std::size_t k = 0; k < 4; ++k)
      v = (v << 1) | (i + k < bits.size() ? bits[i + k] : 0);
    out.push_back(digits[v]);
  }
  return out;
}

BitString hex_to_bits(const std::string& hex, int length) {
  const int digits_needed = (length + 3) / 4;
  if (static_cast<int>(hex.size()) != digits_needed)
    throw std::invalid_argument("hex key must have exactly " +
                                std::to_string(digits_needed) + " digits");
  BitString bits;
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9')
      v = c - '0';
    else if (c >= 'a' && c <= 'f')
      v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F')
      v = c - 'A' + 10;
    else
      throw std::invalid_argument("invalid hex digit in key");
    for (int k = 3; k >= 0; --k) bits.push_back((v >> k) & 1);
  }
  for (std::size_t i = length; i < bits.size(); ++i)
    if (bits[i])
      throw std::invalid_argument("hex key has nonzero padding bits");
  bits.resize(length);
  return bits;
}

Nibble nibble_at(const BitString& bits, int index) {
  Nibble v = 0;
  for (int k = 0; k < 4; ++k)
    v = static_cast<Nibble>((v << 1) | bits.at(4 * index + k));
  return v;
}

void set_nibble(BitString& bits, int index, Nibble value) {
  for (int k = 0; k < 4; ++k)
    bits.at(4 * index + k) = (value >> (3 - k)) & 1;
}

void ProtocolConfig::validate() const {
  if (parties < 3)
    throw std::invalid_argument("parties must be at least 3");
  if (clusters < 1) throw std::invalid_argument("clusters must be at least 1");
  if (photons < 1) throw std::invalid_argument("photons must be at least 1");
  if (decoys_per_hop < 0)
    throw std::invalid_argument("decoys_per_hop must be non-negative");
  if (!(error_threshold >= 0.0) || error_threshold >= 1.0)
    throw std::invalid_argument("error_threshold must be in [0, 1)");
  if (!fixed_private_keys.empty() &&
      static_cast<int>(fixed_private_keys.size()) != parties)
    throw std::invalid_argument("fixed keys must cover every party");
  params.validate();
}

namespace {

BitString private_key_for(const ProtocolConfig& config, PartyId p,
                          int key_bits, RandomSource& key_rng) {
  if (config.fixed_private_keys.empty())
    return random_bits(key_bits, key_rng);
  const BitString& k = config.fixed_private_keys.at(p);
  if (static_cast<int>(k.size()) != key_bits)
    throw std::invalid_argument("fixed key length does not match the flow");
  return k;
}

}  // namespace

std::pair<PhotonSequence, DecoyLedgerEntry> insert_decoys(
    QuantumArena& arena, PhotonSequence seq, int count, RandomSource& rng) {
  if (count < 0) throw std::invalid_argument("decoy count must be >= 0");
  const int total = static_cast<int>(seq.photons.size()) + count;

  // Uniform choice of `count` decoy slots among all padded positions.
  std::vector<int> slots(total);
  std::iota(slots.begin(), slots.end(), 0);
  for (int i = 0; i < count; ++i) {
    const int j = i + static_cast<int>(rng.below(total - i));
    std::swap(slots[i], slots[j]);
  }
  std::set<int> decoy_slots(slots.begin(), slots.begin() + count);

  PhotonSequence padded;
  padded.origin = seq.origin;
  padded.round = seq.round;
  DecoyLedgerEntry ledger;
  std::size_t next_payload = 0;
  for (int pos = 0; pos < total; ++pos) {
    if (decoy_slots.count(pos)) {
      const PrepRecord prep = kSinglePhotonStates[rng.below(4)];
      const RegHandle reg = arena.alloc(prepared_state(prep));
      padded.photons.push_back({reg, 0, PhotonRole::Decoy});
      ledger.decoys.push_back({pos, prep.basis, prep.bit});
    } else {
      padded.photons.push_back(seq.photons.at(next_payload++));
    }
  }
  return {std::move(padded), std::move(ledger)};
}

double check_decoys(const DecoyLedgerEntry& ledger,
                    const std::vector<int>& results) {
  if (results.size() != ledger.decoys.size())
    throw std::invalid_argument("decoy result count mismatch");
  if (ledger.decoys.empty()) return 0.0;
  int mismatches = 0;
  for (std::size_t i = 0; i < results.size(); ++i)
    if (results[i] != ledger.decoys[i].bit) ++mismatches;
  return static_cast<double>(mismatches) / ledger.decoys.size();
}

bool RunOutcome::keys_agree() const {
  if (aborted || final_keys.empty()) return false;
  for (const BitString& k : final_keys)
    if (k != final_keys.front()) return false;
  return true;
}

BitString RunOutcome::expected_xor_key() const {
  if (private_keys.empty()) return {};
  BitString x(private_keys.front().size(), 0);
  for (const BitString& k : private_keys) x = xor_bits(x, k);
  if (flow == ProtocolFlow::Original) {
    const std::set<int> discarded(discarded_positions.begin(),
                                  discarded_positions.end());
    return restrict_to_clusters(x, discarded);
  }
  return x;
}

std::vector<PartyId> Adversary::ring_order(int parties) const {
  std::vector<PartyId> order(parties);
  std::iota(order.begin(), order.end(), 0);
  return order;
}

QuantumDelivery Adversary::on_quantum_send(RunContext&, PartyId,
                                           PartyId to, PhotonSequence seq) {
  return {to, std::move(seq)};
}

std::vector<Nibble> Adversary::encode_nibbles(RunContext&, PartyId, PartyId,
                                              std::vector<Nibble> honest) {
  return honest;
}

BitString Adversary::encode_bits(RunContext&, PartyId, PartyId,
                                 BitString honest) {
  return honest;
}

std::vector<int> Adversary::invalid_positions(RunContext&, PartyId,
                                              std::vector<int> honest) {
  return honest;
}

RunContext::RunContext(const ProtocolConfig& config, Adversary* adversary)
    : config_(config),
      adversary_(adversary),
      key_rng_(RandomSource(config.seed).child(1)),
      decoy_rng_(RandomSource(config.seed).child(2)),
      measure_rng_(RandomSource(config.seed).child(3)),
      shield_rng_(RandomSource(config.seed).child(4)),
      adversary_rng_(RandomSource(config.seed).child(5)) {
  discriminator_ = std::make_unique<Discriminator>(config.params);
  transitions_ = std::make_unique<TransitionTable>(config.params);
}

Participant& RunContext::controlled_party(PartyId id) {
  if (!adversary_ || !contains(adversary_->controlled(), id))
    throw std::logic_error(
        "adversary asked for the state of a party it does not control");
  return participants_.at(id);
}

void RunContext::record_extraction_guesses(
    PartyId ring_owner, const std::vector<std::optional<int>>& values,
    int bits_per_value) {
  const std::vector<int>& truth = cumulative_xor_.at(ring_owner);
  for (std::size_t pos = 0; pos < values.size(); ++pos) {
    if (!values[pos]) continue;
    for (int k = 0; k < bits_per_value; ++k) {
      const int guess_bit = (*values[pos] >> k) & 1;
      const int true_bit = (truth.at(pos) >> k) & 1;
      metrics_.extraction_bits++;
      if (guess_bit == true_bit) metrics_.extraction_correct++;
    }
  }
}

namespace {

// Shared per-hop choreography: pad with decoys, send (through the adversary
// hook if any), acknowledge, announce, measure, compare. Returns the arrived
// sequence with decoys stripped, or nullopt on abort.
std::optional<PhotonSequence> run_hop(RingChannel& channel, QuantumArena& arena,
                                      PartyId owner, int hop, PartyId sender,
                                      PartyId receiver, PhotonSequence seq,
                                      RandomSource& decoy_rng,
                                      RandomSource& measure_rng,
                                      std::vector<Participant>& participants,
                                      const ProtocolConfig& config,
                                      RunOutcome& outcome) {
  seq.round = hop;
  auto [padded, ledger] =
      insert_decoys(arena, std::move(seq), config.decoys_per_hop, decoy_rng);
  participants[sender].sent_decoys.push_back(ledger);

  QuantumDelivery delivery =
      channel.send_quantum(sender, receiver, std::move(padded));
  if (delivery.to != receiver)
    throw std::logic_error("adversary hook diverted a scheduled delivery");
  PhotonSequence arrived = std::move(delivery.seq);

  channel.send_classical({receiver, sender, MsgKind::Ack, owner, {}, {}, {}});

  ClassicalMessage pos_msg{sender, receiver, MsgKind::DecoyPositions, owner,
                           {},     {},       {}};
  ClassicalMessage basis_msg{sender, receiver, MsgKind::DecoyBases, owner,
                             {},     {},       {}};
  for (const DecoyRecord& d : ledger.decoys) {
    pos_msg.positions.push_back(d.position);
    basis_msg.bases.push_back(d.basis);
  }
  channel.send_classical(pos_msg);
  channel.send_classical(basis_msg);

  std::vector<int> results;
  results.reserve(ledger.decoys.size());
  for (const DecoyRecord& d : ledger.decoys) {
    const Photon& ph = arrived.photons.at(d.position);
    results.push_back(arena.measure(ph.reg, ph.qubit, d.basis, measure_rng));
  }
  channel.send_classical(
      {receiver, sender, MsgKind::DecoyResults, owner, {}, {}, results});

  const double err = check_decoys(ledger, results);
  if (err > 0.0) outcome.detections.push_back({owner, hop, err});
  if (err > config.error_threshold) {
    outcome.aborted = true;
    outcome.abort_event = DetectionEvent{owner, hop, err};
    return std::nullopt;
  }
  return strip_decoys(std::move(arrived), pos_msg.positions);
}

void finalize_adversary_metrics(RunOutcome& outcome, Adversary* adversary,
                                const AdversaryMetrics& accumulated,
                                const std::vector<BitString>& honest_finals,
                                const BitString& expected_target) {
  outcome.adversary.extraction_bits = accumulated.extraction_bits;
  outcome.adversary.extraction_correct = accumulated.extraction_correct;
  outcome.adversary.detected = !outcome.detections.empty();
  if (!adversary || !adversary->manipulates()) return;
  if (outcome.aborted) {
    outcome.adversary.manipulation_success = false;
    return;
  }
  bool success = true;
  for (const BitString& k : honest_finals)
    if (k != expected_target) success = false;
  outcome.adversary.manipulation_success = success;
}

}  // namespace

RunOutcome run_original(const ProtocolConfig& config, Adversary* adversary) {
  config.validate();
  RunContext ctx(config, adversary);
  const int n_parties = config.parties;
  const int n_clusters = config.clusters;
  const std::vector<PartyId> controlled =
      adversary ? adversary->controlled() : std::vector<PartyId>{};

  RingChannel channel(n_parties);
  if (adversary)
    channel.set_hook([&](PartyId from, PartyId to, PhotonSequence seq) {
      return adversary->on_quantum_send(ctx, from, to, std::move(seq));
    });

  ctx.participants_.resize(n_parties);
  for (PartyId p = 0; p < n_parties; ++p) {
    Participant& part = ctx.participants_[p];
    part.id = p;
    part.key = private_key_for(config, p, 4 * n_clusters, ctx.key_rng_);
    part.measured_nibbles.assign(n_clusters, std::nullopt);
  }
  ctx.cumulative_xor_.assign(n_parties, std::vector<int>(n_clusters, 0));

  RunOutcome outcome;
  outcome.flow = ProtocolFlow::Original;
  outcome.adversary.active = adversary != nullptr;
  if (adversary) outcome.adversary.target_key = adversary->target_key();
  if (adversary) adversary->begin_run(ctx);

  const std::vector<PartyId> order = adversary
                                         ? adversary->ring_order(n_parties)
                                         : Adversary().ring_order(n_parties);
  const StateVector psi1 = make_cluster_state(config.params, 1);

  for (PartyId owner : order) {
    Participant& owner_state = ctx.participants_[owner];
    owner_state.phase = PartyPhase::Circulating;

    owner_state.own_regs.clear();
    PhotonSequence seq;
    seq.origin = owner;
    for (int j = 0; j < n_clusters; ++j)
      owner_state.own_regs.push_back(ctx.arena_.alloc(psi1));
    for (int j = 0; j < n_clusters; ++j)
      seq.photons.push_back({owner_state.own_regs[j], 1, PhotonRole::Payload});
    for (int j = 0; j < n_clusters; ++j)
      seq.photons.push_back({owner_state.own_regs[j], 3, PhotonRole::Payload});

    for (int hop = 0; hop < n_parties; ++hop) {
      const PartyId sender = (owner + hop) % n_parties;
      const PartyId receiver = (sender + 1) % n_parties;
      std::optional<PhotonSequence> arrived = run_hop(
          channel, ctx.arena_, owner, hop, sender, receiver, std::move(seq),
          ctx.decoy_rng_, ctx.measure_rng_, ctx.participants_, config,
          outcome);
      if (!arrived) break;
      seq = std::move(*arrived);
      if (receiver == owner) break;  // circulation closed; measurement next

      std::vector<Nibble> nibbles(n_clusters);
      for (int j = 0; j < n_clusters; ++j)
        nibbles[j] = nibble_at(ctx.participants_[receiver].key, j);
      if (adversary && contains(controlled, receiver))
        nibbles = adversary->encode_nibbles(ctx, receiver, owner, nibbles);

      for (int j = 0; j < n_clusters; ++j) {
        const OpPair ops = nibble_to_oppair(nibbles[j]);
        const Photon& p2 = seq.photons.at(j);
        const Photon& p4 = seq.photons.at(n_clusters + j);
        ctx.arena_.apply(p2.reg, p2.qubit, ops.op2);
        ctx.arena_.apply(p4.reg, p4.qubit, ops.op4);
        ctx.cumulative_xor_[owner][j] ^= nibbles[j];
      }
    }
    if (outcome.aborted) break;

    // The owner holds all four qubits of each register again; unambiguous
    // discrimination recovers the accumulated nibble or flags the position.
    for (int j = 0; j < n_clusters; ++j) {
      const RegHandle reg = owner_state.own_regs[j];
      const DiscriminationOutcome out = ctx.discriminator_->discriminate(
          ctx.arena_.state(reg), ctx.measure_rng_);
      if (out)
        owner_state.measured_nibbles[j] = ctx.transitions_->decode(1, *out);
    }
    owner_state.phase = PartyPhase::Done;
    if (adversary) adversary->on_ring_complete(ctx, owner);
  }

  for (PartyId p = 0; p < n_parties; ++p)
    outcome.private_keys.push_back(ctx.participants_[p].key);

  if (!outcome.aborted) {
    // Owners announce positions their measurement could not resolve; those
    // cluster positions drop out of everyone's final key.
    std::set<int> discarded;
    for (PartyId p = 0; p < n_parties; ++p) {
      std::vector<int> invalid;
      for (int j = 0; j < n_clusters; ++j)
        if (!ctx.participants_[p].measured_nibbles[j]) invalid.push_back(j);
      if (adversary && contains(controlled, p))
        invalid = adversary->invalid_positions(ctx, p, invalid);
      channel.send_classical(
          {p, std::nullopt, MsgKind::InvalidPositions, p, invalid, {}, {}});
      discarded.insert(invalid.begin(), invalid.end());
    }
    outcome.discarded_positions.assign(discarded.begin(), discarded.end());

    const BitString target = adversary ? adversary->target_key() : BitString{};
    std::vector<BitString> honest_finals;
    for (PartyId p = 0; p < n_parties; ++p) {
      const Participant& part = ctx.participants_[p];
      BitString full(4 * n_clusters, 0);
      for (int j = 0; j < n_clusters; ++j)
        set_nibble(full, j,
                   static_cast<Nibble>(nibble_at(part.key, j) ^
                                       part.measured_nibbles[j].value_or(0)));
      BitString final_key = restrict_to_clusters(full, discarded);
      if (adversary && adversary->manipulates() && contains(controlled, p))
        final_key = restrict_to_clusters(target, discarded);
      else
        honest_finals.push_back(final_key);
      outcome.final_keys.push_back(std::move(final_key));
    }
    finalize_adversary_metrics(outcome, adversary, ctx.metrics_, honest_finals,
                               restrict_to_clusters(target, discarded));
  } else {
    finalize_adversary_metrics(outcome, adversary, ctx.metrics_, {}, {});
  }

  outcome.transcript = channel.take_transcript();
  return outcome;
}

RunOutcome run_improved(const ProtocolConfig& config, Adversary* adversary) {
  config.validate();
  RunContext ctx(config, adversary);
  const int n_parties = config.parties;
  const int n_photons = config.photons;
  const std::vector<PartyId> controlled =
      adversary ? adversary->controlled() : std::vector<PartyId>{};

  RingChannel channel(n_parties);
  if (adversary)
    channel.set_hook([&](PartyId from, PartyId to, PhotonSequence seq) {
      return adversary->on_quantum_send(ctx, from, to, std::move(seq));
    });

  RandomSource prep_rng = RandomSource(config.seed).child(6);
  ctx.participants_.resize(n_parties);
  for (PartyId p = 0; p < n_parties; ++p) {
    Participant& part = ctx.participants_[p];
    part.id = p;
    part.key = private_key_for(config, p, n_photons, ctx.key_rng_);
    for (int l = 0; l < n_photons; ++l)
      part.prep.push_back(kSinglePhotonStates[prep_rng.below(4)]);
  }
  ctx.cumulative_xor_.assign(n_parties, std::vector<int>(n_photons, 0));

  RunOutcome outcome;
  outcome.flow = ProtocolFlow::Improved;
  outcome.adversary.active = adversary != nullptr;
  if (adversary) outcome.adversary.target_key = adversary->target_key();
  if (adversary) adversary->begin_run(ctx);

  const std::vector<PartyId> order = adversary
                                         ? adversary->ring_order(n_parties)
                                         : Adversary().ring_order(n_parties);

  for (PartyId owner : order) {
    Participant& owner_state = ctx.participants_[owner];
    owner_state.phase = PartyPhase::Circulating;

    owner_state.own_photons.clear();
    PhotonSequence seq;
    seq.origin = owner;
    for (int l = 0; l < n_photons; ++l) {
      const RegHandle reg = ctx.arena_.alloc(prepared_state(owner_state.prep[l]));
      owner_state.own_photons.push_back(reg);
      seq.photons.push_back({reg, 0, PhotonRole::Payload});
    }

    for (int hop = 0; hop < n_parties; ++hop) {
      const PartyId sender = (owner + hop) % n_parties;
      const PartyId receiver = (sender + 1) % n_parties;
      std::optional<PhotonSequence> arrived = run_hop(
          channel, ctx.arena_, owner, hop, sender, receiver, std::move(seq),
          ctx.decoy_rng_, ctx.measure_rng_, ctx.participants_, config,
          outcome);
      if (!arrived) break;
      seq = std::move(*arrived);
      if (receiver == owner) break;

      Participant& encoder = ctx.participants_[receiver];
      BitString bits = encoder.key;
      if (adversary && contains(controlled, receiver))
        bits = adversary->encode_bits(ctx, receiver, owner, bits);

      std::vector<std::uint8_t> h_choices(n_photons, 0);
      for (int l = 0; l < n_photons; ++l) {
        const Photon& ph = seq.photons.at(l);
        if (bits.at(l)) ctx.arena_.apply(ph.reg, ph.qubit, Gate::ISY);
        if (config.h_shield && ctx.shield_rng_.bit()) {
          h_choices[l] = 1;
          ctx.arena_.apply(ph.reg, ph.qubit, Gate::H);
        }
        ctx.cumulative_xor_[owner][l] ^= bits.at(l);
      }
      encoder.h_applied[owner] = std::move(h_choices);
    }
    if (outcome.aborted) break;

    owner_state.phase = PartyPhase::Done;
    if (adversary) adversary->on_ring_complete(ctx, owner);
  }

  for (PartyId p = 0; p < n_parties; ++p)
    outcome.private_keys.push_back(ctx.participants_[p].key);

  if (!outcome.aborted) {
    // Every transmission check passed; only now are the H choices revealed.
    for (PartyId owner = 0; owner < n_parties; ++owner) {
      for (PartyId enc = 0; enc < n_parties; ++enc) {
        if (enc == owner) continue;
        ClassicalMessage msg{enc, std::nullopt, MsgKind::HPositions, owner,
                             {},  {},           {}};
        const auto it = ctx.participants_[enc].h_applied.find(owner);
        if (it != ctx.participants_[enc].h_applied.end())
          for (int l = 0; l < n_photons; ++l)
            if (it->second[l]) msg.positions.push_back(l);
        channel.send_classical(msg);
      }
    }

    const BitString target = adversary ? adversary->target_key() : BitString{};
    std::vector<BitString> honest_finals;
    for (PartyId p = 0; p < n_parties; ++p) {
      Participant& part = ctx.participants_[p];
      if (adversary && adversary->manipulates() && contains(controlled, p)) {
        outcome.final_keys.push_back(target);
        continue;
      }
      // Undo the announced H layer (it composes to H^parity), then measure in
      // the preparation basis; a flipped outcome means the key bits XOR to 1.
      part.measured_bits.assign(n_photons, 0);
      for (int l = 0; l < n_photons; ++l) {
        int parity = 0;
        for (PartyId enc = 0; enc < n_parties; ++enc) {
          if (enc == p) continue;
          const auto it = ctx.participants_[enc].h_applied.find(p);
          if (it != ctx.participants_[enc].h_applied.end())
            parity ^= it->second[l];
        }
        const RegHandle reg = part.own_photons[l];
        if (parity) ctx.arena_.apply(reg, 0, Gate::H);
        const int bit =
            ctx.arena_.measure(reg, 0, part.prep[l].basis, ctx.measure_rng_);
        part.measured_bits[l] = bit != part.prep[l].bit ? 1 : 0;
      }
      BitString final_key = xor_bits(part.key, part.measured_bits);
      honest_finals.push_back(final_key);
      outcome.final_keys.push_back(std::move(final_key));
    }
    finalize_adversary_metrics(outcome, adversary, ctx.metrics_, honest_finals,
                               target);
  } else {
    finalize_adversary_metrics(outcome, adversary, ctx.metrics_, {}, {});
  }

  outcome.transcript = channel.take_transcript();
  return outcome;
}

}  // namespace qka
