#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "qka/protocol.hpp"

namespace qka {

// Colluding insiders: an antipodal pair {i, i + N/2} for even N, or a triple
// {i, i + (N-1)/2, i + (N+1)/2} for odd N (the adjacent pair acting as one
// midpoint party). target_key is the key the colluders want everyone to end
// up with.
struct CollusionPlan {
  std::vector<PartyId> colluders;
  BitString target_key;

  static CollusionPlan make(int parties, PartyId anchor, BitString target_key);
  // Throws std::invalid_argument unless the colluder set matches the
  // antipodal pattern for some anchor.
  void validate(int parties) const;
};

// The insider attack: colluders pass every decoy check faithfully, but any
// colluder holding a sequence owned by a fellow colluder hands it back to its
// owner instead of only forwarding it. The owner measures its own registers
// mid-circulation, learns the key material accumulated so far, and re-injects
// a fresh sequence carrying the same encoding so the ring never notices. Once
// one colluder-owned circulation has closed, the colluders know the XOR of
// all private keys and substitute correction values on every honest ring to
// steer every honest party's final key to the chosen target.
class CollusionAdversary : public Adversary {
 public:
  CollusionAdversary(int parties, CollusionPlan plan, ProtocolFlow flow);

  std::vector<PartyId> controlled() const override { return plan_.colluders; }
  BitString target_key() const override { return plan_.target_key; }
  bool manipulates() const override { return true; }

  void begin_run(RunContext& ctx) override;
  // Colluders release the rings they own first; insiders can always stall
  // their own forwards, so this reordering needs no extra power.
  std::vector<PartyId> ring_order(int parties) const override;
  QuantumDelivery on_quantum_send(RunContext& ctx, PartyId from, PartyId to,
                                  PhotonSequence seq) override;
  std::vector<Nibble> encode_nibbles(RunContext& ctx, PartyId encoder,
                                     PartyId ring_owner,
                                     std::vector<Nibble> honest) override;
  BitString encode_bits(RunContext& ctx, PartyId encoder, PartyId ring_owner,
                        BitString honest) override;
  std::vector<int> invalid_positions(RunContext& ctx, PartyId ring_owner,
                                     std::vector<int> honest) override;
  void on_ring_complete(RunContext& ctx, PartyId ring_owner) override;

 private:
  bool is_colluder(PartyId p) const;
  // The last colluder on `ring_owner`'s path encodes the correction value.
  PartyId designated_corrector(PartyId ring_owner) const;

  QuantumDelivery intercept_original(RunContext& ctx, PartyId to,
                                     PhotonSequence seq);
  QuantumDelivery intercept_improved(RunContext& ctx, PartyId to,
                                     PhotonSequence seq);

  int parties_;
  CollusionPlan plan_;
  ProtocolFlow flow_;

  // Per-run working state.
  std::vector<std::optional<int>> k_all_estimate_;  // nibbles or bits
  std::map<PartyId, std::vector<bool>> chain_intact_;
  std::set<int> unresolved_positions_;
};

// Outside eavesdropper: measures each transiting photon with the given
// probability in a uniformly random basis and forwards the collapsed state.
// Decoys and payload look alike to her.
class InterceptResendEve : public Adversary {
 public:
  explicit InterceptResendEve(double fraction);

  QuantumDelivery on_quantum_send(RunContext& ctx, PartyId from, PartyId to,
                                  PhotonSequence seq) override;

 private:
  double fraction_;
};

}  // namespace qka
