#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qka/qcore.hpp"
#include "qka/rng.hpp"

namespace qka {

using PartyId = int;

// Registers live in one arena per run so that a gate applied to a circulating
// qubit acts on the shared entangled state, not on a copy. Protocol logic
// must never branch on register amplitudes; they are read only by the
// measurement routines and by tests.
using RegHandle = int;

class QuantumArena {
 public:
  RegHandle alloc(StateVector state);
  int size() const { return static_cast<int>(regs_.size()); }
  int qubit_count(RegHandle h) const { return reg(h).qubit_count(); }

  void apply(RegHandle h, int qubit, Gate g);
  // Collapsing projective measurement of one qubit.
  int measure(RegHandle h, int qubit, Basis basis, RandomSource& rng);

  const StateVector& state(RegHandle h) const { return reg(h); }
  void replace(RegHandle h, StateVector state);

 private:
  const StateVector& reg(RegHandle h) const;
  std::vector<StateVector> regs_;
};

enum class PhotonRole { Payload, Decoy };

struct Photon {
  RegHandle reg = -1;
  int qubit = 0;
  PhotonRole role = PhotonRole::Payload;
};

struct PhotonSequence {
  std::vector<Photon> photons;
  PartyId origin = -1;  // ring owner whose circulation this is
  int round = 0;        // hop counter, set by the sender
};

enum class MsgKind {
  Ack,
  DecoyPositions,
  DecoyBases,
  DecoyResults,
  HPositions,
  InvalidPositions,
};

const char* msg_kind_name(MsgKind kind);

// Ideal authenticated classical message: delivered verbatim, readable by
// everyone (broadcast when `receiver` is empty), never forged.
struct ClassicalMessage {
  PartyId sender = -1;
  std::optional<PartyId> receiver;
  MsgKind kind = MsgKind::Ack;
  PartyId ring = -1;  // which owner's circulation the message concerns
  std::vector<int> positions;
  std::vector<Basis> bases;
  std::vector<int> bits;
};

struct TranscriptEvent {
  enum class Type { Quantum, Classical };
  Type type = Type::Quantum;
  // Quantum send metadata (never amplitudes).
  PartyId from = -1;
  PartyId to = -1;
  PartyId delivered_to = -1;
  int photon_count = 0;
  PartyId seq_origin = -1;
  bool substituted = false;  // adversary replaced or rerouted the sequence
  // Classical payload.
  std::optional<ClassicalMessage> message;
};

using Transcript = std::vector<TranscriptEvent>;

struct QuantumDelivery {
  PartyId to = -1;
  PhotonSequence seq;
};

// Interceptor invoked on each quantum send. May substitute photons or change
// the destination; an absent hook means faithful in-order delivery.
using QuantumHook =
    std::function<QuantumDelivery(PartyId from, PartyId to, PhotonSequence)>;

class RingChannel {
 public:
  explicit RingChannel(int parties);

  int parties() const { return parties_; }
  PartyId successor(PartyId p) const { return (p + 1) % parties_; }

  void set_hook(QuantumHook hook) { hook_ = std::move(hook); }

  // Returns where the sequence actually ended up and what arrived there.
  QuantumDelivery send_quantum(PartyId from, PartyId to, PhotonSequence seq);
  void send_classical(ClassicalMessage msg);

  const Transcript& transcript() const { return transcript_; }
  Transcript take_transcript() { return std::move(transcript_); }

 private:
  int parties_;
  QuantumHook hook_;
  Transcript transcript_;
};

}  // namespace qka
