#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qka/channel.hpp"
#include "qka/cluster.hpp"
#include "qka/povm.hpp"
#include "qka/qcore.hpp"
#include "qka/rng.hpp"

namespace qka {

using BitString = std::vector<std::uint8_t>;

BitString random_bits(int length, RandomSource& rng);
BitString xor_bits(const BitString& a, const BitString& b);
std::string bits_to_hex(const BitString& bits);
// Parses `length` bits from a hex string of exactly ceil(length/4) digits;
// trailing pad bits must be zero. Throws std::invalid_argument.
BitString hex_to_bits(const std::string& hex, int length);

Nibble nibble_at(const BitString& bits, int index);
void set_nibble(BitString& bits, int index, Nibble value);

struct ProtocolConfig {
  int parties = 4;       // N >= 3
  int clusters = 8;      // n: cluster states per owner; private key = 4n bits
  int photons = 32;      // L: single photons per owner; private key = L bits
  int decoys_per_hop = 16;
  double error_threshold = 0.0;  // any higher decoy mismatch rate aborts
  ClusterParams params = ClusterParams::uniform();
  bool h_shield = true;  // the per-photon random H of the single-photon flow
  std::uint64_t seed = 0;
  // Diagnostics: pin every party's private key instead of drawing them.
  // Empty means random; otherwise one key per party of the right length.
  std::vector<BitString> fixed_private_keys;

  void validate() const;  // throws std::invalid_argument
};

struct PrepRecord {
  Basis basis = Basis::Z;
  int bit = 0;
};

struct DecoyRecord {
  int position = 0;  // index in the padded sequence
  Basis basis = Basis::Z;
  int bit = 0;  // prepared eigenstate
};

struct DecoyLedgerEntry {
  std::vector<DecoyRecord> decoys;
};

// Inserts `count` fresh decoy photons, each uniformly one of the four
// single-photon states, at uniformly chosen positions of the padded sequence.
std::pair<PhotonSequence, DecoyLedgerEntry> insert_decoys(
    QuantumArena& arena, PhotonSequence seq, int count, RandomSource& rng);

// Mismatch fraction between the sender's prepared decoys and the receiver's
// announced results; 0 for an empty decoy set.
double check_decoys(const DecoyLedgerEntry& ledger,
                    const std::vector<int>& results);

enum class PartyPhase { Idle, Circulating, Done };

// Per-party private state. The private key never enters a classical message,
// and retained register qubits never transit the channel.
struct Participant {
  PartyId id = -1;
  BitString key;

  // Original flow: the ring registers this party prepared; qubit labels 1 and
  // 3 stay home while 2 and 4 circulate.
  std::vector<RegHandle> own_regs;
  // Single-photon flow: what was prepared, photon by photon.
  std::vector<PrepRecord> prep;
  std::vector<RegHandle> own_photons;

  // H choices this party made while encoding, keyed by ring owner.
  std::map<PartyId, std::vector<std::uint8_t>> h_applied;
  // Decoy ledgers for hops this party padded, in send order.
  std::vector<DecoyLedgerEntry> sent_decoys;

  // Outcome of measuring this party's own circulation.
  std::vector<std::optional<Nibble>> measured_nibbles;  // original
  BitString measured_bits;                              // improved

  PartyPhase phase = PartyPhase::Idle;
};

struct DetectionEvent {
  PartyId ring_owner = -1;
  int hop = -1;  // 0-based hop index within that ring
  double error_rate = 0.0;
};

struct AdversaryMetrics {
  bool active = false;
  bool detected = false;
  bool manipulation_success = false;
  int extraction_bits = 0;
  int extraction_correct = 0;
  BitString target_key;

  double extraction_accuracy() const {
    return extraction_bits > 0
               ? static_cast<double>(extraction_correct) / extraction_bits
               : std::numeric_limits<double>::quiet_NaN();
  }
};

enum class ProtocolFlow { Original, Improved };

struct RunOutcome {
  ProtocolFlow flow = ProtocolFlow::Original;
  bool aborted = false;
  std::optional<DetectionEvent> abort_event;
  std::vector<DetectionEvent> detections;  // every hop check with mismatches

  // Final keys, one per party, restricted to the surviving positions. On
  // abort all keys are empty.
  std::vector<BitString> final_keys;
  std::vector<int> discarded_positions;  // original: dropped cluster indices
  std::vector<BitString> private_keys;   // ground truth, for metrics and tests

  AdversaryMetrics adversary;
  Transcript transcript;

  bool keys_agree() const;
  BitString expected_xor_key() const;  // XOR of private keys on survivors
};

class RunContext;

// Adversarial behavior plugs into the run through this interface. Controlled
// parties are insiders whose private state the adversary legitimately owns;
// everything else must go through the channel hook and physical operations.
class Adversary {
 public:
  virtual ~Adversary() = default;

  virtual std::vector<PartyId> controlled() const { return {}; }
  virtual BitString target_key() const { return {}; }
  virtual bool manipulates() const { return false; }

  virtual void begin_run(RunContext&) {}
  // Order in which circulations are driven; insiders may delay their forwards,
  // which in a lossless sequential simulation is a reordering.
  virtual std::vector<PartyId> ring_order(int parties) const;
  virtual QuantumDelivery on_quantum_send(RunContext&, PartyId from,
                                          PartyId to, PhotonSequence seq);
  virtual std::vector<Nibble> encode_nibbles(RunContext&, PartyId encoder,
                                             PartyId ring_owner,
                                             std::vector<Nibble> honest);
  virtual BitString encode_bits(RunContext&, PartyId encoder,
                                PartyId ring_owner, BitString honest);
  virtual std::vector<int> invalid_positions(RunContext&, PartyId ring_owner,
                                             std::vector<int> honest);
  virtual void on_ring_complete(RunContext&, PartyId /*ring_owner*/) {}
};

// The window a run opens to its adversary: physical quantum operations, the
// public parameters, and the private state of controlled parties only.
class RunContext {
 public:
  RunContext(const ProtocolConfig& config, Adversary* adversary);

  const ProtocolConfig& config() const { return config_; }
  QuantumArena& arena() { return arena_; }
  const Discriminator& discriminator() const { return *discriminator_; }
  const TransitionTable& transitions() const { return *transitions_; }
  RandomSource& adversary_rng() { return adversary_rng_; }

  Participant& controlled_party(PartyId id);

  // Registers extraction guesses for the metrics report. `values` holds the
  // adversary's estimates of the key XOR accumulated so far on `ring_owner`'s
  // circulation; unknown positions are skipped. Ground truth stays on the
  // protocol side.
  void record_extraction_guesses(PartyId ring_owner,
                                 const std::vector<std::optional<int>>& values,
                                 int bits_per_value);

 private:
  friend RunOutcome run_original(const ProtocolConfig&, Adversary*);
  friend RunOutcome run_improved(const ProtocolConfig&, Adversary*);

  const ProtocolConfig config_;
  Adversary* adversary_;
  QuantumArena arena_;
  std::unique_ptr<Discriminator> discriminator_;
  std::unique_ptr<TransitionTable> transitions_;

  RandomSource key_rng_, decoy_rng_, measure_rng_, shield_rng_, adversary_rng_;

  std::vector<Participant> participants_;
  // Actual key material XORed onto each circulation so far (per position),
  // maintained for extraction ground truth.
  std::vector<std::vector<int>> cumulative_xor_;
  AdversaryMetrics metrics_;
};

// Full choreography of the cluster-state protocol: each owner's pair of
// sequences circulates the ring with decoy checks at every hop, everyone
// encodes a nibble per cluster, and the owner finishes with the unambiguous
// measurement. Returns per-party keys equal to the XOR of all private keys on
// conclusive positions when nobody interferes.
RunOutcome run_original(const ProtocolConfig& config,
                        Adversary* adversary = nullptr);

// Single-photon variant: keys encoded bit-by-bit with ISY, shielded by a
// random per-photon H that is only announced after every transmission check
// has passed.
RunOutcome run_improved(const ProtocolConfig& config,
                        Adversary* adversary = nullptr);

}  // namespace qka
