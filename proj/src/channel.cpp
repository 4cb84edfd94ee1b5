#include "qka/channel.hpp"

#include <stdexcept>

namespace qka {

RegHandle QuantumArena::alloc(StateVector state) {
  regs_.push_back(std::move(state));
  return static_cast<RegHandle>(regs_.size() - 1);
}

const StateVector& QuantumArena::reg(RegHandle h) const {
  if (h < 0 || h >= size()) throw std::out_of_range("bad register handle");
  return regs_[h];
}

void QuantumArena::apply(RegHandle h, int qubit, Gate g) {
  regs_.at(h) = apply_gate(reg(h), g, qubit);
}

int QuantumArena::measure(RegHandle h, int qubit, Basis basis,
                          RandomSource& rng) {
  MeasureResult r = measure_qubit(reg(h), qubit, basis, rng);
  regs_.at(h) = std::move(r.state);
  return r.bit;
}

void QuantumArena::replace(RegHandle h, StateVector state) {
  if (h < 0 || h >= size()) throw std::out_of_range("bad register handle");
  regs_[h] = std::move(state);
}

const char* msg_kind_name(MsgKind kind) {
  switch (kind) {
    case MsgKind::Ack:
      return "ack";
    case MsgKind::DecoyPositions:
      return "decoy_positions";
    case MsgKind::DecoyBases:
      return "decoy_bases";
    case MsgKind::DecoyResults:
      return "decoy_results";
    case MsgKind::HPositions:
      return "h_positions";
    case MsgKind::InvalidPositions:
      return "invalid_positions";
  }
  return "?";
}

RingChannel::RingChannel(int parties) : parties_(parties) {
  if (parties < 2) throw std::invalid_argument("ring needs at least 2 parties");
}

QuantumDelivery RingChannel::send_quantum(PartyId from, PartyId to,
                                          PhotonSequence seq) {
  if (from == to) throw std::invalid_argument("quantum send to self");
  TranscriptEvent ev;
  ev.type = TranscriptEvent::Type::Quantum;
  ev.from = from;
  ev.to = to;
  ev.photon_count = static_cast<int>(seq.photons.size());
  ev.seq_origin = seq.origin;

  QuantumDelivery delivery{to, std::move(seq)};
  if (hook_) {
    const std::vector<Photon> before = delivery.seq.photons;
    delivery = hook_(from, to, std::move(delivery.seq));
    ev.substituted = delivery.to != to ||
                     delivery.seq.photons.size() != before.size() ||
                     [&] {
                       for (std::size_t i = 0; i < before.size(); ++i)
                         if (before[i].reg != delivery.seq.photons[i].reg ||
                             before[i].qubit != delivery.seq.photons[i].qubit)
                           return true;
                       return false;
                     }();
  }
  ev.delivered_to = delivery.to;
  transcript_.push_back(ev);
  return delivery;
}

void RingChannel::send_classical(ClassicalMessage msg) {
  TranscriptEvent ev;
  ev.type = TranscriptEvent::Type::Classical;
  ev.from = msg.sender;
  ev.to = msg.receiver.value_or(-1);
  ev.message = std::move(msg);
  transcript_.push_back(std::move(ev));
}

}  // namespace qka
