#include "qka/channel.hpp"

#include "doctest.h"

using namespace qka;

TEST_CASE("arena applies gates and collapses on measurement") {
  QuantumArena arena;
  RandomSource rng(4);
  const RegHandle h = arena.alloc(StateVector::ket0());
  arena.apply(h, 0, Gate::H);
  const int bit = arena.measure(h, 0, Basis::X, rng);
  CHECK(bit == 0);  // H|0> is the +1 eigenstate of X
  // Collapse: repeated measurement repeats the outcome.
  for (int i = 0; i < 5; ++i) CHECK(arena.measure(h, 0, Basis::X, rng) == 0);
  CHECK_THROWS_AS(arena.apply(99, 0, Gate::I), std::out_of_range);
}

TEST_CASE("hookless channel delivers sequences unchanged, one event per send") {
  QuantumArena arena;
  RingChannel channel(4);
  PhotonSequence seq;
  seq.origin = 0;
  for (int i = 0; i < 3; ++i)
    seq.photons.push_back({arena.alloc(StateVector::ket1()), 0,
                           i == 1 ? PhotonRole::Decoy : PhotonRole::Payload});
  const std::vector<Photon> sent = seq.photons;

  const QuantumDelivery d = channel.send_quantum(0, 1, std::move(seq));
  CHECK(d.to == 1);
  REQUIRE(d.seq.photons.size() == sent.size());
  for (std::size_t i = 0; i < sent.size(); ++i) {
    CHECK(d.seq.photons[i].reg == sent[i].reg);
    CHECK(d.seq.photons[i].qubit == sent[i].qubit);
  }
  REQUIRE(channel.transcript().size() == 1);
  const TranscriptEvent& ev = channel.transcript().front();
  CHECK(ev.type == TranscriptEvent::Type::Quantum);
  CHECK(ev.from == 0);
  CHECK(ev.to == 1);
  CHECK(ev.delivered_to == 1);
  CHECK(ev.photon_count == 3);
  CHECK_FALSE(ev.substituted);

  CHECK_THROWS_AS(channel.send_quantum(2, 2, PhotonSequence{}),
                  std::invalid_argument);
}

TEST_CASE("hooks can substitute photons and reroute, and the transcript says so") {
  QuantumArena arena;
  RingChannel channel(4);
  const RegHandle fresh = arena.alloc(StateVector::ket0());
  channel.set_hook([&](PartyId, PartyId, PhotonSequence seq) {
    seq.photons[0].reg = fresh;
    return QuantumDelivery{3, std::move(seq)};
  });

  PhotonSequence seq;
  seq.origin = 1;
  seq.photons.push_back({arena.alloc(StateVector::ket1()), 0,
                         PhotonRole::Payload});
  const QuantumDelivery d = channel.send_quantum(1, 2, std::move(seq));
  CHECK(d.to == 3);
  CHECK(d.seq.photons[0].reg == fresh);
  CHECK(channel.transcript().front().substituted);
  CHECK(channel.transcript().front().delivered_to == 3);
}

TEST_CASE("classical messages are recorded verbatim and in order") {
  RingChannel channel(3);
  channel.send_classical({0, 1, MsgKind::Ack, 2, {}, {}, {}});
  channel.send_classical(
      {1, std::nullopt, MsgKind::HPositions, 0, {3, 5}, {}, {}});
  channel.send_classical(
      {2, 0, MsgKind::DecoyResults, 1, {}, {}, {1, 0, 1}});

  const Transcript& t = channel.transcript();
  REQUIRE(t.size() == 3);
  CHECK(t[0].message->kind == MsgKind::Ack);
  CHECK(t[1].message->kind == MsgKind::HPositions);
  CHECK_FALSE(t[1].message->receiver.has_value());  // broadcast
  CHECK(t[1].message->positions == std::vector<int>{3, 5});
  CHECK(t[2].message->bits == std::vector<int>{1, 0, 1});
}
