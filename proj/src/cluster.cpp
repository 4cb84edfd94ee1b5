#include "qka/cluster.hpp"

#include <cmath>
#include <stdexcept>

namespace qka {

namespace {

// The sixteen cluster states: four basis terms each, coefficients (a,b,c,d)
// in order, signs exactly as defined. Basis index packs the ket bits with
// qubit label 1 as the most significant bit.
constexpr std::array<std::array<ClusterTerm, 4>, kClusterStateCount> kStates{{
    {{{0b0000, +1}, {0b0011, +1}, {0b1100, +1}, {0b1111, -1}}},  // 1
    {{{0b0000, +1}, {0b0011, -1}, {0b1100, +1}, {0b1111, +1}}},  // 2
    {{{0b0000, +1}, {0b0011, +1}, {0b1100, -1}, {0b1111, +1}}},  // 3
    {{{0b0000, +1}, {0b0011, -1}, {0b1100, -1}, {0b1111, -1}}},  // 4
    {{{0b0001, +1}, {0b0010, +1}, {0b1101, -1}, {0b1110, +1}}},  // 5
    {{{0b0001, +1}, {0b0010, -1}, {0b1101, -1}, {0b1110, -1}}},  // 6
    {{{0b0001, +1}, {0b0010, +1}, {0b1101, +1}, {0b1110, -1}}},  // 7
    {{{0b0001, +1}, {0b0010, -1}, {0b1101, +1}, {0b1110, +1}}},  // 8
    {{{0b0100, +1}, {0b0111, -1}, {0b1000, +1}, {0b1011, +1}}},  // 9
    {{{0b0100, +1}, {0b0111, +1}, {0b1000, +1}, {0b1011, -1}}},  // 10
    {{{0b0100, +1}, {0b0111, -1}, {0b1000, -1}, {0b1011, -1}}},  // 11
    {{{0b0100, +1}, {0b0111, +1}, {0b1000, -1}, {0b1011, +1}}},  // 12
    {{{0b0101, +1}, {0b0110, -1}, {0b1001, -1}, {0b1010, -1}}},  // 13
    {{{0b0101, +1}, {0b0110, +1}, {0b1001, -1}, {0b1010, +1}}},  // 14
    {{{0b0101, +1}, {0b0110, -1}, {0b1001, +1}, {0b1010, +1}}},  // 15
    {{{0b0101, +1}, {0b0110, +1}, {0b1001, +1}, {0b1010, -1}}},  // 16
}};

// Key encoding rule, indexed by nibble value.
constexpr std::array<OpPair, 16> kEncodingRule{{
    {Gate::I, Gate::I},      // 0000
    {Gate::I, Gate::SZ},     // 0001
    {Gate::SZ, Gate::I},     // 0010
    {Gate::SZ, Gate::SZ},    // 0011
    {Gate::SZ, Gate::SX},    // 0100
    {Gate::SZ, Gate::ISY},   // 0101
    {Gate::I, Gate::SX},     // 0110
    {Gate::I, Gate::ISY},    // 0111
    {Gate::SX, Gate::SZ},    // 1000
    {Gate::SX, Gate::I},     // 1001
    {Gate::ISY, Gate::SZ},   // 1010
    {Gate::ISY, Gate::I},    // 1011
    {Gate::ISY, Gate::ISY},  // 1100
    {Gate::ISY, Gate::SX},   // 1101
    {Gate::SX, Gate::ISY},   // 1110
    {Gate::SX, Gate::SX},    // 1111
}};

void check_id(int id) {
  if (id < 1 || id > kClusterStateCount)
    throw std::out_of_range("cluster state id must be in 1..16");
}

}  // namespace

int family_of(int id) {
  check_id(id);
  return (id - 1) / 4 + 1;
}

ClusterParams ClusterParams::skewed() {
  return {0.6, 0.5, 0.4, std::sqrt(0.23)};
}

void ClusterParams::validate() const {
  for (double v : coeffs()) {
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument(
          "cluster params must be finite and non-negative");
  }
  const double norm = a * a + b * b + c * c + d * d;
  if (std::abs(norm - 1.0) > kTol)
    throw std::invalid_argument("cluster params must satisfy a^2+b^2+c^2+d^2=1");
}

const std::array<ClusterTerm, 4>& cluster_terms(int id) {
  check_id(id);
  return kStates[id - 1];
}

StateVector make_cluster_state(const ClusterParams& params, int id) {
  params.validate();
  const auto coeff = params.coeffs();
  std::vector<cx> amps(16, cx{0, 0});
  const auto& terms = cluster_terms(id);
  for (int k = 0; k < 4; ++k)
    amps[terms[k].basis_index] = cx{terms[k].sign * coeff[k], 0};
  return StateVector(4, std::move(amps));
}

OpPair nibble_to_oppair(Nibble nibble) {
  if (nibble > 15) throw std::out_of_range("nibble must be in 0..15");
  return kEncodingRule[nibble];
}

Nibble oppair_to_nibble(const OpPair& pair) {
  for (Nibble n = 0; n < 16; ++n)
    if (kEncodingRule[n] == pair) return n;
  throw std::invalid_argument("operation pair not in the encoding rule");
}

StateVector encode_nibble(const StateVector& state, Nibble nibble) {
  if (state.qubit_count() != 4)
    throw std::invalid_argument("encode_nibble expects a 4-qubit state");
  const OpPair ops = nibble_to_oppair(nibble);
  StateVector out = apply_gate(state, ops.op2, 1);  // label-2 qubit
  return apply_gate(out, ops.op4, 3);               // label-4 qubit
}

TransitionTable::TransitionTable(const ClusterParams& params)
    : params_(params) {
  params_.validate();
  std::vector<StateVector> states;
  states.reserve(kClusterStateCount);
  for (int id = 1; id <= kClusterStateCount; ++id)
    states.push_back(make_cluster_state(params_, id));

  for (int from = 1; from <= kClusterStateCount; ++from) {
    for (Nibble n = 0; n < 16; ++n) {
      const StateVector encoded = encode_nibble(states[from - 1], n);
      int match = 0;
      cx match_phase{0, 0};
      for (int to = 1; to <= kClusterStateCount; ++to) {
        const cx overlap = inner_product(states[to - 1], encoded);
        if (std::abs(std::abs(overlap) - 1.0) <= kTol) {
          match = to;
          match_phase = overlap;
          break;
        }
      }
      if (match == 0)
        throw std::logic_error(
            "transition table: encoded state matched no cluster state");
      to_[from - 1][n] = match;
      phase_[from - 1][n] = match_phase;
      decode_[from][match] = n;
    }
    // Bijectivity check: all 16 targets distinct for this source.
    std::array<bool, kClusterStateCount + 1> seen{};
    for (Nibble n = 0; n < 16; ++n) {
      if (seen[to_[from - 1][n]])
        throw std::logic_error("transition table: nibble->target not bijective");
      seen[to_[from - 1][n]] = true;
    }
  }
}

int TransitionTable::target(int from, Nibble nibble) const {
  check_id(from);
  return to_[from - 1][nibble & 0xF];
}

cx TransitionTable::phase(int from, Nibble nibble) const {
  check_id(from);
  return phase_[from - 1][nibble & 0xF];
}

Nibble TransitionTable::decode(int from, int to) const {
  check_id(from);
  check_id(to);
  return decode_[from][to];
}

std::vector<Transition> TransitionTable::entries() const {
  std::vector<Transition> out;
  out.reserve(256);
  for (int from = 1; from <= kClusterStateCount; ++from)
    for (int n = 0; n < 16; ++n)
      out.push_back(Transition{from, static_cast<Nibble>(n),
                               to_[from - 1][n], phase_[from - 1][n]});
  return out;
}

}  // namespace qka
