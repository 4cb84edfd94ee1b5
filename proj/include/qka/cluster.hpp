#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qka/qcore.hpp"

namespace qka {

// 4-bit key group encoded per cluster state; bit 3 (MSB) is the leftmost bit
// of the written key string.
using Nibble = std::uint8_t;

// Cluster state ids are 1-based (1..16), matching the ket subscripts used in
// the docs. Ids 1-4, 5-8, 9-12, 13-16 share a basis support each; those four
// support classes are the measurement "families" 1..4.
inline constexpr int kClusterStateCount = 16;

int family_of(int id);  // 1..4

// Amplitudes (a, b, c, d) of the 4-qubit cluster states. All four must be
// positive for the unambiguous measurement to exist; validate() checks
// normalization only, the measurement layer rejects degenerate coefficients.
struct ClusterParams {
  double a = 0.5, b = 0.5, c = 0.5, d = 0.5;

  static ClusterParams uniform() { return {0.5, 0.5, 0.5, 0.5}; }
  // One genuinely non-maximal preset: (0.6, 0.5, 0.4, sqrt(0.23)).
  static ClusterParams skewed();

  std::array<double, 4> coeffs() const { return {a, b, c, d}; }
  void validate() const;  // throws std::invalid_argument
  bool operator==(const ClusterParams&) const = default;
};

struct ClusterTerm {
  int basis_index;  // q1*8 + q2*4 + q3*2 + q4
  int sign;         // +1 or -1
};

// The four computational-basis terms of cluster state `id`, in (a,b,c,d)
// coefficient order.
const std::array<ClusterTerm, 4>& cluster_terms(int id);

StateVector make_cluster_state(const ClusterParams& params, int id);

// Pair of single-qubit operations applied to qubits with labels 2 and 4
// (internal indices 1 and 3). Only {I, SZ, SX, ISY} appear.
struct OpPair {
  Gate op2;
  Gate op4;
  bool operator==(const OpPair&) const = default;
};

OpPair nibble_to_oppair(Nibble nibble);
Nibble oppair_to_nibble(const OpPair& pair);

// Applies the encoding rule for `nibble` to a 4-qubit state: op2 on label-2
// qubit, op4 on label-4 qubit.
StateVector encode_nibble(const StateVector& state, Nibble nibble);

struct Transition {
  int from;
  Nibble nibble;
  int to;
  cx phase;  // unit modulus; encode(|psi_from>, nibble) == phase * |psi_to>
};

// All 256 (from, nibble) -> (to, phase) transitions, derived numerically from
// the state definitions rather than transcribed. For each fixed `from` the
// map nibble -> to is a bijection, which makes decode() well defined.
class TransitionTable {
 public:
  explicit TransitionTable(const ClusterParams& params);

  int target(int from, Nibble nibble) const;
  cx phase(int from, Nibble nibble) const;
  // The unique nibble sending `from` to `to`. If several nibbles were
  // encoded in sequence this returns their XOR.
  Nibble decode(int from, int to) const;

  std::vector<Transition> entries() const;
  const ClusterParams& params() const { return params_; }

 private:
  ClusterParams params_;
  std::array<std::array<int, 16>, kClusterStateCount> to_{};
  std::array<std::array<cx, 16>, kClusterStateCount> phase_{};
  std::array<std::array<Nibble, kClusterStateCount + 1>, kClusterStateCount + 1>
      decode_{};
};

}  // namespace qka
