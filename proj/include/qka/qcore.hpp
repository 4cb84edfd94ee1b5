#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qka/rng.hpp"

namespace qka {

using cx = std::complex<double>;

// Exact-math tolerance used everywhere for state and operator comparisons.
inline constexpr double kTol = 1e-9;

// Single-qubit gates. ISY is the real matrix i*sigma_y = |0><1| - |1><0|.
enum class Gate { I, SZ, SX, ISY, H };

using Mat2 = std::array<cx, 4>;  // row-major 2x2

const Mat2& gate_matrix(Gate g);
const char* gate_name(Gate g);

enum class Basis { Z, X };

// Pure state of `qubit_count` qubits as 2^n complex amplitudes.
//
// Bit convention: qubit 0 is the leftmost label in ket notation, so for a
// 4-qubit basis ket |q1 q2 q3 q4> the amplitude index is
// q1*8 + q2*4 + q3*2 + q4. Docs use the 1-based labels 1..4 to match that
// notation; every API below is 0-based (label k = index k-1).
class StateVector {
 public:
  StateVector(int qubit_count, std::vector<cx> amplitudes);

  // |index> in the computational basis.
  static StateVector basis_state(int qubit_count, std::size_t index);
  static StateVector ket0() { return basis_state(1, 0); }
  static StateVector ket1() { return basis_state(1, 1); }
  static StateVector ket_plus();
  static StateVector ket_minus();

  int qubit_count() const { return qubit_count_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<cx>& amps() const { return amps_; }
  cx amp(std::size_t i) const { return amps_[i]; }

  double norm_sq() const;
  bool is_normalized(double tol = kTol) const;

 private:
  int qubit_count_;
  std::vector<cx> amps_;
};

// Applies a single-qubit gate to the indexed qubit (0-based). Norm preserved.
StateVector apply_gate(const StateVector& state, Gate gate, int qubit);
StateVector apply_matrix(const StateVector& state, const Mat2& m, int qubit);

// Kronecker composition: |a> (x) |b>, a's qubits first.
StateVector tensor(const StateVector& a, const StateVector& b);

struct MeasureResult {
  int bit;            // Z: 0=|0>,1=|1>; X: 0=|+>,1=|->
  StateVector state;  // normalized post-measurement state
};

// Projective measurement of one qubit, outcome sampled from Born
// probabilities.
MeasureResult measure_qubit(const StateVector& state, int qubit, Basis basis,
                            RandomSource& rng);

// <a|b>, conjugate-linear in the first argument.
cx inner_product(const StateVector& a, const StateVector& b);

// |<a|b>|^2: equals 1 within tolerance iff the states match up to a global
// phase.
double fidelity_up_to_phase(const StateVector& a, const StateVector& b);

}  // namespace qka
