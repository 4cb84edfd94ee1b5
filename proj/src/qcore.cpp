#include "qka/qcore.hpp"

#include <cmath>
#include <stdexcept>

namespace qka {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

const Mat2 kGateI{cx{1, 0}, cx{0, 0}, cx{0, 0}, cx{1, 0}};
const Mat2 kGateSZ{cx{1, 0}, cx{0, 0}, cx{0, 0}, cx{-1, 0}};
const Mat2 kGateSX{cx{0, 0}, cx{1, 0}, cx{1, 0}, cx{0, 0}};
const Mat2 kGateISY{cx{0, 0}, cx{1, 0}, cx{-1, 0}, cx{0, 0}};
const Mat2 kGateH{cx{kInvSqrt2, 0}, cx{kInvSqrt2, 0}, cx{kInvSqrt2, 0},
                  cx{-kInvSqrt2, 0}};

}  // namespace

const Mat2& gate_matrix(Gate g) {
  switch (g) {
    case Gate::I:
      return kGateI;
    case Gate::SZ:
      return kGateSZ;
    case Gate::SX:
      return kGateSX;
    case Gate::ISY:
      return kGateISY;
    case Gate::H:
      return kGateH;
  }
  throw std::invalid_argument("unknown gate");
}

const char* gate_name(Gate g) {
  switch (g) {
    case Gate::I:
      return "I";
    case Gate::SZ:
      return "SZ";
    case Gate::SX:
      return "SX";
    case Gate::ISY:
      return "ISY";
    case Gate::H:
      return "H";
  }
  return "?";
}

StateVector::StateVector(int qubit_count, std::vector<cx> amplitudes)
    : qubit_count_(qubit_count), amps_(std::move(amplitudes)) {
  if (qubit_count_ < 1) throw std::invalid_argument("qubit_count must be >= 1");
  if (amps_.size() != (std::size_t{1} << qubit_count_))
    throw std::invalid_argument("amplitude count must be 2^qubit_count");
}

StateVector StateVector::basis_state(int qubit_count, std::size_t index) {
  std::vector<cx> amps(std::size_t{1} << qubit_count, cx{0, 0});
  amps.at(index) = cx{1, 0};
  return StateVector(qubit_count, std::move(amps));
}

StateVector StateVector::ket_plus() {
  return StateVector(1, {cx{kInvSqrt2, 0}, cx{kInvSqrt2, 0}});
}

StateVector StateVector::ket_minus() {
  return StateVector(1, {cx{kInvSqrt2, 0}, cx{-kInvSqrt2, 0}});
}

double StateVector::norm_sq() const {
  double s = 0.0;
  for (const cx& a : amps_) s += std::norm(a);
  return s;
}

bool StateVector::is_normalized(double tol) const {
  return std::abs(norm_sq() - 1.0) <= tol;
}

StateVector apply_matrix(const StateVector& state, const Mat2& m, int qubit) {
  const int n = state.qubit_count();
  if (qubit < 0 || qubit >= n) throw std::out_of_range("qubit index");
  // Qubit 0 is the leftmost ket label, i.e. the most significant bit.
  const std::size_t stride = std::size_t{1} << (n - 1 - qubit);
  std::vector<cx> out(state.amps());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i & stride) continue;  // visit each (|0>,|1>) pair once
    const cx a0 = state.amp(i);
    const cx a1 = state.amp(i | stride);
    out[i] = m[0] * a0 + m[1] * a1;
    out[i | stride] = m[2] * a0 + m[3] * a1;
  }
  return StateVector(n, std::move(out));
}

StateVector apply_gate(const StateVector& state, Gate gate, int qubit) {
  return apply_matrix(state, gate_matrix(gate), qubit);
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  std::vector<cx> amps;
  amps.reserve(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j) amps.push_back(a.amp(i) * b.amp(j));
  return StateVector(a.qubit_count() + b.qubit_count(), std::move(amps));
}

MeasureResult measure_qubit(const StateVector& state, int qubit, Basis basis,
                            RandomSource& rng) {
  const int n = state.qubit_count();
  if (qubit < 0 || qubit >= n) throw std::out_of_range("qubit index");

  // X-basis measurement = rotate |+>,|-> onto |0>,|1>, measure, rotate back.
  StateVector work =
      basis == Basis::X ? apply_gate(state, Gate::H, qubit) : state;

  const std::size_t stride = std::size_t{1} << (n - 1 - qubit);
  double p1 = 0.0;
  for (std::size_t i = 0; i < work.dim(); ++i)
    if (i & stride) p1 += std::norm(work.amp(i));

  const int outcome = rng.uniform() < p1 ? 1 : 0;
  const double keep = outcome ? p1 : 1.0 - p1;

  std::vector<cx> amps(work.amps());
  const double scale = keep > 0.0 ? 1.0 / std::sqrt(keep) : 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const bool is_one = (i & stride) != 0;
    if (is_one == (outcome == 1))
      amps[i] *= scale;
    else
      amps[i] = cx{0, 0};
  }
  StateVector post(n, std::move(amps));
  if (basis == Basis::X) post = apply_gate(post, Gate::H, qubit);
  return {outcome, std::move(post)};
}

cx inner_product(const StateVector& a, const StateVector& b) {
  if (a.qubit_count() != b.qubit_count())
    throw std::invalid_argument("inner_product: dimension mismatch");
  cx s{0, 0};
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a.amp(i)) * b.amp(i);
  return s;
}

double fidelity_up_to_phase(const StateVector& a, const StateVector& b) {
  return std::norm(inner_product(a, b));
}

}  // namespace qka
