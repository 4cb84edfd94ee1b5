#include "qka/qcore.hpp"

#include <cmath>

#include "doctest.h"

using namespace qka;

namespace {

StateVector random_state(int qubits, RandomSource& rng) {
  std::vector<cx> amps(std::size_t{1} << qubits);
  double norm = 0.0;
  for (cx& a : amps) {
    a = cx{rng.uniform() - 0.5, rng.uniform() - 0.5};
    norm += std::norm(a);
  }
  for (cx& a : amps) a /= std::sqrt(norm);
  return StateVector(qubits, std::move(amps));
}

Mat2 mat_mul(const Mat2& a, const Mat2& b) {
  return Mat2{a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
              a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

}  // namespace

TEST_CASE("gate matrices match their definitions") {
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(gate_matrix(Gate::I) == Mat2{cx{1, 0}, cx{0, 0}, cx{0, 0}, cx{1, 0}});
  CHECK(gate_matrix(Gate::SZ) == Mat2{cx{1, 0}, cx{0, 0}, cx{0, 0}, cx{-1, 0}});
  CHECK(gate_matrix(Gate::SX) == Mat2{cx{0, 0}, cx{1, 0}, cx{1, 0}, cx{0, 0}});
  CHECK(gate_matrix(Gate::ISY) ==
        Mat2{cx{0, 0}, cx{1, 0}, cx{-1, 0}, cx{0, 0}});
  const Mat2& h = gate_matrix(Gate::H);
  for (int i = 0; i < 4; ++i) {
    const double expect = i == 3 ? -s : s;
    CHECK(std::abs(h[i] - cx{expect, 0}) < kTol);
  }
}

TEST_CASE("all five gates are unitary") {
  for (Gate g : {Gate::I, Gate::SZ, Gate::SX, Gate::ISY, Gate::H}) {
    const Mat2& m = gate_matrix(g);
    const Mat2 adj{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]),
                   std::conj(m[3])};
    const Mat2 prod = mat_mul(adj, m);
    CHECK(std::abs(prod[0] - cx{1, 0}) < kTol);
    CHECK(std::abs(prod[1]) < kTol);
    CHECK(std::abs(prod[2]) < kTol);
    CHECK(std::abs(prod[3] - cx{1, 0}) < kTol);
  }
}

TEST_CASE("apply_gate basics") {
  // ISY sends |1> to |0>.
  const StateVector r = apply_gate(StateVector::ket1(), Gate::ISY, 0);
  CHECK(std::abs(r.amp(0) - cx{1, 0}) < kTol);
  CHECK(std::abs(r.amp(1)) < kTol);

  // H sends |0> to |+>.
  const StateVector p = apply_gate(StateVector::ket0(), Gate::H, 0);
  CHECK(fidelity_up_to_phase(p, StateVector::ket_plus()) ==
        doctest::Approx(1.0).epsilon(kTol));
  CHECK(std::abs(p.amp(0) - p.amp(1)) < kTol);

  // Identity leaves anything alone.
  RandomSource rng(11);
  for (int i = 0; i < 10; ++i) {
    const StateVector s = random_state(3, rng);
    const int q = static_cast<int>(rng.below(3));
    const StateVector t = apply_gate(s, Gate::I, q);
    for (std::size_t k = 0; k < s.dim(); ++k)
      CHECK(std::abs(t.amp(k) - s.amp(k)) < kTol);
  }

  CHECK_THROWS_AS(apply_gate(StateVector::ket0(), Gate::SX, 1),
                  std::out_of_range);
  CHECK_THROWS_AS(apply_gate(StateVector::ket0(), Gate::SX, -1),
                  std::out_of_range);
}

TEST_CASE("apply_gate preserves norm on random states") {
  RandomSource rng(42);
  const Gate gates[5] = {Gate::I, Gate::SZ, Gate::SX, Gate::ISY, Gate::H};
  for (int i = 0; i < 1000; ++i) {
    const int qubits = 1 + static_cast<int>(rng.below(4));
    const StateVector s = random_state(qubits, rng);
    const Gate g = gates[rng.below(5)];
    const int q = static_cast<int>(rng.below(qubits));
    CHECK(apply_gate(s, g, q).is_normalized());
  }
}

TEST_CASE("H twice is the identity") {
  RandomSource rng(7);
  for (int i = 0; i < 50; ++i) {
    const int qubits = 1 + static_cast<int>(rng.below(3));
    const StateVector s = random_state(qubits, rng);
    const int q = static_cast<int>(rng.below(qubits));
    const StateVector t = apply_gate(apply_gate(s, Gate::H, q), Gate::H, q);
    for (std::size_t k = 0; k < s.dim(); ++k)
      CHECK(std::abs(t.amp(k) - s.amp(k)) < kTol);
  }
}

TEST_CASE("H conjugates ISY to minus itself") {
  const Mat2& h = gate_matrix(Gate::H);
  const Mat2 hih = mat_mul(mat_mul(h, gate_matrix(Gate::ISY)), h);
  const Mat2& isy = gate_matrix(Gate::ISY);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(hih[i] + isy[i]) < kTol);

  // State-level: both orderings agree up to a global phase.
  RandomSource rng(3);
  for (int i = 0; i < 20; ++i) {
    const StateVector s = random_state(1, rng);
    const StateVector lhs = apply_gate(
        apply_gate(apply_gate(s, Gate::H, 0), Gate::ISY, 0), Gate::H, 0);
    const StateVector rhs = apply_gate(s, Gate::ISY, 0);
    CHECK(fidelity_up_to_phase(lhs, rhs) == doctest::Approx(1.0).epsilon(kTol));
  }
}

TEST_CASE("tensor composes amplitudes") {
  const StateVector s01 = tensor(StateVector::ket0(), StateVector::ket1());
  CHECK(s01.qubit_count() == 2);
  CHECK(std::abs(s01.amp(0b01) - cx{1, 0}) < kTol);

  const StateVector pp = tensor(StateVector::ket_plus(), StateVector::ket_plus());
  for (int i = 0; i < 4; ++i) CHECK(std::abs(pp.amp(i) - cx{0.5, 0}) < kTol);

  RandomSource rng(5);
  const StateVector big = tensor(random_state(4, rng), StateVector::ket0());
  CHECK(big.qubit_count() == 5);
  CHECK(big.is_normalized());
}

TEST_CASE("measuring an eigenstate is deterministic and non-destructive") {
  RandomSource rng(1);
  const auto [xbit, xpost] = measure_qubit(StateVector::ket_plus(), 0, Basis::X, rng);
  CHECK(xbit == 0);
  CHECK(fidelity_up_to_phase(xpost, StateVector::ket_plus()) ==
        doctest::Approx(1.0).epsilon(kTol));

  const StateVector s01 = tensor(StateVector::ket0(), StateVector::ket1());
  const auto [zbit, zpost] = measure_qubit(s01, 1, Basis::Z, rng);
  CHECK(zbit == 1);
  CHECK(fidelity_up_to_phase(zpost, s01) == doctest::Approx(1.0).epsilon(kTol));

  CHECK_THROWS_AS(measure_qubit(s01, 2, Basis::Z, rng), std::out_of_range);
}

TEST_CASE("measurement frequencies follow the Born rule") {
  RandomSource rng(2024);

  // |+> in Z: half and half.
  int ones = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i)
    ones += measure_qubit(StateVector::ket_plus(), 0, Basis::Z, rng).bit;
  const double sigma_half = std::sqrt(0.25 / trials);
  CHECK(std::abs(ones / static_cast<double>(trials) - 0.5) <= 3 * sigma_half);

  // 20 random states, one qubit each run.
  for (int s = 0; s < 20; ++s) {
    const int qubits = 1 + static_cast<int>(rng.below(3));
    const StateVector state = random_state(qubits, rng);
    const int q = static_cast<int>(rng.below(qubits));
    double p1 = 0.0;
    const std::size_t stride = std::size_t{1} << (qubits - 1 - q);
    for (std::size_t k = 0; k < state.dim(); ++k)
      if (k & stride) p1 += std::norm(state.amp(k));
    int hits = 0;
    const int reps = 10000;
    for (int i = 0; i < reps; ++i)
      hits += measure_qubit(state, q, Basis::Z, rng).bit;
    const double sigma = std::sqrt(std::max(p1 * (1 - p1), 1e-12) / reps);
    CHECK(std::abs(hits / static_cast<double>(reps) - p1) <= 3 * sigma + 1e-6);
  }
}

TEST_CASE("inner product is conjugate-linear in the first argument") {
  CHECK(std::abs(inner_product(StateVector::ket0(), StateVector::ket0()) -
                 cx{1, 0}) < kTol);
  CHECK(std::abs(inner_product(StateVector::ket0(), StateVector::ket1())) <
        kTol);

  const StateVector i0(1, {cx{0, 1}, cx{0, 0}});  // i|0>
  CHECK(std::abs(inner_product(i0, StateVector::ket0()) - cx{0, -1}) < kTol);
  CHECK(std::abs(inner_product(StateVector::ket0(), i0) - cx{0, 1}) < kTol);

  CHECK_THROWS_AS(
      inner_product(StateVector::ket0(),
                    tensor(StateVector::ket0(), StateVector::ket0())),
      std::invalid_argument);
}

TEST_CASE("fidelity_up_to_phase ignores global phase only") {
  const StateVector minus1(1, {cx{0, 0}, cx{-1, 0}});
  CHECK(fidelity_up_to_phase(StateVector::ket1(), minus1) ==
        doctest::Approx(1.0).epsilon(kTol));
  CHECK(fidelity_up_to_phase(StateVector::ket0(), StateVector::ket1()) ==
        doctest::Approx(0.0).epsilon(kTol));
  CHECK(fidelity_up_to_phase(StateVector::ket_plus(), StateVector::ket0()) ==
        doctest::Approx(0.5).epsilon(kTol));
}

TEST_CASE("random source is deterministic per seed and splits streams") {
  RandomSource a(99), b(99), c(100);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t va = a.raw(), vb = b.raw(), vc = c.raw();
    all_equal = all_equal && va == vb;
    any_diff = any_diff || va != vc;
  }
  CHECK(all_equal);
  CHECK(any_diff);

  RandomSource root(7);
  RandomSource c1 = root.child(1), c2 = root.child(2), c1b = root.child(1);
  CHECK(c1.raw() != c2.raw());
  RandomSource c1c = RandomSource(7).child(1);
  CHECK(c1b.raw() == c1c.raw());
}
