#include "qka/linalg.hpp"

#include <cmath>

#include "doctest.h"

using namespace qka;

namespace {

CMatrix random_hermitian(int n, RandomSource& rng) {
  CMatrix m(n);
  for (int i = 0; i < n; ++i) {
    m.at(i, i) = cx{rng.uniform() * 2 - 1, 0};
    for (int j = i + 1; j < n; ++j) {
      const cx v{rng.uniform() * 2 - 1, rng.uniform() * 2 - 1};
      m.at(i, j) = v;
      m.at(j, i) = std::conj(v);
    }
  }
  return m;
}

}  // namespace

TEST_CASE("hermitian eigenvalues of a known matrix") {
  // Pauli X has eigenvalues -1, +1.
  CMatrix x(2);
  x.at(0, 1) = cx{1, 0};
  x.at(1, 0) = cx{1, 0};
  const auto evs = hermitian_eigenvalues(x);
  CHECK(evs[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(evs[1] == doctest::Approx(1.0).epsilon(1e-12));

  // Complex entries: Pauli Y.
  CMatrix y(2);
  y.at(0, 1) = cx{0, -1};
  y.at(1, 0) = cx{0, 1};
  const auto evy = hermitian_eigenvalues(y);
  CHECK(evy[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(evy[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigenvalue sums match the trace and eigenvalues are real") {
  RandomSource rng(17);
  for (int n : {2, 4, 8, 16}) {
    const CMatrix m = random_hermitian(n, rng);
    const auto evs = hermitian_eigenvalues(m);
    double sum = 0.0;
    for (double e : evs) sum += e;
    CHECK(sum == doctest::Approx(m.trace().real()).epsilon(1e-9));
    // Sum of squares matches tr(M^2) as a second moment check.
    double sq = 0.0;
    for (double e : evs) sq += e * e;
    CHECK(sq == doctest::Approx((m * m).trace().real()).epsilon(1e-9));
  }
}

TEST_CASE("outer products are rank-one projectors when normalized") {
  const std::vector<cx> v{cx{0.6, 0}, cx{0, 0.8}};
  const CMatrix p = CMatrix::outer(v, v);
  CHECK(p.is_hermitian());
  const auto evs = hermitian_eigenvalues(p);
  CHECK(evs[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(evs[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("inverse round-trips") {
  RandomSource rng(23);
  for (int n : {2, 4}) {
    CMatrix m(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m.at(i, j) = cx{rng.uniform() * 2 - 1, rng.uniform() * 2 - 1};
    for (int i = 0; i < n; ++i) m.at(i, i) += cx{3, 0};  // keep well-conditioned
    const CMatrix inv = inverse(m);
    CHECK((m * inv).max_abs_deviation_from(CMatrix::identity(n)) < 1e-9);
    CHECK((inv * m).max_abs_deviation_from(CMatrix::identity(n)) < 1e-9);
  }

  CMatrix singular(2);
  singular.at(0, 0) = cx{1, 0};
  singular.at(0, 1) = cx{1, 0};
  singular.at(1, 0) = cx{1, 0};
  singular.at(1, 1) = cx{1, 0};
  CHECK_THROWS_AS(inverse(singular), std::runtime_error);
}

TEST_CASE("expectation of a projector is the squared overlap") {
  const std::vector<cx> e0{cx{1, 0}, cx{0, 0}};
  const CMatrix p = CMatrix::outer(e0, e0);
  const std::vector<cx> v{cx{0.6, 0}, cx{0.8, 0}};
  CHECK(expectation(p, v) == doctest::Approx(0.36).epsilon(1e-12));
}
