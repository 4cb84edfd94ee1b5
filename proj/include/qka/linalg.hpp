#pragma once

#include <complex>
#include <vector>

#include "qka/qcore.hpp"

namespace qka {

// Dense square complex matrix, just big enough for the 4x4 Gram work and the
// 16x16 measurement operators this project needs.
class CMatrix {
 public:
  CMatrix() : n_(0) {}
  explicit CMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n) {}

  static CMatrix identity(int n);
  // |v><w|
  static CMatrix outer(const std::vector<cx>& v, const std::vector<cx>& w);

  int size() const { return n_; }
  cx& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  const cx& at(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * n_ + j];
  }

  CMatrix adjoint() const;
  cx trace() const;
  std::vector<cx> apply(const std::vector<cx>& v) const;

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(cx s);
  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, cx s) { return a *= s; }
  friend CMatrix operator*(cx s, CMatrix a) { return a *= s; }
  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);

  double max_abs_deviation_from(const CMatrix& o) const;
  bool is_hermitian(double tol = kTol) const;

 private:
  int n_;
  std::vector<cx> a_;
};

// Eigenvalues of a Hermitian matrix, ascending. Cyclic complex Jacobi
// rotations; plenty for the small dense matrices used here.
std::vector<double> hermitian_eigenvalues(const CMatrix& m);

double min_eigenvalue(const CMatrix& hermitian);

// Largest |eigenvalue| of a Hermitian matrix (its operator norm).
double operator_norm(const CMatrix& hermitian);

// Gauss-Jordan inverse with partial pivoting. Throws std::runtime_error on a
// (numerically) singular matrix.
CMatrix inverse(const CMatrix& m);

// <v| M |v> for Hermitian M; the imaginary part is discarded.
double expectation(const CMatrix& m, const std::vector<cx>& v);

}  // namespace qka
