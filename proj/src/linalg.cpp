#include "qka/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qka {

CMatrix CMatrix::identity(int n) {
  CMatrix m(n);
  for (int i = 0; i < n; ++i) m.at(i, i) = cx{1, 0};
  return m;
}

CMatrix CMatrix::outer(const std::vector<cx>& v, const std::vector<cx>& w) {
  if (v.size() != w.size()) throw std::invalid_argument("outer: size mismatch");
  CMatrix m(static_cast<int>(v.size()));
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) m.at(i, j) = v[i] * std::conj(w[j]);
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix m(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m.at(i, j) = std::conj(at(j, i));
  return m;
}

cx CMatrix::trace() const {
  cx s{0, 0};
  for (int i = 0; i < n_; ++i) s += at(i, i);
  return s;
}

std::vector<cx> CMatrix::apply(const std::vector<cx>& v) const {
  if (static_cast<int>(v.size()) != n_)
    throw std::invalid_argument("apply: size mismatch");
  std::vector<cx> out(v.size(), cx{0, 0});
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out[i] += at(i, j) * v[j];
  return out;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(cx s) {
  for (cx& v : a_) v *= s;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.size() != b.size()) throw std::invalid_argument("mul: size mismatch");
  CMatrix out(a.size());
  for (int i = 0; i < a.size(); ++i)
    for (int k = 0; k < a.size(); ++k) {
      const cx aik = a.at(i, k);
      if (aik == cx{0, 0}) continue;
      for (int j = 0; j < a.size(); ++j) out.at(i, j) += aik * b.at(k, j);
    }
  return out;
}

double CMatrix::max_abs_deviation_from(const CMatrix& o) const {
  double d = 0.0;
  for (std::size_t i = 0; i < a_.size(); ++i)
    d = std::max(d, std::abs(a_[i] - o.a_[i]));
  return d;
}

bool CMatrix::is_hermitian(double tol) const {
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j <= i; ++j)
      if (std::abs(at(i, j) - std::conj(at(j, i))) > tol) return false;
  return true;
}

std::vector<double> hermitian_eigenvalues(const CMatrix& m) {
  const int n = m.size();
  CMatrix a = m;
  // Symmetrize away roundoff so the sweep sees an exactly Hermitian input.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a.at(i, j) = (a.at(i, j) + std::conj(a.at(j, i))) * 0.5;

  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += std::norm(a.at(p, q));
    if (off < 1e-26) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cx apq = a.at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        // Unitary 2x2 rotation annihilating a[p][q]: first strip the phase of
        // the off-diagonal element, then a standard real Jacobi rotation.
        const double app = a.at(p, p).real();
        const double aqq = a.at(q, q).real();
        const double absapq = std::abs(apq);
        const cx phase = apq / absapq;
        const double theta = (aqq - app) / (2.0 * absapq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // Columns/rows p,q update with u = [c, s*conj(phase); -s*phase, c].
        for (int k = 0; k < n; ++k) {
          const cx akp = a.at(k, p);
          const cx akq = a.at(k, q);
          a.at(k, p) = c * akp - s * std::conj(phase) * akq;
          a.at(k, q) = s * phase * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const cx apk = a.at(p, k);
          const cx aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * phase * aqk;
          a.at(q, k) = s * std::conj(phase) * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> evs(n);
  for (int i = 0; i < n; ++i) evs[i] = a.at(i, i).real();
  std::sort(evs.begin(), evs.end());
  return evs;
}

double min_eigenvalue(const CMatrix& hermitian) {
  return hermitian_eigenvalues(hermitian).front();
}

double operator_norm(const CMatrix& hermitian) {
  const std::vector<double> evs = hermitian_eigenvalues(hermitian);
  return std::max(std::abs(evs.front()), std::abs(evs.back()));
}

CMatrix inverse(const CMatrix& m) {
  const int n = m.size();
  CMatrix a = m;
  CMatrix inv = CMatrix::identity(n);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a.at(r, col)) > std::abs(a.at(pivot, col))) pivot = r;
    if (std::abs(a.at(pivot, col)) < 1e-12)
      throw std::runtime_error("inverse: singular matrix");
    if (pivot != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(a.at(pivot, j), a.at(col, j));
        std::swap(inv.at(pivot, j), inv.at(col, j));
      }
    }
    const cx d = a.at(col, col);
    for (int j = 0; j < n; ++j) {
      a.at(col, j) /= d;
      inv.at(col, j) /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const cx f = a.at(r, col);
      if (f == cx{0, 0}) continue;
      for (int j = 0; j < n; ++j) {
        a.at(r, j) -= f * a.at(col, j);
        inv.at(r, j) -= f * inv.at(col, j);
      }
    }
  }
  return inv;
}

double expectation(const CMatrix& m, const std::vector<cx>& v) {
  const std::vector<cx> mv = m.apply(v);
  cx s{0, 0};
  for (std::size_t i = 0; i < v.size(); ++i) s += std::conj(v[i]) * mv[i];
  return s.real();
}

}  // namespace qka
