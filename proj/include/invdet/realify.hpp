#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "invdet/errors.hpp"
#include "invdet/matrix.hpp"

namespace invdet {

struct RealMatrix {
  int n = 0;
  std::vector<double> entries;  // row-major n x n

  explicit RealMatrix(int order)
      : n(order), entries(static_cast<std::size_t>(order) * order, 0.0) {
    if (order < 1) throw DomainViolation("matrix order must be >= 1");
  }

  double& operator()(int r, int c) {
    return entries[static_cast<std::size_t>(r) * n + c];
  }
  double operator()(int r, int c) const {
    return entries[static_cast<std::size_t>(r) * n + c];
  }
};

inline RealMatrix operator*(const RealMatrix& a, const RealMatrix& b) {
  if (a.n != b.n) throw DomainViolation("matrix orders do not match");
  RealMatrix out(a.n);
  for (int r = 0; r < a.n; ++r)
    for (int c = 0; c < a.n; ++c) {
      double s = 0.0;
      for (int j = 0; j < a.n; ++j) s += a(r, j) * b(j, c);
      out(r, c) = s;
    }
  return out;
}

inline double trace(const RealMatrix& m) {
  double s = 0.0;
  for (int r = 0; r < m.n; ++r) s += m(r, r);
  return s;
}

// Doubling embedding of a complex matrix into a real one:
//   psi(A1 + i A2) = [ A1  -A2 ]
//                    [ A2   A1 ]
// An algebra morphism, and det(psi(A)) = |det(A)|^2.
inline RealMatrix psi(const ComplexMatrix& a) {
  const int k = a.order();
  RealMatrix out(2 * k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) {
      const double re = a(r, c).real();
      const double im = a(r, c).imag();
      out(r, c) = re;
      out(r, c + k) = -im;
      out(r + k, c) = im;
      out(r + k, c + k) = re;
    }
  return out;
}

// Real determinant via LU with partial pivoting; mirrors lu_det.
inline double real_det(const RealMatrix& m) {
  const int n = m.n;
  std::vector<double> u = m.entries;
  auto at = [&](int r, int c) -> double& {
    return u[static_cast<std::size_t>(r) * n + c];
  };
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::fabs(at(col, col));
    for (int r = col + 1; r < n; ++r) {
      const double v = std::fabs(at(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best < kPivotFloor) return 0.0;
    if (piv != col) {
      for (int c = col; c < n; ++c) std::swap(at(col, c), at(piv, c));
      det = -det;
    }
    const double p = at(col, col);
    det *= p;
    for (int r = col + 1; r < n; ++r) {
      const double f = at(r, col) / p;
      for (int c = col + 1; c < n; ++c) at(r, c) -= f * at(col, c);
    }
  }
  return det;
}

}  // namespace invdet
