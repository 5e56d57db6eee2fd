#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "invdet/errors.hpp"

namespace invdet {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Absolute floor below which a pivot counts as zero. Matrices inside the
// proximity gate keep pivots near 1, so this only guards raw inputs against
// division blowup.
inline constexpr double kPivotFloor = 1e-300;

// Dense square complex matrix, row-major. Orders stay small throughout
// (series work tops out around k = 8, contour quadrature around k = 6), so
// there is no sparse or blocked storage.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(int order)
      : k_(checked_order(order)), e_(static_cast<std::size_t>(k_) * k_) {}

  ComplexMatrix(int order, std::vector<Complex> entries)
      : k_(checked_order(order)), e_(std::move(entries)) {
    if (e_.size() != static_cast<std::size_t>(k_) * k_)
      throw DomainViolation("entry count does not match matrix order");
    for (const Complex& z : e_)
      if (!is_finite(z)) throw DomainViolation("matrix entries must be finite");
  }

  static ComplexMatrix identity(int order) {
    ComplexMatrix m(order);
    for (int r = 0; r < order; ++r) m(r, r) = Complex{1.0, 0.0};
    return m;
  }

  int order() const { return k_; }
  Complex& operator()(int r, int c) { return e_[idx(r, c)]; }
  const Complex& operator()(int r, int c) const { return e_[idx(r, c)]; }
  std::span<const Complex> entries() const { return e_; }

  friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a.k_ == b.k_ && a.e_ == b.e_;
  }

 private:
  static int checked_order(int k) {
    if (k < 1) throw DomainViolation("matrix order must be >= 1");
    return k;
  }
  std::size_t idx(int r, int c) const {
    return static_cast<std::size_t>(r) * k_ + c;
  }

  int k_;
  std::vector<Complex> e_;
};

inline void require_same_order(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.order() != b.order())
    throw DomainViolation("matrix orders do not match");
}

inline ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_order(a, b);
  ComplexMatrix out(a.order());
  for (int r = 0; r < a.order(); ++r)
    for (int c = 0; c < a.order(); ++c) out(r, c) = a(r, c) + b(r, c);
  return out;
}

inline ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_order(a, b);
  ComplexMatrix out(a.order());
  for (int r = 0; r < a.order(); ++r)
    for (int c = 0; c < a.order(); ++c) out(r, c) = a(r, c) - b(r, c);
  return out;
}

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_order(a, b);
  const int k = a.order();
  ComplexMatrix out(k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) {
      Complex s{0.0, 0.0};
      for (int j = 0; j < k; ++j) s += a(r, j) * b(j, c);
      out(r, c) = s;
    }
  return out;
}

inline ComplexMatrix operator*(Complex s, const ComplexMatrix& a) {
  ComplexMatrix out(a.order());
  for (int r = 0; r < a.order(); ++r)
    for (int c = 0; c < a.order(); ++c) out(r, c) = s * a(r, c);
  return out;
}

// w = a * z, written into out. No allocation; used in quadrature loops.
inline void apply(const ComplexMatrix& a, std::span<const Complex> z,
                  std::span<Complex> out) {
  const int k = a.order();
  for (int r = 0; r < k; ++r) {
    Complex s{0.0, 0.0};
    for (int c = 0; c < k; ++c) s += a(r, c) * z[c];
    out[r] = s;
  }
}

inline Complex trace(const ComplexMatrix& a) {
  Complex s{0.0, 0.0};
  for (int r = 0; r < a.order(); ++r) s += a(r, r);
  return s;
}

inline double frobenius_norm(const ComplexMatrix& m) {
  double s = 0.0;
  for (const Complex& z : m.entries()) s += std::norm(z);
  return std::sqrt(s);
}

// Proximity of a to the identity, measured in Frobenius norm against the
// threshold 1/k. Strict containment is what the contour representation
// needs; the closed ball suffices for the series. Gating is advisory:
// callers decide whether to reject.
struct GateStatus {
  double norm_of_deviation = 0.0;
  double threshold = 0.0;
  bool inside_strict = false;
  bool inside_closed = false;
};

inline GateStatus gate(const ComplexMatrix& a) {
  const int k = a.order();
  GateStatus g;
  g.threshold = 1.0 / k;
  g.norm_of_deviation = frobenius_norm(a - ComplexMatrix::identity(k));
  g.inside_strict = g.norm_of_deviation < g.threshold;
  g.inside_closed = g.norm_of_deviation <= g.threshold;
  return g;
}

// Determinant via LU factorization with partial pivoting on the modulus.
// Sign bookkeeping for row swaps is exact. Returns 0 when every candidate
// pivot in some column sits below the pivot floor.
inline Complex lu_det(const ComplexMatrix& a) {
  const int k = a.order();
  std::vector<Complex> u(a.entries().begin(), a.entries().end());
  auto at = [&](int r, int c) -> Complex& {
    return u[static_cast<std::size_t>(r) * k + c];
  };
  double sign = 1.0;
  Complex det{1.0, 0.0};
  for (int col = 0; col < k; ++col) {
    int piv = col;
    double best = std::abs(at(col, col));
    for (int r = col + 1; r < k; ++r) {
      const double v = std::abs(at(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best < kPivotFloor) return Complex{0.0, 0.0};
    if (piv != col) {
      for (int c = col; c < k; ++c) std::swap(at(col, c), at(piv, c));
      sign = -sign;
    }
    const Complex p = at(col, col);
    det *= p;
    for (int r = col + 1; r < k; ++r) {
      const Complex f = at(r, col) / p;
      for (int c = col + 1; c < k; ++c) at(r, c) -= f * at(col, c);
    }
  }
  return sign * det;
}

// One Gaussian-elimination step against the leading entry: returns the pivot
// a_{1,1} and the (k-1) x (k-1) matrix b with
//   b_{r,l} = a_{r,l} - (a_{r,1}/a_{1,1}) a_{1,l}.
// Then pivot * det(b) = det(a), and if ||a - I_k|| < 1/k the reduced matrix
// satisfies ||b - I_{k-1}|| <= 1/(k-1).
struct SchurStep {
  Complex pivot;
  ComplexMatrix reduced;
};

inline SchurStep schur_reduce_step(const ComplexMatrix& a) {
  const int k = a.order();
  if (k < 2)
    throw DomainViolation("schur_reduce_step needs order >= 2");
  const Complex pivot = a(0, 0);
  if (std::abs(pivot) < kPivotFloor)
    throw PivotZero("leading entry below pivot floor");
  ComplexMatrix b(k - 1);
  for (int r = 1; r < k; ++r) {
    const Complex f = a(r, 0) / pivot;
    for (int c = 1; c < k; ++c) b(r - 1, c - 1) = a(r, c) - f * a(0, c);
  }
  return SchurStep{pivot, std::move(b)};
}

}  // namespace invdet
