#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "invdet/errors.hpp"
#include "invdet/matrix.hpp"

namespace invdet {

inline double log_factorial(int n) { return std::lgamma(n + 1.0); }

namespace detail {

// Binomial coefficient, exact in 64 bits. Returns false when the value (or a
// guarded intermediate) does not fit.
inline bool binomial_u64(int n, int r, std::uint64_t& out) {
  if (r < 0 || r > n) {
    out = 0;
    return true;
  }
  r = std::min(r, n - r);
  unsigned __int128 acc = 1;
  for (int i = 1; i <= r; ++i) {
    acc = acc * static_cast<unsigned>(n - r + i);
    acc /= static_cast<unsigned>(i);  // exact: prefix products are binomials
    if (acc > UINT64_MAX) return false;
  }
  out = static_cast<std::uint64_t>(acc);
  return true;
}

// total! / (parts_1! ... parts_m!) as a product of binomials of the partial
// sums. Exact or reports overflow.
inline bool multinomial_u64(std::span<const int> parts, std::uint64_t& out) {
  std::uint64_t acc = 1;
  int cum = 0;
  for (int p : parts) {
    cum += p;
    std::uint64_t b = 0;
    if (!binomial_u64(cum, p, b)) return false;
    if (__builtin_mul_overflow(acc, b, &acc)) return false;
  }
  out = acc;
  return true;
}

inline double log_multinomial(std::span<const int> parts) {
  int total = 0;
  double lg = 0.0;
  for (int p : parts) {
    total += p;
    lg -= log_factorial(p);
  }
  return lg + log_factorial(total);
}

}  // namespace detail

// A vector of non-negative integer exponents (j_1, ..., j_k).
class MultiIndex {
 public:
  MultiIndex() = default;

  explicit MultiIndex(std::vector<int> components)
      : c_(std::move(components)) {
    for (int v : c_)
      if (v < 0) throw DomainViolation("multi-index components must be >= 0");
  }

  explicit MultiIndex(std::span<const int> components)
      : MultiIndex(std::vector<int>(components.begin(), components.end())) {}

  static MultiIndex zeros(int k) { return MultiIndex(std::vector<int>(k, 0)); }

  int size() const { return static_cast<int>(c_.size()); }
  int operator[](int i) const { return c_[i]; }
  std::span<const int> components() const { return c_; }

  int total() const { return std::accumulate(c_.begin(), c_.end(), 0); }

  // Product of component factorials. Exact through the 64-bit integer path
  // for total <= 20, log-gamma beyond.
  double factorial() const {
    if (total() <= 20) {
      std::uint64_t f = 1;
      for (int v : c_)
        for (int i = 2; i <= v; ++i) f *= static_cast<std::uint64_t>(i);
      return static_cast<double>(f);
    }
    return std::exp(log_factorial());
  }

  double log_factorial() const {
    double s = 0.0;
    for (int v : c_) s += invdet::log_factorial(v);
    return s;
  }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) = default;

 private:
  std::vector<int> c_;
};

// A k x k array of non-negative integer exponents with its row-sum and
// column-sum vectors. Balanced means the two margin vectors coincide; exactly
// those matrices index the nonzero Taylor coefficients of 1/det(I + M).
class MultiIndexMatrix {
 public:
  MultiIndexMatrix(int order, std::vector<int> entries)
      : k_(order), e_(std::move(entries)) {
    if (k_ < 1) throw DomainViolation("multi-index matrix order must be >= 1");
    if (e_.size() != static_cast<std::size_t>(k_) * k_)
      throw DomainViolation("entry count does not match order");
    for (int v : e_)
      if (v < 0) throw DomainViolation("multi-index entries must be >= 0");
    std::vector<int> rs(k_, 0), cs(k_, 0);
    for (int r = 0; r < k_; ++r)
      for (int c = 0; c < k_; ++c) {
        rs[r] += at(r, c);
        cs[c] += at(r, c);
      }
    row_sums_ = MultiIndex(std::move(rs));
    col_sums_ = MultiIndex(std::move(cs));
  }

  static MultiIndexMatrix zeros(int order) {
    return MultiIndexMatrix(order, std::vector<int>(
                                       static_cast<std::size_t>(order) * order, 0));
  }

  int order() const { return k_; }
  int operator()(int r, int c) const { return at(r, c); }
  std::span<const int> entries() const { return e_; }
  std::span<const int> row(int r) const {
    return std::span<const int>(e_).subspan(static_cast<std::size_t>(r) * k_, k_);
  }

  const MultiIndex& row_sums() const { return row_sums_; }
  const MultiIndex& col_sums() const { return col_sums_; }
  int total() const { return row_sums_.total(); }
  bool balanced() const { return row_sums_ == col_sums_; }

  // alpha! = product of entry factorials.
  double entry_factorial() const { return MultiIndex(entries()).factorial(); }

  friend bool operator==(const MultiIndexMatrix& a,
                         const MultiIndexMatrix& b) {
    return a.k_ == b.k_ && a.e_ == b.e_;
  }

 private:
  int at(int r, int c) const { return e_[static_cast<std::size_t>(r) * k_ + c]; }

  int k_;
  std::vector<int> e_;
  MultiIndex row_sums_;
  MultiIndex col_sums_;
};

// Visits every length-k vector of non-negative integers summing to total,
// leading component descending: (t,0,...,0) first, (0,...,0,t) last. The
// visitor receives a reused buffer.
template <typename F>
void for_each_weak_composition(int total, int k, F&& f) {
  if (k < 1) throw DomainViolation("composition length must be >= 1");
  if (total < 0) throw DomainViolation("composition total must be >= 0");
  std::vector<int> buf(static_cast<std::size_t>(k), 0);
  auto rec = [&](auto&& self, int pos, int rem) -> void {
    if (pos == k - 1) {
      buf[pos] = rem;
      f(std::span<const int>(buf));
      return;
    }
    for (int v = rem; v >= 0; --v) {
      buf[pos] = v;
      self(self, pos + 1, rem - v);
    }
  };
  rec(rec, 0, total);
}

inline std::vector<MultiIndex> weak_compositions(int total, int k) {
  std::vector<MultiIndex> out;
  for_each_weak_composition(total, k,
                            [&](std::span<const int> j) { out.emplace_back(j); });
  return out;
}

namespace detail {

// Row-by-row backtracking over k x k non-negative matrices whose row-sum and
// column-sum vectors both equal margins. A row placement is rejected as soon
// as a running column sum would exceed its target; the last row is forced.
template <typename F>
class BalancedEnumerator {
 public:
  BalancedEnumerator(std::span<const int> margins, F& f)
      : k_(static_cast<int>(margins.size())),
        margins_(margins.begin(), margins.end()),
        colrem_(margins.begin(), margins.end()),
        entries_(static_cast<std::size_t>(k_) * k_, 0),
        f_(f) {}

  void run() {
    if (k_ < 1) throw DomainViolation("margins must have length >= 1");
    for (int m : margins_)
      if (m < 0) throw DomainViolation("margins must be >= 0");
    place_row(0);
  }

 private:
  void place_row(int r) {
    if (r == k_ - 1) {
      // Remaining column budgets sum to the last row margin by construction.
      for (int c = 0; c < k_; ++c)
        entries_[static_cast<std::size_t>(r) * k_ + c] = colrem_[c];
      f_(std::span<const int>(entries_));
      return;
    }
    place_entry(r, 0, margins_[r]);
  }

  void place_entry(int r, int c, int rem) {
    int* cell = &entries_[static_cast<std::size_t>(r) * k_ + c];
    if (c == k_ - 1) {
      if (rem > colrem_[c]) return;
      *cell = rem;
      colrem_[c] -= rem;
      place_row(r + 1);
      colrem_[c] += rem;
      *cell = 0;
      return;
    }
    const int hi = std::min(rem, colrem_[c]);
    for (int v = hi; v >= 0; --v) {
      *cell = v;
      colrem_[c] -= v;
      place_entry(r, c + 1, rem - v);
      colrem_[c] += v;
    }
    *cell = 0;
  }

  int k_;
  std::vector<int> margins_;
  std::vector<int> colrem_;
  std::vector<int> entries_;
  F& f_;
};

}  // namespace detail

// Visits every balanced matrix with the given margins, deterministic order.
// The visitor receives the k*k row-major entries in a reused buffer.
template <typename F>
void for_each_balanced(std::span<const int> margins, F&& f) {
  detail::BalancedEnumerator<F> e(margins, f);
  e.run();
}

inline std::vector<MultiIndexMatrix> balanced_matrices(const MultiIndex& margins) {
  std::vector<MultiIndexMatrix> out;
  const int k = margins.size();
  for_each_balanced(margins.components(), [&](std::span<const int> e) {
    out.emplace_back(k, std::vector<int>(e.begin(), e.end()));
  });
  return out;
}

// Sign and multinomial weight of one series term:
//   sign = (-1)^{|J|},  coefficient = prod_r j_r! / alpha_r!
// with J the row-sum vector. The coefficient is an exact integer whenever it
// fits 64 bits; otherwise it is reported through the log path and `exact`
// is cleared.
struct TermWeight {
  int sign = 1;
  double coefficient = 1.0;
  double log_coefficient = 0.0;
  bool exact = true;
};

inline TermWeight term_weight(const MultiIndexMatrix& alpha) {
  TermWeight w;
  w.sign = alpha.total() % 2 == 0 ? 1 : -1;
  std::uint64_t acc = 1;
  bool exact = true;
  double lg = 0.0;
  for (int r = 0; r < alpha.order(); ++r) {
    const auto row = alpha.row(r);
    lg += detail::log_multinomial(row);
    if (exact) {
      std::uint64_t m = 0;
      if (detail::multinomial_u64(row, m) &&
          !__builtin_mul_overflow(acc, m, &acc)) {
        continue;
      }
      exact = false;
    }
  }
  w.exact = exact;
  w.log_coefficient = lg;
  w.coefficient = exact ? static_cast<double>(acc) : std::exp(lg);
  return w;
}

// M^alpha = prod over entries of m_{r,l}^{alpha_{r,l}}, with 0^0 = 1.
inline Complex monomial_value(const ComplexMatrix& m,
                              const MultiIndexMatrix& alpha) {
  if (m.order() != alpha.order())
    throw DomainViolation("matrix and exponent orders do not match");
  Complex out{1.0, 0.0};
  for (int r = 0; r < m.order(); ++r)
    for (int c = 0; c < m.order(); ++c)
      for (int i = 0; i < alpha(r, c); ++i) out *= m(r, c);
  return out;
}

}  // namespace invdet
