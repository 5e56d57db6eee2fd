#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "invdet/errors.hpp"
#include "invdet/kahan.hpp"
#include "invdet/matrix.hpp"
#include "invdet/multiindex.hpp"

namespace invdet {

enum class SeriesMethod { BalancedR, RelaxedS, TraceLog };

inline const char* to_string(SeriesMethod m) {
  switch (m) {
    case SeriesMethod::BalancedR:
      return "series";
    case SeriesMethod::RelaxedS:
      return "relaxed";
    case SeriesMethod::TraceLog:
      return "tracelog";
  }
  return "unknown";
}

struct SeriesOrder {
  int degree = 0;                 // total degree |J| just completed
  Complex partial_sum{0.0, 0.0};  // running value after this degree
  long long terms_added = 0;      // terms enumerated at this degree
};

// Trace of a truncated series evaluation: one entry per completed total
// degree, in ascending order. Divergence is never an error here; it shows up
// as non-decreasing increments in the orders.
struct SeriesReport {
  SeriesMethod method = SeriesMethod::BalancedR;
  std::vector<SeriesOrder> orders;
  Complex final_value{0.0, 0.0};
  int truncation_degree = 0;
  GateStatus gate;
};

namespace detail {

// Power tables m_{r,l}^p for p = 0..max_degree, one row per matrix entry.
inline std::vector<Complex> entry_power_table(const ComplexMatrix& m,
                                              int max_degree) {
  const int k = m.order();
  const int stride = max_degree + 1;
  std::vector<Complex> t(static_cast<std::size_t>(k) * k * stride);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) {
      const std::size_t base = (static_cast<std::size_t>(r) * k + c) * stride;
      t[base] = Complex{1.0, 0.0};
      for (int p = 1; p <= max_degree; ++p) t[base + p] = t[base + p - 1] * m(r, c);
    }
  return t;
}

struct DegreeSums {
  std::vector<Complex> sums;          // T_d = sum_{|J|=d} J! sum_alpha M^alpha / alpha!
  std::vector<long long> term_counts;  // balanced matrices enumerated at degree d
};

// Unsigned per-degree sums of the balanced multi-index series. Enumeration
// order: degree ascending, then J with leading component descending, then
// backtracking within fixed margins. Each degree is accumulated with
// compensated summation.
inline DegreeSums balanced_degree_sums(const ComplexMatrix& m, int max_degree) {
  const int k = m.order();
  const int nent = k * k;
  const int stride = max_degree + 1;
  const std::vector<Complex> pow = entry_power_table(m, max_degree);
  std::vector<double> lf(static_cast<std::size_t>(max_degree) + 2);
  for (std::size_t i = 0; i < lf.size(); ++i) lf[i] = log_factorial(static_cast<int>(i));

  DegreeSums out;
  out.sums.resize(static_cast<std::size_t>(max_degree) + 1);
  out.term_counts.assign(static_cast<std::size_t>(max_degree) + 1, 0);

  for (int d = 0; d <= max_degree; ++d) {
    KahanComplex acc;
    long long terms = 0;
    // Multinomial products fit 64 bits comfortably through degree 20
    // (bounded by k^d with k <= 8); beyond that the log-gamma table takes
    // over, which is plenty for the tiny term magnitudes at such degrees.
    const bool exact = d <= 20;
    for_each_weak_composition(d, k, [&](std::span<const int> margins) {
      for_each_balanced(margins, [&](std::span<const int> a) {
        double coeff;
        if (exact) {
          std::uint64_t w = 1;
          bool ok = true;
          for (int r = 0; r < k && ok; ++r) {
            std::uint64_t rm = 0;
            ok = detail::multinomial_u64(a.subspan(static_cast<std::size_t>(r) * k, k), rm) &&
                 !__builtin_mul_overflow(w, rm, &w);
          }
          if (ok) {
            coeff = static_cast<double>(w);
          } else {
            double lg = 0.0;
            for (int r = 0; r < k; ++r) lg += lf[margins[r]];
            for (int e = 0; e < nent; ++e) lg -= lf[a[e]];
            coeff = std::exp(lg);
          }
        } else {
          double lg = 0.0;
          for (int r = 0; r < k; ++r) lg += lf[margins[r]];
          for (int e = 0; e < nent; ++e) lg -= lf[a[e]];
          coeff = std::exp(lg);
        }
        Complex mono{1.0, 0.0};
        for (int e = 0; e < nent; ++e)
          mono *= pow[static_cast<std::size_t>(e) * stride + a[e]];
        acc.add(coeff * mono);
        ++terms;
      });
    });
    out.sums[d] = acc.value();
    out.term_counts[d] = terms;
  }
  return out;
}

}  // namespace detail

// Balanced multi-index series for 1/det(I + m), truncated by total degree:
//   sum over J of (-1)^{|J|} J! sum over balanced alpha with margins J of
//   M^alpha / alpha!.
// Converges for ||m|| <= 1/k; inputs outside the gate are still evaluated so
// the report makes any non-convergence visible.
inline SeriesReport eval_series_R(const ComplexMatrix& m, int max_degree) {
  if (max_degree < 0) throw DomainViolation("max_degree must be >= 0");
  const auto ds = detail::balanced_degree_sums(m, max_degree);
  SeriesReport rep;
  rep.method = SeriesMethod::BalancedR;
  rep.truncation_degree = max_degree;
  rep.gate = gate(ComplexMatrix::identity(m.order()) + m);
  rep.orders.reserve(static_cast<std::size_t>(max_degree) + 1);
  KahanComplex total;
  for (int d = 0; d <= max_degree; ++d) {
    const double sgn = d % 2 == 0 ? 1.0 : -1.0;
    total.add(sgn * ds.sums[d]);
    rep.orders.push_back({d, total.value(), ds.term_counts[d]});
  }
  rep.final_value = rep.orders.back().partial_sum;
  return rep;
}

// Derivative of 1/det(I + M) at M = 0 in the direction alpha:
//   (-1)^{|alpha|} |alpha_1|! ... |alpha_k|!  when alpha is balanced,
//   0 otherwise.
inline Complex taylor_coefficient(const MultiIndexMatrix& alpha) {
  if (!alpha.balanced()) return Complex{0.0, 0.0};
  const double sgn = alpha.total() % 2 == 0 ? 1.0 : -1.0;
  return Complex{sgn * alpha.row_sums().factorial(), 0.0};
}

// Relaxed series: same shape as the balanced one but without the balance
// constraint on alpha. By the multinomial theorem the degree-d slice equals
//   sum_{|J|=d} prod_r (-s_r)^{j_r},  s_r = sum_l m_{r,l},
// which is how it is evaluated here. The explicit multi-index form lives in
// the verification oracles.
inline SeriesReport eval_series_S(const ComplexMatrix& m, int max_degree) {
  if (max_degree < 0) throw DomainViolation("max_degree must be >= 0");
  const int k = m.order();
  const int stride = max_degree + 1;
  std::vector<Complex> pow(static_cast<std::size_t>(k) * stride);
  for (int r = 0; r < k; ++r) {
    Complex s{0.0, 0.0};
    for (int c = 0; c < k; ++c) s += m(r, c);
    const std::size_t base = static_cast<std::size_t>(r) * stride;
    pow[base] = Complex{1.0, 0.0};
    for (int p = 1; p <= max_degree; ++p) pow[base + p] = pow[base + p - 1] * (-s);
  }
  SeriesReport rep;
  rep.method = SeriesMethod::RelaxedS;
  rep.truncation_degree = max_degree;
  rep.gate = gate(ComplexMatrix::identity(k) + m);
  rep.orders.reserve(static_cast<std::size_t>(max_degree) + 1);
  KahanComplex total;
  for (int d = 0; d <= max_degree; ++d) {
    KahanComplex deg;
    long long terms = 0;
    for_each_weak_composition(d, k, [&](std::span<const int> j) {
      Complex t{1.0, 0.0};
      for (int r = 0; r < k; ++r)
        t *= pow[static_cast<std::size_t>(r) * stride + j[r]];
      deg.add(t);
      ++terms;
    });
    total.add(deg.value());
    rep.orders.push_back({d, total.value(), terms});
  }
  rep.final_value = rep.orders.back().partial_sum;
  return rep;
}

// Closed form of the relaxed series: prod_r 1/(1 + s_r).
inline Complex eval_S_closed(const ComplexMatrix& m) {
  const int k = m.order();
  Complex prod{1.0, 0.0};
  for (int r = 0; r < k; ++r) {
    Complex s{0.0, 0.0};
    for (int c = 0; c < k; ++c) s += m(r, c);
    const Complex den = Complex{1.0, 0.0} + s;
    if (std::abs(den) < 1e-14)
      throw RowSumPole("1 + row sum vanishes at row " + std::to_string(r));
    prod /= den;
  }
  return prod;
}

// Diagonal phase conjugation m -> D^{-1} m D with D = diag(phases):
// entry (r,l) becomes z_r^{-1} z_l m_{r,l}. Preserves the Frobenius norm and
// det(I + m); balanced monomials are invariant under it.
inline ComplexMatrix conjugate_by_phase(const ComplexMatrix& m,
                                        std::span<const Complex> phases) {
  const int k = m.order();
  if (static_cast<int>(phases.size()) != k)
    throw DomainViolation("need one phase per dimension");
  for (const Complex& z : phases)
    if (std::abs(std::abs(z) - 1.0) > 1e-12)
      throw NonUnitPhase("phase entries must have modulus 1");
  ComplexMatrix out(k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) out(r, c) = m(r, c) * phases[c] / phases[r];
  return out;
}

// Baseline via the trace-log identity
//   1/det(I + m) = exp(sum_{j>=1} (-1)^j tr(m^j) / j),
// summed to max_power. The j = 0 term of the textbook display is undefined
// and is taken as absent; starting at j = 1 reproduces -log det(I + m).
// Convergence needs spectral radius < 1, which is only checked heuristically
// through the gate carried in the report.
inline SeriesReport eval_tracelog(const ComplexMatrix& m, int max_power) {
  if (max_power < 0) throw DomainViolation("max_power must be >= 0");
  const int k = m.order();
  SeriesReport rep;
  rep.method = SeriesMethod::TraceLog;
  rep.truncation_degree = max_power;
  rep.gate = gate(ComplexMatrix::identity(k) + m);
  rep.orders.reserve(static_cast<std::size_t>(max_power) + 1);
  rep.orders.push_back({0, Complex{1.0, 0.0}, 0});
  KahanComplex logacc;
  ComplexMatrix p = m;
  for (int j = 1; j <= max_power; ++j) {
    if (j > 1) p = p * m;
    const double sgn = j % 2 == 0 ? 1.0 : -1.0;
    logacc.add(sgn / static_cast<double>(j) * trace(p));
    rep.orders.push_back({j, std::exp(logacc.value()), 1});
  }
  rep.final_value = rep.orders.back().partial_sum;
  return rep;
}

// Coefficients of 1/det(m - lambda I) as a series in 1/lambda:
//   1/det(m - lambda I) = sum_{j >= 0} c_j lambda^{-(k+j)},
//   c_j = (-1)^k sum_{|J|=j} J! sum_{balanced alpha} M^alpha / alpha!.
// Valid for |lambda| > k ||m||; this evaluator insists on a 5% margin.
// The exponent and sign conventions here are fixed against the LU oracle
// (1/det(m - lambda I) = (-lambda)^{-k} / det(I - m/lambda), then the
// balanced series applied to -m/lambda, whose signs cancel degree by degree).
struct CharpolySeries {
  std::vector<Complex> coefficients;  // c_0 .. c_truncation
  int degree_offset = 0;              // power of lambda attached to c_0: -k
  int truncation = 0;
};

struct CharpolyEval {
  Complex value{0.0, 0.0};
  CharpolySeries series;
};

inline CharpolyEval charpoly_inverse_series(const ComplexMatrix& m,
                                            Complex lambda, int max_j) {
  if (max_j < 0) throw DomainViolation("max_j must be >= 0");
  const int k = m.order();
  const double nm = frobenius_norm(m);
  constexpr double kMargin = 0.05;
  const double floor = std::max(k * nm * (1.0 + kMargin), kPivotFloor);
  if (std::abs(lambda) < floor)
    throw DomainViolation("require |lambda| >= 1.05 * k * ||m||");
  const auto ds = detail::balanced_degree_sums(m, max_j);
  const double ksign = k % 2 == 0 ? 1.0 : -1.0;
  CharpolyEval out;
  out.series.degree_offset = -k;
  out.series.truncation = max_j;
  out.series.coefficients.resize(static_cast<std::size_t>(max_j) + 1);
  const Complex inv = Complex{1.0, 0.0} / lambda;
  Complex lp{1.0, 0.0};
  for (int i = 0; i < k; ++i) lp *= inv;
  KahanComplex acc;
  for (int j = 0; j <= max_j; ++j) {
    const Complex cj = ksign * ds.sums[j];
    out.series.coefficients[j] = cj;
    acc.add(cj * lp);
    lp *= inv;
  }
  out.value = acc.value();
  return out;
}

}  // namespace invdet
