#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "invdet/errors.hpp"
#include "invdet/kahan.hpp"
#include "invdet/matrix.hpp"
#include "invdet/multiindex.hpp"

namespace invdet {

// Tensor-product quadrature grid on the polytorus: n equally spaced angles
// per dimension, equal weights. The trapezoidal rule in angle is spectrally
// accurate for integrands analytic in an annulus around the unit circle,
// which the proximity gate guarantees.
class TorusRule {
 public:
  TorusRule(int dims, int nodes_per_dim) : k_(dims), n_(nodes_per_dim) {
    if (k_ < 1) throw DomainViolation("torus rule needs dims >= 1");
    if (n_ < 1) throw DomainViolation("torus rule needs nodes_per_dim >= 1");
    angles_.resize(n_);
    values_.resize(n_);
    for (int s = 0; s < n_; ++s) {
      angles_[s] = 2.0 * std::numbers::pi * s / n_;
      values_[s] = std::polar(1.0, angles_[s]);
    }
  }

  int dims() const { return k_; }
  int nodes_per_dim() const { return n_; }
  double angle(int s) const { return angles_[s]; }
  Complex node_value(int s) const { return values_[s]; }

  void node(std::span<const int> idx, std::span<Complex> out) const {
    for (int d = 0; d < k_; ++d) out[d] = values_[idx[d]];
  }

  long long total_nodes() const {
    unsigned __int128 t = 1;
    for (int d = 0; d < k_; ++d) {
      t *= static_cast<unsigned>(n_);
      if (t > static_cast<unsigned __int128>(std::numeric_limits<long long>::max()))
        throw DomainViolation("node count overflows");
    }
    return static_cast<long long>(t);
  }

 private:
  int k_;
  int n_;
  std::vector<double> angles_;
  std::vector<Complex> values_;
};

// Visits every index tuple of the dims-dimensional grid with n nodes per
// dimension, last dimension fastest. Single ordered pass, so reductions over
// it are bit-reproducible.
template <typename F>
void for_each_node(int dims, int n, F&& f) {
  std::vector<int> idx(static_cast<std::size_t>(dims), 0);
  while (true) {
    f(std::span<const int>(idx));
    int d = dims - 1;
    while (d >= 0 && ++idx[d] == n) {
      idx[d] = 0;
      --d;
    }
    if (d < 0) break;
  }
}

struct QuadResult {
  Complex value{0.0, 0.0};
  int nodes_per_dim = 0;
  long long evaluations = 0;  // nodes_per_dim^k
  // |value_n - value_{n/2}|, present when n is even.
  std::optional<double> refinement_delta;
};

// Test integrands for the weighted representation: every variant is entire
// on C^k, so the integral recovers f(0)/det(A).
struct FnOne {};
struct FnCoordinate {
  int index = 0;  // f(z) = z_index, zero-based
};
struct FnMonomial {
  MultiIndex beta;  // f(z) = z^beta
};
struct FnExpLinear {
  std::vector<Complex> c;  // f(z) = exp(sum_r c_r z_r)
};
struct FnPolynomial {
  std::vector<std::pair<MultiIndex, Complex>> terms;
};

class HolomorphicTestFn {
 public:
  HolomorphicTestFn(FnOne v) : v_(std::move(v)) {}
  HolomorphicTestFn(FnCoordinate v) : v_(std::move(v)) {}
  HolomorphicTestFn(FnMonomial v) : v_(std::move(v)) {}
  HolomorphicTestFn(FnExpLinear v) : v_(std::move(v)) {}
  HolomorphicTestFn(FnPolynomial v) : v_(std::move(v)) {}

  Complex eval(std::span<const Complex> z) const {
    return std::visit(
        [&](const auto& f) -> Complex { return eval_impl(f, z); }, v_);
  }

  Complex at_zero() const {
    return std::visit([](const auto& f) -> Complex { return zero_impl(f); }, v_);
  }

 private:
  static Complex eval_impl(const FnOne&, std::span<const Complex>) {
    return Complex{1.0, 0.0};
  }
  static Complex eval_impl(const FnCoordinate& f, std::span<const Complex> z) {
    return z[f.index];
  }
  static Complex monomial(const MultiIndex& beta, std::span<const Complex> z) {
    Complex out{1.0, 0.0};
    for (int r = 0; r < beta.size(); ++r)
      for (int i = 0; i < beta[r]; ++i) out *= z[r];
    return out;
  }
  static Complex eval_impl(const FnMonomial& f, std::span<const Complex> z) {
    return monomial(f.beta, z);
  }
  static Complex eval_impl(const FnExpLinear& f, std::span<const Complex> z) {
    Complex s{0.0, 0.0};
    for (std::size_t r = 0; r < f.c.size(); ++r) s += f.c[r] * z[r];
    return std::exp(s);
  }
  static Complex eval_impl(const FnPolynomial& f, std::span<const Complex> z) {
    Complex s{0.0, 0.0};
    for (const auto& [beta, coeff] : f.terms) s += coeff * monomial(beta, z);
    return s;
  }

  static Complex zero_impl(const FnOne&) { return Complex{1.0, 0.0}; }
  static Complex zero_impl(const FnCoordinate&) { return Complex{0.0, 0.0}; }
  static Complex zero_impl(const FnMonomial& f) {
    return f.beta.total() == 0 ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
  }
  static Complex zero_impl(const FnExpLinear&) { return Complex{1.0, 0.0}; }
  static Complex zero_impl(const FnPolynomial& f) {
    Complex s{0.0, 0.0};
    for (const auto& [beta, coeff] : f.terms)
      if (beta.total() == 0) s += coeff;
    return s;
  }

  std::variant<FnOne, FnCoordinate, FnMonomial, FnExpLinear, FnPolynomial> v_;
};

namespace detail {

inline void require_strict_gate(const ComplexMatrix& a, const char* what) {
  const GateStatus g = gate(a);
  if (!g.inside_strict)
    throw GateViolation(std::string(what) + " requires ||a - I|| < 1/k, got " +
                        std::to_string(g.norm_of_deviation) + " vs " +
                        std::to_string(g.threshold));
}

// Plain mean over the grid of f(z) * prod_r (z_r / w_r) with w = a z. The
// z_r factors absorb dz_r = i z_r dtheta_r, cancelling the (2 pi i)^{-k}
// normalization, so no constant remains.
template <typename F>
Complex contour_mean(const ComplexMatrix& a, const TorusRule& rule, F&& f) {
  const int k = a.order();
  const int n = rule.nodes_per_dim();
  std::vector<Complex> z(static_cast<std::size_t>(k));
  std::vector<Complex> w(static_cast<std::size_t>(k));
  KahanComplex acc;
  for_each_node(k, n, [&](std::span<const int> idx) {
    rule.node(idx, z);
    apply(a, z, w);
    Complex pz{1.0, 0.0};
    Complex pw{1.0, 0.0};
    for (int r = 0; r < k; ++r) {
      pz *= z[r];
      if (std::norm(w[r]) < 1e-16)
        throw NearPole("image coordinate vanished on the torus");
      pw *= w[r];
    }
    acc.add(f(std::span<const Complex>(z)) * pz / pw);
  });
  return acc.value() / static_cast<double>(rule.total_nodes());
}

inline Complex unit_fn(std::span<const Complex>) { return Complex{1.0, 0.0}; }

}  // namespace detail

// Contour representation of the reciprocal determinant:
// the mean over the polytorus grid of prod_r z_r / w_r converges to
// 1/det(a) exponentially in the per-dimension node count. Requires the
// strict gate, which keeps every w_r away from zero on the torus.
inline QuadResult eval_contour(const ComplexMatrix& a, int nodes_per_dim) {
  detail::require_strict_gate(a, "eval_contour");
  const TorusRule rule(a.order(), nodes_per_dim);
  QuadResult out;
  out.nodes_per_dim = nodes_per_dim;
  out.evaluations = rule.total_nodes();
  out.value = detail::contour_mean(a, rule, detail::unit_fn);
  if (nodes_per_dim >= 2 && nodes_per_dim % 2 == 0) {
    const TorusRule half(a.order(), nodes_per_dim / 2);
    out.refinement_delta =
        std::abs(out.value - detail::contour_mean(a, half, detail::unit_fn));
  }
  return out;
}

// Weighted variant: integrand f(z) * prod_r z_r / w_r converges to
// f(0)/det(a) for holomorphic f.
inline QuadResult eval_contour_f(const ComplexMatrix& a,
                                 const HolomorphicTestFn& f, int nodes_per_dim) {
  detail::require_strict_gate(a, "eval_contour_f");
  const TorusRule rule(a.order(), nodes_per_dim);
  auto fn = [&](std::span<const Complex> z) { return f.eval(z); };
  QuadResult out;
  out.nodes_per_dim = nodes_per_dim;
  out.evaluations = rule.total_nodes();
  out.value = detail::contour_mean(a, rule, fn);
  if (nodes_per_dim >= 2 && nodes_per_dim % 2 == 0) {
    const TorusRule half(a.order(), nodes_per_dim / 2);
    out.refinement_delta =
        std::abs(out.value - detail::contour_mean(a, half, fn));
  }
  return out;
}

// Single-variable slice: (1/2 pi i) times the contour integral of dz_1 / w_row
// holding z_2..z_k fixed on the torus. Converges to 1/a_{1,1} for the first
// row (the only singularity sits inside the disk) and to 0 for every other
// row (the singularity sits outside). `row` is zero-based.
inline Complex lemma1_integral(const ComplexMatrix& a, int row,
                               std::span<const Complex> fixed_z, int nodes) {
  const int k = a.order();
  if (row < 0 || row >= k) throw DomainViolation("row index out of range");
  if (static_cast<int>(fixed_z.size()) != k - 1)
    throw DomainViolation("need k-1 fixed torus coordinates");
  for (const Complex& z : fixed_z)
    if (std::abs(std::abs(z) - 1.0) > 1e-12)
      throw DomainViolation("fixed coordinates must lie on the unit circle");
  detail::require_strict_gate(a, "lemma1_integral");
  Complex fixed_part{0.0, 0.0};
  for (int l = 1; l < k; ++l) fixed_part += a(row, l) * fixed_z[l - 1];
  const Complex coef = a(row, 0);
  const TorusRule rule(1, nodes);
  KahanComplex acc;
  for (int s = 0; s < nodes; ++s) {
    const Complex z1 = rule.node_value(s);
    const Complex w = coef * z1 + fixed_part;
    if (std::norm(w) < 1e-16)
      throw NearPole("image coordinate vanished on the circle");
    acc.add(z1 / w);
  }
  return acc.value() / static_cast<double>(nodes);
}

// Certificate-style check that the straight-line deformation
// A(t) = I + t (a - I) never maps a torus point onto a coordinate
// hyperplane: samples slack = |w_r(t)| - (1 - t), which the gate keeps
// strictly positive for t > 0. t = 0 sits exactly on the bound and is
// reported separately.
struct HomotopySafetyReport {
  double min_slack = 0.0;   // over grid nodes with t > 0
  double argmin_t = 0.0;    // t value attaining min_slack
  double t0_slack = 0.0;    // min slack observed at t = 0 (should be ~0)
  int t_samples = 0;
  int z_samples = 0;
};

inline HomotopySafetyReport homotopy_safety_check(
    const ComplexMatrix& a, int t_samples, int z_samples,
    std::uint64_t seed = 0x9e3779b97f4a7c15ULL) {
  if (t_samples < 2) throw DomainViolation("need at least two t samples");
  if (z_samples < 1) throw DomainViolation("need at least one torus sample");
  detail::require_strict_gate(a, "homotopy_safety_check");
  const int k = a.order();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  HomotopySafetyReport rep;
  rep.t_samples = t_samples;
  rep.z_samples = z_samples;
  rep.min_slack = std::numeric_limits<double>::infinity();
  rep.t0_slack = std::numeric_limits<double>::infinity();
  std::vector<Complex> z(static_cast<std::size_t>(k));
  std::vector<Complex> az(static_cast<std::size_t>(k));
  for (int zi = 0; zi < z_samples; ++zi) {
    for (int r = 0; r < k; ++r) z[r] = std::polar(1.0, ang(rng));
    apply(a, z, az);
    for (int ti = 0; ti < t_samples; ++ti) {
      const double t = static_cast<double>(ti) / (t_samples - 1);
      for (int r = 0; r < k; ++r) {
        // w_r(t) = z_r + t ((a z)_r - z_r)
        const Complex w = z[r] + t * (az[r] - z[r]);
        const double slack = std::abs(w) - (1.0 - t);
        if (ti == 0) {
          rep.t0_slack = std::min(rep.t0_slack, slack);
        } else if (slack < rep.min_slack) {
          rep.min_slack = slack;
          rep.argmin_t = t;
        }
      }
    }
  }
  return rep;
}

// Independent oracle for the derivatives of F(M) = 1/det(I + M) at M = 0:
// multivariate Cauchy integral over one small circle per matrix entry,
//   d^alpha F(0) = alpha! / (2 pi i)^{k^2} * integral of
//                  F(M) / prod m_{r,l}^{alpha_{r,l} + 1} dm,
// realized as the grid mean of F(M) e^{-i alpha . theta} times r^{-|alpha|}.
// Cost is nodes_per_dim^{k^2}; intended for k = 2.
inline Complex cauchy_coefficient(const MultiIndexMatrix& alpha, double radius,
                                  int nodes_per_dim,
                                  long long eval_budget = 100'000'000) {
  const int k = alpha.order();
  const int dims = k * k;
  if (nodes_per_dim < 1) throw DomainViolation("nodes_per_dim must be >= 1");
  if (eval_budget < 1) throw DomainViolation("eval_budget must be >= 1");
  // Keep I + M invertible over the whole integration torus.
  if (!(radius > 0.0) || radius > 0.9 / dims)
    throw DomainViolation("radius must lie in (0, 0.9/k^2]");
  unsigned __int128 total = 1;
  for (int d = 0; d < dims; ++d) {
    total *= static_cast<unsigned>(nodes_per_dim);
    if (total > static_cast<unsigned __int128>(eval_budget))
      throw CostGuard("nodes_per_dim^(k^2) exceeds the evaluation budget");
  }
  const TorusRule rule(dims, nodes_per_dim);
  const int n = nodes_per_dim;
  // Per-dimension twist tables e^{-i alpha_d theta_s}.
  std::vector<Complex> twist(static_cast<std::size_t>(dims) * n);
  for (int d = 0; d < dims; ++d)
    for (int s = 0; s < n; ++s)
      twist[static_cast<std::size_t>(d) * n + s] =
          std::polar(1.0, -rule.angle(s) * alpha.entries()[d]);
  ComplexMatrix ipm(k);  // I + M at the current node
  KahanComplex acc;
  for_each_node(dims, n, [&](std::span<const int> idx) {
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c)
        ipm(r, c) = (r == c ? Complex{1.0, 0.0} : Complex{0.0, 0.0}) +
                    radius * rule.node_value(idx[r * k + c]);
    Complex tw{1.0, 0.0};
    for (int d = 0; d < dims; ++d)
      tw *= twist[static_cast<std::size_t>(d) * n + idx[d]];
    acc.add(tw / lu_det(ipm));
  });
  const Complex mean = acc.value() / static_cast<double>(rule.total_nodes());
  return alpha.entry_factorial() * mean *
         std::pow(radius, -static_cast<double>(alpha.total()));
}

}  // namespace invdet
