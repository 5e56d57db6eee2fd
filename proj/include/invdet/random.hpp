#pragma once

#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "invdet/errors.hpp"
#include "invdet/matrix.hpp"

namespace invdet {

// Stateless mixer for deriving per-stream seeds from one master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deviation matrix with independent complex Gaussian entries, rescaled to
// Frobenius norm = norm_fraction * (1/k). Fractions below 1 land strictly
// inside the gate; fractions above 1 deliberately leave it.
inline ComplexMatrix gaussian_deviation(std::mt19937_64& rng, int k,
                                        double norm_fraction) {
  if (k < 1) throw DomainViolation("matrix order must be >= 1");
  if (!(norm_fraction > 0.0) || !std::isfinite(norm_fraction))
    throw DomainViolation("norm fraction must be positive and finite");
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix m(k);
  double norm = 0.0;
  do {
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) m(r, c) = Complex{gauss(rng), gauss(rng)};
    norm = frobenius_norm(m);
  } while (norm == 0.0);
  const double scale = norm_fraction / (k * norm);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) m(r, c) *= scale;
  return m;
}

inline std::vector<Complex> random_torus_point(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  std::vector<Complex> z(static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r) z[r] = std::polar(1.0, ang(rng));
  return z;
}

inline std::vector<Complex> random_unit_phases(std::mt19937_64& rng, int k) {
  return random_torus_point(rng, k);
}

}  // namespace invdet
