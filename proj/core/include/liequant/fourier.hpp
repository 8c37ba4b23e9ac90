#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "liequant/group.hpp"

namespace liequant {

// Samples on a quadrature grid. The homogeneous flag marks functions constant
// on right K-cosets; it is preserved by the transforms that preserve it.
struct GridFunction {
  QuadratureGrid grid;
  Vector values;
  bool homogeneous = false;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

// Matrix Fourier coefficients fhat(xi) = int f(x) xi(x)^* dx, one block per
// irrep, aligned with the irreps vector.
struct SpectralCoefficients {
  GroupId group;
  double band = 0.0;
  std::vector<Irrep> irreps;
  std::vector<Matrix> blocks;
  std::string truncation_warning;  // non-empty if the requested band exceeded grid exactness

  std::size_t find(const Irrep& xi) const;  // index or npos
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

SpectralCoefficients forward(const GridFunction& f, double band);
GridFunction inverse(const SpectralCoefficients& c, const QuadratureGrid& grid);

// (sum_i w_i |f_i|^p)^(1/p), max for p = infinity. Exact only for p in {2, inf}
// on band-limited data; other p are quadrature approximations.
double lp_norm(const GridFunction& f, double p);

// (sum_xi d_xi ||fhat(xi)||_HS^2)^(1/2); equals the L^2 norm.
double plancherel_norm(const SpectralCoefficients& c);

// i.i.d. complex Gaussian coefficients over all irreps of band <= band,
// restricted to the upper-left k_xi x k_xi block on a homogeneous space.
// Deterministic in seed (own Box-Muller over a fixed-order draw sequence).
GridFunction random_band_limited(const QuadratureGrid& grid, std::uint64_t seed,
                                 double band, bool homogeneous = false);

// Coefficient support honours the k_xi x k_xi upper-left block pattern.
bool homogeneous_pattern(const SpectralCoefficients& c, double tol = 1e-10);

// |lp_norm on grid - lp_norm on a 2x refined grid| for the synthesized
// coefficients; reported by the harness as a quadrature quality indicator.
double lp_refinement_delta(const SpectralCoefficients& c, const QuadratureGrid& grid, double p);

}  // namespace liequant
