#pragma once

#include <vector>

#include "liequant/fourier.hpp"
#include "liequant/quantization.hpp"

namespace liequant {

// Dyadic block decomposition along <xi>: block m holds 2^m <= <xi> < 2^(m+1);
// the trivial irrep (<xi> = 1) lands in block 0.
int dyadic_block_of(const Irrep& xi);

// Largest block index intersecting the truncated dual of the given band.
int dyadic_block_count(const GroupId& group, double band);  // returns max m + 1

struct DyadicProfile {
  double r = 0.0, p = 2.0, q = 2.0;
  std::vector<int> blocks;
  std::vector<double> block_norms;     // ||Op(chi_m) f||_p
  std::vector<double> weighted_terms;  // 2^(m r) * block norm
  int truncation_index = 0;            // top block index present in the band
};

// Op(chi_m) f: coefficients restricted to block m (and to the upper-left
// k_xi block on a homogeneous space). Refuses blocks entirely beyond the
// band; the top block may be partially covered, which is exact for
// band-limited input.
GridFunction dyadic_project(const GridFunction& f, int m);
SpectralCoefficients dyadic_restrict(const SpectralCoefficients& c, int m);

struct BesovResult {
  double value = 0.0;
  DyadicProfile profile;
};

// l^q aggregation of 2^(m r) ||Op(chi_m) f||_p over all blocks in band
// (sup for q = inf; 0 < q < 1 accepted as a quasi-norm).
BesovResult besov_norm(const GridFunction& f, double r, double p, double q);

// ||<D>^s f||_p via the Bessel potential multiplier <xi>^s I_xi.
GridFunction lambda_apply(const GridFunction& f, double s);
double sobolev_norm(const GridFunction& f, double s, double p);

}  // namespace liequant
