#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "liequant/quantization.hpp"

namespace liequant {

// Difference multi-index alpha as an ordered chain of generator entries
// (one (row, col) of xi0 per factor), plus a spatial multi-index beta.
struct MultiIndexPair {
  std::vector<std::pair<int, int>> alpha;  // difference entry chain
  std::vector<int> beta;                   // spatial derivative orders per axis
  int alpha_order() const { return static_cast<int>(alpha.size()); }
  int beta_order() const;
  std::string label() const;
};

struct DifferenceOptions {
  bool taper = false;          // cosine window on the top half-band before the kernel route
  double output_band = -1.0;   // default: input band minus the generator band
  const QuadratureGrid* work_grid = nullptr;  // optional prebuilt grid (band >= input + generator)
};

// Difference operator D_{xi0, entry}: multiplies the Schwartz kernel by
// conj(xi0(y)_{row,col}) - delta and re-transforms. Exact up to output band
// input_band - band(xi0); beyond that it refuses unless tapered.
// On the 1-torus with k0 = 1 this is the forward difference s(k+1) - s(k).
Symbol difference_apply(const Symbol& a, const Irrep& xi0, int row, int col,
                        const DifferenceOptions& opts = {});

// d/dx_j along the left-invariant field Y_j: exact right multiplication of
// each spatial mode by d pi_eta(Y_j).
Symbol spatial_derivative(const Symbol& a, int axis);
Symbol spatial_derivative(const Symbol& a, const std::vector<int>& beta);

struct ClassFitRow {
  MultiIndexPair pair;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms regression residual
};

// Least-squares Hormander class estimate: per pair, regress
// log sup_x ||(D^alpha d^beta a)(x, xi)||_op against log<xi> over the window,
// then solve slope(alpha, beta) ~ m - rho |alpha| + delta |beta|.
struct ClassFit {
  double m = 0.0;
  double rho = 0.0;
  double delta = 0.0;
  bool rho_identified = false;
  bool delta_identified = false;
  std::vector<ClassFitRow> rows;
  // envelope regression inputs per (|alpha|, |beta|) group
  std::vector<std::array<double, 3>> group_slopes;  // (|alpha|, |beta|, slope)
};

struct ClassFitOptions {
  double window_lo = -1.0;  // defaults: [band/4, band]
  double window_hi = -1.0;
  // Aggregate same-(|alpha|,|beta|) chains by pointwise max before the slope
  // regression; raw per-chain slopes are still reported.
  bool envelope = true;
};

// Pairs must include (0, 0). The window must contain at least two irreps.
ClassFit class_fit(const Symbol& a, const std::vector<MultiIndexPair>& pairs,
                   const ClassFitOptions& opts = {});

// Default pair set: all single entries of the generator and all order-2
// chains, beta up to the given order (multiplier symbols: beta_max = 0).
std::vector<MultiIndexPair> default_class_fit_pairs(const GroupId& group, int alpha_max,
                                                    int beta_max);

enum class PlancherelWeight { DimSquared, DimTimesRank };

struct WeakNormResult {
  double value = 0.0;
  double threshold = 0.0;  // the s attaining the supremum
  std::vector<std::array<double, 3>> steps;  // (s, tail measure, s * tail^e)
};

// sup_{s>0} s * mu{ xi in type-one dual : ||a(xi)||_op > s }^e with
// e = 1/p1 - 1/p2, evaluated exactly on the truncated dual by sorting the
// distinct operator norms; the sup is approached from below at each jump.
WeakNormResult weak_plancherel_norm(const Symbol& a, double p1, double p2,
                                    PlancherelWeight weight = PlancherelWeight::DimSquared);

// Built-in symbol families, by name:
//   bessel_potential:s        <xi>^s I_xi
//   casimir                   -lambda I_xi
//   identity                  I_xi
//   sublaplacian_su2          d pi(Y1)^2 + d pi(Y2)^2
//   vector_field_su2:re[,im[,axis]]   d pi(Y_axis) + c I
//   parametrix_of:<inner>     per-irrep pseudo-inverse of <inner>
// Throws std::invalid_argument on unknown names or group mismatch, and a
// SingularSymbolError when a parametrix hits a resonant (singular, nonzero)
// block, naming the irreps.
Symbol builtin_symbol(const std::string& spec, const GroupId& group, double band);

struct SingularSymbolError : std::runtime_error {
  std::vector<Irrep> resonant;
  explicit SingularSymbolError(const std::string& what, std::vector<Irrep> irreps);
};

}  // namespace liequant
