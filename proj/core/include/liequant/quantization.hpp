#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "liequant/fourier.hpp"
#include "liequant/group.hpp"

namespace liequant {

// Name + parameters of a closed-form symbol family; lets a symbol be
// re-materialized at a different band (used by truncation diagnostics).
struct BuiltinSpec {
  std::string spec;  // e.g. "bessel_potential:-1" or "parametrix_of:sublaplacian_su2"
};

// One spatial mode of a symbol with x-dependence: the scalar function
// x -> d_eta * eta(x)_{row,col} paired with a per-irrep matrix bank.
struct SpatialMode {
  Irrep eta;
  int row = 0;
  int col = 0;
  std::vector<Matrix> bank;  // aligned with Symbol::irreps
};

// Symbol a(x, xi) = sum_modes d_eta eta(x)_{row,col} bank_mode(xi), stored on
// the truncated dual up to `band` with spatial expansion band `spatial_band`.
// A multiplier is the degenerate case of one trivial mode (spatial_band 0).
struct Symbol {
  GroupId group;
  double band = 0.0;
  double spatial_band = 0.0;
  std::vector<Irrep> irreps;
  std::vector<SpatialMode> modes;
  std::optional<BuiltinSpec> closed_form;
  double projection_residual = 0.0;    // sup-norm residual of the spatial re-expansion
  double truncation_diagnostic = -1.0; // band-L vs band-2L disagreement, -1 if not computed

  bool is_multiplier() const;
  const std::vector<Matrix>& multiplier_bank() const;
  static Symbol multiplier(const GroupId& group, double band, std::vector<Matrix> bank);

  // a(x, irreps[which]) assembled from the modes; x given as grid point index.
  Matrix value_at(const QuadratureGrid& grid, std::size_t point, std::size_t which) const;
  Matrix value_at(const Point& x, std::size_t which) const;
  std::size_t find(const Irrep& xi) const;
};

struct OpDiagnostics {
  double truncation_estimate = 0.0;  // Plancherel mass of f above the symbol band
};

// Af(x) = sum_xi d_xi Tr(xi(x) a(x, xi) fhat(xi)), evaluated through the
// per-mode coefficient route. Throws on group/dimension mismatch; a symbol
// band below the function band attaches a truncation estimate.
GridFunction op_apply(const Symbol& a, const GridFunction& f, OpDiagnostics* diag = nullptr);

// Right-convolution kernel slice at frozen z: y -> sum_xi d_xi Tr(xi(y) a(z, xi)).
struct KernelSlice {
  Point z;
  GridFunction values;
};
KernelSlice schwartz_kernel(const Symbol& a, const QuadratureGrid& grid, const Point& z);
KernelSlice schwartz_kernel(const Symbol& a, const QuadratureGrid& grid);  // multiplier: z-free

// Recovers the symbol of a linear operator A via sigma(x, xi) = xi(x)^* (A xi)(x),
// with the x-dependence re-expanded through spatial band spatial_band. Runs a
// linearity spot check first (tol 1e-8) and throws if A fails it.
Symbol symbol_of_operator(const std::function<GridFunction(const GridFunction&)>& op,
                          const QuadratureGrid& grid, double band, double spatial_band);

}  // namespace liequant
