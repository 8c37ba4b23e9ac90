#include <cmath>
#include <complex>
#include <functional>

#include <liequant/quantization.hpp>
#include <liequant/symbol_calculus.hpp>

#include "doctest.h"
#include "oracles.hpp"

using namespace liequant;

namespace {

double rel_err(const Vector& got, const Vector& want) {
  const double scale = std::max(want.cwiseAbs().maxCoeff(), 1e-300);
  return (got - want).cwiseAbs().maxCoeff() / scale;
}

GridFunction coefficient_function(const QuadratureGrid& grid, std::size_t which, int row, int col) {
  GridFunction f;
  f.grid = grid;
  f.values = Vector(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p)
    f.values[static_cast<Eigen::Index>(p)] = grid.irrep_matrix(which, p)(row, col);
  return f;
}

}  // namespace

TEST_SUITE("quantization") {

TEST_CASE("identity symbol acts as the identity") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 4.0);
  const Symbol id = builtin_symbol("identity", grid.group(), 4.0);
  for (std::uint64_t seed : {1ull, 5ull, 9ull}) {
    const GridFunction f = random_band_limited(grid, seed, 4.0);
    CHECK(rel_err(op_apply(id, f).values, f.values) < 1e-12);
  }
}

TEST_CASE("casimir symbol has matrix coefficients as eigenfunctions") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 4.0);
  const Symbol cas = builtin_symbol("casimir", grid.group(), 4.0);
  const auto& irreps = grid.irreps();
  for (std::size_t i : {1u, 2u, 4u}) {  // l = 1/2, 1, 2
    const double l = irreps[i].two_ell / 2.0;
    for (int row = 0; row < irreps[i].dim; row += std::max(1, irreps[i].dim - 1)) {
      const GridFunction f = coefficient_function(grid, i, row, 0);
      const GridFunction af = op_apply(cas, f);
      CHECK(rel_err(af.values, Vector(-l * (l + 1) * f.values)) < 1e-10);
    }
  }
}

TEST_CASE("multiplier scales each coefficient block") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 4.0);
  const Symbol bp = builtin_symbol("bessel_potential:-1", grid.group(), 4.0);
  const GridFunction f = random_band_limited(grid, 11, 4.0);
  const SpectralCoefficients cf = forward(f, 4.0);
  const SpectralCoefficients caf = forward(op_apply(bp, f), 4.0);
  for (std::size_t i = 0; i < cf.irreps.size(); ++i) {
    const Matrix want = cf.blocks[i] / cf.irreps[i].weight;
    CHECK((caf.blocks[i] - want).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("spatial modes factor out pointwise") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 4.0);
  const Symbol bp = builtin_symbol("bessel_potential:-1", grid.group(), 4.0);

  // a(x, xi) = 3 D^1_{11}(x) <xi>^{-1} I: one spin-1 mode over the bessel bank
  Symbol a;
  a.group = grid.group();
  a.band = 4.0;
  a.spatial_band = 1.0;
  a.irreps = bp.irreps;
  SpatialMode mode;
  mode.eta = irrep_list(grid.group(), 1.0)[2];
  mode.row = 0;
  mode.col = 0;
  mode.bank = bp.multiplier_bank();
  a.modes.push_back(mode);
  REQUIRE_FALSE(a.is_multiplier());

  const GridFunction f = random_band_limited(grid, 13, 3.0);
  const GridFunction af = op_apply(a, f);
  const GridFunction sf = op_apply(bp, f);
  Vector want(grid.size());
  const std::size_t eta_index = 2;
  for (std::size_t p = 0; p < grid.size(); ++p)
    want[static_cast<Eigen::Index>(p)] =
        3.0 * grid.irrep_matrix(eta_index, p)(0, 0) * sf.values[static_cast<Eigen::Index>(p)];
  CHECK(rel_err(af.values, want) < 1e-10);
}

TEST_CASE("kernel consistency: spectral application equals quadrature convolution") {
  // su(2) at a small band keeps the pair sum tractable
  {
    const QuadratureGrid grid = haar_grid(GroupId::su2(), 2.0);
    const Symbol bp = builtin_symbol("bessel_potential:-1", grid.group(), 2.0);
    const GridFunction f = random_band_limited(grid, 17, 2.0);
    const GridFunction af = op_apply(bp, f);
    const std::vector<complexd> conv = oracle::brute_convolution(f, bp);
    double err = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p)
      err = std::max(err, std::abs(af.values[static_cast<Eigen::Index>(p)] - conv[p]));
    CHECK(err / af.values.cwiseAbs().maxCoeff() < 1e-9);
  }
  {
    const QuadratureGrid grid = haar_grid(GroupId::torus(1), 8.0);
    const Symbol cas = builtin_symbol("casimir", grid.group(), 8.0);
    const GridFunction f = random_band_limited(grid, 19, 8.0);
    const GridFunction af = op_apply(cas, f);
    const std::vector<complexd> conv = oracle::brute_convolution(f, cas);
    double err = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p)
      err = std::max(err, std::abs(af.values[static_cast<Eigen::Index>(p)] - conv[p]));
    CHECK(err / af.values.cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("schwartz kernel synthesizes the multiplier bank") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 2.0);
  const Symbol bp = builtin_symbol("bessel_potential:-2", grid.group(), 2.0);
  const KernelSlice slice = schwartz_kernel(bp, grid);
  for (std::size_t p = 0; p < grid.size(); p += 7)
    CHECK(std::abs(slice.values.values[static_cast<Eigen::Index>(p)] -
                   oracle::brute_kernel(bp, grid.point(p))) < 1e-10);

  // trivial-only symbol: kernel is the constant 1
  std::vector<Matrix> bank;
  for (const Irrep& xi : bp.irreps)
    bank.push_back(xi.trivial() ? Matrix(Matrix::Identity(1, 1))
                                : Matrix(Matrix::Zero(xi.dim, xi.dim)));
  const Symbol proj = Symbol::multiplier(grid.group(), 2.0, bank);
  const KernelSlice flat = schwartz_kernel(proj, grid);
  for (std::size_t p = 0; p < grid.size(); ++p)
    CHECK(std::abs(flat.values.values[static_cast<Eigen::Index>(p)] - 1.0) < 1e-12);
}

TEST_CASE("frozen symbol reproduces the variable-coefficient action pointwise") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 3.0);
  const Symbol a = builtin_symbol("modulated_bessel:-1", grid.group(), 3.0);
  const GridFunction f = random_band_limited(grid, 23, 3.0);
  const GridFunction af = op_apply(a, f);
  const SpectralCoefficients cf = forward(f, 3.0);
  for (std::size_t p = 0; p < grid.size(); p += 11) {
    // freeze a at x_p and apply the resulting multiplier
    complexd frozen = 0.0;
    for (std::size_t i = 0; i < a.irreps.size(); ++i)
      frozen += static_cast<double>(a.irreps[i].dim) *
                (grid.irrep_matrix(i, p) * a.value_at(grid, p, i) * cf.blocks[i]).trace();
    CHECK(std::abs(af.values[static_cast<Eigen::Index>(p)] - frozen) < 1e-9);
  }
}

TEST_CASE("symbol recovery: multiplier") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 3.0);
  const Symbol bp = builtin_symbol("bessel_potential:-1", grid.group(), 3.0);
  const auto op = [&](const GridFunction& f) { return op_apply(bp, f); };
  const Symbol rec = symbol_of_operator(op, grid, 3.0, 0.0);
  REQUIRE(rec.is_multiplier());
  for (std::size_t i = 0; i < rec.irreps.size(); ++i)
    CHECK((rec.multiplier_bank()[i] - bp.multiplier_bank()[i]).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("symbol recovery: multiplication operator") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 3.0);
  const std::size_t eta_index = 2;  // l = 1
  const auto op = [&](const GridFunction& f) {
    GridFunction g = f;
    for (std::size_t p = 0; p < grid.size(); ++p)
      g.values[static_cast<Eigen::Index>(p)] *= grid.irrep_matrix(eta_index, p)(1, 1);
    return g;
  };
  const Symbol rec = symbol_of_operator(op, grid, 2.0, 1.0);
  CHECK(rec.projection_residual < 1e-8);
  // sigma(x, xi) = g(x) I: check against the defining formula at sample points
  oracle::Rng rng(47);
  for (int t = 0; t < 10; ++t) {
    const std::size_t p = static_cast<std::size_t>(rng.next() * grid.size());
    const complexd g = grid.irrep_matrix(eta_index, p)(1, 1);
    for (std::size_t i = 0; i < rec.irreps.size(); ++i) {
      const Matrix want = g * Matrix::Identity(rec.irreps[i].dim, rec.irreps[i].dim);
      CHECK((rec.value_at(grid, p, i) - want).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("symbol recovery round trip on a variable-coefficient symbol") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 3.0);
  const Symbol a = builtin_symbol("modulated_bessel:-1", grid.group(), 3.0);
  const auto op = [&](const GridFunction& f) { return op_apply(a, f); };
  const Symbol rec = symbol_of_operator(op, grid, 3.0, 1.0);
  for (std::size_t p = 0; p < grid.size(); p += 13)
    for (std::size_t i = 0; i < a.irreps.size(); ++i)
      CHECK((rec.value_at(grid, p, i) - a.value_at(grid, p, i)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("symbol recovery refuses nonlinear maps") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 2.0);
  const auto squared = [&](const GridFunction& f) {
    GridFunction g = f;
    g.values = f.values.cwiseProduct(f.values);
    return g;
  };
  CHECK_THROWS_AS(symbol_of_operator(squared, grid, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("operator application is linear") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 4.0);
  const Symbol a = builtin_symbol("modulated_bessel:-1", grid.group(), 4.0);
  const GridFunction f = random_band_limited(grid, 29, 4.0);
  GridFunction f2 = f;
  f2.values *= complexd(2.0, 0.0);
  CHECK(rel_err(op_apply(a, f2).values, Vector(2.0 * op_apply(a, f).values)) < 1e-12);
}

TEST_CASE("truncation diagnostic reports mass above the symbol band") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 4.0);
  const Symbol bp = builtin_symbol("bessel_potential:-1", grid.group(), 2.0);
  const GridFunction f = random_band_limited(grid, 31, 4.0);
  OpDiagnostics diag;
  op_apply(bp, f, &diag);
  const SpectralCoefficients c = forward(f, 4.0);
  double above = 0.0;
  for (std::size_t i = 0; i < c.irreps.size(); ++i)
    if (c.irreps[i].two_ell > 4)  // l > 2
      above += c.irreps[i].dim * c.blocks[i].squaredNorm();
  CHECK(diag.truncation_estimate == doctest::Approx(std::sqrt(above)).epsilon(1e-10));
}

}  // TEST_SUITE
