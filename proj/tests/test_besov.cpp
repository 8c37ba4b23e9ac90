#include <cmath>
#include <complex>
#include <limits>

#include <liequant/besov.hpp>

#include "doctest.h"
#include "oracles.hpp"

using namespace liequant;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

GridFunction atom(const QuadratureGrid& grid, std::size_t which, int row, int col) {
  GridFunction f;
  f.grid = grid;
  f.values = Vector(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p)
    f.values[static_cast<Eigen::Index>(p)] = grid.irrep_matrix(which, p)(row, col);
  return f;
}

}  // namespace

TEST_SUITE("besov") {

TEST_CASE("block index follows the angular weight") {
  const auto irreps = irrep_list(GroupId::su2(), 8.0);
  CHECK(dyadic_block_of(irreps[0]) == 0);  // <xi> = 1
  for (const Irrep& xi : irreps) {
    const int m = dyadic_block_of(xi);
    CHECK(std::pow(2.0, m) <= xi.weight);
    CHECK(xi.weight < std::pow(2.0, m + 1));
  }
  CHECK(dyadic_block_count(GroupId::su2(), 8.0) == 4);  // <8> ~ 8.54 lands in block 3
}

TEST_CASE("single-block atoms have closed-form norms") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 8.0);
  // l = 0, 2, 4 live in blocks 0, 1, 2
  const std::vector<std::pair<std::size_t, int>> atoms = {{0, 0}, {4, 1}, {8, 2}};
  for (const auto& [which, m] : atoms) {
    const GridFunction f = atom(grid, which, 0, 0);
    CHECK(dyadic_block_of(grid.irreps()[which]) == m);
    for (double r : {-1.0, 0.5, 2.0}) {
      for (double p : {1.0, 2.0, kInf}) {
        const double want = std::pow(2.0, m * r) * lp_norm(f, p);
        for (double q : {1.0, 2.0, kInf}) {
          const double got = besov_norm(f, r, p, q).value;
          CHECK(std::abs(got - want) / want < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("besov profile exposes the block decomposition") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 8.0);
  const GridFunction f = random_band_limited(grid, 3, 8.0);
  const BesovResult res = besov_norm(f, 0.5, 2.0, 2.0);
  REQUIRE(res.profile.blocks.size() == 4);
  for (std::size_t i = 0; i < res.profile.blocks.size(); ++i) {
    const GridFunction pf = dyadic_project(f, res.profile.blocks[i]);
    CHECK(std::abs(res.profile.block_norms[i] - lp_norm(pf, 2.0)) < 1e-12);
    CHECK(res.profile.weighted_terms[i] ==
          doctest::Approx(std::pow(2.0, 0.5 * res.profile.blocks[i]) * res.profile.block_norms[i])
              .epsilon(1e-12));
  }
}

TEST_CASE("B^0_{2,2} equals L^2") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 8.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const GridFunction f = random_band_limited(grid, seed, 8.0);
    const double b = besov_norm(f, 0.0, 2.0, 2.0).value;
    const double l2 = lp_norm(f, 2.0);
    CHECK(std::abs(b - l2) / l2 < 1e-10);
  }
}

TEST_CASE("large q approaches the sup aggregation") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 8.0);
  // mass in three separate blocks
  GridFunction f = atom(grid, 0, 0, 0);
  f.values += 0.8 * atom(grid, 4, 0, 0).values + 1.3 * atom(grid, 8, 1, 2).values;
  const double big = besov_norm(f, 0.5, 2.0, 1024.0).value;
  const double sup = besov_norm(f, 0.5, 2.0, kInf).value;
  CHECK(std::abs(big - sup) / sup < 0.01);
  CHECK(big >= sup - 1e-12);
}

TEST_CASE("aggregation is monotone in q") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 8.0);
  const std::vector<double> qs = {1.0, 1.5, 2.0, 4.0, kInf};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const GridFunction f = random_band_limited(grid, seed, 8.0);
    double prev = std::numeric_limits<double>::max();
    for (double q : qs) {
      const double v = besov_norm(f, 0.3, 2.0, q).value;
      CHECK(v <= prev * (1.0 + 1e-12));
      prev = v;
    }
  }
}

TEST_CASE("norm scales linearly") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 6.0);
  const GridFunction f = random_band_limited(grid, 77, 6.0);
  GridFunction g = f;
  g.values *= complexd(-2.5, 1.0);
  const double bf = besov_norm(f, 1.0, 3.0, 2.0).value;
  const double bg = besov_norm(g, 1.0, 3.0, 2.0).value;
  CHECK(std::abs(bg - std::abs(complexd(-2.5, 1.0)) * bf) / bg < 1e-12);
}

TEST_CASE("blocks beyond the band are refused") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 4.0);
  const GridFunction f = random_band_limited(grid, 1, 4.0);
  const int count = dyadic_block_count(grid.group(), 4.0);
  CHECK_THROWS_AS(dyadic_project(f, count), std::invalid_argument);
  CHECK_THROWS_AS(dyadic_project(f, -1), std::invalid_argument);
}

TEST_CASE("non-type-one content is annihilated on the sphere") {
  const GroupId s2 = GroupId::sphere();
  const QuadratureGrid grid = haar_grid(s2, 4.0);
  SpectralCoefficients c;
  c.group = s2;
  c.band = 4.0;
  c.irreps = irrep_list(s2, 4.0);
  for (const Irrep& xi : c.irreps) {
    Matrix blk = Matrix::Zero(xi.dim, xi.dim);
    if (!xi.type_one) blk(0, 0) = 1.0;  // inject mass where no K-fixed vector lives
    c.blocks.push_back(blk);
  }
  const GridFunction f = inverse(c, grid);
  CHECK(lp_norm(f, 2.0) > 0.1);  // the injection is not the zero function on G
  const int count = dyadic_block_count(s2, 4.0);
  for (int m = 0; m < count; ++m)
    CHECK(lp_norm(dyadic_project(f, m), 2.0) < 1e-12);
  CHECK(besov_norm(f, 0.5, 2.0, 2.0).value < 1e-12);
}

TEST_CASE("bessel scale of identity and inversion") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 6.0);
  const GridFunction f = random_band_limited(grid, 8, 6.0);
  CHECK((lambda_apply(f, 0.0).values - f.values).cwiseAbs().maxCoeff() /
            f.values.cwiseAbs().maxCoeff() <
        1e-10);
  const GridFunction back = lambda_apply(lambda_apply(f, 1.3), -1.3);
  CHECK((back.values - f.values).cwiseAbs().maxCoeff() / f.values.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("sobolev norm of a matrix coefficient") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 8.0);
  const std::size_t which = 6;  // l = 3
  const Irrep& xi = grid.irreps()[which];
  const GridFunction f = atom(grid, which, 1, 0);
  for (double s : {-2.0, -0.5, 1.0}) {
    for (double p : {1.0, 2.0, kInf}) {
      const double want = std::pow(1.0 + xi.casimir, s / 2.0) * lp_norm(f, p);
      CHECK(std::abs(sobolev_norm(f, s, p) - want) / want < 1e-12);
    }
  }
}

TEST_CASE("sobolev at p = 2 is the weighted plancherel sum") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 8.0);
  const GridFunction f = random_band_limited(grid, 15, 8.0);
  const SpectralCoefficients c = forward(f, 8.0);
  for (double s : {-1.0, 0.7}) {
    double acc = 0.0;
    for (std::size_t i = 0; i < c.irreps.size(); ++i)
      acc += std::pow(c.irreps[i].weight, 2.0 * s) * c.irreps[i].dim * c.blocks[i].squaredNorm();
    const double want = std::sqrt(acc);
    CHECK(std::abs(sobolev_norm(f, s, 2.0) - want) / want < 1e-10);
  }
}

TEST_CASE("besov and sobolev are equivalent at p = q = 2") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 8.0);
  for (std::uint64_t seed : {2ull, 4ull, 6ull}) {
    const GridFunction f = random_band_limited(grid, seed, 8.0);
    for (double s : {-1.0, 1.0, 1.5}) {
      const double b = besov_norm(f, s, 2.0, 2.0).value;
      const double h = sobolev_norm(f, s, 2.0);
      const double bound = std::pow(2.0, std::abs(s));
      CHECK(b <= h * bound * (1.0 + 1e-9));
      CHECK(b >= h / bound * (1.0 - 1e-9));
    }
  }
}

TEST_CASE("torus norms agree with a classical series implementation") {
  const GroupId t1 = GroupId::torus(1);
  const QuadratureGrid grid = haar_grid(t1, 16.0);
  const GridFunction f = random_band_limited(grid, 101, 16.0);
  std::vector<complexd> samples(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p)
    samples[p] = f.values[static_cast<Eigen::Index>(p)];
  const oracle::ClassicalTorus classical(samples, 16);

  const std::vector<std::array<double, 3>> besov_cases = {
      {0.5, 2.0, 2.0}, {-1.0, 3.0, 1.5}, {1.0, kInf, kInf}, {0.0, 1.0, 2.0}};
  for (const auto& [r, p, q] : besov_cases) {
    const double lib = besov_norm(f, r, p, q).value;
    const double ref = classical.besov(r, p, q);
    CHECK(std::abs(lib - ref) / ref < 1e-10);
  }
  const std::vector<std::pair<double, double>> sobolev_cases = {{-1.0, 2.0}, {0.7, 3.0}, {1.2, kInf}};
  for (const auto& [s, p] : sobolev_cases) {
    const double lib = sobolev_norm(f, s, p);
    const double ref = classical.sobolev(s, p);
    CHECK(std::abs(lib - ref) / ref < 1e-10);
  }
}

}  // TEST_SUITE
