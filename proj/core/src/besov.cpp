#include "liequant/besov.hpp"

#include <cmath>
#include <stdexcept>

#include "liequant/symbol_calculus.hpp"

namespace liequant {

int dyadic_block_of(const Irrep& xi) { return std::ilogb(xi.weight); }

int dyadic_block_count(const GroupId& group, double band) {
  const std::vector<Irrep> irreps = irrep_list(group, band);
  int top = 0;
  for (const Irrep& xi : irreps) top = std::max(top, dyadic_block_of(xi));
  return top + 1;
}

SpectralCoefficients dyadic_restrict(const SpectralCoefficients& c, int m) {
  const int count = dyadic_block_count(c.group, c.band);
  if (m < 0 || m >= count)
    throw std::invalid_argument("dyadic block " + std::to_string(m) +
                                " lies entirely beyond the band");
  SpectralCoefficients out;
  out.group = c.group;
  out.band = c.band;
  out.irreps = c.irreps;
  out.blocks.resize(c.blocks.size());
  for (std::size_t i = 0; i < c.irreps.size(); ++i) {
    const Irrep& xi = c.irreps[i];
    if (dyadic_block_of(xi) != m) {
      out.blocks[i] = Matrix::Zero(xi.dim, xi.dim);
      continue;
    }
    if (c.group.homogeneous_space()) {
      Matrix blk = Matrix::Zero(xi.dim, xi.dim);
      const int r = xi.invariant_rank;
      blk.topLeftCorner(r, r) = c.blocks[i].topLeftCorner(r, r);
      out.blocks[i] = std::move(blk);
    } else {
      out.blocks[i] = c.blocks[i];
    }
  }
  return out;
}

GridFunction dyadic_project(const GridFunction& f, int m) {
  const SpectralCoefficients c = forward(f, f.grid.band());
  return inverse(dyadic_restrict(c, m), f.grid);
}

namespace {

// stable l^q aggregation, sup for q = inf
double lq_aggregate(const std::vector<double>& terms, double q) {
  double mx = 0.0;
  for (double t : terms) mx = std::max(mx, t);
  if (mx == 0.0) return 0.0;
  if (std::isinf(q)) return mx;
  double acc = 0.0;
  for (double t : terms) acc += std::pow(t / mx, q);
  return mx * std::pow(acc, 1.0 / q);
}

}  // namespace

BesovResult besov_norm(const GridFunction& f, double r, double p, double q) {
  if (!f.grid.valid()) throw std::invalid_argument("besov_norm: invalid grid");
  if (!(p >= 1.0)) throw std::invalid_argument("besov_norm: p must be >= 1 or infinity");
  if (!(q > 0.0)) throw std::invalid_argument("besov_norm: q must be positive");
  const double band = f.grid.band();
  const SpectralCoefficients c = forward(f, band);
  const int count = dyadic_block_count(f.grid.group(), band);

  BesovResult out;
  out.profile.r = r;
  out.profile.p = p;
  out.profile.q = q;
  out.profile.truncation_index = count - 1;
  for (int m = 0; m < count; ++m) {
    const SpectralCoefficients cm = dyadic_restrict(c, m);
    double norm;
    if (p == 2.0) {
      norm = plancherel_norm(cm);
    } else {
      norm = lp_norm(inverse(cm, f.grid), p);
    }
    out.profile.blocks.push_back(m);
    out.profile.block_norms.push_back(norm);
    out.profile.weighted_terms.push_back(std::exp2(m * r) * norm);
  }
  out.value = lq_aggregate(out.profile.weighted_terms, q);
  return out;
}

GridFunction lambda_apply(const GridFunction& f, double s) {
  char spec[64];
  std::snprintf(spec, sizeof spec, "bessel_potential:%.17g", s);
  const Symbol a = builtin_symbol(spec, f.grid.group(), f.grid.band());
  return op_apply(a, f);
}

double sobolev_norm(const GridFunction& f, double s, double p) {
  return lp_norm(lambda_apply(f, s), p);
}

}  // namespace liequant
