#include "liequant/quantization.hpp"

#include <cmath>
#include <stdexcept>

#include "grid_data.hpp"

namespace liequant {

namespace {

// d_eta * eta(.)_{row,col} sampled on the grid
Vector mode_values(const SpatialMode& mode, const QuadratureGrid& grid) {
  const std::size_t n = grid.size();
  Vector out(n);
  const double scale = mode.eta.dim;
  std::size_t which = SpectralCoefficients::npos;
  const auto& girreps = grid.irreps();
  for (std::size_t i = 0; i < girreps.size(); ++i)
    if (girreps[i] == mode.eta) {
      which = i;
      break;
    }
  for (std::size_t p = 0; p < n; ++p) {
    const Matrix m = which != SpectralCoefficients::npos
                         ? grid.irrep_matrix(which, p)
                         : irrep_eval(grid.group(), mode.eta, grid.point(p));
    out(p) = scale * m(mode.row, mode.col);
  }
  return out;
}

}  // namespace

bool Symbol::is_multiplier() const {
  return modes.size() == 1 && modes[0].eta.trivial() && modes[0].row == 0 && modes[0].col == 0;
}

const std::vector<Matrix>& Symbol::multiplier_bank() const {
  if (!is_multiplier()) throw std::logic_error("symbol is not a multiplier");
  return modes[0].bank;
}

Symbol Symbol::multiplier(const GroupId& group, double band, std::vector<Matrix> bank) {
  Symbol a;
  a.group = group;
  a.band = band;
  a.spatial_band = 0.0;
  a.irreps = irrep_list(group, band);
  if (bank.size() != a.irreps.size())
    throw std::invalid_argument("multiplier bank size does not match the dual up to band");
  for (std::size_t i = 0; i < bank.size(); ++i)
    if (bank[i].rows() != a.irreps[i].dim || bank[i].cols() != a.irreps[i].dim)
      throw std::invalid_argument("multiplier block shape mismatch for " + a.irreps[i].label());
  SpatialMode mode;
  mode.eta = Irrep{};
  if (group.kind == GroupKind::Torus) mode.eta.k.assign(group.torus_dim, 0);
  mode.eta.weight = 1.0;
  mode.bank = std::move(bank);
  a.modes.push_back(std::move(mode));
  return a;
}

std::size_t Symbol::find(const Irrep& xi) const {
  for (std::size_t i = 0; i < irreps.size(); ++i)
    if (irreps[i] == xi) return i;
  return SpectralCoefficients::npos;
}

Matrix Symbol::value_at(const QuadratureGrid& grid, std::size_t point, std::size_t which) const {
  const Irrep& xi = irreps.at(which);
  Matrix acc = Matrix::Zero(xi.dim, xi.dim);
  const auto& girreps = grid.irreps();
  for (const SpatialMode& mode : modes) {
    complexd mv;
    std::size_t gi = SpectralCoefficients::npos;
    for (std::size_t i = 0; i < girreps.size(); ++i)
      if (girreps[i] == mode.eta) {
        gi = i;
        break;
      }
    const Matrix em = gi != SpectralCoefficients::npos
                          ? grid.irrep_matrix(gi, point)
                          : irrep_eval(grid.group(), mode.eta, grid.point(point));
    mv = static_cast<double>(mode.eta.dim) * em(mode.row, mode.col);
    acc += mv * mode.bank[which];
  }
  return acc;
}

Matrix Symbol::value_at(const Point& x, std::size_t which) const {
  const Irrep& xi = irreps.at(which);
  Matrix acc = Matrix::Zero(xi.dim, xi.dim);
  for (const SpatialMode& mode : modes) {
    const Matrix em = irrep_eval(group, mode.eta, x);
    acc += (static_cast<double>(mode.eta.dim) * em(mode.row, mode.col)) * mode.bank[which];
  }
  return acc;
}

GridFunction op_apply(const Symbol& a, const GridFunction& f, OpDiagnostics* diag) {
  if (!f.grid.valid()) throw std::invalid_argument("op_apply: invalid grid");
  if (!(a.group == f.grid.group())) throw std::invalid_argument("op_apply: group mismatch");
  if (a.modes.empty()) throw std::invalid_argument("op_apply: symbol has no modes");
  for (const SpatialMode& mode : a.modes)
    if (mode.bank.size() != a.irreps.size())
      throw std::invalid_argument("op_apply: mode bank misaligned with symbol irreps");

  const double fband = f.grid.band();
  const double used = std::min(a.band, fband);
  const SpectralCoefficients fhat = forward(f, fband);
  if (diag) {
    double tail = 0.0;
    for (std::size_t i = 0; i < fhat.irreps.size(); ++i)
      if (detail::irrep_band(a.group, fhat.irreps[i]) > used + 1e-9)
        tail += fhat.irreps[i].dim * fhat.blocks[i].squaredNorm();
    diag->truncation_estimate = std::sqrt(tail);
  }

  SpectralCoefficients prod;
  prod.group = a.group;
  prod.band = used;
  prod.irreps = irrep_list(a.group, used);
  prod.blocks.resize(prod.irreps.size());

  GridFunction out;
  out.grid = f.grid;
  out.values = Vector::Zero(f.size());
  for (const SpatialMode& mode : a.modes) {
    for (std::size_t i = 0; i < prod.irreps.size(); ++i) {
      const std::size_t ai = a.find(prod.irreps[i]);
      const std::size_t fi = fhat.find(prod.irreps[i]);
      if (ai == SpectralCoefficients::npos || fi == SpectralCoefficients::npos)
        throw std::logic_error("op_apply: irrep alignment failure");
      prod.blocks[i] = mode.bank[ai] * fhat.blocks[fi];
    }
    GridFunction part = inverse(prod, f.grid);
    if (a.is_multiplier()) {
      out.values = std::move(part.values);
      out.homogeneous = part.homogeneous;
      return out;
    }
    out.values += mode_values(mode, f.grid).cwiseProduct(part.values);
  }
  out.homogeneous = false;
  return out;
}

KernelSlice schwartz_kernel(const Symbol& a, const QuadratureGrid& grid, const Point& z) {
  SpectralCoefficients c;
  c.group = a.group;
  c.band = a.band;
  c.irreps = a.irreps;
  c.blocks.resize(a.irreps.size());
  for (std::size_t i = 0; i < a.irreps.size(); ++i) c.blocks[i] = a.value_at(z, i);
  KernelSlice slice;
  slice.z = z;
  slice.values = inverse(c, grid);
  return slice;
}

KernelSlice schwartz_kernel(const Symbol& a, const QuadratureGrid& grid) {
  if (!a.is_multiplier()) throw std::invalid_argument("z-free kernel requires a multiplier");
  return schwartz_kernel(a, grid, group_identity(a.group));
}

Symbol symbol_of_operator(const std::function<GridFunction(const GridFunction&)>& op,
                          const QuadratureGrid& grid, double band, double spatial_band) {
  // linearity spot check
  {
    const GridFunction f1 = random_band_limited(grid, 7001, grid.band());
    const GridFunction f2 = random_band_limited(grid, 7002, grid.band());
    const complexd z(0.37, 0.21);
    GridFunction mix = f1;
    mix.values = z * f1.values + f2.values;
    const GridFunction lhs = op(mix);
    const GridFunction r1 = op(f1);
    const GridFunction r2 = op(f2);
    const double scale = r1.values.cwiseAbs().maxCoeff() + r2.values.cwiseAbs().maxCoeff() + 1.0;
    const double err = (lhs.values - z * r1.values - r2.values).cwiseAbs().maxCoeff();
    if (!(err <= 1e-8 * scale))
      throw std::invalid_argument("symbol_of_operator: operator failed the linearity check");
  }

  const GroupId& group = grid.group();
  const std::vector<Irrep> irreps = irrep_list(group, band);
  const std::size_t npts = grid.size();
  const auto& girreps = grid.irreps();

  Symbol a;
  a.group = group;
  a.band = band;
  a.spatial_band = spatial_band;
  a.irreps = irreps;

  // mode scaffold over the spatial band
  const std::vector<Irrep> etas = irrep_list(group, spatial_band);
  for (const Irrep& eta : etas)
    for (int u = 0; u < eta.dim; ++u)
      for (int v = 0; v < eta.dim; ++v) {
        SpatialMode mode;
        mode.eta = eta;
        mode.row = u;
        mode.col = v;
        mode.bank.assign(irreps.size(), Matrix());
        for (std::size_t i = 0; i < irreps.size(); ++i)
          mode.bank[i] = Matrix::Zero(irreps[i].dim, irreps[i].dim);
        a.modes.push_back(std::move(mode));
      }

  double residual = 0.0;
  for (std::size_t wi = 0; wi < irreps.size(); ++wi) {
    const Irrep& xi = irreps[wi];
    const int d = xi.dim;
    std::size_t gi = SpectralCoefficients::npos;
    for (std::size_t i = 0; i < girreps.size(); ++i)
      if (girreps[i] == xi) {
        gi = i;
        break;
      }
    if (gi == SpectralCoefficients::npos)
      throw std::invalid_argument("symbol_of_operator: band exceeds the probe grid band");

    // images of all matrix-coefficient functions of xi
    std::vector<Vector> image(static_cast<std::size_t>(d) * d);
    std::vector<Matrix> xivals(npts);
    for (std::size_t p = 0; p < npts; ++p) xivals[p] = grid.irrep_matrix(gi, p);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        GridFunction e;
        e.grid = grid;
        e.values = Vector(npts);
        for (std::size_t p = 0; p < npts; ++p) e.values(p) = xivals[p](i, j);
        image[static_cast<std::size_t>(i) * d + j] = op(e).values;
      }

    // sigma(x, xi) = xi(x)^* (A xi)(x), per entry a grid function
    for (int r = 0; r < d; ++r)
      for (int s = 0; s < d; ++s) {
        GridFunction sig;
        sig.grid = grid;
        sig.values = Vector::Zero(npts);
        for (int i = 0; i < d; ++i) {
          const Vector& him = image[static_cast<std::size_t>(i) * d + s];
          for (std::size_t p = 0; p < npts; ++p)
            sig.values(p) += std::conj(xivals[p](i, r)) * him(p);
        }
        const SpectralCoefficients ce = forward(sig, spatial_band);
        std::size_t mode_idx = 0;
        for (std::size_t ei = 0; ei < etas.size(); ++ei)
          for (int u = 0; u < etas[ei].dim; ++u)
            for (int v = 0; v < etas[ei].dim; ++v) {
              a.modes[mode_idx].bank[wi](r, s) = ce.blocks[ei](v, u);
              ++mode_idx;
            }
        // re-expansion residual on the probe grid
        const GridFunction back = inverse(ce, grid);
        residual = std::max(residual, (back.values - sig.values).cwiseAbs().maxCoeff());
      }
  }
  a.projection_residual = residual;

  // prune modes that vanished, keeping the trivial one
  double scale = 0.0;
  for (const SpatialMode& m : a.modes)
    for (const Matrix& b : m.bank) scale = std::max(scale, b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
  std::vector<SpatialMode> kept;
  for (SpatialMode& m : a.modes) {
    double mx = 0.0;
    for (const Matrix& b : m.bank) mx = std::max(mx, b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
    if (m.eta.trivial() || mx > 1e-13 * scale) kept.push_back(std::move(m));
  }
  a.modes = std::move(kept);
  if (a.modes.size() == 1) a.spatial_band = 0.0;
  return a;
}

}  // namespace liequant
