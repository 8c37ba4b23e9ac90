#include "liequant/fourier.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

#include "grid_data.hpp"

namespace liequant {

std::size_t SpectralCoefficients::find(const Irrep& xi) const {
  for (std::size_t i = 0; i < irreps.size(); ++i)
    if (irreps[i] == xi) return i;
  return npos;
}

namespace {

void check_grid_function(const GridFunction& f) {
  if (!f.grid.valid()) throw std::invalid_argument("grid function has no grid");
  if (f.size() != f.grid.size()) throw std::invalid_argument("grid function size mismatch");
}

// naive single-irrep projection, used only past the cached-table band
Matrix project_one(const GridFunction& f, const Irrep& xi) {
  const GroupId& group = f.grid.group();
  Matrix acc = Matrix::Zero(xi.dim, xi.dim);
  const auto& w = f.grid.weights();
  for (std::size_t p = 0; p < f.size(); ++p) {
    const Matrix m = irrep_eval(group, xi, f.grid.point(p));
    acc += (w(p) * f.values(p)) * m.adjoint();
  }
  return acc;
}

}  // namespace

SpectralCoefficients forward(const GridFunction& f, double band) {
  check_grid_function(f);
  const detail::GridData& g = f.grid.data();
  SpectralCoefficients out;
  out.group = g.group;
  out.band = band;
  out.irreps = irrep_list(g.group, band);
  out.blocks.resize(out.irreps.size());
  if (band > g.band + 1e-9) {
    std::ostringstream os;
    os << "requested band " << band << " exceeds grid exactness band " << g.band
       << "; coefficients beyond it are quadrature approximations";
    out.truncation_warning = os.str();
  }

  if (g.group.kind == GroupKind::Torus) {
    const int n = g.group.torus_dim;
    Vector wf = f.values.cwiseProduct(g.weights.cast<complexd>());
    for (std::size_t i = 0; i < out.irreps.size(); ++i) {
      const Irrep& xi = out.irreps[i];
      bool cached = true;
      for (int ax = 0; ax < n; ++ax)
        if (std::abs(xi.k[ax]) > g.freq_halfwidth) cached = false;
      if (!cached) {
        out.blocks[i] = project_one(f, xi);
        continue;
      }
      complexd acc(0.0, 0.0);
      for (std::size_t p = 0; p < g.size(); ++p) {
        complexd v = wf(p);
        for (int ax = 0; ax < n; ++ax)
          v *= g.axis_e(g.point_axis_idx(p, ax), xi.k[ax] + g.freq_halfwidth);
        acc += v;
      }
      out.blocks[i] = Matrix::Constant(1, 1, acc);
    }
    return out;
  }

  const int na = g.na(), nb = g.nb(), ng = g.ng();
  const int tmax = g.irreps.empty() ? 0 : g.irreps.back().two_ell;
  // G2[b](u, v) = sum_{a,c} f(b,a,c) e^{+i m_u alpha_a} e^{+i m_v gamma_c}
  std::vector<Matrix> g2(nb);
  for (int b = 0; b < nb; ++b) {
    Eigen::Map<const Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> slab(
        f.values.data() + static_cast<std::size_t>(b) * na * ng, na, ng);
    g2[b].noalias() = g.ea.transpose() * (slab * g.eg);
  }
  for (std::size_t i = 0; i < out.irreps.size(); ++i) {
    const Irrep& xi = out.irreps[i];
    if (xi.two_ell > tmax) {
      out.blocks[i] = project_one(f, xi);
      continue;
    }
    const auto& tab = g.su2[xi.two_ell];
    const int d = xi.dim;
    Matrix acc = Matrix::Zero(d, d);
    for (int b = 0; b < nb; ++b) {
      const double wb = g.beta_w(b) / (static_cast<double>(na) * ng);
      const Eigen::MatrixXd& db = tab.d[b];
      const Matrix& g2b = g2[b];
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) acc(r, c) += wb * db(c, r) * g2b(tab.gidx(c), tab.gidx(r));
    }
    out.blocks[i] = std::move(acc);
  }
  return out;
}

GridFunction inverse(const SpectralCoefficients& c, const QuadratureGrid& grid) {
  if (!grid.valid()) throw std::invalid_argument("inverse: invalid grid");
  if (!(c.group == grid.group())) throw std::invalid_argument("inverse: group mismatch");
  if (c.blocks.size() != c.irreps.size()) throw std::invalid_argument("inverse: malformed coefficients");
  for (std::size_t i = 0; i < c.irreps.size(); ++i)
    if (c.blocks[i].rows() != c.irreps[i].dim || c.blocks[i].cols() != c.irreps[i].dim)
      throw std::invalid_argument("inverse: block shape mismatch for " + c.irreps[i].label());

  const detail::GridData& g = grid.data();
  GridFunction f;
  f.grid = grid;
  f.values = Vector::Zero(g.size());

  if (g.group.kind == GroupKind::Torus) {
    const int n = g.group.torus_dim;
    for (std::size_t i = 0; i < c.irreps.size(); ++i) {
      const Irrep& xi = c.irreps[i];
      const complexd coef = c.blocks[i](0, 0);
      if (coef == complexd(0.0, 0.0)) continue;
      bool cached = true;
      for (int ax = 0; ax < n; ++ax)
        if (std::abs(xi.k[ax]) > g.freq_halfwidth) cached = false;
      for (std::size_t p = 0; p < g.size(); ++p) {
        complexd v = coef;
        if (cached) {
          for (int ax = 0; ax < n; ++ax)
            v *= std::conj(g.axis_e(g.point_axis_idx(p, ax), xi.k[ax] + g.freq_halfwidth));
        } else {
          v *= irrep_eval(g.group, xi, grid.point(p))(0, 0);
        }
        f.values(p) += v;
      }
    }
    f.homogeneous = c.group.homogeneous_space() && homogeneous_pattern(c);
    return f;
  }

  const int na = g.na(), nb = g.nb(), ng = g.ng();
  const int tmax = g.irreps.empty() ? 0 : g.irreps.back().two_ell;
  const int nm = static_cast<int>(g.mgrid.size());
  std::vector<Matrix> h(nb, Matrix::Zero(nm, nm));
  for (std::size_t i = 0; i < c.irreps.size(); ++i) {
    const Irrep& xi = c.irreps[i];
    if (xi.two_ell > tmax) {
      // slow fallback past the table band
      const double dxi = xi.dim;
      for (std::size_t p = 0; p < g.size(); ++p) {
        const Matrix m = irrep_eval(g.group, xi, grid.point(p));
        f.values(p) += dxi * (m.cwiseProduct(c.blocks[i].transpose())).sum();
      }
      continue;
    }
    const auto& tab = g.su2[xi.two_ell];
    const int d = xi.dim;
    const double dxi = xi.dim;
    const Matrix& blk = c.blocks[i];
    for (int b = 0; b < nb; ++b) {
      const Eigen::MatrixXd& db = tab.d[b];
      Matrix& hb = h[b];
      for (int r = 0; r < d; ++r)
        for (int s = 0; s < d; ++s) hb(tab.gidx(r), tab.gidx(s)) += dxi * db(r, s) * blk(s, r);
    }
  }
  const Matrix ea_conj = g.ea.conjugate();
  const Matrix eg_conj_t = g.eg.conjugate().transpose();
  for (int b = 0; b < nb; ++b) {
    Eigen::Map<Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> slab(
        f.values.data() + static_cast<std::size_t>(b) * na * ng, na, ng);
    slab += ea_conj * (h[b] * eg_conj_t);
  }
  f.homogeneous = c.group.homogeneous_space() && homogeneous_pattern(c);
  return f;
}

double lp_norm(const GridFunction& f, double p) {
  check_grid_function(f);
  if (std::isinf(p)) return f.values.cwiseAbs().maxCoeff();
  if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1 or infinity");
  const double scale = f.values.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  const auto& w = f.grid.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += w(i) * std::pow(std::abs(f.values(i)) / scale, p);
  return scale * std::pow(acc, 1.0 / p);
}

double plancherel_norm(const SpectralCoefficients& c) {
  double acc = 0.0;
  for (std::size_t i = 0; i < c.irreps.size(); ++i)
    acc += c.irreps[i].dim * c.blocks[i].squaredNorm();
  return std::sqrt(acc);
}

namespace {

struct GaussianStream {
  std::uint64_t state;
  explicit GaussianStream(std::uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  // splitmix64; plenty for test data and stable across platforms
  double uniform() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z = z ^ (z >> 31);
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }
  complexd gaussian() {
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1 + 1e-300));
    return complexd(r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2));
  }
};

}  // namespace

GridFunction random_band_limited(const QuadratureGrid& grid, std::uint64_t seed, double band,
                                 bool homogeneous) {
  if (!grid.valid()) throw std::invalid_argument("random_band_limited: invalid grid");
  const GroupId& group = grid.group();
  const bool restrict_blocks = homogeneous && group.homogeneous_space();
  GaussianStream rng(seed);
  SpectralCoefficients c;
  c.group = group;
  c.band = band;
  c.irreps = irrep_list(group, band);
  c.blocks.reserve(c.irreps.size());
  for (const Irrep& xi : c.irreps) {
    Matrix blk = Matrix::Zero(xi.dim, xi.dim);
    const int r = restrict_blocks ? xi.invariant_rank : xi.dim;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) blk(i, j) = rng.gaussian();
    c.blocks.push_back(std::move(blk));
  }
  GridFunction f = inverse(c, grid);
  f.homogeneous = restrict_blocks;
  return f;
}

bool homogeneous_pattern(const SpectralCoefficients& c, double tol) {
  double scale = 0.0;
  for (const Matrix& b : c.blocks) scale = std::max(scale, b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
  if (scale == 0.0) return true;
  for (std::size_t i = 0; i < c.irreps.size(); ++i) {
    const Irrep& xi = c.irreps[i];
    const int r = xi.invariant_rank;
    for (int a = 0; a < xi.dim; ++a)
      for (int b = 0; b < xi.dim; ++b) {
        if (a < r && b < r) continue;
        if (std::abs(c.blocks[i](a, b)) > tol * scale) return false;
      }
  }
  return true;
}

double lp_refinement_delta(const SpectralCoefficients& c, const QuadratureGrid& grid, double p) {
  const QuadratureGrid refined = haar_grid(grid.group(), grid.band(), grid.oversample() * 2.0);
  const double base = lp_norm(inverse(c, grid), p);
  const double fine = lp_norm(inverse(c, refined), p);
  return std::abs(base - fine);
}

}  // namespace liequant
