#include "liequant/group.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "grid_data.hpp"

namespace liequant {

GroupId GroupId::torus(int n) {
  if (n < 1 || n > 8) throw std::invalid_argument("torus dimension out of range");
  GroupId g;
  g.kind = GroupKind::Torus;
  g.torus_dim = n;
  return g;
}

GroupId GroupId::su2() {
  GroupId g;
  g.kind = GroupKind::SU2;
  g.torus_dim = 0;
  return g;
}

GroupId GroupId::sphere() {
  GroupId g = su2();
  g.subgroup = SubgroupKind::DiagonalTorus;
  return g;
}

int GroupId::dim() const { return kind == GroupKind::Torus ? torus_dim : 3; }

int GroupId::manifold_dim() const {
  if (subgroup == SubgroupKind::DiagonalTorus) return 2;
  return dim();
}

std::string GroupId::name() const {
  if (kind == GroupKind::Torus) return "torus" + std::to_string(torus_dim);
  return subgroup == SubgroupKind::DiagonalTorus ? "s2" : "su2";
}

GroupId parse_group(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "su2" || s == "su(2)") return GroupId::su2();
  if (s == "s2" || s == "sphere") return GroupId::sphere();
  if (s.rfind("torus", 0) == 0) {
    const std::string rest = s.substr(5);
    if (rest.empty()) return GroupId::torus(1);
    return GroupId::torus(std::stoi(rest));
  }
  if (s.rfind("t", 0) == 0 && s.size() == 2 && std::isdigit(static_cast<unsigned char>(s[1])))
    return GroupId::torus(s[1] - '0');
  throw std::invalid_argument("unknown group name: " + name);
}

bool Irrep::trivial() const { return two_ell == 0 && std::all_of(k.begin(), k.end(), [](int v) { return v == 0; }); }

std::string Irrep::label() const {
  std::ostringstream os;
  if (k.empty()) {
    os << "l=" << (two_ell / 2);
    if (two_ell % 2) os << ".5";
  } else {
    os << "k=";
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (i) os << ",";
      os << k[i];
    }
  }
  return os.str();
}

namespace detail {

Irrep make_torus_irrep(const std::vector<int>& k) {
  Irrep xi;
  xi.k = k;
  xi.dim = 1;
  double s = 0.0;
  for (int v : k) s += static_cast<double>(v) * v;
  xi.casimir = 4.0 * M_PI * M_PI * s;
  xi.weight = std::sqrt(1.0 + xi.casimir);
  xi.type_one = true;
  xi.invariant_rank = 1;
  return xi;
}

Irrep make_su2_irrep(const GroupId& group, int two_ell) {
  Irrep xi;
  xi.two_ell = two_ell;
  xi.dim = two_ell + 1;
  const double l = two_ell / 2.0;
  xi.casimir = l * (l + 1.0);
  xi.weight = std::sqrt(1.0 + xi.casimir);
  if (group.subgroup == SubgroupKind::DiagonalTorus) {
    xi.type_one = (two_ell % 2 == 0);
    xi.invariant_rank = xi.type_one ? 1 : 0;
  } else {
    xi.type_one = true;
    xi.invariant_rank = xi.dim;
  }
  return xi;
}

}  // namespace detail

namespace {

void enumerate_freqs(int n, int bound, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == n) {
    out.push_back(cur);
    return;
  }
  for (int v = -bound; v <= bound; ++v) {
    cur.push_back(v);
    enumerate_freqs(n, bound, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Irrep> irrep_list(const GroupId& group, double band) {
  if (band < 0) throw std::invalid_argument("band must be nonnegative");
  std::vector<Irrep> out;
  if (group.kind == GroupKind::Torus) {
    const int bound = static_cast<int>(std::floor(band + 1e-9));
    std::vector<std::vector<int>> freqs;
    std::vector<int> cur;
    enumerate_freqs(group.torus_dim, bound, cur, freqs);
    std::sort(freqs.begin(), freqs.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
      long long sa = 0, sb = 0;
      for (int v : a) sa += static_cast<long long>(v) * v;
      for (int v : b) sb += static_cast<long long>(v) * v;
      if (sa != sb) return sa < sb;
      return a < b;
    });
    out.reserve(freqs.size());
    for (const auto& k : freqs) out.push_back(detail::make_torus_irrep(k));
  } else {
    const int tmax = static_cast<int>(std::floor(2.0 * band + 1e-9));
    out.reserve(tmax + 1);
    for (int t = 0; t <= tmax; ++t) out.push_back(detail::make_su2_irrep(group, t));
  }
  return out;
}

Matrix irrep_eval(const GroupId& group, const Irrep& irrep, const Point& x) {
  if (group.kind == GroupKind::Torus) {
    if (static_cast<int>(irrep.k.size()) != group.torus_dim)
      throw std::invalid_argument("irrep/group mismatch");
    double phase = 0.0;
    for (int j = 0; j < group.torus_dim; ++j) phase += irrep.k[j] * x(j);
    Matrix m(1, 1);
    m(0, 0) = std::exp(complexd(0.0, 2.0 * M_PI * phase));
    return m;
  }
  const int t = irrep.two_ell;
  const int d = t + 1;
  const double l = t / 2.0;
  const Eigen::MatrixXd db = detail::wigner_d(t, x(1));
  const auto perm = detail::basis_order(group, t);
  Matrix m(d, d);
  const complexd I(0.0, 1.0);
  for (int i = 0; i < d; ++i) {
    const double mi = l - perm[i];
    const complexd pa = std::exp(-I * mi * x(0));
    for (int j = 0; j < d; ++j) {
      const double mj = l - perm[j];
      m(i, j) = pa * db(perm[i], perm[j]) * std::exp(-I * mj * x(2));
    }
  }
  return m;
}

QuadratureGrid::QuadratureGrid(std::shared_ptr<const detail::GridData> data) : data_(std::move(data)) {}

const GroupId& QuadratureGrid::group() const { return data_->group; }
double QuadratureGrid::band() const { return data_->band; }
double QuadratureGrid::oversample() const { return data_->oversample; }
std::size_t QuadratureGrid::size() const { return data_->size(); }
const Eigen::VectorXd& QuadratureGrid::weights() const { return data_->weights; }
const std::vector<Irrep>& QuadratureGrid::irreps() const { return data_->irreps; }

Point QuadratureGrid::point(std::size_t i) const { return data_->points.row(i).transpose(); }

Matrix QuadratureGrid::irrep_matrix(std::size_t which, std::size_t p) const {
  const detail::GridData& g = *data_;
  const Irrep& xi = g.irreps.at(which);
  if (g.group.kind == GroupKind::Torus) {
    complexd v(1.0, 0.0);
    for (int ax = 0; ax < g.group.torus_dim; ++ax) {
      const int ki = xi.k[ax] + g.freq_halfwidth;
      v *= std::conj(g.axis_e(g.point_axis_idx(p, ax), ki));
    }
    Matrix m(1, 1);
    m(0, 0) = v;
    return m;
  }
  const auto& tab = g.su2[which];
  const int d = xi.dim;
  const int ng = g.ng(), na = g.na();
  const int c = static_cast<int>(p % ng);
  const int a = static_cast<int>((p / ng) % na);
  const int b = static_cast<int>(p / (static_cast<std::size_t>(na) * ng));
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    const complexd pa = std::conj(g.ea(a, tab.gidx(i)));  // e^{-i m alpha}
    for (int j = 0; j < d; ++j)
      m(i, j) = pa * tab.d[b](i, j) * std::conj(g.eg(c, tab.gidx(j)));
  }
  return m;
}

QuadratureGrid haar_grid(const GroupId& group, double band, double oversample) {
  if (band < 0) throw std::invalid_argument("band must be nonnegative");
  if (oversample < 1.0) throw std::invalid_argument("oversample must be >= 1");
  auto gd = std::make_shared<detail::GridData>();
  gd->group = group;
  gd->band = band;
  gd->oversample = oversample;
  gd->irreps = irrep_list(group, band);

  if (group.kind == GroupKind::Torus) {
    const int n = group.torus_dim;
    const int nodes = static_cast<int>(std::ceil((4.0 * band + 2.0) * oversample - 1e-9));
    const int bound = static_cast<int>(std::floor(band + 1e-9));
    std::size_t total = 1;
    for (int ax = 0; ax < n; ++ax) total *= static_cast<std::size_t>(nodes);
    gd->axis_nodes = nodes;
    gd->freq_halfwidth = bound;
    gd->points.resize(total, n);
    gd->weights = Eigen::VectorXd::Constant(total, 1.0 / static_cast<double>(total));
    gd->point_axis_idx.resize(total, n);
    for (std::size_t p = 0; p < total; ++p) {
      std::size_t rem = p;
      for (int ax = n - 1; ax >= 0; --ax) {
        const int idx = static_cast<int>(rem % nodes);
        rem /= nodes;
        gd->point_axis_idx(p, ax) = idx;
        gd->points(p, ax) = static_cast<double>(idx) / nodes;
      }
    }
    gd->axis_e.resize(nodes, 2 * bound + 1);
    const complexd I(0.0, 1.0);
    for (int a = 0; a < nodes; ++a)
      for (int f = -bound; f <= bound; ++f)
        gd->axis_e(a, f + bound) = std::exp(-2.0 * M_PI * I * (static_cast<double>(f) * a / nodes));
    return QuadratureGrid(gd);
  }

  const int na = static_cast<int>(std::ceil((4.0 * band + 2.0) * oversample - 1e-9));
  const int nb = static_cast<int>(std::ceil((2.0 * band + 1.0) * oversample - 1e-9));
  const int ng = na;
  gd->alpha.resize(na);
  gd->gamma.resize(ng);
  for (int a = 0; a < na; ++a) gd->alpha[a] = 2.0 * M_PI * a / na;
  for (int c = 0; c < ng; ++c) gd->gamma[c] = 4.0 * M_PI * c / ng;
  std::vector<double> xb, wb;
  detail::gauss_legendre(nb, xb, wb);
  gd->beta.resize(nb);
  gd->beta_w.resize(nb);
  for (int b = 0; b < nb; ++b) {
    gd->beta[b] = std::acos(xb[b]);
    gd->beta_w(b) = wb[b] / 2.0;
  }

  const std::size_t total = static_cast<std::size_t>(na) * nb * ng;
  gd->points.resize(total, 3);
  gd->weights.resize(total);
  for (int b = 0; b < nb; ++b)
    for (int a = 0; a < na; ++a)
      for (int c = 0; c < ng; ++c) {
        const std::size_t p = (static_cast<std::size_t>(b) * na + a) * ng + c;
        gd->points(p, 0) = gd->alpha[a];
        gd->points(p, 1) = gd->beta[b];
        gd->points(p, 2) = gd->gamma[c];
        gd->weights(p) = gd->beta_w(b) / (static_cast<double>(na) * ng);
      }

  const int tmax = gd->irreps.empty() ? 0 : gd->irreps.back().two_ell;
  const int nm = 2 * tmax + 1;
  gd->mgrid.resize(nm);
  for (int u = 0; u < nm; ++u) gd->mgrid(u) = (u - tmax) / 2.0;
  gd->ea.resize(na, nm);
  gd->eg.resize(ng, nm);
  const complexd I(0.0, 1.0);
  for (int u = 0; u < nm; ++u) {
    for (int a = 0; a < na; ++a) gd->ea(a, u) = std::exp(I * gd->mgrid(u) * gd->alpha[a]);
    for (int c = 0; c < ng; ++c) gd->eg(c, u) = std::exp(I * gd->mgrid(u) * gd->gamma[c]);
  }

  gd->su2.resize(gd->irreps.size());
  for (std::size_t w = 0; w < gd->irreps.size(); ++w) {
    const int t = gd->irreps[w].two_ell;
    const int d = t + 1;
    const double l = t / 2.0;
    auto& tab = gd->su2[w];
    const auto perm = detail::basis_order(group, t);
    tab.mvals.resize(d);
    tab.gidx.resize(d);
    for (int i = 0; i < d; ++i) {
      tab.mvals(i) = l - perm[i];
      tab.gidx(i) = static_cast<int>(std::lround(2.0 * tab.mvals(i))) + tmax;
    }
    tab.d.resize(nb);
    for (int b = 0; b < nb; ++b) {
      const Eigen::MatrixXd full = detail::wigner_d(t, gd->beta[b]);
      Eigen::MatrixXd reordered(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) reordered(i, j) = full(perm[i], perm[j]);
      tab.d[b] = std::move(reordered);
    }
  }
  return QuadratureGrid(gd);
}

std::vector<Matrix> lie_action(const GroupId& group, const Irrep& irrep) {
  std::vector<Matrix> out;
  if (group.kind == GroupKind::Torus) {
    out.reserve(group.torus_dim);
    for (int j = 0; j < group.torus_dim; ++j) {
      Matrix m(1, 1);
      m(0, 0) = complexd(0.0, 2.0 * M_PI * irrep.k[j]);
      out.push_back(m);
    }
    return out;
  }
  const auto s = detail::spin_matrices(irrep.two_ell);
  const auto perm = detail::basis_order(group, irrep.two_ell);
  const int d = irrep.dim;
  const complexd I(0.0, 1.0);
  for (const Eigen::MatrixXcd* jm : {&s.jx, &s.jy, &s.jz}) {
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = -I * (*jm)(perm[i], perm[j]);
    out.push_back(m);
  }
  return out;
}

Point group_identity(const GroupId& group) { return Point::Zero(group.coord_dim()); }

Point group_multiply(const GroupId& group, const Point& x, const Point& y) {
  if (group.kind == GroupKind::Torus) {
    Point z(group.torus_dim);
    for (int j = 0; j < group.torus_dim; ++j) z(j) = detail::wrap(x(j) + y(j), 1.0);
    return z;
  }
  return euler_from_su2_matrix(su2_matrix_from_euler(x) * su2_matrix_from_euler(y));
}

Point group_inverse(const GroupId& group, const Point& x) {
  if (group.kind == GroupKind::Torus) {
    Point z(group.torus_dim);
    for (int j = 0; j < group.torus_dim; ++j) z(j) = detail::wrap(-x(j), 1.0);
    return z;
  }
  return euler_from_su2_matrix(su2_matrix_from_euler(x).adjoint());
}

Eigen::Matrix2cd su2_matrix_from_euler(const Point& x) {
  const complexd I(0.0, 1.0);
  const complexd a = std::exp(-I * (x(0) + x(2)) / 2.0) * std::cos(x(1) / 2.0);
  const complexd b = -std::exp(-I * (x(0) - x(2)) / 2.0) * std::sin(x(1) / 2.0);
  Eigen::Matrix2cd u;
  u << a, b, -std::conj(b), std::conj(a);
  return u;
}

Point euler_from_su2_matrix(const Eigen::Matrix2cd& u) {
  const complexd a = u(0, 0);
  const complexd b = u(0, 1);
  const double beta = 2.0 * std::atan2(std::abs(b), std::abs(a));
  Point x(3);
  x(1) = beta;
  if (std::abs(b) < 1e-14) {
    // diagonal: only alpha + gamma is determined
    x(0) = 0.0;
    x(2) = detail::wrap(-2.0 * std::arg(a), 4.0 * M_PI);
    return x;
  }
  if (std::abs(a) < 1e-14) {
    // antidiagonal: only alpha - gamma is determined
    const double bb = detail::wrap(-2.0 * std::arg(-b), 4.0 * M_PI);
    x(0) = detail::wrap(bb, 2.0 * M_PI);
    x(2) = detail::wrap(x(0) - bb, 4.0 * M_PI);
    return x;
  }
  const double aa = detail::wrap(-2.0 * std::arg(a), 4.0 * M_PI);   // alpha + gamma
  const double bb = detail::wrap(-2.0 * std::arg(-b), 4.0 * M_PI);  // alpha - gamma
  x(0) = detail::wrap((aa + bb) / 2.0, 2.0 * M_PI);
  x(2) = detail::wrap(aa - x(0), 4.0 * M_PI);
  return x;
}

}  // namespace liequant
