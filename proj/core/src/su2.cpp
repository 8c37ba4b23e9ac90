#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "grid_data.hpp"

namespace liequant::detail {

SpinMatrices spin_matrices(int two_ell) {
  const int d = two_ell + 1;
  const double l = two_ell / 2.0;
  SpinMatrices s;
  s.m = Eigen::VectorXd(d);
  for (int i = 0; i < d; ++i) s.m(i) = l - i;

  Eigen::MatrixXd jp = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) {
    const double mm = s.m(i);  // raising hits the next-lower m
    jp(i - 1, i) = std::sqrt(l * (l + 1) - mm * (mm + 1));
  }
  const complexd I(0.0, 1.0);
  s.jz = s.m.cast<complexd>().asDiagonal();
  s.jx = ((jp + jp.transpose()) / 2.0).cast<complexd>();
  s.jy = ((jp - jp.transpose()).cast<complexd>()) / (2.0 * I);
  return s;
}

namespace {

struct SpinEig {
  Eigen::MatrixXcd v;
  Eigen::VectorXd w;
};

const SpinEig& spin_eig(int two_ell) {
  static std::map<int, SpinEig> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(two_ell);
  if (it == cache.end()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(spin_matrices(two_ell).jy);
    it = cache.emplace(two_ell, SpinEig{es.eigenvectors(), es.eigenvalues()}).first;
  }
  return it->second;
}

}  // namespace

Eigen::MatrixXd wigner_d(int two_ell, double beta) {
  if (two_ell == 0) return Eigen::MatrixXd::Ones(1, 1);
  const auto& e = spin_eig(two_ell);
  const int d = two_ell + 1;
  Eigen::VectorXcd ph(d);
  const complexd I(0.0, 1.0);
  for (int i = 0; i < d; ++i) ph(i) = std::exp(-I * beta * e.w(i));
  return (e.v * ph.asDiagonal() * e.v.adjoint()).real();
}

std::vector<int> basis_order(const GroupId& group, int two_ell) {
  const int d = two_ell + 1;
  std::vector<int> perm(d);
  if (group.subgroup == SubgroupKind::None) {
    for (int i = 0; i < d; ++i) perm[i] = i;
    return perm;
  }
  // m = 0 first (when present), then +1/2, -1/2, +1, -1, ...
  std::vector<std::pair<std::pair<int, int>, int>> keyed(d);
  const double l = two_ell / 2.0;
  for (int i = 0; i < d; ++i) {
    const double m = l - i;
    const int twice_abs = static_cast<int>(std::lround(2.0 * std::abs(m)));
    keyed[i] = {{twice_abs, m < 0 ? 1 : 0}, i};
  }
  std::sort(keyed.begin(), keyed.end());
  for (int i = 0; i < d; ++i) perm[i] = keyed[i].second;
  return perm;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int k = 0; k < (n + 1) / 2; ++k) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    int settle = 2;  // keep polishing until the step is sub-ulp twice
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 0.25 * std::abs(x) * 2.3e-16 && --settle == 0) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[k] = -x;  // ascending
    nodes[n - 1 - k] = x;
    weights[k] = w;
    weights[n - 1 - k] = w;
  }
  if (n % 2 == 1) {
    // recompute the central weight exactly at x = 0
    double p0 = 1.0, p1 = 0.0;
    for (int j = 2; j <= n; ++j) {
      const double p2 = (-(j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (-p0) / (-1.0);
    nodes[n / 2] = 0.0;
    weights[n / 2] = 2.0 / (dp * dp);
  }
}

double wrap(double x, double period) {
  double y = std::fmod(x, period);
  if (y < 0) y += period;
  if (y >= period) y = 0.0;  // guard against fmod returning exactly period
  return y;
}

double irrep_band(const GroupId& group, const Irrep& xi) {
  if (group.kind == GroupKind::Torus) {
    int b = 0;
    for (int v : xi.k) b = std::max(b, std::abs(v));
    return b;
  }
  return xi.two_ell / 2.0;
}

}  // namespace liequant::detail
