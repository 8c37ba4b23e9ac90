#pragma once

// Internal grid storage and the cached representation tables used by the
// separable Euler-angle transforms. Not installed.

#include <vector>

#include <Eigen/Dense>

#include "liequant/group.hpp"

namespace liequant::detail {

struct Su2IrrepTables {
  Eigen::VectorXd mvals;           // m value per basis index
  Eigen::VectorXi gidx;            // index into the global m grid per basis index
  std::vector<Eigen::MatrixXd> d;  // per beta node, in the irrep basis order
};

struct GridData {
  GroupId group;
  double band = 0.0;
  double oversample = 1.0;
  Eigen::MatrixXd points;   // N x coord_dim
  Eigen::VectorXd weights;  // N, sums to 1
  std::vector<Irrep> irreps;

  // SU(2): flat index p = (b*na + a)*ng + c
  std::vector<double> alpha, beta, gamma;
  Eigen::VectorXd beta_w;   // Gauss-Legendre weights / 2
  Eigen::VectorXd mgrid;    // global half-integer m values, ascending
  Eigen::MatrixXcd ea, eg;  // e^{+i m alpha}: na x M, e^{+i m gamma}: ng x M
  std::vector<Su2IrrepTables> su2;

  // torus: flat index with the last axis fastest
  int axis_nodes = 0;
  int freq_halfwidth = 0;                // per-axis frequencies -K..K
  Eigen::MatrixXcd axis_e;               // nodes x (2K+1), e^{-2 pi i k x}
  Eigen::MatrixXi point_axis_idx;        // N x n, per-axis node index of each point

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  int na() const { return static_cast<int>(alpha.size()); }
  int nb() const { return static_cast<int>(beta.size()); }
  int ng() const { return static_cast<int>(gamma.size()); }
};

struct SpinMatrices {
  Eigen::MatrixXcd jx, jy, jz;
  Eigen::VectorXd m;  // descending
};
SpinMatrices spin_matrices(int two_ell);

// exp(-i beta J_y) in the descending-m basis; real orthogonal.
Eigen::MatrixXd wigner_d(int two_ell, double beta);

// Basis order of the group's irreps: perm[new_index] = descending-m index.
// Plain groups keep the descending order; the sphere lists K-fixed vectors
// (m = 0) first, then |m| ascending with the positive sign first.
std::vector<int> basis_order(const GroupId& group, int two_ell);

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

double wrap(double x, double period);  // into [0, period)

// band coordinate of an irrep: l for SU(2), |k|_inf for the torus
double irrep_band(const GroupId& group, const Irrep& xi);

Irrep make_torus_irrep(const std::vector<int>& k);
Irrep make_su2_irrep(const GroupId& group, int two_ell);

}  // namespace liequant::detail
