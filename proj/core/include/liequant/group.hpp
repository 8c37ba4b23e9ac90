#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace liequant {

using complexd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Point = Eigen::VectorXd;

enum class GroupKind { Torus, SU2 };
enum class SubgroupKind { None, DiagonalTorus };

// A compact group, optionally quotiented by a closed subgroup K on the right.
// Coordinates: torus points live in [0,1)^n; SU(2) uses z-y-z Euler angles
// (alpha, beta, gamma) in [0,2pi) x [0,pi] x [0,4pi).
struct GroupId {
  GroupKind kind = GroupKind::Torus;
  int torus_dim = 1;
  SubgroupKind subgroup = SubgroupKind::None;

  static GroupId torus(int n);
  static GroupId su2();
  static GroupId sphere();  // SU(2) / diagonal torus

  bool homogeneous_space() const { return subgroup != SubgroupKind::None; }
  int dim() const;           // dim of the group (3 for SU2, n for torus)
  int manifold_dim() const;  // dim of G/K (2 for the sphere)
  int coord_dim() const { return dim(); }
  std::string name() const;
  bool operator==(const GroupId&) const = default;
};

GroupId parse_group(const std::string& name);

// One irreducible unitary representation. For the torus this is a character
// e^{2 pi i k.x}; for SU(2) the spin-l representation with l = two_ell/2.
struct Irrep {
  std::vector<int> k;  // torus frequency vector
  int two_ell = 0;     // doubled SU(2) spin
  int dim = 1;
  double casimir = 0.0;    // eigenvalue lambda of the positive Laplacian
  double weight = 1.0;     // <xi> = sqrt(1 + lambda)
  bool type_one = true;    // has K-fixed vectors (always true when K is trivial)
  int invariant_rank = 1;  // k_xi = dim of the K-fixed subspace

  bool trivial() const;
  std::string label() const;
  bool operator==(const Irrep& o) const { return k == o.k && two_ell == o.two_ell; }
};

namespace detail {
struct GridData;
}

// Product quadrature with Haar probability weights. Exact for products of two
// matrix coefficients of band <= declared band: uniform nodes in alpha and
// gamma, Gauss-Legendre in cos(beta); plain uniform product grid on the torus.
class QuadratureGrid {
 public:
  QuadratureGrid() = default;
  explicit QuadratureGrid(std::shared_ptr<const detail::GridData> data);

  bool valid() const { return data_ != nullptr; }
  const GroupId& group() const;
  double band() const;
  double oversample() const;
  std::size_t size() const;
  Point point(std::size_t i) const;
  const Eigen::VectorXd& weights() const;
  const std::vector<Irrep>& irreps() const;  // all irreps up to the grid band
  // Value of irreps()[which] at grid point p, via the cached Euler factor tables.
  Matrix irrep_matrix(std::size_t which, std::size_t p) const;

  bool same_grid(const QuadratureGrid& o) const { return data_ == o.data_; }
  const detail::GridData& data() const { return *data_; }

 private:
  std::shared_ptr<const detail::GridData> data_;
};

// All irreps of band <= band, sorted by (casimir, lexicographic index).
// Torus band: |k|_inf <= band. SU(2) band: l <= band in half-integer steps.
std::vector<Irrep> irrep_list(const GroupId& group, double band);

// Representation matrix at a point. On a homogeneous space the basis of each
// irrep is reordered so that K-fixed vectors come first.
Matrix irrep_eval(const GroupId& group, const Irrep& irrep, const Point& x);

QuadratureGrid haar_grid(const GroupId& group, double band, double oversample = 1.0);

// Matrices d pi(Y_j) of the fixed Lie algebra basis, skew-Hermitian, in the
// same basis order as irrep_eval. Torus: Y_j = d/dx_j, d pi(Y_j) = 2 pi i k_j.
// SU(2): Y_j = -(i/2) sigma_j, d pi(Y_j) = -i J_j, sum_j -d pi(Y_j)^2 = lambda I.
std::vector<Matrix> lie_action(const GroupId& group, const Irrep& irrep);

// Group operations in coordinates.
Point group_identity(const GroupId& group);
Point group_multiply(const GroupId& group, const Point& x, const Point& y);
Point group_inverse(const GroupId& group, const Point& x);

// SU(2) <-> Euler conversion, spin-1/2 matrix convention
// [[a, b], [-conj(b), conj(a)]] with a = e^{-i(alpha+gamma)/2} cos(beta/2).
Eigen::Matrix2cd su2_matrix_from_euler(const Point& x);
Point euler_from_su2_matrix(const Eigen::Matrix2cd& u);

}  // namespace liequant
