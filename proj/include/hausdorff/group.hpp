#pragma once

#include "hausdorff/common.hpp"
#include "hausdorff/random.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hausdorff {

enum class GroupKind { euclidean, special_orthogonal };

std::string to_string(GroupKind kind);
GroupKind group_kind_from_string(const std::string& name);

/// A concrete Lie group backend: the additive group R^n or the rotation group
/// SO(n). The metric is the left-invariant Riemannian metric induced by the
/// Frobenius inner product <X, Y> = tr(X^T Y) on the Lie algebra; Haar measure
/// is normalized to total mass 1 on SO(n) and is Lebesgue measure on R^n.
class Group {
 public:
  static Group euclidean(int n);
  static Group special_orthogonal(int n);

  GroupKind kind() const { return kind_; }
  int dimension() const { return n_; }
  bool compact() const { return kind_ == GroupKind::special_orthogonal; }
  /// 1 for SO(n); +inf for R^n.
  double total_mass() const { return compact() ? 1.0 : kInf; }
  /// n for R^n, n(n-1)/2 for SO(n).
  int lie_algebra_dim() const;
  /// Diameter under the metric; +inf for R^n.
  double diameter() const;
  std::string name() const;

  Point identity() const;
  Point multiply(const Point& x, const Point& y) const;
  Point inverse(const Point& x) const;
  /// Group membership within tolerance (orthogonality and det = 1 on SO(n)).
  bool contains(const Point& x, double tol = 1e-10) const;
  /// Nearest group element (polar factor on SO(n)); identity map on R^n.
  Point reorthogonalize(const Point& x) const;

  /// Principal logarithm: a skew-symmetric matrix on SO(n) (rotation angles in
  /// (-pi, pi]; at angle pi the Schur-basis orientation is used), the vector
  /// itself on R^n. Throws NumericalError if the Schur iteration fails.
  Matrix log(const Point& x) const;
  Point exp(const Matrix& algebra_element) const;

  /// rho(x, y) = |log(x^{-1} y)|_F.
  double distance(const Point& x, const Point& y) const;
  /// rho(e, x).
  double norm(const Point& x) const;
  /// rho(x, y) <= r, with a cheap trace-based test on SO(4) and exact fallback
  /// near the boundary.
  bool within(const Point& x, const Point& y, double r) const;
  /// Rotation angles in [0, pi] of x in SO(n), one per 2-plane (floor(n/2) values).
  std::vector<double> rotation_angles(const Point& x) const;

  /// Orthonormal basis element of the Lie algebra (E_ij = (e_i e_j^T - e_j e_i^T)/sqrt(2)
  /// for i < j on so(n), lexicographic order; unit vectors on R^n).
  Matrix algebra_basis(int index) const;
  Vector algebra_coordinates(const Matrix& algebra_element) const;
  Matrix algebra_element(const Vector& coordinates) const;

  /// Normalized Haar samples on SO(n): Gaussian matrix, QR with sign-corrected
  /// triangular factor, determinant repaired by negating the first column.
  /// Sample i depends only on (seed, i). Throws DomainError on R^n.
  std::vector<Point> haar_sample(std::size_t count, std::uint64_t seed) const;
  Point haar_sample_one(std::uint64_t seed, std::uint64_t index) const;

  /// Density of Haar measure in exponential coordinates y = c exp(X), relative
  /// to Lebesgue measure on the Lie algebra and normalized to 1 at X = 0:
  /// prod over positive roots of (sin(a/2) / (a/2))^2. Identically 1 on R^n.
  double exp_jacobian(const Matrix& algebra_element) const;

  /// A sample y distributed by Haar (Lebesgue) measure restricted to B(center, r)
  /// together with its mirror image under the geodesic symmetry at the center
  /// (y -> c y^{-1} c on SO(n), y -> 2c - y on R^n), which has the same law.
  /// Small balls on SO(n) use exponential coordinates with rejection on the
  /// Jacobian; large ones rejection from the whole group.
  std::pair<Point, Point> ball_sample_pair(const Point& center, double r, std::uint64_t seed,
                                           std::uint64_t index) const;

  /// nu(B(e, r)) in closed form: Euclidean ball volume on R^n; on SO(n) the Weyl
  /// integration formula over the maximal torus, evaluated by adaptive quadrature.
  double ball_volume_exact(double r) const;

  bool operator==(const Group& other) const = default;

 private:
  Group(GroupKind kind, int n) : kind_(kind), n_(n) {}

  GroupKind kind_;
  int n_;
};

/// Uniform random rotation in SO(n) generated from an already seeded stream.
Matrix random_rotation(int n, CounterRng& rng);

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

}  // namespace hausdorff
