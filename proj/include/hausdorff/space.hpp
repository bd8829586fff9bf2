#pragma once

#include "hausdorff/homspace.hpp"

#include <optional>
#include <string>
#include <utility>

namespace hausdorff {

enum class SpaceKind { euclidean, special_orthogonal, sphere };

std::string to_string(SpaceKind kind);
SpaceKind space_kind_from_string(const std::string& name);

/// A metric measure space on which functions, atoms and operators live: a group
/// backend G (R^n or SO(n)) or the sphere S^{n-1} = SO(n)/SO(n-1). Points are
/// n x 1 columns on R^n and S^{n-1} and n x n matrices on SO(n). The sphere
/// carries the angle metric and the normalized invariant measure.
class Space {
 public:
  static Space euclidean(int n);
  static Space special_orthogonal(int n);
  /// S^{n-1} inside R^n.
  static Space sphere(int n);
  static Space of_group(const Group& group);

  SpaceKind kind() const { return kind_; }
  /// The ambient n.
  int dimension() const { return n_; }
  bool compact() const { return kind_ != SpaceKind::euclidean; }
  /// R^n or SO(n); the acting group SO(n) for the sphere.
  const Group& group() const { return group_; }
  /// Sphere only.
  const QuotientSpace& quotient() const;
  double diameter() const;
  double total_mass() const { return compact() ? 1.0 : kInf; }
  std::string name() const;

  bool contains(const Point& p, double tol = 1e-10) const;
  double distance(const Point& a, const Point& b) const;
  bool within(const Point& a, const Point& b, double r) const;
  /// Exact measure of a ball of radius r (capped at the total mass).
  double ball_volume(double r) const;

  /// Uniform point of a compact space.
  Point uniform_sample_one(std::uint64_t seed, std::uint64_t index) const;
  /// Uniform point of B(center, r) and its mirror image under the geodesic
  /// symmetry at the center (reflection through the axis on the sphere).
  std::pair<Point, Point> ball_sample_pair(const Point& center, double r, std::uint64_t seed,
                                           std::uint64_t index) const;

  bool operator==(const Space& other) const { return kind_ == other.kind_ && n_ == other.n_; }

 private:
  Space(SpaceKind kind, int n);

  SpaceKind kind_;
  int n_;
  Group group_;
  std::optional<QuotientSpace> quotient_;
};

/// A uniformly random unit vector orthogonal to the unit vector c.
Vector random_tangent(const Vector& c, CounterRng& rng);

}  // namespace hausdorff
