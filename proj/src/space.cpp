#include "hausdorff/space.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>

namespace hausdorff {

namespace {

Group backing_group(SpaceKind kind, int n) {
  if (n < 1) throw DomainError("dimension must be positive");
  return kind == SpaceKind::euclidean ? Group::euclidean(n) : Group::special_orthogonal(n);
}

// Angle psi with cap_volume(n, psi) = v, for v in [0, 1].
double cap_angle_for_volume(int n, double v) {
  const double a = 0.5 * (n - 1);
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return kPi;
  if (v <= 0.5) return std::asin(std::sqrt(boost::math::ibeta_inv(a, 0.5, 2.0 * v)));
  return kPi - std::asin(std::sqrt(boost::math::ibeta_inv(a, 0.5, 2.0 * (1.0 - v))));
}

}  // namespace

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::euclidean:
      return "euclidean";
    case SpaceKind::special_orthogonal:
      return "special_orthogonal";
    case SpaceKind::sphere:
      return "sphere";
  }
  return "unknown";
}

SpaceKind space_kind_from_string(const std::string& name) {
  if (name == "euclidean") return SpaceKind::euclidean;
  if (name == "special_orthogonal") return SpaceKind::special_orthogonal;
  if (name == "sphere") return SpaceKind::sphere;
  throw DomainError("unknown space kind: " + name);
}

Space::Space(SpaceKind kind, int n) : kind_(kind), n_(n), group_(backing_group(kind, n)) {
  if (kind == SpaceKind::sphere) quotient_.emplace(n);
}

Space Space::euclidean(int n) { return Space(SpaceKind::euclidean, n); }
Space Space::special_orthogonal(int n) { return Space(SpaceKind::special_orthogonal, n); }
Space Space::sphere(int n) { return Space(SpaceKind::sphere, n); }

Space Space::of_group(const Group& group) {
  return group.compact() ? special_orthogonal(group.dimension()) : euclidean(group.dimension());
}

const QuotientSpace& Space::quotient() const {
  if (!quotient_) throw DomainError(name() + " is not a quotient space");
  return *quotient_;
}

double Space::diameter() const { return kind_ == SpaceKind::sphere ? kPi : group_.diameter(); }

std::string Space::name() const {
  return kind_ == SpaceKind::sphere ? "S^" + std::to_string(n_ - 1) : group_.name();
}

bool Space::contains(const Point& p, double tol) const {
  if (kind_ != SpaceKind::sphere) return group_.contains(p, tol);
  return p.rows() == n_ && p.cols() == 1 && p.allFinite() && std::abs(p.norm() - 1.0) <= tol;
}

double Space::distance(const Point& a, const Point& b) const {
  if (kind_ == SpaceKind::sphere) return sphere_distance(a, b);
  return group_.distance(a, b);
}

bool Space::within(const Point& a, const Point& b, double r) const {
  if (kind_ == SpaceKind::sphere) return sphere_distance(a, b) <= r;
  return group_.within(a, b, r);
}

double Space::ball_volume(double r) const {
  if (r < 0.0) throw DomainError("radius must be nonnegative");
  if (kind_ == SpaceKind::sphere) return cap_volume(n_, r);
  return group_.ball_volume_exact(r);
}

Point Space::uniform_sample_one(std::uint64_t seed, std::uint64_t index) const {
  switch (kind_) {
    case SpaceKind::euclidean:
      throw DomainError("non-normalizable Haar measure on " + name());
    case SpaceKind::special_orthogonal:
      return group_.haar_sample_one(seed, index);
    case SpaceKind::sphere:
      return quotient_->invariant_sample_one(seed, index);
  }
  return {};
}

std::pair<Point, Point> Space::ball_sample_pair(const Point& center, double r, std::uint64_t seed,
                                                std::uint64_t index) const {
  if (kind_ != SpaceKind::sphere) return group_.ball_sample_pair(center, r, seed, index);
  if (!(r > 0.0)) throw DomainError("ball radius must be positive");
  CounterRng rng(seed, index);
  const double psi = cap_angle_for_volume(n_, rng.uniform() * cap_volume(n_, std::min(r, kPi)));
  const Vector c = center.col(0);
  const Vector v = random_tangent(c, rng);
  return {Matrix(std::cos(psi) * c + std::sin(psi) * v), Matrix(std::cos(psi) * c - std::sin(psi) * v)};
}

Vector random_tangent(const Vector& c, CounterRng& rng) {
  const Vector unit = c / c.norm();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vector g(c.size());
    for (int i = 0; i < g.size(); ++i) g(i) = rng.normal();
    g -= g.dot(unit) * unit;
    const double length = g.norm();
    if (length > 1e-8) return g / length;
  }
  throw NumericalError("random_tangent: could not draw a tangent direction");
}

}  // namespace hausdorff
