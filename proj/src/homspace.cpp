#include "hausdorff/homspace.hpp"

#include "hausdorff/parallel.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>

namespace hausdorff {

QuotientSpace::QuotientSpace(int n)
    : n_(n), group_(Group::special_orthogonal(std::max(n, 1))), subgroup_(Group::special_orthogonal(std::max(n - 1, 1))) {
  if (n < 2) throw DomainError("the sphere S^{n-1} needs n >= 2");
}

Vector QuotientSpace::project(const Point& x) const {
  if (x.rows() != n_ || x.cols() != n_) throw DomainError("project: point is not an n x n matrix");
  return x.col(n_ - 1);
}

Point QuotientSpace::lift(const Vector& s) const {
  if (s.size() != n_) throw DomainError("lift: vector has wrong dimension");
  const double length = s.norm();
  if (std::abs(length - 1.0) > 1e-8) throw DomainError("lift: not a unit vector");
  const Vector unit = s / length;
  // v = e_n + s, with 1 + s_n evaluated without cancellation near the antipode.
  Vector v = unit;
  const double tail = unit.head(n_ - 1).squaredNorm();
  v(n_ - 1) = unit(n_ - 1) >= 0.0 ? 1.0 + unit(n_ - 1) : tail / (1.0 - unit(n_ - 1));
  const double vv = v.squaredNorm();
  Matrix x = Matrix::Identity(n_, n_);
  if (vv < 1e-300) {
    x(0, 0) = -1.0;
    x(n_ - 1, n_ - 1) = -1.0;
    return x;
  }
  x -= (2.0 / vv) * v * v.transpose();
  x.col(n_ - 1) *= -1.0;
  return x;
}

Point QuotientSpace::embed(const Matrix& a) const {
  if (a.rows() != n_ - 1 || a.cols() != n_ - 1) throw DomainError("embed: block has wrong size");
  Matrix x = Matrix::Identity(n_, n_);
  x.topLeftCorner(n_ - 1, n_ - 1) = a;
  return x;
}

bool QuotientSpace::in_subgroup(const Point& x, double tol) const {
  if (!group_.contains(x, tol)) return false;
  Vector e = Vector::Zero(n_);
  e(n_ - 1) = 1.0;
  return (x.col(n_ - 1) - e).cwiseAbs().maxCoeff() <= tol &&
         (x.row(n_ - 1).transpose() - e).cwiseAbs().maxCoeff() <= tol;
}

Point QuotientSpace::subgroup_sample_one(std::uint64_t seed, std::uint64_t index) const {
  CounterRng rng(seed, index);
  return embed(random_rotation(n_ - 1, rng));
}

std::vector<Point> QuotientSpace::subgroup_sample(std::size_t count, std::uint64_t seed) const {
  std::vector<Point> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = subgroup_sample_one(seed, i);
  return out;
}

Vector QuotientSpace::invariant_sample_one(std::uint64_t seed, std::uint64_t index) const {
  CounterRng rng(seed, index);
  Vector s(n_);
  do {
    for (int i = 0; i < n_; ++i) s(i) = rng.normal();
  } while (s.squaredNorm() == 0.0);
  return s / s.norm();
}

std::vector<Vector> QuotientSpace::invariant_sample(std::size_t count, std::uint64_t seed) const {
  if (count == 0) throw DomainError("sample count must be at least 1");
  std::vector<Vector> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = invariant_sample_one(seed, i);
  return out;
}

bool conjugation_normalizes_subgroup(const QuotientSpace& space, const Matrix& g, double tol) {
  const int n = space.dimension();
  if (g.rows() != n || g.cols() != n) return false;
  const double corner = g(n - 1, n - 1);
  if (std::abs(std::abs(corner) - 1.0) > tol) return false;
  return g.col(n - 1).head(n - 1).cwiseAbs().maxCoeff() <= tol &&
         g.row(n - 1).head(n - 1).cwiseAbs().maxCoeff() <= tol;
}

Vector InducedAutomorphism::apply(const Vector& s) const {
  const int n = space_.dimension();
  switch (automorphism_.family()) {
    case AutomorphismFamily::identity:
      return s;
    case AutomorphismFamily::conjugation: {
      const Matrix& g = automorphism_.parameter();
      return g(n - 1, n - 1) * (g.transpose() * s);
    }
    default:
      return space_.project(automorphism_.apply(space_.lift(s)));
  }
}

InducedAutomorphism induced_automorphism(const QuotientSpace& space, const Automorphism& automorphism,
                                         std::size_t probes, std::uint64_t seed) {
  if (!(automorphism.group() == space.group()))
    throw DomainError("automorphism is not defined on " + space.group().name());
  const int n = space.dimension();
  if (automorphism.family() == AutomorphismFamily::conjugation && n >= 3 &&
      !conjugation_normalizes_subgroup(space, automorphism.parameter())) {
    // Find an explicit witness among sampled k.
    for (std::size_t i = 0; i < std::max<std::size_t>(probes, 1); ++i) {
      const Point k = space.subgroup_sample_one(seed, i);
      if (!space.in_subgroup(automorphism.apply(k))) {
        throw NormalizerError("automorphism does not normalize K", k);
      }
    }
    throw NormalizerError("automorphism does not normalize K", space.group().identity());
  }
  for (std::size_t i = 0; i < probes; ++i) {
    const Point k = space.subgroup_sample_one(seed, i);
    if (!space.in_subgroup(automorphism.apply(k), 1e-9)) throw NormalizerError("automorphism does not normalize K", k);
  }
  return InducedAutomorphism(space, automorphism.with_preserves_k(true));
}

WeilReport weil_check(const QuotientSpace& space, const std::function<double(const Point&)>& integrand,
                      std::size_t mc_samples, std::uint64_t seed, bool right_k_invariant, double z) {
  if (mc_samples < 2) throw DomainError("weil_check needs at least 2 samples per side");
  const Group& group = space.group();
  const std::uint64_t group_seed = derive_seed(seed, "weil-group");
  const std::uint64_t sphere_seed = derive_seed(seed, "weil-quotient");
  const std::uint64_t fiber_seed = derive_seed(seed, "weil-fiber");

  const std::vector<double> lhs = parallel_map(mc_samples, [&](std::size_t i) {
    const double v = integrand(group.haar_sample_one(group_seed, i));
    if (!std::isfinite(v)) throw NumericalError("weil_check: integrand is not finite");
    return v;
  });
  const std::vector<double> rhs = parallel_map(mc_samples, [&](std::size_t i) {
    const Point x = space.lift(space.invariant_sample_one(sphere_seed, i));
    const double v = integrand(Matrix(x * space.subgroup_sample_one(fiber_seed, i)));
    if (!std::isfinite(v)) throw NumericalError("weil_check: integrand is not finite");
    return v;
  });

  WeilReport report;
  report.group_side = mean_estimate(lhs);
  report.quotient_side = mean_estimate(rhs);
  report.discrepancy = std::abs(report.group_side.value - report.quotient_side.value);
  report.combined_sigma = std::hypot(report.group_side.std_error, report.quotient_side.std_error);
  const double scale = std::max(std::abs(report.group_side.value), std::abs(report.quotient_side.value));
  report.relative = scale > z * report.combined_sigma + 1e-12;
  report.relative_discrepancy = report.relative ? report.discrepancy / scale : report.discrepancy;
  report.pass = report.discrepancy <= z * report.combined_sigma + 1e-12 * std::max(scale, 1.0);

  if (right_k_invariant) {
    // The fiber average collapses to g(x).
    const std::size_t points = std::min<std::size_t>(mc_samples, 100);
    constexpr std::size_t fiber_points = 16;
    const std::uint64_t probe_seed = derive_seed(seed, "weil-collapse");
    double worst = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
      const Point x = group.haar_sample_one(group_seed, i);
      double average = 0.0;
      for (std::size_t j = 0; j < fiber_points; ++j)
        average += integrand(Matrix(x * space.subgroup_sample_one(probe_seed, i * fiber_points + j)));
      average /= static_cast<double>(fiber_points);
      worst = std::max(worst, std::abs(average - integrand(x)));
    }
    report.invariant_collapse_error = worst;
  }
  return report;
}

double sphere_distance(const Vector& s, const Vector& t) {
  const double chord = (s - t).norm();
  return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
}

double last_coordinate_density(int n, double t) {
  if (n < 2) throw DomainError("sphere dimension must be at least 1");
  if (t <= -1.0 || t >= 1.0) return 0.0;
  const double c = std::exp(std::lgamma(0.5 * n) - std::lgamma(0.5 * (n - 1))) / std::sqrt(kPi);
  return c * std::pow(1.0 - t * t, 0.5 * (n - 3));
}

double last_coordinate_cdf(int n, double t) {
  if (n < 2) throw DomainError("sphere dimension must be at least 1");
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return 1.0;
  // s_n^2 ~ Beta(1/2, (n-1)/2), symmetric in sign.
  const double half_mass = 0.5 * boost::math::ibeta(0.5, 0.5 * (n - 1), t * t);
  return t >= 0.0 ? 0.5 + half_mass : 0.5 - half_mass;
}

double cap_volume(int n, double phi) {
  if (phi <= 0.0) return 0.0;
  if (phi >= kPi) return 1.0;
  const double c = std::cos(phi);
  // P(s_n >= cos phi) without cancellation for small caps.
  const double upper_tail = 0.5 * boost::math::ibetac(0.5, 0.5 * (n - 1), c * c);
  return c >= 0.0 ? upper_tail : 1.0 - upper_tail;
}

}  // namespace hausdorff
