#include <doctest.h>

#include "hausdorff/homspace.hpp"

#include <cmath>
#include <vector>

using namespace hausdorff;

namespace {

Matrix planar_rotation(int n, int i, int j, double angle) {
  Matrix r = Matrix::Identity(n, n);
  r(i, i) = std::cos(angle);
  r(j, j) = std::cos(angle);
  r(j, i) = std::sin(angle);
  r(i, j) = -std::sin(angle);
  return r;
}

Vector unit(int n, int i) {
  Vector e = Vector::Zero(n);
  e(i) = 1.0;
  return e;
}

}  // namespace

TEST_CASE("projection onto the sphere") {
  const QuotientSpace s3(4);
  CHECK((s3.project(s3.group().identity()) - unit(4, 3)).norm() == 0.0);

  double worst = 0.0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const Point x = s3.group().haar_sample_one(1, i);
    const Point k = s3.subgroup_sample_one(2, i);
    CHECK(s3.in_subgroup(k));
    worst = std::max(worst, (s3.project(x * k) - s3.project(x)).norm());
  }
  CHECK(worst <= 1e-12);

  // Quarter turn in the (e_1, e_n) plane sends e_n to -e_1.
  const Matrix quarter = planar_rotation(4, 0, 3, kPi / 2);
  const Vector image = quarter * unit(4, 3);
  CHECK((s3.project(quarter) - image).norm() <= 1e-15);
  CHECK(std::abs(s3.project(quarter)(0)) == doctest::Approx(1.0));
}

TEST_CASE("lift is a section") {
  for (int n : {2, 3, 4, 5}) {
    const QuotientSpace space(n);
    CHECK((space.lift(unit(n, n - 1)) - Matrix::Identity(n, n)).norm() <= 1e-15);
    double worst = 0.0;
    for (const Vector& s : space.invariant_sample(1000, 9)) {
      const Point x = space.lift(s);
      CHECK(space.group().contains(x, 1e-12));
      worst = std::max(worst, (space.project(x) - s).norm());
    }
    CHECK(worst <= 1e-12);

    const Vector antipode = -unit(n, n - 1);
    const Point x = space.lift(antipode);
    CHECK(space.group().contains(x, 1e-14));
    CHECK((space.project(x) - antipode).norm() <= 1e-15);

    // Nearly antipodal points stay accurate.
    Vector near = antipode;
    near(0) = 1e-9;
    near.normalize();
    CHECK((space.project(space.lift(near)) - near).norm() <= 1e-14);
  }
  const QuotientSpace space(3);
  CHECK_THROWS_AS(space.lift(Vector::Ones(3)), DomainError);
}

TEST_CASE("invariant sampling moments") {
  for (int n : {3, 5}) {
    const QuotientSpace space(n);
    const auto points = space.invariant_sample(100000, 31);
    std::vector<double> first, second;
    double norm_error = 0.0;
    for (const Vector& s : points) {
      first.push_back(s(n - 1));
      second.push_back(s(n - 1) * s(n - 1));
      norm_error = std::max(norm_error, std::abs(s.norm() - 1.0));
    }
    const Estimate m1 = mean_estimate(first);
    const Estimate m2 = mean_estimate(second);
    CHECK(std::abs(m1.value) <= 3.0 * m1.std_error);
    CHECK(std::abs(m2.value - 1.0 / n) <= 3.0 * m2.std_error);
    CHECK(norm_error <= 1e-12);
  }
}

TEST_CASE("pushforward of Haar measure is the uniform sphere measure") {
  for (int n : {3, 4, 5}) {
    const QuotientSpace space(n);
    constexpr int bins = 20;
    constexpr std::size_t samples = 100000;
    std::vector<double> from_group(bins, 0.0), from_sphere(bins, 0.0);
    for (std::size_t i = 0; i < samples; ++i) {
      const double a = space.project(space.group().haar_sample_one(77, i))(n - 1);
      const double b = space.invariant_sample_one(78, i)(n - 1);
      from_group[std::min(bins - 1, static_cast<int>((a + 1.0) / 2.0 * bins))] += 1;
      from_sphere[std::min(bins - 1, static_cast<int>((b + 1.0) / 2.0 * bins))] += 1;
    }
    for (int k = 0; k < bins; ++k) {
      const double lo = -1.0 + 2.0 * k / bins;
      const double hi = -1.0 + 2.0 * (k + 1) / bins;
      const double p = last_coordinate_cdf(n, hi) - last_coordinate_cdf(n, lo);
      const double sigma = std::sqrt(samples * p * (1 - p));
      CHECK(std::abs(from_group[k] - samples * p) <= 4.0 * sigma);
      CHECK(std::abs(from_sphere[k] - samples * p) <= 4.0 * sigma);
    }
  }
}

TEST_CASE("last-coordinate law and cap volumes") {
  // S^2: s_3 is uniform on [-1, 1]; caps have area fraction (1 - cos phi) / 2.
  CHECK(last_coordinate_density(3, 0.3) == doctest::Approx(0.5));
  CHECK(last_coordinate_cdf(3, 0.3) == doctest::Approx(0.65));
  CHECK(cap_volume(3, 0.5) == doctest::Approx((1 - std::cos(0.5)) / 2).epsilon(1e-14));
  CHECK(cap_volume(3, 2.5) == doctest::Approx((1 - std::cos(2.5)) / 2).epsilon(1e-14));
  CHECK(cap_volume(2, 1.0) == doctest::Approx(1.0 / kPi).epsilon(1e-14));
  CHECK(cap_volume(5, kPi) == 1.0);
  // Density integrates to the distribution function (midpoint rule oracle).
  for (int n : {4, 6}) {
    double mass = 0.0;
    constexpr int steps = 100000;
    for (int k = 0; k < steps; ++k) mass += last_coordinate_density(n, -1.0 + (k + 0.5) * 1.3 / steps) * 1.3 / steps;
    CHECK(mass == doctest::Approx(last_coordinate_cdf(n, 0.3)).epsilon(1e-6));
  }
  // Tiny caps keep relative accuracy: lambda(cap) ~ phi^2 / 4 on S^2.
  CHECK(cap_volume(3, 1e-6) == doctest::Approx(0.25e-12).epsilon(1e-6));
}

TEST_CASE("induced automorphisms") {
  const QuotientSpace space(4);
  const InducedAutomorphism id = induced_automorphism(space, Automorphism::identity(space.group()));
  CHECK(id.automorphism().preserves_k());
  for (const Vector& s : space.invariant_sample(20, 3)) CHECK((id.apply(s) - s).norm() == 0.0);

  const double alpha = 0.7;
  const Matrix u = planar_rotation(3, 0, 1, alpha);
  const Matrix u_tilde = space.embed(u);
  const InducedAutomorphism rot = induced_automorphism(space, Automorphism::conjugation(u_tilde));
  for (const Vector& s : space.invariant_sample(200, 4)) {
    // Oracle: u~^{-1} x(s) u~ e_4 by explicit matrix products.
    const Vector expected = (u_tilde.transpose() * space.lift(s) * u_tilde).col(3);
    const Vector got = rot.apply(s);
    CHECK((got - expected).norm() <= 1e-10);
    CHECK((got.head(3) - u.transpose() * s.head(3)).norm() <= 1e-10);
    CHECK(got(3) == doctest::Approx(s(3)).epsilon(1e-15));
  }

  // Reflections in O(n-1) also normalize K.
  Matrix reflect = Matrix::Identity(3, 3);
  reflect(0, 0) = -1.0;
  CHECK_NOTHROW(induced_automorphism(space, Automorphism::conjugation(space.embed(reflect))));

  const Matrix tilted = planar_rotation(4, 0, 3, 0.4);
  try {
    induced_automorphism(space, Automorphism::conjugation(tilted));
    FAIL("expected NormalizerError");
  } catch (const NormalizerError& e) {
    CHECK(space.in_subgroup(e.witness()));
    CHECK_FALSE(space.in_subgroup(Automorphism::conjugation(tilted).apply(e.witness())));
  }

  // A custom automorphism is screened by probes only.
  const Matrix g = tilted;
  const Automorphism opaque = Automorphism::custom(
      space.group(), [g](const Point& x) -> Point { return g.transpose() * x * g; },
      [g](const Point& x) -> Point { return g * x * g.transpose(); });
  CHECK_THROWS_AS(induced_automorphism(space, opaque), NormalizerError);
}

TEST_CASE("induced action is equivariant") {
  for (int n : {3, 4, 5}) {
    const QuotientSpace space(n);
    Matrix u = Group::special_orthogonal(n - 1).haar_sample_one(8, 0);
    u.col(0) *= -1.0;  // det -1 component of O(n-1)
    const Automorphism a = Automorphism::conjugation(space.embed(u));
    const InducedAutomorphism induced = induced_automorphism(space, a);
    const Automorphism generic = Automorphism::custom(
        space.group(), [a](const Point& x) { return a.apply(x); }, [a](const Point& x) { return a.apply_inverse(x); });
    const InducedAutomorphism generic_induced = induced_automorphism(space, generic);
    double worst = 0.0;
    for (const Point& x : space.group().haar_sample(1000, 12)) {
      const Vector s = space.project(x);
      worst = std::max(worst, (space.project(a.apply(x)) - induced.apply(s)).norm());
      worst = std::max(worst, (generic_induced.apply(s) - induced.apply(s)).norm());
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("weil formula") {
  const QuotientSpace space(3);
  const WeilReport one = weil_check(space, [](const Point&) { return 1.0; }, 1000, 1);
  CHECK(one.group_side.value == 1.0);
  CHECK(one.quotient_side.value == 1.0);
  CHECK(one.pass);

  const WeilReport moment = weil_check(space, [](const Point& x) { return x(2, 2) * x(2, 2); }, 100000, 2, true);
  CHECK(std::abs(moment.group_side.value - 1.0 / 3) <= 3.0 * moment.group_side.std_error);
  CHECK(std::abs(moment.quotient_side.value - 1.0 / 3) <= 3.0 * moment.quotient_side.std_error);
  CHECK(moment.pass);
  REQUIRE(moment.invariant_collapse_error.has_value());
  CHECK(*moment.invariant_collapse_error <= 1e-12);

  // Not right-K-invariant: the fiber average matters.
  const WeilReport mixed = weil_check(space, [](const Point& x) { return x(0, 0) * x(0, 0) + x(1, 2); }, 100000, 3);
  CHECK(std::abs(mixed.group_side.value - 1.0 / 3) <= 3.0 * mixed.group_side.std_error);
  CHECK(mixed.pass);

  const WeilReport zero = weil_check(space, [](const Point& x) { return x(0, 1); }, 20000, 4);
  CHECK_FALSE(zero.relative);
  CHECK(zero.pass);

  CHECK_THROWS_AS(weil_check(space, [](const Point&) { return std::nan(""); }, 10, 4), NumericalError);
}
