#include <doctest.h>

#include "hausdorff/operators.hpp"

#include <cmath>
#include <vector>

using namespace hausdorff;

namespace {

Point column(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

Matrix planar_rotation(int n, double angle) {
  Matrix g = Matrix::Identity(n, n);
  g(0, 0) = g(1, 1) = std::cos(angle);
  g(0, 1) = -std::sin(angle);
  g(1, 0) = std::sin(angle);
  return g;
}

Vector sphere_point(int n, std::uint64_t seed, std::uint64_t index) {
  return QuotientSpace(n).invariant_sample_one(seed, index);
}

double smooth_test(const Point& p) {
  const Vector s = p.col(0);
  return s(0) * s(0) + 0.5 * s(1) - 0.3 * s(0) * s(2) + std::sin(2.0 * s(2));
}

}  // namespace

TEST_CASE("discrete operators") {
  const Space sphere = Space::sphere(3);
  const Group so3 = Group::special_orthogonal(3);
  const Function f = smooth_test;
  std::vector<Point> points;
  for (std::uint64_t i = 0; i < 20; ++i) points.push_back(sphere_point(3, 5, i));

  SUBCASE("identity term reproduces f") {
    const KernelSpec k = KernelSpec::discrete(sphere, {{1.0, Automorphism::identity(so3)}});
    const OperatorOutput out = apply_discrete(k, f, points);
    for (std::size_t i = 0; i < points.size(); ++i) {
      CHECK(out.values[i] == f(points[i]));
      CHECK(out.std_errors[i] == 0.0);
    }
  }

  SUBCASE("rotation pair on the sphere") {
    const Matrix g = planar_rotation(3, 0.7);
    const Automorphism a = Automorphism::conjugation(g);
    const KernelSpec k = KernelSpec::discrete(sphere, {{0.5, a}, {0.5, a.inverse()}});
    const KernelSpec swapped = KernelSpec::discrete(sphere, {{0.5, a.inverse()}, {0.5, a}});
    const OperatorOutput out = apply_discrete(k, f, points);
    const OperatorOutput other = apply_discrete(swapped, f, points);
    for (std::size_t i = 0; i < points.size(); ++i) {
      // Conjugation by diag(R, 1) moves s to (R^T s', s_n).
      const Vector s = points[i].col(0);
      Vector forward = s, backward = s;
      forward.head(2) = g.topLeftCorner(2, 2).transpose() * s.head(2);
      backward.head(2) = g.topLeftCorner(2, 2) * s.head(2);
      const double oracle = 0.5 * f(Matrix(forward)) + 0.5 * f(Matrix(backward));
      CHECK(out.values[i] == doctest::Approx(oracle).epsilon(1e-13));
      CHECK(std::abs(out.values[i] - other.values[i]) <= 1e-14);
    }
  }

  SUBCASE("zero weights give the zero function") {
    const KernelSpec k =
        KernelSpec::discrete(sphere, {{0.0, Automorphism::identity(so3)}, {0.0, Automorphism::conjugation(planar_rotation(3, 1.0))}});
    for (double v : apply_discrete(k, f, points).values) CHECK(v == 0.0);
  }

  SUBCASE("infinite families") {
    const Space line = Space::euclidean(1);
    const auto harmonic = KernelSpec::discrete_series(
        line, [](std::size_t n) { return DiscreteTerm{1.0 / (n + 1.0), Automorphism::linear(Matrix::Constant(1, 1, 1.0))}; },
        4096);
    const Function g = [](const Point& p) { return std::exp(-p(0, 0) * p(0, 0)); };
    CHECK_THROWS_AS(apply_discrete(harmonic, g, {column({0.3})}), DomainError);
    const auto geometric = KernelSpec::discrete_series(
        line,
        [](std::size_t n) {
          return DiscreteTerm{std::ldexp(1.0, -static_cast<int>(n)), Automorphism::linear(Matrix::Constant(1, 1, 1.0 + n))};
        },
        64);
    const OperatorOutput out = apply_discrete(geometric, g, {column({0.3})});
    double oracle = 0.0;
    for (int n = 0; n < 64; ++n) oracle += std::ldexp(1.0, -n) * std::exp(-std::pow(0.3 * (1.0 + n), 2));
    CHECK(out.values[0] == doctest::Approx(oracle).epsilon(1e-14));
  }

  SUBCASE("linear maps cannot act on the sphere") {
    CHECK_THROWS_AS(KernelSpec::discrete(sphere, {{1.0, Automorphism::linear(Matrix::Identity(3, 3))}}), DomainError);
    const Matrix tilt = Group::special_orthogonal(3).exp(0.4 * so3.algebra_basis(1));
    CHECK_THROWS_AS(KernelSpec::discrete(sphere, {{1.0, Automorphism::conjugation(tilt)}}), NormalizerError);
  }
}

TEST_CASE("continuous operators") {
  const Space sphere = Space::sphere(3);
  std::vector<Point> points;
  for (std::uint64_t i = 0; i < 8; ++i) points.push_back(sphere_point(3, 9, i));

  SUBCASE("constant integrand in u") {
    const Group so3 = Group::special_orthogonal(3);
    const KernelSpec k = KernelSpec::continuous(
        sphere, [so3](std::uint64_t, std::uint64_t, int) { return ParameterDraw{Automorphism::identity(so3)}; });
    const OperatorOutput out = apply_continuous(k, smooth_test, points, 500, 1);
    for (std::size_t i = 0; i < points.size(); ++i) {
      CHECK(out.values[i] == doctest::Approx(smooth_test(points[i])).epsilon(1e-14));
      CHECK(out.std_errors[i] <= 1e-15);
    }
  }

  SUBCASE("slice kernel keeps the last coordinate") {
    const OperatorOutput out =
        apply_continuous(slice_kernel(3), [](const Point& p) { return p(2, 0); }, points, 1000, 2);
    for (std::size_t i = 0; i < points.size(); ++i) {
      CHECK(out.values[i] == doctest::Approx(points[i](2, 0)).epsilon(1e-14));
      CHECK(out.std_errors[i] <= 1e-15);
    }
  }

  SUBCASE("standard error scales as n^{-1/2}") {
    const Function f = [](const Point& p) { return p(0, 0) + p(1, 0) * p(1, 0); };
    const Point s = column({0.6, 0.0, 0.8});
    const double e1 = apply_continuous(slice_kernel(3), f, {s}, 10000, 3).std_errors[0];
    const double e4 = apply_continuous(slice_kernel(3), f, {s}, 40000, 4).std_errors[0];
    CHECK(e1 / e4 == doctest::Approx(2.0).epsilon(0.2));
  }

  SUBCASE("non-finite values are errors") {
    const Function bad = [](const Point& p) { return p(0, 0) > 0.0 ? std::nan("") : 0.0; };
    CHECK_THROWS_AS(apply_continuous(slice_kernel(3), bad, points, 100, 5), NumericalError);
    const KernelSpec bad_phi = slice_kernel(3, [](const Matrix&) { return std::nan(""); });
    CHECK_THROWS_AS(apply_continuous(bad_phi, smooth_test, points, 100, 5), NumericalError);
  }

  SUBCASE("linearity") {
    const Atom a = make_ball_atom(sphere, column({0.0, 0.6, 0.8}), 0.9, 2.0);
    const Atom b = make_ball_atom(sphere, column({0.0, 0.0, 1.0}), 1.2, 2.0);
    const Function combo = [&](const Point& p) { return 2.5 * a(p) - 0.75 * b(p); };
    const KernelSpec k = slice_kernel(3, [](const Matrix& u) { return 1.0 + 0.5 * u(0, 0); });
    const OperatorOutput fa = apply_continuous(k, a.function(), points, 4000, 6);
    const OperatorOutput fb = apply_continuous(k, b.function(), points, 4000, 6);
    const OperatorOutput fc = apply_continuous(k, combo, points, 4000, 6);
    const OperatorOutput fd = apply_continuous(k, combo, points, 4000, 7);
    for (std::size_t i = 0; i < points.size(); ++i) {
      CHECK(std::abs(fc.values[i] - (2.5 * fa.values[i] - 0.75 * fb.values[i])) <= 1e-10);
      // Independent draws agree within 3 combined sigma.
      CHECK(std::abs(fc.values[i] - fd.values[i]) <= 3.0 * std::hypot(fc.std_errors[i], fd.std_errors[i]) + 1e-12);
    }
    const Group so3 = Group::special_orthogonal(3);
    const KernelSpec disc = KernelSpec::discrete(
        sphere, {{0.3, Automorphism::conjugation(planar_rotation(3, 0.4))}, {-1.2, Automorphism::identity(so3)}});
    const OperatorOutput da = apply_discrete(disc, a.function(), points);
    const OperatorOutput db = apply_discrete(disc, b.function(), points);
    const OperatorOutput dc = apply_discrete(disc, combo, points);
    for (std::size_t i = 0; i < points.size(); ++i)
      CHECK(std::abs(dc.values[i] - (2.5 * da.values[i] - 0.75 * db.values[i])) <= 1e-10);
  }

  SUBCASE("atomic measure reproduces the discrete sum") {
    const Group so3 = Group::special_orthogonal(3);
    const std::vector<DiscreteTerm> atoms = {{0.7, Automorphism::conjugation(planar_rotation(3, 0.3))},
                                             {-0.2, Automorphism::conjugation(planar_rotation(3, 2.1))},
                                             {1.5, Automorphism::identity(so3)}};
    const std::vector<double> masses = {0.5, 0.25, 2.0};
    std::vector<DiscreteTerm> weighted = atoms;
    for (std::size_t i = 0; i < atoms.size(); ++i) weighted[i].weight *= masses[i];
    const OperatorOutput c = apply_continuous(KernelSpec::atomic_measure(sphere, masses, atoms), smooth_test, points, 10, 0);
    const OperatorOutput d = apply_discrete(KernelSpec::discrete(sphere, weighted), smooth_test, points);
    for (std::size_t i = 0; i < points.size(); ++i) CHECK(c.values[i] == d.values[i]);
  }
}

TEST_CASE("Delsarte shift") {
  SUBCASE("two-element group on the line") {
    const Space line = Space::euclidean(1);
    const CompactAutomorphismGroup signs = sign_group(1);
    const Function f = [](const Point& p) { return std::exp(p(0, 0)) + p(0, 0) * p(0, 0) * p(0, 0); };
    for (double x : {-1.3, 0.0, 0.4, 2.0})
      for (double h : {-0.5, 0.0, 1.1}) {
        const Estimate t = delsarte_shift(line, f, column({x}), column({h}), signs, 0, 0);
        CHECK(std::abs(t.value - 0.5 * (f(column({h + x})) + f(column({h - x})))) <= 1e-12);
        CHECK(t.std_error == 0.0);
      }
    const Function even = [](const Point& p) { return std::cos(p(0, 0)) + p(0, 0) * p(0, 0); };
    CHECK(delsarte_shift(line, even, column({0.8}), column({0.0}), signs, 0, 0).value == doctest::Approx(even(column({0.8}))));
  }

  SUBCASE("identity point") {
    const Space so3 = Space::special_orthogonal(3);
    const Point h = so3.group().haar_sample_one(3, 0);
    const Function f = [](const Point& x) { return x(0, 1) + x(2, 2) * x(1, 0); };
    const Estimate t = delsarte_shift(so3, f, so3.group().identity(), h, rotation_conjugations(3), 200, 1);
    CHECK(t.value == doctest::Approx(f(h)).epsilon(1e-12));
  }

  SUBCASE("factorization through the Hausdorff operator") {
    // L^h f(x) as H_1 (tau_h f)(x) with the same draws as the direct average.
    const Space sphere = Space::sphere(3);
    const CompactAutomorphismGroup omega = isotropy_conjugations(3);
    for (std::uint64_t t = 0; t < 10; ++t) {
      const Atom a = make_ball_atom(sphere, Matrix(sphere_point(3, 11, t)), 0.8 + 0.05 * t, 2.0);
      const Point x = sphere_point(3, 12, t);
      const Point h = sphere.group().haar_sample_one(13, t);
      const Estimate direct = delsarte_shift(sphere, a.function(), x, h, omega, 4000, 100 + t);
      const OperatorOutput factored =
          apply_continuous(delsarte_kernel(sphere, omega), translated(sphere, a.function(), h), {x}, 4000, 100 + t);
      CHECK(std::abs(direct.value - factored.values[0]) <= 1e-12);
      // Independent draws agree statistically.
      const OperatorOutput other =
          apply_continuous(delsarte_kernel(sphere, omega), translated(sphere, a.function(), h), {x}, 4000, 900 + t);
      CHECK(std::abs(direct.value - other.values[0]) <= 4.0 * std::hypot(direct.std_error, other.std_errors[0]) + 1e-12);
    }
  }
}

TEST_CASE("slice transform") {
  SUBCASE("odd coordinate averages to zero") {
    const Function f = [](const Point& p) { return p(0, 0); };
    for (std::uint64_t i = 0; i < 5; ++i) {
      const Vector s = sphere_point(4, 21, i);
      const Estimate e = slice_transform(f, s, 20000, i);
      CHECK(std::abs(e.value) <= 4.0 * e.std_error + 1e-12);
    }
  }

  SUBCASE("zonal functions are fixed") {
    const Function f = [](const Point& p) { return std::exp(p(2, 0)) - p(2, 0) * p(2, 0); };
    for (std::uint64_t i = 0; i < 5; ++i) {
      const Vector s = sphere_point(3, 22, i);
      const Estimate e = slice_transform(f, s, 100, i);
      CHECK(e.value == doctest::Approx(f(Matrix(s))).epsilon(1e-14));
    }
  }

  SUBCASE("slice average of s_1^2") {
    const Function f = [](const Point& p) { return p(0, 0) * p(0, 0); };
    for (double c : {0.0, 0.5, 0.9}) {
      const double r = std::sqrt(1.0 - c * c);
      const Estimate e = slice_transform(f, column({r * std::cos(0.3), r * std::sin(0.3), c}), 40000, 7);
      CHECK(std::abs(e.value - 0.5 * (1.0 - c * c)) <= 3.0 * e.std_error);
    }
  }

  SUBCASE("averages stay between the extremes on the slice") {
    const Function f = smooth_test;
    for (std::uint64_t i = 0; i < 5; ++i) {
      const Vector s = sphere_point(3, 23, i);
      const double r = s.head(2).norm();
      double lo = kInf, hi = -kInf;
      for (int k = 0; k < 3600; ++k) {
        const double t = 2.0 * kPi * k / 3600.0;
        const double v = f(column({r * std::cos(t), r * std::sin(t), s(2)}));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const Estimate e = slice_transform(f, s, 5000, i);
      CHECK(e.value >= lo - 3.0 * e.std_error - 1e-6);
      CHECK(e.value <= hi + 3.0 * e.std_error + 1e-6);
    }
  }

  SUBCASE("O(n-1) sampling covers both components") {
    int reflections = 0;
    for (std::uint64_t i = 0; i < 4000; ++i) {
      const Matrix u = orthogonal_sample(3, 31, i);
      CHECK((u.transpose() * u - Matrix::Identity(3, 3)).norm() <= 1e-12);
      reflections += u.determinant() < 0.0 ? 1 : 0;
    }
    CHECK(std::abs(reflections - 2000) <= 4 * std::sqrt(1000.0));
    const Matrix one = orthogonal_sample(1, 31, 0);
    CHECK(std::abs(one(0, 0)) == 1.0);
  }
}

TEST_CASE("zonal check") {
  const int n = 3;
  SUBCASE("zonal input") {
    const ZonalReport r = zonal_check(n, exact_function([](const Point& p) { return std::cos(3.0 * p(2, 0)); }), 5, 8, 1);
    CHECK(r.pass);
    CHECK(r.max_spread <= 1e-15);
  }
  SUBCASE("averaged non-zonal input") {
    const Function f = [](const Point& p) { return p(0, 0) * p(0, 0) + p(1, 0); };
    const ZonalReport r = zonal_check(n, slice_average(n, f, 20000, 2), 5, 8, 3);
    CHECK(r.pass);
    for (const ZonalLevel& level : r.levels)
      for (std::size_t i = 0; i < level.values.size(); ++i)
        CHECK(std::abs(level.values[i] - 0.5 * (1.0 - level.level * level.level)) <= 4.0 * level.std_errors[i]);
  }
  SUBCASE("raw non-zonal input fails") {
    const ZonalReport r = zonal_check(n, exact_function([](const Point& p) { return p(0, 0) * p(0, 0) + p(1, 0); }), 5, 8, 3);
    CHECK_FALSE(r.pass);
    CHECK(r.max_spread > 0.5);
  }
}

TEST_CASE("vanishing of the dilation-average operator") {
  const Space line = Space::euclidean(1);
  SUBCASE("two-lobe atom, n = 1") {
    const Atom a = make_ball_atom(line, column({0.4}), 0.9, 2.0);
    const Remark2Value v = remark2_vanish(a, column({0.7}));
    CHECK(std::abs(v.value) <= 1e-6);
  }
  SUBCASE("product and bump atoms, n = 2") {
    const Space plane = Space::euclidean(2);
    const Atom p = make_ball_atom(plane, column({0.3, -0.2}), 0.7, 4.0, AtomProfile::product);
    CHECK(std::abs(remark2_vanish(p, column({0.5, -1.3})).value) <= 1e-6);
    const Atom b = make_ball_atom(plane, column({-0.6, 0.1}), 0.5, kInf, AtomProfile::smooth_bump);
    CHECK(std::abs(remark2_vanish(b, column({-2.0, 0.25})).value) <= 1e-6);
  }
  SUBCASE("substitution scale") {
    // A function with nonzero integral: int f(u x) du = (1 / |x|) int f.
    const Atom bump({line, column({0.5}), 1.0, 2.0, AtomProfile::zero,
                     [](const Point& p) {
                       const double t = p(0, 0) - 0.5;
                       return std::abs(t) < 1.0 ? 1.0 - t * t : 0.0;
                     },
                     {{-0.5, 1.5}},
                     false,
                     false,
                     {}});
    for (double x : {0.7, -1.9, 3.0})
      CHECK(remark2_vanish(bump, column({x})).value == doctest::Approx(4.0 / 3.0 / std::abs(x)).epsilon(1e-10));
  }
  SUBCASE("zero coordinate") {
    const Atom p = make_ball_atom(Space::euclidean(2), column({0.0, 0.0}), 1.0, 2.0, AtomProfile::product);
    CHECK_THROWS_AS(remark2_vanish(p, column({1.0, 0.0})), DomainError);
  }
}
