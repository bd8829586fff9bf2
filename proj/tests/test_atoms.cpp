#include <doctest.h>

#include "hausdorff/atoms.hpp"
#include "hausdorff/serialize.hpp"

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

Vector unit(int n, int i) {
  Vector e = Vector::Zero(n);
  e(i) = 1.0;
  return e;
}

// Midpoint rule on [lo, hi] with many cells, independent of the library quadrature.
double midpoint_1d(const std::function<double(double)>& f, double lo, double hi, int cells = 2000000) {
  const double h = (hi - lo) / cells;
  double sum = 0.0;
  for (int k = 0; k < cells; ++k) sum += f(lo + (k + 0.5) * h);
  return sum * h;
}

Atom rescaled(const Atom& a, double factor) {
  return Atom({a.space(), a.center(), a.radius(), a.q(), a.profile(),
               [a, factor](const Point& p) { return factor * a(p); }, a.breakpoints(), a.piecewise_constant(), false,
               {}});
}

Atom shifted(const Atom& a, const Point& offset) {
  return Atom({a.space(), a.center(), a.radius(), a.q(), a.profile(),
               [a, offset](const Point& p) { return a(Matrix(p - offset)); }, {}, false, false, {}});
}

}  // namespace

TEST_CASE("two-lobe atom on the line") {
  const Space line = Space::euclidean(1);
  const Atom a = make_ball_atom(line, column({0.0}), 1.0, 2.0);
  const AtomValidation v = validate_atom(a);
  CHECK(v.pass);
  CHECK(v.mean_residual <= 1e-10);

  const auto f = [&](double x) { return a(column({x})); };
  const double l2 = std::sqrt(midpoint_1d([&](double x) { return f(x) * f(x); }, -1.5, 1.5));
  CHECK(l2 <= std::pow(2.0, -0.5));
  CHECK(l2 == doctest::Approx(0.99 * std::pow(2.0, -0.5)).epsilon(1e-5));
  CHECK(v.norm == doctest::Approx(l2).epsilon(1e-5));
  CHECK(std::abs(midpoint_1d(f, -1.5, 1.5)) <= 1e-10);
  // Support inside [-1, 1].
  for (double x : {-1.0001, 1.0001, -3.0, 7.0}) CHECK(f(x) == 0.0);
}

TEST_CASE("ball atoms pass validation on every backend") {
  for (double q : {2.0, 4.0, kInf}) {
    for (int n : {1, 2, 3}) {
      const Space space = Space::euclidean(n);
      Point c = Point::Zero(n, 1);
      c(0, 0) = 0.3;
      for (AtomProfile profile : {AtomProfile::two_lobe, AtomProfile::product, AtomProfile::smooth_bump}) {
        if (profile == AtomProfile::smooth_bump && n == 3) continue;
        const AtomValidation v = validate_atom(make_ball_atom(space, c, 0.7, q, profile));
        INFO("n = ", n, " q = ", q, " profile = ", to_string(profile));
        CHECK(v.pass);
        CHECK(v.norm <= v.norm_bound * (1.0 + 1e-6));
        CHECK(v.norm >= 0.98 * v.norm_bound);
      }
    }
    for (int n : {3, 4}) {
      const Space space = Space::special_orthogonal(n);
      const Point c = space.group().haar_sample_one(5, static_cast<std::uint64_t>(n));
      const AtomValidation v = validate_atom(make_ball_atom(space, c, 1.1, q), {40000, 9});
      INFO("SO(", n, ") q = ", q);
      CHECK(v.pass);
      CHECK(v.mean_residual <= 1e-12);
    }
    const Space sphere = Space::sphere(3);
    const AtomValidation v = validate_atom(make_ball_atom(sphere, unit(3, 0), 0.5, q), {40000, 10});
    CHECK(v.pass);
  }
}

TEST_CASE("sphere cap atom with q = inf") {
  const Space sphere = Space::sphere(3);
  const Atom a = make_ball_atom(sphere, unit(3, 2), 0.5, kInf);
  const double cap = (1.0 - std::cos(0.5)) / 2.0;
  CHECK(a.ball_volume() == doctest::Approx(cap).epsilon(1e-13));
  const AtomValidation v = validate_atom(a, {50000, 1});
  CHECK(v.pass);
  CHECK(v.norm == doctest::Approx(0.99 / cap).epsilon(1e-12));
  CHECK(v.norm <= 1.0 / cap);
}

TEST_CASE("validation detects violated conditions") {
  const Space plane = Space::euclidean(2);
  const Atom a = make_ball_atom(plane, column({0.1, -0.2}), 0.8, 2.0);
  const AtomValidation doubled = validate_atom(rescaled(a, 2.0));
  CHECK_FALSE(doubled.norm_ok);
  CHECK(doubled.norm_excess == doctest::Approx((2 * 0.99 - 1) * a.norm_bound()).epsilon(1e-6));
  CHECK(doubled.support_ok);
  CHECK(doubled.mean_ok);

  const AtomValidation leaking = validate_atom(shifted(a, column({0.5, 0.0})));
  CHECK_FALSE(leaking.support_ok);
  CHECK(leaking.support_leakage > 0.0);

  const Atom one_sided({plane, a.center(), a.radius(), 2.0, AtomProfile::two_lobe,
                        [a](const Point& p) { return std::abs(a(p)); }, a.breakpoints(), true, false, {}});
  const AtomValidation biased = validate_atom(one_sided);
  CHECK_FALSE(biased.mean_ok);

  const Space so3 = Space::special_orthogonal(3);
  const Atom b = make_ball_atom(so3, so3.group().identity(), 1.0, 4.0);
  const AtomValidation b2 = validate_atom(rescaled(b, 2.0), {40000, 2});
  CHECK_FALSE(b2.norm_ok);
  CHECK(b2.norm == doctest::Approx(2 * 0.99 * b.norm_bound()).epsilon(0.05));
  const Matrix tilt = so3.group().exp(0.8 * so3.group().algebra_basis(2));
  const Atom b_shift({so3, b.center(), b.radius(), 4.0, AtomProfile::two_lobe,
                      [b, tilt](const Point& x) { return b(Matrix(tilt * x)); }, {}, true, false, {}});
  CHECK_FALSE(validate_atom(b_shift, {40000, 3}).support_ok);
  const Atom b_biased({so3, b.center(), b.radius(), 4.0, AtomProfile::two_lobe,
                       [b](const Point& x) { return std::abs(b(x)); }, {}, true, false, {}});
  CHECK_FALSE(validate_atom(b_biased, {40000, 4}).mean_ok);
}

TEST_CASE("ball atom construction errors") {
  CHECK_THROWS_AS(make_ball_atom(Space::special_orthogonal(3), Matrix::Identity(3, 3), 5.0, 2.0), DomainError);
  CHECK_THROWS_AS(make_ball_atom(Space::sphere(3), unit(3, 2), kPi, 2.0), DomainError);
  CHECK_THROWS_AS(make_ball_atom(Space::euclidean(2), column({0.0, 0.0}), 1e-320, 2.0), DomainError);
  CHECK_THROWS_AS(make_ball_atom(Space::euclidean(2), column({0.0, 0.0}), 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(make_ball_atom(Space::sphere(3), unit(3, 2), 0.5, 2.0, AtomProfile::product), DomainError);
  try {
    make_ball_atom(Space::euclidean(1), column({1e20}), 1e-10, 2.0);
    FAIL("expected an error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("radius too small for profile") != std::string::npos);
  }
}

TEST_CASE("smooth bump norm against direct integration") {
  const Space line = Space::euclidean(1);
  const Atom a = make_ball_atom(line, column({0.0}), 1.0, 2.0, AtomProfile::smooth_bump);
  const double l2sq = midpoint_1d([&](double x) { return a(column({x})) * a(column({x})); }, -1.0, 1.0);
  CHECK(std::sqrt(l2sq) == doctest::Approx(0.99 * a.norm_bound()).epsilon(1e-6));
  const Atom b = make_ball_atom(line, column({0.0}), 1.0, kInf, AtomProfile::smooth_bump);
  double sup = 0.0;
  for (int k = 0; k <= 200000; ++k) sup = std::max(sup, std::abs(b(column({-1.0 + k * 1e-5}))));
  CHECK(sup == doctest::Approx(0.99 / 2.0).epsilon(1e-6));
}

TEST_CASE("whole-space atoms") {
  const Space so3 = Space::special_orthogonal(3);
  const Atom one = make_constant_atom(so3, 2.0);
  CHECK(one.mean_exempt());
  CHECK(one.ball_volume() == 1.0);
  CHECK(validate_atom(one, {20000, 1}).pass);

  const Space sphere = Space::sphere(3);
  // c s_n has |.|_2 = 1 iff c = sqrt(n), since E[s_n^2] = 1/n.
  const Atom linear = make_named_global_atom(sphere, 2.0, "last_coordinate");
  CHECK(linear(Matrix(unit(3, 2))) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(validate_atom(linear, {100000, 2}).pass);
  CHECK_NOTHROW(make_global_atom(sphere, 2.0, [](const Point& s) { return std::sqrt(3.0) * s(2, 0); }));

  try {
    make_global_atom(sphere, 2.0, [](const Point& s) { return s(2, 0) + 0.5; });
    FAIL("expected rejection");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("zero mean") != std::string::npos);
  }
  try {
    make_global_atom(sphere, 2.0, [](const Point& s) { return 2.0 * s(2, 0); });
    FAIL("expected rejection");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("measured") != std::string::npos);
  }
  CHECK_THROWS_AS(make_constant_atom(Space::euclidean(2), 2.0), DomainError);
}

TEST_CASE("pullback atoms") {
  const Space line = Space::euclidean(1);
  const Atom a = make_ball_atom(line, column({0.4}), 1.0, 2.0);

  const Pullback same = pullback_atom(a, Automorphism::identity(line.group()), 2.0, 1.0);
  CHECK(same.scale == doctest::Approx(std::pow(2.0, -0.5)));
  CHECK(validate_atom(same.atom).pass);

  // A x = 2x: mod = 2, k = 1/2, scale = 2^{-1/2} 2^{1/2} (1/2)^{-1/2} = sqrt(2).
  const Matrix two = Matrix::Constant(1, 1, 2.0);
  const Pullback dilated = pullback_atom(a, Automorphism::linear(two), 2.0, 1.0);
  CHECK(dilated.modulus == 2.0);
  CHECK(dilated.k == doctest::Approx(0.5));
  CHECK(dilated.scale == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(dilated.atom.radius() == doctest::Approx(0.5));
  CHECK(dilated.atom.center()(0, 0) == doctest::Approx(0.2));
  for (double x : {-0.3, 0.05, 0.2, 0.31, 0.44}) {
    CHECK(dilated.atom(column({x})) == doctest::Approx(std::sqrt(2.0) * a(column({2 * x}))));
  }
  CHECK(validate_atom(dilated.atom).pass);

  // Hilbert-Schmidt and spectral k differ on R^2.
  const Space plane = Space::euclidean(2);
  const Atom p = make_ball_atom(plane, column({0.0, 1.0}), 1.0, 4.0);
  const Matrix diag = Vector(column({0.5, 3.0})).asDiagonal();
  const Pullback spectral = pullback_atom(p, Automorphism::linear(diag), 4.0, 2.0, NormChoice::spectral);
  const Pullback hs = pullback_atom(p, Automorphism::linear(diag), 4.0, 2.0, NormChoice::hilbert_schmidt);
  CHECK(spectral.k == doctest::Approx(2.0));
  CHECK(hs.k == doctest::Approx(std::sqrt(4.0 + 1.0 / 9.0)));
  CHECK(validate_atom(spectral.atom).pass);
  CHECK(validate_atom(hs.atom).pass);

  // SO(3) conjugation: mod = k = 1, scale = C^{1/q - 1}.
  const Space so3 = Space::special_orthogonal(3);
  const Atom b = make_ball_atom(so3, so3.group().haar_sample_one(3, 0), 1.3, 2.0);
  Matrix g = so3.group().haar_sample_one(3, 1);
  g.col(0) *= -1.0;
  const Pullback conj = pullback_atom(b, Automorphism::conjugation(g), 8.0, 3.0);
  CHECK(conj.scale == doctest::Approx(std::pow(8.0, -0.5)).epsilon(1e-12));
  CHECK(conj.k == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(conj.atom.radius() == doctest::Approx(b.radius()).epsilon(1e-12));
  CHECK(validate_atom(conj.atom, {40000, 5}).pass);

  // Induced action on the sphere.
  const Space sphere = Space::sphere(4);
  const QuotientSpace& quotient = sphere.quotient();
  const Atom s = make_ball_atom(sphere, unit(4, 1), 0.6, 4.0);
  const Matrix u = quotient.embed(Group::special_orthogonal(3).haar_sample_one(4, 0));
  const Pullback spun = pullback_atom(s, Automorphism::conjugation(u), 2.0, 1.0);
  const Vector expected = u * unit(4, 1);
  CHECK((spun.atom.center().col(0) - expected).norm() <= 1e-14);
  CHECK(validate_atom(spun.atom, {40000, 6}).pass);
  CHECK_THROWS_AS(pullback_atom(s, Automorphism::conjugation(Group::special_orthogonal(4).haar_sample_one(4, 1)), 2.0, 1.0),
                  DomainError);

  // Singular differential of the inverse.
  const Automorphism degenerate = Automorphism::custom(
      line.group(), [](const Point& x) -> Point { return x.unaryExpr([](double t) { return std::cbrt(t); }); },
      [](const Point& x) -> Point { return x.array().cube().matrix(); });
  CHECK_THROWS_AS(pullback_atom(a, degenerate, 2.0, 1.0), DomainError);
}

TEST_CASE("right-K-invariant lift of a sphere atom") {
  const Space sphere = Space::sphere(3);
  const Atom s = make_ball_atom(sphere, unit(3, 0), 0.7, 2.0);
  const Atom g = make_invariant_atom(s);
  CHECK(g.space() == Space::special_orthogonal(3));
  // sqrt(2) * 0.7 + diam SO(2) exceeds diam SO(3), so the ball is the whole group.
  CHECK(g.radius() == doctest::Approx(kPi * std::sqrt(2.0)));
  CHECK(g.ball_volume() == doctest::Approx(1.0));
  const QuotientSpace quotient(3);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const Point x = quotient.group().haar_sample_one(7, i);
    const Point k = quotient.subgroup_sample_one(8, i);
    worst = std::max(worst, std::abs(g(Matrix(x * k)) - g(x)));
    CHECK(g(x) == doctest::Approx(std::pow(1.0 / s.ball_volume(), -0.5) * s(Matrix(x.col(2)))));
  }
  CHECK(worst == 0.0);
  CHECK(validate_atom(g, {100000, 7}).pass);
}

TEST_CASE("atomic functions") {
  const Space plane = Space::euclidean(2);
  const Atom a = make_ball_atom(plane, column({0.0, 0.0}), 1.0, 2.0);
  const Atom b = make_ball_atom(plane, column({0.5, 0.3}), 0.4, 2.0, AtomProfile::product);
  CHECK(atomic_function({1.0}, {a}).atomic_norm_bound() == 1.0);
  const AtomicFunction f = atomic_function({2.0, -3.0}, {a, b});
  CHECK(f.atomic_norm_bound() == 5.0);
  const Point p = column({0.45, 0.05});
  CHECK(f(p) == doctest::Approx(2.0 * a(p) - 3.0 * b(p)));

  CHECK_THROWS_AS(atomic_function({1.0, 1.0}, {a, make_ball_atom(plane, column({0.0, 0.0}), 1.0, 4.0)}), DomainError);
  CHECK_THROWS_AS(atomic_function({1.0, 1.0}, {a, make_ball_atom(Space::euclidean(1), column({0.0}), 1.0, 2.0)}),
                  DomainError);
  const ValidationOptions options;
  CHECK_THROWS_AS(atomic_function({1.0}, {rescaled(a, 3.0)}, &options), DomainError);

  // L1 domination: midpoint rule on a fine grid.
  constexpr int cells = 1500;
  const double lo = -1.5, hi = 1.5, h = (hi - lo) / cells;
  double l1 = 0.0;
  for (int i = 0; i < cells; ++i)
    for (int k = 0; k < cells; ++k) l1 += std::abs(f(column({lo + (i + 0.5) * h, lo + (k + 0.5) * h})));
  l1 *= h * h;
  CHECK(l1 <= f.atomic_norm_bound());
}

TEST_CASE("atoms round-trip through their recipes") {
  const Space so4 = Space::special_orthogonal(4);
  const Space sphere = Space::sphere(3);
  const Space plane = Space::euclidean(2);
  const Matrix diag = Vector(column({0.25, 4.0})).asDiagonal();
  const std::vector<Atom> atoms = {
      make_ball_atom(plane, column({0.1, 0.2}), 0.9, 2.0, AtomProfile::product),
      make_ball_atom(plane, column({0.1, 0.2}), 0.9, kInf, AtomProfile::smooth_bump),
      make_zero_atom(plane, column({0.0, 0.0}), 1.0, 2.0),
      make_ball_atom(so4, so4.group().haar_sample_one(1, 0), 1.5, 4.0),
      make_named_global_atom(sphere, 3.0, "last_coordinate"),
      make_invariant_atom(make_ball_atom(sphere, unit(3, 1), 0.4, 2.0)),
      pullback_atom(make_ball_atom(plane, column({1.0, -1.0}), 2.0, 2.0), Automorphism::linear(diag), 4.0, 2.0).atom,
      pullback_atom(make_ball_atom(so4, so4.group().identity(), 1.0, 2.0),
                    Automorphism::conjugation(so4.group().haar_sample_one(1, 1)), 64.0, 6.0)
          .atom,
  };
  for (const Atom& a : atoms) {
    const Json j = to_json(a);
    const Atom back = atom_from_json(Json::parse(j.dump()));
    CHECK(to_json(back) == j);
    CHECK(back.radius() == a.radius());
    for (std::uint64_t i = 0; i < 50; ++i) {
      const auto [y, mirror] = a.space().ball_sample_pair(a.center(), std::min(a.radius(), a.space().diameter()), 3, i);
      CHECK(back(y) == a(y));
      CHECK(back(mirror) == a(mirror));
    }
  }
  const Atom opaque = make_global_atom(sphere, 2.0, [](const Point& s) { return s(0, 0); }, 1000, 1);
  CHECK_THROWS_AS(to_json(opaque), DomainError);
}
