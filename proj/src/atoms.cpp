#include "hausdorff/atoms.hpp"

#include "hausdorff/parallel.hpp"
#include "hausdorff/quadrature.hpp"
#include "hausdorff/serialize.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <mutex>
#include <numbers>

namespace hausdorff {

namespace {

double bump(double t) { return t < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0; }

// |psi(|w|) w_1|_q over the unit ball of R^n.
double bump_profile_norm(int n, double q) {
  if (std::isinf(q)) {
    const auto [t, value] = boost::math::tools::brent_find_minima([](double t) { return -bump(t) * t; }, 0.0, 1.0, 50);
    (void)t;
    return -value;
  }
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double radial =
      Rule::integrate([&](double t) { return std::pow(bump(t), q) * std::pow(t, q + n - 1); }, 0.0, 1.0, 15, 1e-14);
  // int over S^{n-1} of |omega_1|^q.
  const double angular =
      2.0 * std::pow(kPi, 0.5 * (n - 1)) * std::exp(std::lgamma(0.5 * (q + 1)) - std::lgamma(0.5 * (n + q)));
  return std::pow(radial * angular, 1.0 / q);
}

// Height giving |a|_q = kAtomMargin * bound for a profile of unit height whose
// q-th power integrates to support_measure (the norm itself for smooth profiles).
double height(double bound, double q, double support_measure) {
  return kAtomMargin * bound * std::pow(support_measure, -reciprocal_exponent(q));
}

double norm_bound_for(double volume, double q) {
  return std::isinf(q) ? 1.0 / volume : std::pow(volume, 1.0 / q - 1.0);
}

void check_q(double q) {
  if (!(q > 1.0)) throw DomainError("exponent q must lie in (1, inf]");
}

Json base_recipe(const std::string& profile, const Space& space, const Point& center, double radius, double q) {
  return Json{{"profile", profile},
              {"space", to_json(space)},
              {"center", point_to_json(center)},
              {"radius", radius},
              {"q", q_to_json(q)}};
}

Point default_center(const Space& space) {
  if (space.kind() == SpaceKind::sphere) {
    Vector e = Vector::Zero(space.dimension());
    e(space.dimension() - 1) = 1.0;
    return e;
  }
  return space.group().identity();
}

Atom euclidean_ball_atom(const Space& space, const Point& center, double radius, double q, AtomProfile profile) {
  const int n = space.dimension();
  const Vector c = center.col(0);
  const double volume = space.ball_volume(radius);
  const double bound = norm_bound_for(volume, q);
  Atom::Parts parts{space, center, radius, q, profile, {}, std::vector<std::vector<double>>(n), true, false,
                    base_recipe(to_string(profile), space, center, radius, q)};
  auto& bp = parts.breakpoints;
  switch (profile) {
    case AtomProfile::two_lobe: {
      // Cubes of half-side h centred at c +- (r/2) e_1; the farthest corner is
      // at distance r/2 + h sqrt(n) < r from c.
      const double h = radius / (2.0 * (1.0 + std::sqrt(static_cast<double>(n))));
      const double offset = 0.5 * radius;
      const double cube = std::pow(2.0 * h, n);
      if (!(h > 0.0) || !(cube > 0.0) || !(c(0) + offset - h > c(0) - offset + h))
        throw DomainError("radius too small for profile");
      const double H = height(bound, q, 2.0 * cube);
      if (!std::isfinite(H)) throw DomainError("radius too small for profile");
      parts.function = [c, h, offset, H](const Point& p) {
        const Vector z = p.col(0) - c;
        for (int i = 1; i < z.size(); ++i)
          if (std::abs(z(i)) > h) return 0.0;
        if (std::abs(z(0) - offset) <= h) return H;
        if (std::abs(z(0) + offset) <= h) return -H;
        return 0.0;
      };
      bp[0] = {c(0) - offset - h, c(0) - offset + h, c(0) + offset - h, c(0) + offset + h};
      for (int i = 1; i < n; ++i) bp[i] = {c(i) - h, c(i) + h};
      break;
    }
    case AtomProfile::product: {
      const double w = 0.95 * radius / std::sqrt(static_cast<double>(n));
      const double cube = std::pow(2.0 * w, n);
      if (!(w > 0.0) || !(cube > 0.0) || !(c(0) + w > c(0))) throw DomainError("radius too small for profile");
      const double H = height(bound, q, cube);
      if (!std::isfinite(H)) throw DomainError("radius too small for profile");
      parts.function = [c, w, H](const Point& p) {
        const Vector z = p.col(0) - c;
        double sign = 1.0;
        for (int i = 0; i < z.size(); ++i) {
          if (std::abs(z(i)) > w) return 0.0;
          if (z(i) < 0.0) sign = -sign;
        }
        return sign * H;
      };
      for (int i = 0; i < n; ++i) bp[i] = {c(i) - w, c(i), c(i) + w};
      break;
    }
    case AtomProfile::smooth_bump: {
      const double rho = 0.95 * radius;
      const double unit_norm = bump_profile_norm(n, q) * std::pow(rho, n * reciprocal_exponent(q));
      const double H = kAtomMargin * bound / unit_norm;
      if (!(rho > 0.0) || !std::isfinite(H)) throw DomainError("radius too small for profile");
      parts.function = [c, rho, H](const Point& p) {
        const Vector z = (p.col(0) - c) / rho;
        const double t = z.norm();
        return t < 1.0 ? H * bump(t) * z(0) : 0.0;
      };
      for (int i = 0; i < n; ++i) bp[i] = {c(i) - rho, c(i), c(i) + rho};
      parts.piecewise_constant = false;
      break;
    }
    default:
      throw DomainError("profile " + to_string(profile) + " is not a ball profile");
  }
  return Atom(std::move(parts));
}

Atom compact_two_lobe_atom(const Space& space, const Point& center, double radius, double q) {
  // One-parameter subgroups of SO(n) close up at length pi sqrt 2.
  const double offset = space.kind() == SpaceKind::sphere ? 0.5 * radius : std::min(0.5 * radius, 0.45 * kPi * std::numbers::sqrt2);
  const double lobe = std::min(0.45 * radius, 0.9 * offset);
  Point plus, minus;
  if (space.kind() == SpaceKind::sphere) {
    const Vector c = center.col(0);
    Eigen::Index k = 0;
    c.cwiseAbs().minCoeff(&k);
    Vector w = -c(k) * c;
    w(k) += 1.0;
    w.normalize();
    plus = Matrix(std::cos(0.5 * radius) * c + std::sin(0.5 * radius) * w);
    minus = Matrix(std::cos(0.5 * radius) * c - std::sin(0.5 * radius) * w);
  } else {
    const Group& g = space.group();
    const Matrix e = g.algebra_basis(0);
    plus = center * g.exp(offset * e);
    minus = center * g.exp(-offset * e);
  }
  const double reach = std::max(space.distance(center, plus), space.distance(center, minus)) + lobe;
  if (space.distance(plus, minus) <= 2.0 * lobe * (1.0 + 1e-9) || reach >= radius)
    throw DomainError("lobes of the two-lobe profile cannot be placed disjointly inside the ball");
  const double lobe_volume = space.ball_volume(lobe);
  if (!(lobe_volume > 0.0)) throw DomainError("radius too small for profile");
  const double H = height(norm_bound_for(space.ball_volume(radius), q), q, 2.0 * lobe_volume);
  if (!std::isfinite(H)) throw DomainError("radius too small for profile");
  Atom::Parts parts{space,
                    center,
                    radius,
                    q,
                    AtomProfile::two_lobe,
                    [space, plus, minus, lobe, H](const Point& p) {
                      if (space.within(p, plus, lobe)) return H;
                      if (space.within(p, minus, lobe)) return -H;
                      return 0.0;
                    },
                    {},
                    true,
                    false,
                    base_recipe("two_lobe", space, center, radius, q)};
  return Atom(std::move(parts));
}

double last_coordinate_norm(int n, double q) {
  if (std::isinf(q)) return 1.0;
  const double moment = std::exp(std::lgamma(0.5 * n) + std::lgamma(0.5 * (q + 1)) - std::lgamma(0.5 * (n + q))) /
                        std::sqrt(kPi);
  return std::pow(moment, 1.0 / q);
}

Vector sphere_action(const Matrix& g, const Vector& s) { return g(g.rows() - 1, g.cols() - 1) * (g.transpose() * s); }

}  // namespace

std::string to_string(AtomProfile profile) {
  switch (profile) {
    case AtomProfile::zero:
      return "zero";
    case AtomProfile::two_lobe:
      return "two_lobe";
    case AtomProfile::product:
      return "product";
    case AtomProfile::smooth_bump:
      return "smooth_bump";
    case AtomProfile::global:
      return "global";
    case AtomProfile::invariant:
      return "invariant";
    case AtomProfile::pullback:
      return "pullback";
  }
  return "unknown";
}

AtomProfile atom_profile_from_string(const std::string& name) {
  for (AtomProfile p : {AtomProfile::zero, AtomProfile::two_lobe, AtomProfile::product, AtomProfile::smooth_bump,
                        AtomProfile::global, AtomProfile::invariant, AtomProfile::pullback})
    if (to_string(p) == name) return p;
  throw DomainError("unknown atom profile: " + name);
}

Atom::Atom(Parts parts)
    : space_(std::move(parts.space)),
      center_(std::move(parts.center)),
      radius_(parts.radius),
      q_(parts.q),
      profile_(parts.profile),
      function_(std::make_shared<const Function>(std::move(parts.function))),
      ball_volume_(space_.ball_volume(std::min(parts.radius, space_.diameter()))),
      breakpoints_(std::move(parts.breakpoints)),
      piecewise_constant_(parts.piecewise_constant),
      mean_exempt_(parts.mean_exempt),
      recipe_(std::move(parts.recipe)) {
  check_q(q_);
  if (!(radius_ > 0.0)) throw DomainError("atom radius must be positive");
  if (!space_.contains(center_, 1e-8)) throw DomainError("atom center is not a point of " + space_.name());
  if (!*function_) throw DomainError("atom function is empty");
}

double Atom::norm_bound() const { return norm_bound_for(ball_volume_, q_); }

Atom make_ball_atom(const Space& space, const Point& center, double radius, double q, AtomProfile profile) {
  check_q(q);
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("atom radius must be positive");
  if (space.compact() && radius >= space.diameter())
    throw DomainError("atom radius must be below the diameter of " + space.name());
  if (!space.contains(center, 1e-8)) throw DomainError("atom center is not a point of " + space.name());
  if (profile == AtomProfile::zero) return make_zero_atom(space, center, radius, q);
  if (!space.compact()) return euclidean_ball_atom(space, center, radius, q, profile);
  if (profile != AtomProfile::two_lobe)
    throw DomainError("profile " + to_string(profile) + " is only available on R^n");
  return compact_two_lobe_atom(space, center, radius, q);
}

Atom make_zero_atom(const Space& space, const Point& center, double radius, double q) {
  return Atom({space, center, radius, q, AtomProfile::zero, [](const Point&) { return 0.0; }, {}, true, false,
               base_recipe("zero", space, center, radius, q)});
}

Atom make_constant_atom(const Space& space, double q) { return make_named_global_atom(space, q, "constant"); }

Atom make_global_atom(const Space& space, double q, Function f, std::size_t mc_samples, std::uint64_t seed,
                      std::string label) {
  check_q(q);
  if (!space.compact()) throw DomainError("whole-space atoms need a space of finite mass");
  if (mc_samples < 2) throw DomainError("sample count must be at least 2");
  std::vector<double> values = parallel_map(mc_samples, [&](std::size_t i) {
    const double v = f(space.uniform_sample_one(seed, i));
    if (!std::isfinite(v)) throw NumericalError("global atom: function value is not finite");
    return v;
  });
  // Construction rejects only clear violations (4 sigma); validate_atom applies the 3 sigma test.
  constexpr double z = 4.0;
  const Estimate mean = mean_estimate(values);
  if (std::abs(mean.value) > z * mean.std_error + 1e-12)
    throw DomainError("whole-space atom needs zero mean; measured mean " + std::to_string(mean.value) + " +- " +
                      std::to_string(mean.std_error));
  double measured = 0.0;
  if (std::isinf(q)) {
    for (double v : values) measured = std::max(measured, std::abs(v));
    if (measured > 1.0 + 1e-12) throw DomainError("|f|_inf exceeds 1: measured " + std::to_string(measured));
  } else {
    for (double& v : values) v = std::pow(std::abs(v), q);
    const Estimate power = mean_estimate(values);
    measured = std::pow(power.value, 1.0 / q);
    if (power.lower(z) > 1.0) throw DomainError("|f|_q exceeds 1: measured " + std::to_string(measured));
  }
  Atom::Parts parts{space, default_center(space), space.diameter(), q, AtomProfile::global, std::move(f),
                    {},    false,                 false,            {}};
  if (!label.empty()) parts.recipe = Json{{"profile", "global"}, {"name", label}, {"space", to_json(space)},
                                          {"q", q_to_json(q)}};
  return Atom(std::move(parts));
}

Atom make_named_global_atom(const Space& space, double q, const std::string& name) {
  check_q(q);
  if (!space.compact()) throw DomainError("whole-space atoms need a space of finite mass");
  Atom::Parts parts{space, default_center(space), space.diameter(), q, AtomProfile::global, {}, {}, true, false,
                    Json{{"profile", "global"}, {"name", name}, {"space", to_json(space)}, {"q", q_to_json(q)}}};
  if (name == "constant") {
    parts.function = [](const Point&) { return 1.0; };
    parts.mean_exempt = true;
  } else if (name == "last_coordinate") {
    if (space.kind() != SpaceKind::sphere) throw DomainError("last_coordinate atom is defined on spheres");
    const double c = 1.0 / last_coordinate_norm(space.dimension(), q);
    const int last = space.dimension() - 1;
    parts.function = [c, last](const Point& s) { return c * s(last, 0); };
    parts.piecewise_constant = false;
  } else {
    throw DomainError("unknown whole-space atom: " + name);
  }
  return Atom(std::move(parts));
}

Atom make_invariant_atom(const Atom& sphere_atom) {
  const Space& sphere = sphere_atom.space();
  if (sphere.kind() != SpaceKind::sphere) throw DomainError("invariant atoms are lifted from sphere atoms");
  const int n = sphere.dimension();
  const Space so = Space::special_orthogonal(n);
  const double fiber = Group::special_orthogonal(std::max(n - 1, 1)).diameter();
  const double radius = std::min(std::sqrt(2.0) * std::min(sphere_atom.radius(), kPi) + fiber, so.diameter());
  const double group_volume = so.ball_volume(radius);
  const double scale =
      sphere_atom.mean_exempt() ? 1.0 : std::pow(group_volume / sphere_atom.ball_volume(), reciprocal_exponent(sphere_atom.q()) - 1.0);
  const int last = n - 1;
  Atom::Parts parts{so,
                    sphere.quotient().lift(sphere_atom.center().col(0)),
                    radius,
                    sphere_atom.q(),
                    AtomProfile::invariant,
                    [a = sphere_atom, scale, last](const Point& x) { return scale * a(Matrix(x.col(last))); },
                    {},
                    sphere_atom.piecewise_constant(),
                    sphere_atom.mean_exempt(),
                    {}};
  if (!sphere_atom.recipe().is_null()) parts.recipe = Json{{"profile", "invariant"}, {"base", sphere_atom.recipe()}};
  return Atom(std::move(parts));
}

Pullback pullback_atom(const Atom& atom, const Automorphism& automorphism, double c_nu, double d, NormChoice norm) {
  const Space& space = atom.space();
  if (!(c_nu >= 1.0) || !(d >= 0.0)) throw DomainError("pullback needs C >= 1 and d >= 0");
  if (!(automorphism.group() == space.group()))
    throw DomainError("automorphism acts on " + automorphism.group().name() + ", atom lives on " + space.name());
  const bool on_sphere = space.kind() == SpaceKind::sphere;
  if (on_sphere && !(automorphism.family() == AutomorphismFamily::identity ||
                     (automorphism.family() == AutomorphismFamily::conjugation &&
                      conjugation_normalizes_subgroup(space.quotient(), automorphism.parameter()))))
    throw DomainError("on the sphere only K-preserving conjugations induce maps with a closed form");

  Pullback out{atom, 0.0, 0.0, 0.0};
  out.k = k_factor(automorphism, norm);
  out.modulus = modulus(automorphism);
  if (!(out.k > 0.0) || !(out.modulus > 0.0) || !std::isfinite(out.k) || !std::isfinite(out.modulus))
    throw DomainError("invalid automorphism: k(u) = 0 or mod A(u) = 0");
  const double inv_q = reciprocal_exponent(atom.q());
  out.scale = std::pow(c_nu, inv_q - 1.0) * std::pow(out.modulus, inv_q) * std::pow(out.k, (inv_q - 1.0) * d);

  Point center;
  Function f;
  const double scale = out.scale;
  if (on_sphere) {
    const Matrix g = automorphism.family() == AutomorphismFamily::identity
                         ? Matrix(Matrix::Identity(space.dimension(), space.dimension()))
                         : automorphism.parameter();
    center = Matrix(sphere_action(g.transpose(), atom.center().col(0)));
    f = [a = atom, g, scale](const Point& s) { return scale * a(Matrix(sphere_action(g, s.col(0)))); };
  } else {
    center = automorphism.apply_inverse(atom.center());
    f = [a = atom, automorphism, scale](const Point& x) { return scale * a(automorphism.apply(x)); };
  }
  double radius = out.k * atom.radius();
  if (space.compact()) radius = std::min(radius, space.diameter());

  std::vector<std::vector<double>> breakpoints;
  bool aligned = !space.compact() && !atom.breakpoints().empty();
  if (aligned && automorphism.family() == AutomorphismFamily::linear) {
    const Matrix& m = automorphism.parameter();
    aligned = (m - Matrix(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  } else if (aligned && automorphism.family() != AutomorphismFamily::identity) {
    aligned = false;
  }
  if (aligned) {
    // b jumps where A(x)_i hits a breakpoint of a, i.e. at x_i = p / m_ii.
    const Matrix m = automorphism.family() == AutomorphismFamily::linear
                         ? automorphism.parameter()
                         : Matrix(Matrix::Identity(space.dimension(), space.dimension()));
    for (std::size_t i = 0; i < atom.breakpoints().size(); ++i) {
      std::vector<double> axis;
      for (double p : atom.breakpoints()[i]) axis.push_back(p / m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
      std::sort(axis.begin(), axis.end());
      breakpoints.push_back(std::move(axis));
    }
  }

  Json recipe;
  if (!atom.recipe().is_null() && automorphism.family() != AutomorphismFamily::custom) {
    recipe = Json{{"profile", "pullback"}, {"base", atom.recipe()},      {"automorphism", to_json(automorphism)},
                  {"c_nu", c_nu},          {"d", d},                     {"norm", to_string(norm)}};
  }
  out.atom = Atom({space, center, radius, atom.q(), AtomProfile::pullback, std::move(f), std::move(breakpoints),
                   aligned && atom.piecewise_constant(), atom.mean_exempt(), std::move(recipe)});
  return out;
}

namespace {

AtomValidation validate_by_quadrature(const Atom& atom, const ValidationOptions& options) {
  AtomValidation v;
  v.method = "tensor Gauss-Legendre";
  const Space& space = atom.space();
  const int n = space.dimension();
  const Vector c = atom.center().col(0);
  const double r = atom.radius();
  const bool exact = atom.piecewise_constant() && !atom.breakpoints().empty();
  std::vector<std::vector<double>> edges;
  for (int i = 0; i < n; ++i) {
    std::vector<double> bp = atom.breakpoints().empty() ? std::vector<double>{} : atom.breakpoints()[i];
    bp.push_back(c(i) - r);
    bp.push_back(c(i) + r);
    bp.push_back(c(i));
    edges.push_back(axis_cells(c(i) - 1.5 * r, c(i) + 1.5 * r, bp, exact ? 0.25 * r : r / 6.0));
  }
  if (!exact) v.method += " (cells not aligned to discontinuities)";
  const TensorRule rule(edges, exact ? options.quadrature_order : 8);
  const double q = atom.q();
  const bool track_peak = std::isinf(q) && !exact;
  std::mutex peak_mutex;
  double peak = -1.0;
  Vector peak_at = c;
  const auto result = rule.reduce(2, 2, [&](const Vector& x, double* sums, double* maxima) {
    const double a = atom(Matrix(x));
    if (!std::isfinite(a)) throw NumericalError("validate_atom: atom value is not finite");
    sums[0] = a;
    sums[1] = std::isinf(q) ? 0.0 : std::pow(std::abs(a), q);
    maxima[0] = std::abs(a);
    maxima[1] = (x - c).norm() > r ? std::abs(a) : 0.0;
    if (track_peak) {
      std::lock_guard lock(peak_mutex);
      if (std::abs(a) > peak) {
        peak = std::abs(a);
        peak_at = x;
      }
    }
  });
  double sup = result.maxima[0];
  if (track_peak) {
    // Compass search from the best node recovers the sup between nodes.
    double step = r / 24.0;
    while (step > 1e-10 * r) {
      bool moved = false;
      for (int i = 0; i < n && !moved; ++i)
        for (double sign : {-1.0, 1.0}) {
          Vector y = peak_at;
          y(i) += sign * step;
          const double a = std::abs(atom(Matrix(y)));
          if (a > peak) {
            peak = a;
            peak_at = y;
            moved = true;
            break;
          }
        }
      if (!moved) step *= 0.5;
    }
    sup = std::max(sup, peak);
  }
  v.evaluations = rule.size();
  v.mean = {result.sums[0], 0.0};
  v.mean_residual = std::abs(result.sums[0]);
  v.norm = std::isinf(q) ? sup : std::pow(result.sums[1], 1.0 / q);
  v.norm_bound = atom.norm_bound();
  v.norm_excess = std::max(0.0, v.norm - v.norm_bound);
  v.support_leakage = std::max(0.0, result.maxima[1]);
  v.support_ok = v.support_leakage <= options.tolerance;
  v.norm_ok = v.norm_excess <= options.tolerance * v.norm_bound;
  v.mean_ok = atom.mean_exempt() || v.mean_residual <= options.tolerance;
  return v;
}

AtomValidation validate_by_monte_carlo(const Atom& atom, const ValidationOptions& options) {
  AtomValidation v;
  v.monte_carlo = true;
  v.method = "Monte-Carlo over the ball, antithetic pairs";
  const Space& space = atom.space();
  const Point& c = atom.center();
  const double radius = std::min(atom.radius(), space.diameter());
  const double volume = atom.ball_volume();
  const double q = atom.q();
  const std::size_t pairs = std::max<std::size_t>(2, options.mc_samples / 2);
  const std::uint64_t ball_seed = derive_seed(options.seed, "validate-ball");
  const std::uint64_t leak_seed = derive_seed(options.seed, "validate-leak");

  std::vector<double> means(pairs), powers(pairs), sups(pairs);
  parallel_for(pairs, [&](std::size_t i) {
    const auto [y, mirror] = space.ball_sample_pair(c, radius, ball_seed, i);
    const double a = atom(y);
    const double b = atom(mirror);
    if (!std::isfinite(a) || !std::isfinite(b)) throw NumericalError("validate_atom: atom value is not finite");
    means[i] = 0.5 * (a + b);
    powers[i] = std::isinf(q) ? 0.0 : 0.5 * (std::pow(std::abs(a), q) + std::pow(std::abs(b), q));
    sups[i] = std::max(std::abs(a), std::abs(b));
  });
  const Estimate mean = mean_estimate(means);
  v.mean = {volume * mean.value, volume * mean.std_error};
  v.mean_residual = std::abs(v.mean.value);
  v.norm_bound = atom.norm_bound();
  if (std::isinf(q)) {
    v.norm = *std::max_element(sups.begin(), sups.end());
    v.norm_ok = v.norm <= v.norm_bound * (1.0 + 1e-12);
  } else {
    const Estimate power = mean_estimate(powers);
    const Estimate integral{volume * power.value, volume * power.std_error};
    v.norm = std::pow(integral.value, 1.0 / q);
    v.norm_ok = integral.lower(options.z) <= std::pow(v.norm_bound, q) * (1.0 + 1e-12);
  }
  v.norm_excess = std::max(0.0, v.norm - v.norm_bound);

  std::size_t leak_points = 0;
  if (radius < space.diameter()) {
    const double outer = std::min(2.0 * radius, space.diameter());
    leak_points = std::max<std::size_t>(1, options.mc_samples / 8);
    const std::vector<double> leaks = parallel_map(leak_points, [&](std::size_t i) {
      const auto [y, mirror] = space.ball_sample_pair(c, outer, leak_seed, i);
      double worst = 0.0;
      for (const Point* p : {&y, &mirror})
        if (!space.within(c, *p, radius)) worst = std::max(worst, std::abs(atom(*p)));
      return worst;
    });
    v.support_leakage = *std::max_element(leaks.begin(), leaks.end());
  }
  v.evaluations = 2 * pairs + 2 * leak_points;
  v.support_ok = v.support_leakage == 0.0;
  v.mean_ok = atom.mean_exempt() || v.mean_residual <= options.z * v.mean.std_error + 1e-12;
  return v;
}

}  // namespace

AtomValidation validate_atom(const Atom& atom, const ValidationOptions& options) {
  AtomValidation v;
  if (atom.profile() == AtomProfile::zero) {
    v.method = "zero function";
    v.norm_bound = atom.norm_bound();
    v.support_ok = v.norm_ok = v.mean_ok = v.pass = true;
    return v;
  }
  v = atom.space().compact() ? validate_by_monte_carlo(atom, options) : validate_by_quadrature(atom, options);
  v.pass = v.support_ok && v.norm_ok && v.mean_ok;
  return v;
}

AtomicFunction::AtomicFunction(Space space, double q, std::vector<double> coefficients, std::vector<Atom> atoms)
    : space_(std::move(space)), q_(q), coefficients_(std::move(coefficients)), atoms_(std::move(atoms)) {
  check_q(q_);
  if (coefficients_.size() != atoms_.size()) throw DomainError("one coefficient per atom is required");
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    if (!(atoms_[j].space() == space_)) throw DomainError("atoms of an atomic function must share one space");
    if (atoms_[j].q() != q_) throw DomainError("atoms of an atomic function must share one exponent q");
    if (!std::isfinite(coefficients_[j])) throw DomainError("coefficients must be finite");
  }
}

double AtomicFunction::atomic_norm_bound() const {
  double sum = 0.0;
  for (double c : coefficients_) sum += std::abs(c);
  return sum;
}

double AtomicFunction::operator()(const Point& p) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < atoms_.size(); ++j)
    if (coefficients_[j] != 0.0) sum += coefficients_[j] * atoms_[j](p);
  return sum;
}

Function AtomicFunction::function() const {
  return [self = *this](const Point& p) { return self(p); };
}

AtomicFunction atomic_function(const std::vector<double>& coefficients, const std::vector<Atom>& atoms,
                               const ValidationOptions* validate) {
  if (atoms.empty()) throw DomainError("atomic_function needs at least one atom");
  if (validate) {
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      if (!validate_atom(atoms[j], *validate).pass)
        throw DomainError("atom " + std::to_string(j) + " fails validation");
    }
  }
  return AtomicFunction(atoms.front().space(), atoms.front().q(), coefficients, atoms);
}

}  // namespace hausdorff
