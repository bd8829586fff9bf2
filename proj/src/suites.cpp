#include "hausdorff/suites.hpp"

#include <array>
#include <cmath>

namespace hausdorff {

double space_doubling_constant(const Space& space) {
  const int n = space.dimension();
  switch (space.kind()) {
    case SpaceKind::euclidean:
      return std::ldexp(1.0, n);
    case SpaceKind::special_orthogonal:
      return std::ldexp(1.0, n * (n - 1) / 2);
    case SpaceKind::sphere:
      return std::ldexp(1.0, n - 1);
  }
  throw DomainError("unknown space kind");
}

Point random_point(const Space& space, std::uint64_t seed, std::uint64_t index, double window) {
  if (space.compact()) return space.uniform_sample_one(seed, index);
  CounterRng rng(seed, index);
  Vector x(space.dimension());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(-window, window);
  return x;
}

Atom random_ball_atom(const Space& space, double q, std::uint64_t seed, std::uint64_t index) {
  const Point center = random_point(space, derive_seed(seed, "center"), index);
  CounterRng rng(derive_seed(seed, "shape"), index);
  if (space.compact()) {
    const double radius = space.diameter() * rng.uniform(0.15, 0.75);
    return make_ball_atom(space, center, radius, q, AtomProfile::two_lobe);
  }
  const double radius = rng.uniform(0.2, 1.5);
  constexpr std::array profiles{AtomProfile::two_lobe, AtomProfile::product, AtomProfile::smooth_bump};
  return make_ball_atom(space, center, radius, q, profiles[rng() % profiles.size()]);
}

Automorphism random_automorphism(const Space& space, std::uint64_t seed, std::uint64_t index) {
  const int n = space.dimension();
  switch (space.kind()) {
    case SpaceKind::euclidean: {
      CounterRng rng(seed, index);
      Vector diag(n);
      for (int i = 0; i < n; ++i) diag(i) = (rng.coin() ? -1.0 : 1.0) * std::exp(rng.uniform(-1.0, 1.0));
      return Automorphism::linear(Matrix(diag.asDiagonal()));
    }
    case SpaceKind::special_orthogonal:
      return Automorphism::conjugation(orthogonal_sample(n, seed, index));
    case SpaceKind::sphere:
      return Automorphism::conjugation(space.quotient().embed(orthogonal_sample(n - 1, seed, index)))
          .with_preserves_k(true);
  }
  throw DomainError("unknown space kind");
}

AtomicFunction random_atomic_function(const Space& space, double q, std::size_t terms, std::uint64_t seed,
                                      std::uint64_t index) {
  if (terms == 0) throw DomainError("an atomic function needs at least one term");
  CounterRng rng(derive_seed(seed, "coefficients"), index);
  std::vector<double> coefficients;
  std::vector<Atom> atoms;
  for (std::size_t j = 0; j < terms; ++j) {
    coefficients.push_back(rng.uniform(-2.0, 2.0));
    atoms.push_back(random_ball_atom(space, q, derive_seed(seed, "atom"), index * terms + j));
  }
  return AtomicFunction(space, q, std::move(coefficients), std::move(atoms));
}

std::vector<NamedFunction> weil_integrands(int n) {
  if (n < 2) throw DomainError("Weil integrands need n >= 2");
  const int m = n - 1;
  return {
      {"constant", [](const Point&) { return 1.0; }, true},
      {"last_entry_squared", [m](const Point& x) { return x(m, m) * x(m, m); }, true},
      {"mixed_entries", [m](const Point& x) { return x(0, 0) * x(0, 0) + x(1, m); }, false},
      {"trace", [](const Point& x) { return x.trace(); }, false},
      {"exponential", [](const Point& x) { return std::exp(x(0, 0) + x(1, 0)); }, false},
  };
}

std::vector<NamedFunction> nonzonal_functions(int n) {
  if (n < 3) throw DomainError("non-zonal test functions need n >= 3");
  const int m = n - 1;
  return {
      {"first_squared", [](const Point& s) { return s(0, 0) * s(0, 0); }},
      {"product_plus_last", [m](const Point& s) { return s(0, 0) * s(1, 0) + s(m, 0); }},
      {"exponential", [](const Point& s) { return std::exp(s(0, 0)) + std::pow(s(1, 0), 3); }},
  };
}

}  // namespace hausdorff
