#pragma once

#include "hausdorff/operators.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hausdorff {

/// 2^dim with dim = n on R^n, n(n-1)/2 on SO(n) and n-1 on S^{n-1}.
double space_doubling_constant(const Space& space);

// Random test objects. Each depends only on (seed, index).

/// Uniform on a compact space, uniform in [-window, window]^n on R^n.
Point random_point(const Space& space, std::uint64_t seed, std::uint64_t index, double window = 2.0);

/// Two-lobe, product or smooth-bump atom on R^n; two-lobe atom on compact spaces.
Atom random_ball_atom(const Space& space, double q, std::uint64_t seed, std::uint64_t index);

/// Diagonal dilation with entries +-e^t, t in [-1, 1], on R^n; conjugation by
/// a Haar element of O(n) on SO(n); conjugation by diag(u, 1), u in O(n-1), on
/// the sphere.
Automorphism random_automorphism(const Space& space, std::uint64_t seed, std::uint64_t index);

/// sum_j lambda_j a_j with lambda_j in [-2, 2] and random ball atoms.
AtomicFunction random_atomic_function(const Space& space, double q, std::size_t terms, std::uint64_t seed,
                                      std::uint64_t index);

struct NamedFunction {
  std::string name;
  Function f;
  bool right_k_invariant = false;
};

/// Five integrands on SO(n) for Weil's formula; the first two are right-K-invariant.
std::vector<NamedFunction> weil_integrands(int n);

/// Three functions on S^{n-1} (n >= 3) that are not zonal.
std::vector<NamedFunction> nonzonal_functions(int n);

}  // namespace hausdorff
