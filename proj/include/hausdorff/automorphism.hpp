#pragma once

#include "hausdorff/group.hpp"

#include <functional>
#include <memory>
#include <string>

namespace hausdorff {

enum class AutomorphismFamily {
  identity,
  linear,       // x -> M x on R^n
  conjugation,  // x -> g^{-1} x g on SO(n), g in O(n)
  custom,       // user-supplied forward/inverse maps
};

std::string to_string(AutomorphismFamily family);

/// A topological automorphism of a Group together with its inverse. Immutable;
/// copies share the user callbacks of custom automorphisms.
class Automorphism {
 public:
  using Map = std::function<Point(const Point&)>;

  static Automorphism identity(const Group& group);
  /// x -> M x on R^n; M must be invertible.
  static Automorphism linear(const Matrix& m);
  /// x -> g^{-1} x g on SO(n) with g orthogonal (det +-1).
  static Automorphism conjugation(const Matrix& g);
  static Automorphism custom(const Group& group, Map forward, Map inverse, std::string label = "custom");

  const Group& group() const { return group_; }
  AutomorphismFamily family() const { return family_; }
  /// M for linear maps, g for conjugations, identity otherwise.
  const Matrix& parameter() const { return parameter_; }
  const std::string& label() const { return label_; }

  Point apply(const Point& x) const;
  Point apply_inverse(const Point& x) const;
  Automorphism inverse() const;
  Automorphism compose(const Automorphism& inner) const;  // this o inner

  /// Set once the induced map on G/K has been screened (A(K) = K).
  bool preserves_k() const { return preserves_k_; }
  Automorphism with_preserves_k(bool value) const;

 private:
  Automorphism(Group group, AutomorphismFamily family, Matrix parameter, std::string label)
      : group_(group), family_(family), parameter_(std::move(parameter)), label_(std::move(label)) {}

  Group group_;
  AutomorphismFamily family_;
  Matrix parameter_;
  std::string label_;
  std::shared_ptr<const Map> forward_;
  std::shared_ptr<const Map> backward_;
  bool preserves_k_ = false;
};

/// (d phi)_e in the orthonormal Lie-algebra basis of Group::algebra_basis.
struct Differential {
  Matrix matrix;
  /// True when no analytic form exists and a central difference was used.
  bool finite_difference = false;
};

inline constexpr double kDifferentialStep = 1e-6;

Differential differential_matrix(const Automorphism& automorphism);

/// mod A: |det M| for linear maps on R^n, exactly 1 on SO(n) (unimodular).
double modulus(const Automorphism& automorphism);

enum class NormChoice { spectral, hilbert_schmidt };

std::string to_string(NormChoice choice);
NormChoice norm_choice_from_string(const std::string& name);

double matrix_norm(const Matrix& m, NormChoice choice);

/// k = |(d(A^{-1}))_e| in the chosen norm: the Lipschitz constant of A^{-1}.
/// Throws DomainError when the differential is singular.
double k_factor(const Automorphism& automorphism, NormChoice choice = NormChoice::spectral);

struct KFactors {
  double spectral = 0.0;
  double hilbert_schmidt = 0.0;
};

/// Both norms of d(A^{-1})_e from one SVD; throws like k_factor.
KFactors k_factors(const Automorphism& automorphism);

/// Reports sampled pairs (p, q) with rho(phi p, phi q) > |(d phi)_e| rho(p, q) (1 + tol).
struct LipschitzReport {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double lipschitz_constant = 0.0;
  /// max rho(phi p, phi q) / rho(p, q) over the sampled pairs.
  double max_ratio = 0.0;
};

/// Pairs are Haar-distributed on SO(n) and uniform in [-window, window]^n on R^n.
LipschitzReport lipschitz_check(const Automorphism& automorphism, std::size_t pairs, std::uint64_t seed,
                                double tolerance, double window = 1.0);

}  // namespace hausdorff
