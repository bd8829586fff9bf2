#pragma once

#include "hausdorff/automorphism.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace hausdorff {

/// The sphere S^{n-1} realized as SO(n)/K with K = {diag(a, 1) : a in SO(n-1)},
/// the isotropy group of e_n. The coset xK is identified with the unit vector
/// x e_n. K carries normalized Haar measure and the invariant measure lambda on
/// the sphere is the pushforward of Haar measure, so both have mass 1.
class QuotientSpace {
 public:
  explicit QuotientSpace(int n);

  int dimension() const { return n_; }
  const Group& group() const { return group_; }
  const Group& subgroup() const { return subgroup_; }

  /// pi_K(x) = x e_n.
  Vector project(const Point& x) const;
  /// A fixed section: x(s) in SO(n) with x(s) e_n = s. Built from the Householder
  /// reflection sending e_n to -s, composed with diag(1, ..., 1, -1); at the
  /// antipode s = -e_n it returns the rotation by pi in the (e_1, e_n) plane.
  Point lift(const Vector& s) const;

  /// diag(a, 1) for a in SO(n-1).
  Point embed(const Matrix& a) const;
  /// Last row and column equal e_n within tol, and x in SO(n).
  bool in_subgroup(const Point& x, double tol = 1e-10) const;
  std::vector<Point> subgroup_sample(std::size_t count, std::uint64_t seed) const;
  Point subgroup_sample_one(std::uint64_t seed, std::uint64_t index) const;

  /// Uniform points on S^{n-1} (normalized Gaussian vectors).
  std::vector<Vector> invariant_sample(std::size_t count, std::uint64_t seed) const;
  Vector invariant_sample_one(std::uint64_t seed, std::uint64_t index) const;

 private:
  int n_;
  Group group_;
  Group subgroup_;
};

/// Raised when A(K) != K; carries a subgroup element k with A(k) outside K.
class NormalizerError : public DomainError {
 public:
  NormalizerError(const std::string& what, Point witness) : DomainError(what), witness_(std::move(witness)) {}
  const Point& witness() const { return witness_; }

 private:
  Point witness_;
};

/// The homeomorphism of G/K induced by an automorphism with A(K) = K.
class InducedAutomorphism {
 public:
  const Automorphism& automorphism() const { return automorphism_; }
  const QuotientSpace& space() const { return space_; }
  /// pi_K(A(x(s))). For conjugations by g with g e_n = +-e_n this is
  /// g_nn g^T s, which for g = diag(u, 1) is (u^{-1} s', s_n).
  Vector apply(const Vector& s) const;

 private:
  friend InducedAutomorphism induced_automorphism(const QuotientSpace&, const Automorphism&, std::size_t,
                                                  std::uint64_t);
  InducedAutomorphism(QuotientSpace space, Automorphism automorphism)
      : space_(std::move(space)), automorphism_(std::move(automorphism)) {}

  QuotientSpace space_;
  Automorphism automorphism_;
};

/// Screens A(K) = K (exact block-form test for conjugations, plus `probes`
/// sampled k in K for every family) and returns the induced map with
/// preserves_k set. Throws NormalizerError with a witness on failure.
InducedAutomorphism induced_automorphism(const QuotientSpace& space, const Automorphism& automorphism,
                                         std::size_t probes = 64, std::uint64_t seed = 0);

/// Fast structural test: conjugation by g preserves K iff g e_n = +-e_n (n >= 3).
bool conjugation_normalizes_subgroup(const QuotientSpace& space, const Matrix& g, double tol = 1e-10);

struct WeilReport {
  Estimate group_side;     // int_G g dnu
  Estimate quotient_side;  // int_{G/K} int_K g(xk) dk dlambda
  double discrepancy = 0.0;
  double combined_sigma = 0.0;
  /// discrepancy / max(|group_side|, |quotient_side|); absolute when both are within z sigma of 0.
  double relative_discrepancy = 0.0;
  bool relative = true;
  /// discrepancy <= z * combined_sigma (plus round-off).
  bool pass = false;
  /// Pointwise max |int_K g(xk) dk - g(x)|, reported when checked for right-K-invariant g.
  std::optional<double> invariant_collapse_error;
};

/// Both sides of Weil's formula estimated from independent samples.
WeilReport weil_check(const QuotientSpace& space, const std::function<double(const Point&)>& integrand,
                      std::size_t mc_samples, std::uint64_t seed, bool right_k_invariant = false, double z = 3.0);

/// Geodesic distance (angle) between unit vectors.
double sphere_distance(const Vector& s, const Vector& t);
/// Normalized invariant measure of a geodesic cap of angular radius phi on S^{n-1}.
double cap_volume(int n, double phi);
/// Density and distribution function of s_n under the uniform measure on S^{n-1}.
double last_coordinate_density(int n, double t);
double last_coordinate_cdf(int n, double t);

}  // namespace hausdorff
