#pragma once

#include "hausdorff/space.hpp"

#include <json.hpp>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace hausdorff {

using Function = std::function<double(const Point&)>;

enum class AtomProfile {
  zero,
  two_lobe,     // +H on one sub-ball, -H on a disjoint congruent one
  product,      // H prod_i sign(x_i - c_i) on a cube (R^n only)
  smooth_bump,  // H psi(|z| / rho) z_1 / rho with psi(t) = exp(1 - 1 / (1 - t^2)) (R^n only)
  global,       // whole-space atom on a mass-1 space
  invariant,    // right-K-invariant lift of a sphere atom to SO(n)
  pullback,     // s * a o A
};

std::string to_string(AtomProfile profile);
AtomProfile atom_profile_from_string(const std::string& name);

/// Construction margin: atoms are scaled to 0.99 of the norm bound.
inline constexpr double kAtomMargin = 0.99;

/// A (1,q)-atom: a function supported in B(center, radius) with
/// |a|_q <= nu(B)^{1/q - 1} and zero mean. Immutable and cheap to copy.
class Atom {
 public:
  const Space& space() const { return space_; }
  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  double q() const { return q_; }
  AtomProfile profile() const { return profile_; }

  double operator()(const Point& p) const { return (*function_)(p); }
  Function function() const { return *function_; }

  /// nu(B(center, radius)), exact.
  double ball_volume() const { return ball_volume_; }
  /// nu(B)^{1/q - 1}; 1 / nu(B) for q = inf.
  double norm_bound() const;
  /// The constant function 1 on a mass-1 space is an atom without the moment condition.
  bool mean_exempt() const { return mean_exempt_; }
  /// Discontinuity locations per axis (R^n); empty when none are known.
  const std::vector<std::vector<double>>& breakpoints() const { return breakpoints_; }
  /// True when the function is constant between breakpoints.
  bool piecewise_constant() const { return piecewise_constant_; }
  /// Recipe that rebuilds the atom; null for atoms made from opaque callbacks.
  const nlohmann::json& recipe() const { return recipe_; }

  struct Parts {
    Space space;
    Point center;
    double radius = 0.0;
    double q = 2.0;
    AtomProfile profile = AtomProfile::zero;
    Function function;
    std::vector<std::vector<double>> breakpoints;
    bool piecewise_constant = false;
    bool mean_exempt = false;
    nlohmann::json recipe;
  };
  /// Assembles an atom from parts; callers are responsible for the atom conditions.
  explicit Atom(Parts parts);

 private:
  Space space_;
  Point center_;
  double radius_;
  double q_;
  AtomProfile profile_;
  std::shared_ptr<const Function> function_;
  double ball_volume_;
  std::vector<std::vector<double>> breakpoints_;
  bool piecewise_constant_;
  bool mean_exempt_;
  nlohmann::json recipe_;
};

/// Ball atom with the given profile (two_lobe, product or smooth_bump), scaled
/// to kAtomMargin times the norm bound. Radii must be positive and, on compact
/// spaces, below the diameter.
Atom make_ball_atom(const Space& space, const Point& center, double radius, double q,
                    AtomProfile profile = AtomProfile::two_lobe);

/// The zero function with a nominal ball; satisfies the atom conditions vacuously.
Atom make_zero_atom(const Space& space, const Point& center, double radius, double q);

/// The constant 1 on a compact space (support ball = whole space).
Atom make_constant_atom(const Space& space, double q);

/// Whole-space atom from a zero-mean function with |f|_q <= 1 on a compact
/// space. Both conditions are checked by Monte-Carlo (4 sigma); violations
/// throw DomainError with the measured value.
Atom make_global_atom(const Space& space, double q, Function f, std::size_t mc_samples = 100000,
                      std::uint64_t seed = 0, std::string label = "");

/// Named whole-space atoms with a recipe: "constant" and, on the sphere,
/// "last_coordinate" (c s_n with c chosen so that |c s_n|_q = 1).
Atom make_named_global_atom(const Space& space, double q, const std::string& name);

/// Right-K-invariant lift g(x) = s a(x e_n) of a sphere atom to SO(n). The
/// support ball is B(lift(c), min(sqrt(2) phi + diam SO(n-1), diam SO(n))),
/// which contains the tube over the cap; s = (nu(B_G) / lambda(cap))^{1/q - 1}
/// rescales to the larger ball.
Atom make_invariant_atom(const Atom& sphere_atom);

struct AtomValidation {
  bool pass = false;
  bool support_ok = false;
  bool norm_ok = false;
  bool mean_ok = false;
  /// max |a| found outside the declared ball.
  double support_leakage = 0.0;
  /// |a|_q estimate and its bound nu(B)^{1/q - 1}.
  double norm = 0.0;
  double norm_bound = 0.0;
  /// max(0, |a|_q - bound).
  double norm_excess = 0.0;
  /// int a; std_error is 0 for deterministic quadrature.
  Estimate mean;
  double mean_residual = 0.0;
  bool monte_carlo = false;
  std::size_t evaluations = 0;
  std::string method;
};

struct ValidationOptions {
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 0;
  /// Confidence multiplier for Monte-Carlo checks.
  double z = 3.0;
  /// Deterministic quadrature: absolute tolerance for leakage and mean,
  /// relative tolerance for the norm excess.
  double tolerance = 1e-6;
  int quadrature_order = 4;
};

/// Checks the three atom conditions. On R^n by tensor Gauss-Legendre on the box
/// center +- 1.5 r with cells aligned to the breakpoints; on compact spaces by
/// Monte-Carlo over the declared ball using antithetic pairs (geodesic
/// symmetry at the center) and the exact ball volume, plus a leakage scan of
/// the doubled ball. Never throws for atoms whose function is finite.
AtomValidation validate_atom(const Atom& atom, const ValidationOptions& options = {});

struct Pullback {
  Atom atom;
  double scale = 0.0;
  double k = 0.0;
  double modulus = 0.0;
};

/// b = C^{1/q-1} (mod A)^{1/q} k^{(1/q-1) d} a o A, declared on
/// B(A^{-1} x, k r) (capped at the diameter). On the sphere A must be a
/// K-preserving conjugation and acts through the induced map.
Pullback pullback_atom(const Atom& atom, const Automorphism& automorphism, double c_nu, double d,
                       NormChoice norm = NormChoice::spectral);

/// f = sum_j lambda_j a_j with atomic_norm_bound = sum |lambda_j|.
class AtomicFunction {
 public:
  AtomicFunction(Space space, double q, std::vector<double> coefficients, std::vector<Atom> atoms);

  const Space& space() const { return space_; }
  double q() const { return q_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  double atomic_norm_bound() const;
  double operator()(const Point& p) const;
  Function function() const;

 private:
  Space space_;
  double q_;
  std::vector<double> coefficients_;
  std::vector<Atom> atoms_;
};

/// Builds an AtomicFunction; atoms must share the space and q. With options
/// given, every atom is validated first and a failing one is rejected.
AtomicFunction atomic_function(const std::vector<double>& coefficients, const std::vector<Atom>& atoms,
                               const ValidationOptions* validate = nullptr);

}  // namespace hausdorff
