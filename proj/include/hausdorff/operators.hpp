#pragma once

#include "hausdorff/atoms.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hausdorff {

/// A(x) on R^n and SO(n); the induced map pi_K(A(x(s))) on the sphere, which
/// requires A(K) = K (closed form for conjugations, lift and project for
/// custom automorphisms screened by induced_automorphism).
Point act(const Space& space, const Automorphism& automorphism, const Point& x);
/// Throws DomainError or NormalizerError when the automorphism cannot act on the space.
void check_acts_on(const Space& space, const Automorphism& automorphism);

/// h . x: translation on R^n, left multiplication on SO(n), rotation of the sphere.
Point translate(const Space& space, const Point& h, const Point& x);
/// tau_h f(x) = f(h . x).
Function translated(const Space& space, const Function& f, const Point& h);

struct DiscreteTerm {
  double weight = 0.0;
  Automorphism automorphism;
};

/// One draw u ~ sampling law on Omega: A(u), Phi(u) and the importance weight
/// d mu / d(sampling law), so that E[weight * g(u)] = int g d mu.
struct ParameterDraw {
  Automorphism automorphism;
  double phi = 1.0;
  double weight = 1.0;
};

/// Draw number `index` of exhaustion level `level`. Samplers for measures of
/// finite mass ignore the level; sigma-finite ones integrate over a window
/// Omega_level that grows with the level.
using ParameterSampler = std::function<ParameterDraw(std::uint64_t seed, std::uint64_t index, int level)>;

enum class KernelMode { discrete, continuous };

/// Default ratio of successive tail increments at which a family counts as divergent.
inline constexpr double kDivergenceRatio = 0.95;

/// Divergence screen on partial values P_0, P_1, ... taken at doubling
/// truncations or windows: true when the last increment is at least `ratio`
/// times the previous one and exceeds z standard errors.
bool non_decaying_tail(const std::vector<Estimate>& partial, double ratio = kDivergenceRatio, double z = 3.0);

/// Phi, (Omega, mu) and u -> A(u) of a Hausdorff operator on a space.
class KernelSpec {
 public:
  /// Finite sum of weighted automorphisms (counting measure).
  static KernelSpec discrete(const Space& space, std::vector<DiscreteTerm> terms, std::string label = "discrete");
  /// Infinite family term(0), term(1), ... truncated at `truncation` terms.
  static KernelSpec discrete_series(const Space& space, std::function<DiscreteTerm(std::size_t)> term,
                                    std::size_t truncation, std::string label = "series");
  /// Monte-Carlo kernel; `levels` > 1 marks a sigma-finite mu with exhaustion windows.
  static KernelSpec continuous(const Space& space, ParameterSampler sampler, int levels = 1,
                               std::string label = "continuous");
  /// Continuous kernel whose mu is a finite atomic measure: integrated exactly.
  static KernelSpec atomic_measure(const Space& space, std::vector<double> masses, std::vector<DiscreteTerm> atoms,
                                   std::string label = "atomic");

  const Space& space() const { return space_; }
  KernelMode mode() const { return mode_; }
  const std::string& label() const { return label_; }
  bool infinite_family() const { return static_cast<bool>(series_); }
  std::size_t truncation() const { return truncation_; }
  int levels() const { return levels_; }
  bool finite_support() const { return !masses_.empty(); }

  /// Discrete terms (the first `count` for series, all otherwise); for atomic
  /// measures the atoms with weight Phi(u_i) mu({u_i}).
  std::vector<DiscreteTerm> terms(std::optional<std::size_t> count = std::nullopt) const;
  ParameterDraw draw(std::uint64_t seed, std::uint64_t index, int level = 0) const;

  /// Serial description for reports and configs; null when built from callbacks.
  const nlohmann::json& recipe() const { return recipe_; }
  KernelSpec with_recipe(nlohmann::json recipe) const;

 private:
  KernelSpec(Space space, KernelMode mode, std::string label) : space_(std::move(space)), mode_(mode), label_(std::move(label)) {}

  Space space_;
  KernelMode mode_;
  std::string label_;
  std::vector<DiscreteTerm> terms_;
  std::function<DiscreteTerm(std::size_t)> series_;
  std::size_t truncation_ = 0;
  ParameterSampler sampler_;
  int levels_ = 1;
  std::vector<double> masses_;
  nlohmann::json recipe_;
};

struct OperatorOutput {
  std::vector<double> values;
  /// Zero for exact sums.
  std::vector<double> std_errors;
  std::size_t samples = 0;

  Estimate at(std::size_t i) const { return {values.at(i), std_errors.at(i)}; }
};

/// Exact finite sum. For infinite families the partial sums of |Phi(n)| at
/// truncation / 4, / 2 and truncation are screened first and a non-decaying
/// tail throws DomainError.
OperatorOutput apply_discrete(const KernelSpec& kernel, const Function& f, const std::vector<Point>& points);

/// Monte-Carlo estimate with the same parameter draws at every point (exact
/// for atomic measures). A non-finite Phi or f throws NumericalError.
OperatorOutput apply_continuous(const KernelSpec& kernel, const Function& f, const std::vector<Point>& points,
                                std::size_t n_samples, std::uint64_t seed, int level = 0);

/// Dispatches on the kernel mode.
OperatorOutput apply(const KernelSpec& kernel, const Function& f, const std::vector<Point>& points,
                     std::size_t n_samples, std::uint64_t seed);

/// A compact group of automorphisms with normalized Haar measure: a finite list
/// (uniform weights) or a sampler.
struct CompactAutomorphismGroup {
  std::vector<Automorphism> elements;
  std::function<Automorphism(std::uint64_t seed, std::uint64_t index)> sampler;
  std::string label;

  bool finite() const { return !elements.empty(); }
};

/// {diag(e) : e in {+-1}^n} acting on R^n.
CompactAutomorphismGroup sign_group(int n);
/// Conjugations by Haar-distributed g in SO(n).
CompactAutomorphismGroup rotation_conjugations(int n);
/// Conjugations by diag(u, 1), u Haar-distributed in O(n-1): the subgroup of
/// conjugations preserving K = SO(n-1).
CompactAutomorphismGroup isotropy_conjugations(int n);

/// T^x f(h) = int f(h . u(x)) dm(u), where on the sphere u(x) is computed as
/// pi_K(u(x(s))) from the lift. Exact for finite groups.
Estimate delsarte_shift(const Space& space, const Function& f, const Point& x, const Point& h,
                        const CompactAutomorphismGroup& group, std::size_t n_samples, std::uint64_t seed);

/// H_1 with Phi = 1 and A(u) = u over the group (the Delsarte factor L^h = H_1 tau_h).
KernelSpec delsarte_kernel(const Space& space, const CompactAutomorphismGroup& group);

/// Draw u in O(m): Haar on SO(m) composed with diag(-1, 1, ..., 1) on a fair coin.
Matrix orthogonal_sample(int m, std::uint64_t seed, std::uint64_t index);
using OrthogonalSampler = std::function<Matrix(std::uint64_t seed, std::uint64_t index)>;

/// int_{O(n-1)} Phi(u) f(u^{-1} s', s_n) d mu(u) by Monte-Carlo; mu is Haar
/// unless a sampler is given, Phi = 1 unless given.
Estimate slice_transform(const std::function<double(const Matrix&)>& phi, const OrthogonalSampler& sampler,
                         const Function& f, const Vector& s, std::size_t n_samples, std::uint64_t seed);
Estimate slice_transform(const Function& f, const Vector& s, std::size_t n_samples, std::uint64_t seed);

/// The sphere kernel A(u) = conjugation by diag(u, 1), u ~ Haar on O(n-1).
KernelSpec slice_kernel(int n, std::function<double(const Matrix&)> phi = nullptr, std::string label = "slice");

/// A function with an error bar, evaluated with an independent stream per call.
using EstimatedFunction = std::function<Estimate(const Vector& s, std::uint64_t stream)>;

/// Slice transform with Phi = 1 and Haar mu as an EstimatedFunction.
EstimatedFunction slice_average(int n, const Function& f, std::size_t n_samples, std::uint64_t seed);
/// A deterministic function with zero error bars.
EstimatedFunction exact_function(const Function& f);

struct ZonalLevel {
  double level = 0.0;  // s_n
  std::vector<double> values;
  std::vector<double> std_errors;
  double spread = 0.0;          // max - min over the slice
  double combined_sigma = 0.0;  // sqrt(se_max^2 + se_min^2)
  bool pass = false;
};

struct ZonalReport {
  std::vector<ZonalLevel> levels;
  double max_spread = 0.0;
  /// max over levels of spread / combined sigma (inf when sigma = 0 and spread > 0).
  double max_ratio = 0.0;
  bool pass = false;
};

/// Evaluates f at samples_per_level random points of each of n_levels slices
/// s_n = const (equally spaced in [-0.9, 0.9]); a level passes when its spread is
/// at most z combined sigma (plus 1e-12).
ZonalReport zonal_check(int n, const EstimatedFunction& f, std::size_t n_levels, std::size_t samples_per_level,
                        std::uint64_t seed, double z = 4.0);

struct Remark2Options {
  int order = 8;
  /// Stop refining when two successive levels agree to this tolerance.
  double tolerance = 1e-10;
  int max_refinements = 6;
};

struct Remark2Value {
  double value = 0.0;
  /// |I_h - I_{h/2}| of the last refinement.
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  int refinements = 0;
};

/// int a(u_1 x_1, ..., u_n x_n) du over u in R^n, by tensor Gauss-Legendre on
/// the box where the integrand can be nonzero, cells aligned to the atom's
/// breakpoints mapped to u-space and refined until successive results agree.
/// Any x_i = 0 throws DomainError.
Remark2Value remark2_vanish(const Atom& atom, const Vector& x, const Remark2Options& options = {});

/// Omega = {u in R^n : u_j != 0}, Lebesgue mu, Phi = 1, A(u) = diag(u). Level j
/// samples u_i = +-exp(t_i) with t_i uniform on [-T_j, T_j], T_j = t0 2^j.
KernelSpec remark2_kernel(int n, double t0 = 1.0, int levels = 6);

}  // namespace hausdorff
