#pragma once

#include "hausdorff/operators.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hausdorff {

/// One summand (discrete) or one recorded draw (continuous) of ||Phi||_{A,q}.
struct TermRecord {
  std::size_t index = 0;
  double phi_abs = 0.0;
  double weight = 1.0;  // importance weight of a draw; 1 for discrete terms
  double modulus = 0.0;
  double k_spectral = 0.0;
  double k_hilbert_schmidt = 0.0;
  /// |Phi| mod^{-1/q} k^{(1-1/q) d} with the chosen k (times the weight for draws).
  double contribution = 0.0;
  std::string parameter;  // u or n, as text
};

struct Range {
  double min = kInf;
  double max = -kInf;
  void add(double v) {
    min = std::min(min, v);
    max = std::max(max, v);
  }
};

struct PhiNormOptions {
  /// Continuous draws kept as records (all discrete terms are kept).
  std::size_t record_limit = 64;
  /// Tail-increment ratio for the divergence screen.
  double divergence_ratio = kDivergenceRatio;
  double z = 3.0;
};

struct PhiNorm {
  double q = 2.0;
  double d = 0.0;
  NormChoice norm = NormChoice::spectral;
  /// Point estimate (exact sum for discrete kernels); the last partial value when divergent.
  Estimate value;
  bool divergent = false;
  bool monte_carlo = false;
  /// Partial sums at doubling truncations, or estimates over the exhaustion windows.
  std::vector<Estimate> partial;
  std::vector<TermRecord> records;
  Range modulus_range;
  Range k_spectral_range;
  Range k_hilbert_schmidt_range;
  std::string diagnostics;
};

/// ||Phi||_{A,q} = int |Phi(u)| (mod A(u))^{-1/q} k(u)^{(1-1/q) d} d mu(u); q = inf
/// uses 1/q = 0. Discrete kernels are summed exactly, continuous ones by
/// Monte-Carlo. Infinite series and sigma-finite measures are evaluated on
/// doubling truncations / windows and flagged divergent when the increments do
/// not decay.
PhiNorm phi_norm(const KernelSpec& kernel, double q, double d, NormChoice norm, std::size_t n_samples,
                 std::uint64_t seed, const PhiNormOptions& options = {});

/// C^{1-1/q} ||Phi||_{A,q}; +inf when the norm diverges.
double theorem1_bound(double c_nu, double q, double phi_norm_value);
double theorem1_bound(double c_nu, double q, const PhiNorm& phi);

struct BoundReport {
  double q = 2.0;
  double c_nu = 1.0;
  double d = 0.0;
  PhiNorm phi;
  /// Point bound, and the bound with the upper confidence value of ||Phi||.
  double bound = 0.0;
  double bound_upper = 0.0;
  bool infinite = false;
};

BoundReport bound_report(const KernelSpec& kernel, double q, double c_nu, double d, NormChoice norm,
                         std::size_t n_samples, std::uint64_t seed, const PhiNormOptions& options = {});

struct L1Options {
  /// Outer samples (compact spaces) and inner samples (continuous kernels).
  std::size_t outer_samples = 20000;
  std::size_t inner_samples = 256;
  int quadrature_order = 8;
  double z = 3.0;
};

/// ||H f||_{L^1} with its error budget: quadrature on R^n for discrete kernels,
/// mixture importance sampling over the image balls B(A^{-1} c_j, k r_j) on
/// compact spaces for discrete kernels, nested Monte-Carlo for continuous
/// kernels on compact spaces (the budget then includes the bias bound of |.|).
struct L1Norm {
  Estimate value;
  /// Amount that value may overstate or understate the true norm at confidence z.
  double budget = 0.0;
  std::string method;
  std::size_t evaluations = 0;
};

L1Norm operator_l1_norm(const KernelSpec& kernel, const AtomicFunction& f, std::uint64_t seed,
                        const L1Options& options = {});

struct ConsistencyRow {
  std::size_t index = 0;
  double atomic_norm = 0.0;
  L1Norm l1;
  /// bound_upper * atomic_norm.
  double limit = 0.0;
  /// limit - (l1 - budget); negative means a violation.
  double margin = 0.0;
  bool violation = false;
};

struct ConsistencyReport {
  BoundReport bound;
  std::vector<ConsistencyRow> rows;
  std::size_t violations = 0;
  /// The bound is infinite, so the inequality is vacuous.
  bool skipped = false;
  bool pass = false;
};

/// Checks ||H f||_{L^1} <= C^{1-1/q} ||Phi||_{A,q} sum |lambda_j| for each test
/// function, a necessary consequence of the operator bound since
/// ||g||_{L^1} <= ||g||_{H^{1,q}}.
ConsistencyReport bound_consistency(const KernelSpec& kernel, const std::vector<AtomicFunction>& functions, double q,
                                    double c_nu, double d, NormChoice norm, std::size_t phi_samples,
                                    std::uint64_t seed, const L1Options& options = {});

}  // namespace hausdorff
