#pragma once

#include "hausdorff/group.hpp"

#include <cstdint>
#include <vector>

namespace hausdorff {

/// Haar volume of B(e, r); by left invariance the center does not matter.
struct BallVolume {
  double radius = 0.0;
  Estimate estimate;
  /// Closed form (R^n, or r >= diameter on a compact group).
  bool exact = false;
  /// No sample fell inside the ball; the estimate carries no information.
  bool insufficient_resolution = false;
  std::size_t hits = 0;
  std::size_t samples = 0;
};

BallVolume ball_volume(const Group& group, double r, std::size_t mc_samples, std::uint64_t seed);

struct DoublingRow {
  double radius = 0.0;
  BallVolume volume;         // nu(B(r))
  BallVolume double_volume;  // nu(B(2r))
  double ratio = 0.0;        // point estimate nu(B(2r)) / nu(B(r))
  double ratio_upper = 0.0;  // upper confidence quotient (upper of numerator / lower of denominator)
  bool excluded = false;     // denominator confidence interval reaches zero
};

struct DoublingProfile {
  std::vector<DoublingRow> rows;
  /// Max over non-excluded rows of ratio_upper; at least 1.
  double doubling_constant = 1.0;
  /// Max over non-excluded rows of the point ratio; at least 1.
  double doubling_constant_point = 1.0;
  /// log2 of doubling_constant.
  double dimension = 0.0;
  std::vector<double> excluded_radii;
  double z = 3.0;
};

/// Monte-Carlo profile on compact groups (one shared Haar sample set for all
/// radii); closed-form volumes with ratio exactly 2^n on R^n.
DoublingProfile doubling_profile(const Group& group, const std::vector<double>& radii, std::size_t mc_samples,
                                 std::uint64_t seed, double z = 3.0);

/// 2^dim, the r -> 0 limit of nu(B(2r))/nu(B(r)). For R^n and for SO(n) with a
/// bi-invariant metric (Ricci >= 0, Bishop-Gromov) this is also the supremum.
double closed_form_doubling_constant(const Group& group);

}  // namespace hausdorff
