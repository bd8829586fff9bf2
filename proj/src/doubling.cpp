#include "hausdorff/doubling.hpp"

#include "hausdorff/parallel.hpp"

#include <algorithm>

namespace hausdorff {

namespace {

BallVolume count_volume(const std::vector<double>& sorted_norms, double r, double diameter) {
  BallVolume v;
  v.radius = r;
  v.samples = sorted_norms.size();
  if (r >= diameter) {
    v.estimate = {1.0, 0.0};
    v.exact = true;
    v.hits = v.samples;
    return v;
  }
  v.hits = static_cast<std::size_t>(std::upper_bound(sorted_norms.begin(), sorted_norms.end(), r) -
                                    sorted_norms.begin());
  const double n = static_cast<double>(v.samples);
  const double p = static_cast<double>(v.hits) / n;
  v.estimate = {p, std::sqrt(p * (1.0 - p) / n)};
  v.insufficient_resolution = v.hits == 0;
  return v;
}

std::vector<double> sorted_identity_distances(const Group& group, std::size_t mc_samples, std::uint64_t seed) {
  if (mc_samples == 0) throw DomainError("sample count must be at least 1");
  std::vector<double> norms =
      parallel_map(mc_samples, [&](std::size_t i) { return group.norm(group.haar_sample_one(seed, i)); });
  std::sort(norms.begin(), norms.end());
  return norms;
}

BallVolume closed_form_volume(const Group& group, double r) {
  BallVolume v;
  v.radius = r;
  v.estimate = {group.ball_volume_exact(r), 0.0};
  v.exact = true;
  return v;
}

}  // namespace

BallVolume ball_volume(const Group& group, double r, std::size_t mc_samples, std::uint64_t seed) {
  if (!(r > 0.0)) throw DomainError("ball radius must be positive");
  if (!group.compact() || r >= group.diameter()) return closed_form_volume(group, r);
  return count_volume(sorted_identity_distances(group, mc_samples, seed), r, group.diameter());
}

DoublingProfile doubling_profile(const Group& group, const std::vector<double>& radii, std::size_t mc_samples,
                                 std::uint64_t seed, double z) {
  if (radii.empty()) throw DomainError("doubling profile needs at least one radius");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw DomainError("radii must be positive");
    if (i > 0 && radii[i] < radii[i - 1]) throw DomainError("radii must be sorted");
  }
  DoublingProfile profile;
  profile.z = z;
  std::vector<double> norms;
  if (group.compact()) norms = sorted_identity_distances(group, mc_samples, seed);

  for (double r : radii) {
    DoublingRow row;
    row.radius = r;
    if (!group.compact()) {
      row.volume = closed_form_volume(group, r);
      row.double_volume = closed_form_volume(group, 2.0 * r);
      // (2r / r)^n exactly.
      row.ratio = std::pow(2.0, group.dimension());
      row.ratio_upper = row.ratio;
    } else {
      row.volume = count_volume(norms, r, group.diameter());
      row.double_volume = count_volume(norms, 2.0 * r, group.diameter());
      const double denominator = row.volume.estimate.lower(z);
      if (row.volume.insufficient_resolution || denominator <= 0.0) {
        row.excluded = true;
        profile.excluded_radii.push_back(r);
      } else {
        row.ratio = row.double_volume.estimate.value / row.volume.estimate.value;
        row.ratio_upper = std::min(1.0, row.double_volume.estimate.upper(z)) / denominator;
      }
    }
    if (!row.excluded) {
      profile.doubling_constant = std::max(profile.doubling_constant, row.ratio_upper);
      profile.doubling_constant_point = std::max(profile.doubling_constant_point, row.ratio);
    }
    profile.rows.push_back(row);
  }
  profile.dimension = std::log2(profile.doubling_constant);
  return profile;
}

double closed_form_doubling_constant(const Group& group) {
  return std::pow(2.0, group.lie_algebra_dim());
}

}  // namespace hausdorff
