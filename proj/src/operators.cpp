#include "hausdorff/operators.hpp"

#include "hausdorff/parallel.hpp"
#include "hausdorff/quadrature.hpp"

#include <algorithm>

namespace hausdorff {

namespace {

Matrix block_with_one(const Matrix& u) {
  const Eigen::Index m = u.rows();
  Matrix g = Matrix::Identity(m + 1, m + 1);
  g.topLeftCorner(m, m) = u;
  return g;
}

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) throw NumericalError(std::string("non-finite value of ") + what);
}

}  // namespace

void check_acts_on(const Space& space, const Automorphism& automorphism) {
  if (!(automorphism.group() == space.group()))
    throw DomainError("automorphism acts on " + automorphism.group().name() + ", not on " + space.name());
  if (space.kind() != SpaceKind::sphere) return;
  switch (automorphism.family()) {
    case AutomorphismFamily::identity:
      return;
    case AutomorphismFamily::conjugation:
      if (!conjugation_normalizes_subgroup(space.quotient(), automorphism.parameter()))
        throw NormalizerError("conjugation does not preserve K", space.group().identity());
      return;
    case AutomorphismFamily::custom:
      if (!automorphism.preserves_k())
        throw DomainError("custom automorphism must be screened with induced_automorphism before acting on " +
                          space.name());
      return;
    case AutomorphismFamily::linear:
      break;
  }
  throw DomainError("linear maps do not act on " + space.name());
}

Point act(const Space& space, const Automorphism& automorphism, const Point& x) {
  if (space.kind() != SpaceKind::sphere) return automorphism.apply(x);
  switch (automorphism.family()) {
    case AutomorphismFamily::identity:
      return x;
    case AutomorphismFamily::conjugation: {
      const Matrix& g = automorphism.parameter();
      const Eigen::Index n = g.rows();
      if (!conjugation_normalizes_subgroup(space.quotient(), g))
        throw NormalizerError("conjugation does not preserve K", space.group().identity());
      return g(n - 1, n - 1) * (g.transpose() * x);
    }
    default:
      check_acts_on(space, automorphism);
      return space.quotient().project(automorphism.apply(space.quotient().lift(x.col(0))));
  }
}

Point translate(const Space& space, const Point& h, const Point& x) {
  switch (space.kind()) {
    case SpaceKind::euclidean:
      return h + x;
    case SpaceKind::special_orthogonal:
    case SpaceKind::sphere:
      return h * x;
  }
  return x;
}

Function translated(const Space& space, const Function& f, const Point& h) {
  return [space, f, h](const Point& x) { return f(translate(space, h, x)); };
}

KernelSpec KernelSpec::discrete(const Space& space, std::vector<DiscreteTerm> terms, std::string label) {
  KernelSpec k(space, KernelMode::discrete, std::move(label));
  for (const DiscreteTerm& t : terms) {
    if (!std::isfinite(t.weight)) throw DomainError("discrete kernel weights must be finite");
    check_acts_on(space, t.automorphism);
  }
  k.terms_ = std::move(terms);
  return k;
}

KernelSpec KernelSpec::discrete_series(const Space& space, std::function<DiscreteTerm(std::size_t)> term,
                                       std::size_t truncation, std::string label) {
  if (!term) throw DomainError("series kernel needs a term generator");
  if (truncation < 4) throw DomainError("series truncation must be at least 4");
  KernelSpec k(space, KernelMode::discrete, std::move(label));
  k.series_ = std::move(term);
  k.truncation_ = truncation;
  return k;
}

KernelSpec KernelSpec::continuous(const Space& space, ParameterSampler sampler, int levels, std::string label) {
  if (!sampler) throw DomainError("continuous kernel needs a sampler");
  if (levels < 1) throw DomainError("exhaustion levels must be at least 1");
  KernelSpec k(space, KernelMode::continuous, std::move(label));
  k.sampler_ = std::move(sampler);
  k.levels_ = levels;
  return k;
}

KernelSpec KernelSpec::atomic_measure(const Space& space, std::vector<double> masses, std::vector<DiscreteTerm> atoms,
                                      std::string label) {
  if (masses.empty() || masses.size() != atoms.size())
    throw DomainError("atomic measure needs one mass per atom");
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (!(masses[i] > 0.0) || !std::isfinite(masses[i])) throw DomainError("atom masses must be positive");
    if (!std::isfinite(atoms[i].weight)) throw DomainError("Phi must be finite on the atoms");
    check_acts_on(space, atoms[i].automorphism);
  }
  KernelSpec k(space, KernelMode::continuous, std::move(label));
  k.terms_ = atoms;
  k.masses_ = std::move(masses);
  std::vector<DiscreteTerm> pool = std::move(atoms);
  std::vector<double> cumulative(k.masses_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < k.masses_.size(); ++i) cumulative[i] = total += k.masses_[i];
  k.sampler_ = [pool, cumulative, total](std::uint64_t seed, std::uint64_t index, int) {
    CounterRng rng(seed, index);
    const double t = rng.uniform() * total;
    const auto i = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), t) - cumulative.begin());
    const std::size_t j = std::min(i, pool.size() - 1);
    return ParameterDraw{pool[j].automorphism, pool[j].weight, total};
  };
  return k;
}

std::vector<DiscreteTerm> KernelSpec::terms(std::optional<std::size_t> count) const {
  if (series_) {
    const std::size_t n = count.value_or(truncation_);
    std::vector<DiscreteTerm> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      DiscreteTerm t = series_(i);
      require_finite(t.weight, "Phi(n)");
      check_acts_on(space_, t.automorphism);
      out.push_back(std::move(t));
    }
    return out;
  }
  std::vector<DiscreteTerm> out = terms_;
  for (std::size_t i = 0; i < masses_.size(); ++i) out[i].weight *= masses_[i];
  if (count && *count < out.size()) out.erase(out.begin() + static_cast<std::ptrdiff_t>(*count), out.end());
  return out;
}

ParameterDraw KernelSpec::draw(std::uint64_t seed, std::uint64_t index, int level) const {
  if (!sampler_) throw DomainError("kernel " + label_ + " has no parameter sampler");
  return sampler_(seed, index, level);
}

KernelSpec KernelSpec::with_recipe(nlohmann::json recipe) const {
  KernelSpec k = *this;
  k.recipe_ = std::move(recipe);
  return k;
}

bool non_decaying_tail(const std::vector<Estimate>& partial, double ratio, double z) {
  if (partial.size() < 3) return false;
  const Estimate& p0 = partial[partial.size() - 3];
  const Estimate& p1 = partial[partial.size() - 2];
  const Estimate& p2 = partial[partial.size() - 1];
  const double d1 = p1.value - p0.value;
  const double d2 = p2.value - p1.value;
  const double se2 = std::hypot(p1.std_error, p2.std_error);
  const double scale = std::max({std::abs(p2.value), std::abs(p1.value), 1e-300});
  return d2 > ratio * d1 && d2 - z * se2 > 1e-9 * scale;
}

OperatorOutput apply_discrete(const KernelSpec& kernel, const Function& f, const std::vector<Point>& points) {
  if (kernel.mode() != KernelMode::discrete) throw DomainError("apply_discrete needs a discrete kernel");
  const std::vector<DiscreteTerm> terms = kernel.terms();
  if (kernel.infinite_family()) {
    const std::size_t n = terms.size();
    std::vector<Estimate> partial;
    for (std::size_t stop : {n / 4, n / 2, n}) {
      double s = 0.0;
      for (std::size_t i = 0; i < stop; ++i) s += std::abs(terms[i].weight);
      partial.push_back({s, 0.0});
    }
    if (non_decaying_tail(partial, kDivergenceRatio, 0.0))
      throw DomainError("sum of |Phi(n)| does not converge: partial sums " + std::to_string(partial[0].value) + ", " +
                        std::to_string(partial[1].value) + ", " + std::to_string(partial[2].value));
  }
  OperatorOutput out;
  out.values.resize(points.size());
  out.std_errors.assign(points.size(), 0.0);
  out.samples = terms.size();
  parallel_for(points.size(), [&](std::size_t p) {
    double sum = 0.0;
    for (const DiscreteTerm& t : terms) {
      if (t.weight == 0.0) continue;
      const double v = f(act(kernel.space(), t.automorphism, points[p]));
      require_finite(v, "f");
      sum += t.weight * v;
    }
    out.values[p] = sum;
  });
  return out;
}

OperatorOutput apply_continuous(const KernelSpec& kernel, const Function& f, const std::vector<Point>& points,
                                std::size_t n_samples, std::uint64_t seed, int level) {
  if (kernel.mode() != KernelMode::continuous) throw DomainError("apply_continuous needs a continuous kernel");
  if (kernel.finite_support()) {
    OperatorOutput out;
    const std::vector<DiscreteTerm> terms = kernel.terms();
    out.values.resize(points.size());
    out.std_errors.assign(points.size(), 0.0);
    out.samples = terms.size();
    parallel_for(points.size(), [&](std::size_t p) {
      double sum = 0.0;
      for (const DiscreteTerm& t : terms) {
        const double v = f(act(kernel.space(), t.automorphism, points[p]));
        require_finite(v, "f");
        sum += t.weight * v;
      }
      out.values[p] = sum;
    });
    return out;
  }
  if (n_samples < 2) throw DomainError("Monte-Carlo needs at least 2 samples");
  if (level < 0 || level >= kernel.levels()) throw DomainError("exhaustion level out of range");
  std::vector<std::optional<ParameterDraw>> draws(n_samples);
  parallel_for(n_samples, [&](std::size_t i) {
    ParameterDraw d = kernel.draw(seed, i, level);
    require_finite(d.phi, "Phi");
    require_finite(d.weight, "the sampling weight");
    check_acts_on(kernel.space(), d.automorphism);
    draws[i] = std::move(d);
  });
  OperatorOutput out;
  out.values.resize(points.size());
  out.std_errors.resize(points.size());
  out.samples = n_samples;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const std::vector<double> values = parallel_map(n_samples, [&](std::size_t i) {
      const ParameterDraw& d = *draws[i];
      if (d.phi == 0.0 || d.weight == 0.0) return 0.0;
      const double v = f(act(kernel.space(), d.automorphism, points[p]));
      require_finite(v, "f");
      return d.weight * d.phi * v;
    });
    const Estimate e = mean_estimate(values);
    out.values[p] = e.value;
    out.std_errors[p] = e.std_error;
  }
  return out;
}

OperatorOutput apply(const KernelSpec& kernel, const Function& f, const std::vector<Point>& points,
                     std::size_t n_samples, std::uint64_t seed) {
  if (kernel.mode() == KernelMode::discrete) return apply_discrete(kernel, f, points);
  return apply_continuous(kernel, f, points, n_samples, seed);
}

CompactAutomorphismGroup sign_group(int n) {
  if (n < 1 || n > 16) throw DomainError("sign group needs 1 <= n <= 16");
  CompactAutomorphismGroup out;
  out.label = "signs";
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    Vector d(n);
    for (int i = 0; i < n; ++i) d(i) = (mask >> i) & 1u ? -1.0 : 1.0;
    out.elements.push_back(Automorphism::linear(Matrix(d.asDiagonal())));
  }
  return out;
}

CompactAutomorphismGroup rotation_conjugations(int n) {
  const Group group = Group::special_orthogonal(n);
  CompactAutomorphismGroup out;
  out.label = "rotation_conjugations";
  out.sampler = [group](std::uint64_t seed, std::uint64_t index) {
    return Automorphism::conjugation(group.haar_sample_one(seed, index));
  };
  return out;
}

CompactAutomorphismGroup isotropy_conjugations(int n) {
  if (n < 2) throw DomainError("isotropy conjugations need n >= 2");
  CompactAutomorphismGroup out;
  out.label = "isotropy_conjugations";
  out.sampler = [n](std::uint64_t seed, std::uint64_t index) {
    return Automorphism::conjugation(block_with_one(orthogonal_sample(n - 1, seed, index)));
  };
  return out;
}

Estimate delsarte_shift(const Space& space, const Function& f, const Point& x, const Point& h,
                        const CompactAutomorphismGroup& group, std::size_t n_samples, std::uint64_t seed) {
  auto term = [&](const Automorphism& u) {
    if (!(u.group() == space.group())) throw DomainError("automorphism group does not act on " + space.name());
    const Point ux = space.kind() == SpaceKind::sphere
                         ? Point(space.quotient().project(u.apply(space.quotient().lift(x.col(0)))))
                         : u.apply(x);
    const double v = f(translate(space, h, ux));
    require_finite(v, "f");
    return v;
  };
  if (group.finite()) {
    double sum = 0.0;
    for (const Automorphism& u : group.elements) sum += term(u);
    return {sum / static_cast<double>(group.elements.size()), 0.0};
  }
  if (!group.sampler) throw DomainError("automorphism group " + group.label + " has neither elements nor a sampler");
  if (n_samples < 2) throw DomainError("Monte-Carlo needs at least 2 samples");
  const std::vector<double> values = parallel_map(n_samples, [&](std::size_t i) { return term(group.sampler(seed, i)); });
  return mean_estimate(values);
}

KernelSpec delsarte_kernel(const Space& space, const CompactAutomorphismGroup& group) {
  const nlohmann::json recipe{{"type", "delsarte"}, {"group", group.label}};
  if (group.finite()) {
    std::vector<DiscreteTerm> terms;
    const double w = 1.0 / static_cast<double>(group.elements.size());
    for (const Automorphism& u : group.elements) terms.push_back({w, u});
    return KernelSpec::discrete(space, std::move(terms), "delsarte:" + group.label).with_recipe(recipe);
  }
  auto sampler = group.sampler;
  return KernelSpec::continuous(
             space, [sampler](std::uint64_t seed, std::uint64_t index, int) { return ParameterDraw{sampler(seed, index)}; },
             1, "delsarte:" + group.label)
      .with_recipe(recipe);
}

Matrix orthogonal_sample(int m, std::uint64_t seed, std::uint64_t index) {
  if (m < 1) throw DomainError("O(m) needs m >= 1");
  CounterRng rng(seed, index);
  Matrix u = random_rotation(m, rng);
  if (rng.coin()) u.row(0) *= -1.0;
  return u;
}

Estimate slice_transform(const std::function<double(const Matrix&)>& phi, const OrthogonalSampler& sampler,
                         const Function& f, const Vector& s, std::size_t n_samples, std::uint64_t seed) {
  const auto n = static_cast<int>(s.size());
  if (n < 2) throw DomainError("slice transform needs n >= 2");
  if (std::abs(s.norm() - 1.0) > 1e-10) throw DomainError("slice transform needs a unit vector");
  if (n_samples < 2) throw DomainError("Monte-Carlo needs at least 2 samples");
  const Vector head = s.head(n - 1);
  const std::vector<double> values = parallel_map(n_samples, [&](std::size_t i) {
    const Matrix u = sampler ? sampler(seed, i) : orthogonal_sample(n - 1, seed, i);
    const double weight = phi ? phi(u) : 1.0;
    require_finite(weight, "Phi");
    if (weight == 0.0) return 0.0;
    Matrix t(n, 1);
    t.col(0).head(n - 1) = u.transpose() * head;
    t(n - 1, 0) = s(n - 1);
    const double v = f(t);
    require_finite(v, "f");
    return weight * v;
  });
  return mean_estimate(values);
}

Estimate slice_transform(const Function& f, const Vector& s, std::size_t n_samples, std::uint64_t seed) {
  return slice_transform(nullptr, nullptr, f, s, n_samples, seed);
}

KernelSpec slice_kernel(int n, std::function<double(const Matrix&)> phi, std::string label) {
  if (n < 2) throw DomainError("slice kernel needs n >= 2");
  return KernelSpec::continuous(
      Space::sphere(n),
      [n, phi](std::uint64_t seed, std::uint64_t index, int) {
        const Matrix u = orthogonal_sample(n - 1, seed, index);
        return ParameterDraw{Automorphism::conjugation(block_with_one(u)), phi ? phi(u) : 1.0, 1.0};
      },
      1, std::move(label));
}

EstimatedFunction slice_average(int n, const Function& f, std::size_t n_samples, std::uint64_t seed) {
  return [n, f, n_samples, seed](const Vector& s, std::uint64_t stream) {
    if (s.size() != n) throw DomainError("point has the wrong dimension");
    return slice_transform(f, s, n_samples, CounterRng(seed, stream)());
  };
}

EstimatedFunction exact_function(const Function& f) {
  return [f](const Vector& s, std::uint64_t) { return Estimate{f(Matrix(s)), 0.0}; };
}

ZonalReport zonal_check(int n, const EstimatedFunction& f, std::size_t n_levels, std::size_t samples_per_level,
                        std::uint64_t seed, double z) {
  if (n < 2) throw DomainError("zonal check needs n >= 2");
  if (n_levels < 1 || samples_per_level < 2) throw DomainError("zonal check needs >= 1 level and >= 2 points per level");
  ZonalReport report;
  report.levels.resize(n_levels);
  const std::size_t total = n_levels * samples_per_level;
  std::vector<Estimate> values(total);
  parallel_for(total, [&](std::size_t k) {
    const std::size_t j = k / samples_per_level;
    const double t = n_levels == 1 ? 0.0 : -0.9 + 1.8 * static_cast<double>(j) / static_cast<double>(n_levels - 1);
    CounterRng rng(seed, k);
    Vector w(n - 1);
    do {
      for (int i = 0; i < n - 1; ++i) w(i) = rng.normal();
    } while (w.norm() == 0.0);
    Vector s(n);
    s.head(n - 1) = std::sqrt(1.0 - t * t) * w.normalized();
    s(n - 1) = t;
    values[k] = f(s, k);
  });
  report.pass = true;
  for (std::size_t j = 0; j < n_levels; ++j) {
    ZonalLevel& level = report.levels[j];
    level.level = n_levels == 1 ? 0.0 : -0.9 + 1.8 * static_cast<double>(j) / static_cast<double>(n_levels - 1);
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 0; i < samples_per_level; ++i) {
      const Estimate& e = values[j * samples_per_level + i];
      require_finite(e.value, "the evaluated function");
      level.values.push_back(e.value);
      level.std_errors.push_back(e.std_error);
      if (e.value < level.values[lo]) lo = i;
      if (e.value > level.values[hi]) hi = i;
    }
    level.spread = level.values[hi] - level.values[lo];
    level.combined_sigma = std::hypot(level.std_errors[hi], level.std_errors[lo]);
    level.pass = level.spread <= z * level.combined_sigma + 1e-12;
    report.pass = report.pass && level.pass;
    report.max_spread = std::max(report.max_spread, level.spread);
    const double ratio = level.combined_sigma > 0.0 ? level.spread / level.combined_sigma
                         : level.spread > 1e-12    ? kInf
                                                   : 0.0;
    report.max_ratio = std::max(report.max_ratio, ratio);
  }
  return report;
}

Remark2Value remark2_vanish(const Atom& atom, const Vector& x, const Remark2Options& options) {
  const Space& space = atom.space();
  if (space.kind() != SpaceKind::euclidean) throw DomainError("remark2_vanish needs an atom on R^n");
  const int n = space.dimension();
  if (x.size() != n) throw DomainError("evaluation point has the wrong dimension");
  for (int i = 0; i < n; ++i)
    if (x(i) == 0.0 || !std::isfinite(x(i))) throw DomainError("remark2_vanish needs all coordinates of x nonzero");

  // a(v) vanishes outside the cube center +- radius; in u = v / x that is a box.
  const Vector c = atom.center().col(0);
  std::vector<double> lo(n), hi(n);
  std::vector<std::vector<double>> breakpoints(n);
  for (int i = 0; i < n; ++i) {
    const double a = (c(i) - atom.radius()) / x(i);
    const double b = (c(i) + atom.radius()) / x(i);
    lo[i] = std::min(a, b);
    hi[i] = std::max(a, b);
    if (static_cast<std::size_t>(i) < atom.breakpoints().size())
      for (double p : atom.breakpoints()[i]) breakpoints[i].push_back(p / x(i));
  }
  const auto integrand = [&](const Vector& u) { return atom(Matrix(u.cwiseProduct(x))); };

  Remark2Value out;
  double previous = 0.0;
  for (int level = 0; level <= options.max_refinements; ++level) {
    std::vector<std::vector<double>> edges(n);
    for (int i = 0; i < n; ++i)
      edges[i] = axis_cells(lo[i], hi[i], breakpoints[i], (hi[i] - lo[i]) / std::pow(2.0, level + 2));
    const TensorRule rule(edges, options.order);
    const double value = rule.integrate(integrand);
    require_finite(value, "the atom");
    out.evaluations += rule.size();
    out.value = value;
    out.refinements = level;
    if (level > 0) {
      out.error_estimate = std::abs(value - previous);
      if (out.error_estimate <= options.tolerance) break;
    }
    previous = value;
  }
  return out;
}

KernelSpec remark2_kernel(int n, double t0, int levels) {
  if (n < 1) throw DomainError("remark2 kernel needs n >= 1");
  if (!(t0 > 0.0)) throw DomainError("window t0 must be positive");
  return KernelSpec::continuous(
             Space::euclidean(n),
             [n, t0](std::uint64_t seed, std::uint64_t index, int level) {
               CounterRng rng(seed, index);
               const double t = t0 * std::ldexp(1.0, level);
               Vector u(n);
               double weight = 1.0;
               for (int i = 0; i < n; ++i) {
                 const double sign = rng.coin() ? -1.0 : 1.0;
                 u(i) = sign * std::exp(rng.uniform(-t, t));
                 weight *= 4.0 * t * std::abs(u(i));
               }
               return ParameterDraw{Automorphism::linear(Matrix(u.asDiagonal())), 1.0, weight};
             },
             levels, "remark2")
      .with_recipe(nlohmann::json{{"type", "remark2"}, {"n", n}, {"t0", t0}, {"levels", levels}});
}

}  // namespace hausdorff
