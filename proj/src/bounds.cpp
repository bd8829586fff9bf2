#include "hausdorff/bounds.hpp"

#include "hausdorff/parallel.hpp"
#include "hausdorff/quadrature.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace hausdorff {

namespace {

std::string describe(const Automorphism& a) {
  std::ostringstream out;
  out << to_string(a.family());
  if (a.family() == AutomorphismFamily::linear || a.family() == AutomorphismFamily::conjugation) {
    const Matrix& m = a.parameter();
    out << " [";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i > 0) out << "; ";
      for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j > 0 ? " " : "") << m(i, j);
    }
    out << "]";
  } else if (a.family() == AutomorphismFamily::custom) {
    out << " " << a.label();
  }
  return out.str();
}

struct Summand {
  double modulus;
  double k_spectral;
  double k_hs;
  double contribution;
};

Summand summand(const Automorphism& a, double phi_abs, double weight, double q, double d, NormChoice norm) {
  const KFactors k = k_factors(a);
  const double mod = modulus(a);
  if (!(mod > 0.0) || !std::isfinite(mod)) throw NumericalError("modulus is not a positive finite number");
  const double inv_q = reciprocal_exponent(q);
  const double kk = norm == NormChoice::spectral ? k.spectral : k.hilbert_schmidt;
  double c = 0.0;
  if (phi_abs != 0.0 && weight != 0.0) c = weight * phi_abs * std::pow(mod, -inv_q) * std::pow(kk, (1.0 - inv_q) * d);
  if (!std::isfinite(c)) throw NumericalError("non-finite summand of the Phi norm");
  return {mod, k.spectral, k.hilbert_schmidt, c};
}

void record_ranges(PhiNorm& out, const Summand& s) {
  out.modulus_range.add(s.modulus);
  out.k_spectral_range.add(s.k_spectral);
  out.k_hilbert_schmidt_range.add(s.k_hs);
}

std::string partial_text(const std::vector<Estimate>& partial) {
  std::ostringstream out;
  out << "partial values";
  for (const Estimate& e : partial) out << " " << e.value << " (+- " << e.std_error << ")";
  return out.str();
}

// Every point where the atomic function composed with an automorphism can be
// nonzero lies in one of these balls.
struct Component {
  Point center;
  double radius;
  double volume;
  double mass;
  bool whole;
};

}  // namespace

PhiNorm phi_norm(const KernelSpec& kernel, double q, double d, NormChoice norm, std::size_t n_samples,
                 std::uint64_t seed, const PhiNormOptions& options) {
  if (!(q > 1.0)) throw DomainError("q must lie in (1, inf]");
  if (!(d >= 0.0) || !std::isfinite(d)) throw DomainError("d must be a finite number >= 0");
  PhiNorm out;
  out.q = q;
  out.d = d;
  out.norm = norm;

  if (kernel.mode() == KernelMode::discrete || kernel.finite_support()) {
    const std::vector<DiscreteTerm> terms = kernel.terms();
    std::vector<Summand> parts(terms.size());
    parallel_for(terms.size(), [&](std::size_t i) {
      parts[i] = summand(terms[i].automorphism, std::abs(terms[i].weight), 1.0, q, d, norm);
    });
    for (std::size_t i = 0; i < terms.size(); ++i) {
      record_ranges(out, parts[i]);
      out.records.push_back({i, std::abs(terms[i].weight), 1.0, parts[i].modulus, parts[i].k_spectral, parts[i].k_hs,
                             parts[i].contribution, describe(terms[i].automorphism)});
    }
    const std::size_t n = terms.size();
    std::vector<std::size_t> stops = {n};
    if (kernel.infinite_family()) stops = {n / 4, n / 2, n};
    for (std::size_t stop : stops) {
      double s = 0.0;
      for (std::size_t i = 0; i < stop; ++i) s += parts[i].contribution;
      out.partial.push_back({s, 0.0});
    }
    out.value = out.partial.back();
    if (kernel.infinite_family()) {
      out.divergent = non_decaying_tail(out.partial, options.divergence_ratio, 0.0);
      out.diagnostics = (out.divergent ? "series does not converge: " : "series converges: ") + partial_text(out.partial);
    }
    return out;
  }

  if (n_samples < 2) throw DomainError("Monte-Carlo needs at least 2 samples");
  out.monte_carlo = true;
  for (int level = 0; level < kernel.levels(); ++level) {
    std::vector<std::optional<Summand>> parts(n_samples);
    std::vector<double> phi_abs(n_samples), weights(n_samples);
    std::vector<std::string> labels(std::min(n_samples, options.record_limit));
    const bool last = level + 1 == kernel.levels();
    parallel_for(n_samples, [&](std::size_t i) {
      const ParameterDraw draw = kernel.draw(seed, i, level);
      if (!std::isfinite(draw.phi) || !std::isfinite(draw.weight)) throw NumericalError("non-finite value of Phi");
      phi_abs[i] = std::abs(draw.phi);
      weights[i] = draw.weight;
      parts[i] = summand(draw.automorphism, phi_abs[i], draw.weight, q, d, norm);
      if (last && i < labels.size()) labels[i] = describe(draw.automorphism);
    });
    std::vector<double> values(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
      values[i] = parts[i]->contribution;
      record_ranges(out, *parts[i]);
    }
    out.partial.push_back(mean_estimate(values));
    if (last)
      for (std::size_t i = 0; i < labels.size(); ++i)
        out.records.push_back({i, phi_abs[i], weights[i], parts[i]->modulus, parts[i]->k_spectral, parts[i]->k_hs,
                               parts[i]->contribution, labels[i]});
  }
  out.value = out.partial.back();
  if (kernel.levels() > 1) {
    out.divergent = non_decaying_tail(out.partial, options.divergence_ratio, options.z);
    out.diagnostics =
        (out.divergent ? "estimates grow across windows: " : "estimates settle across windows: ") + partial_text(out.partial);
  }
  return out;
}

double theorem1_bound(double c_nu, double q, double phi_norm_value) {
  if (!(c_nu >= 1.0)) throw DomainError("doubling constant must be >= 1");
  if (!(q > 1.0)) throw DomainError("q must lie in (1, inf]");
  if (std::isnan(phi_norm_value) || phi_norm_value < 0.0) throw DomainError("Phi norm must be >= 0");
  if (std::isinf(phi_norm_value)) return kInf;
  return std::pow(c_nu, 1.0 - reciprocal_exponent(q)) * phi_norm_value;
}

double theorem1_bound(double c_nu, double q, const PhiNorm& phi) {
  return phi.divergent ? kInf : theorem1_bound(c_nu, q, phi.value.value);
}

BoundReport bound_report(const KernelSpec& kernel, double q, double c_nu, double d, NormChoice norm,
                         std::size_t n_samples, std::uint64_t seed, const PhiNormOptions& options) {
  BoundReport r;
  r.q = q;
  r.c_nu = c_nu;
  r.d = d;
  r.phi = phi_norm(kernel, q, d, norm, n_samples, seed, options);
  r.bound = theorem1_bound(c_nu, q, r.phi);
  r.infinite = std::isinf(r.bound);
  r.bound_upper = r.infinite ? kInf : theorem1_bound(c_nu, q, std::max(0.0, r.phi.value.upper(options.z)));
  return r;
}

namespace {

L1Norm euclidean_discrete_l1(const KernelSpec& kernel, const AtomicFunction& f, const L1Options& options) {
  const Space& space = kernel.space();
  const int n = space.dimension();
  std::vector<DiscreteTerm> terms;
  for (const DiscreteTerm& t : kernel.terms())
    if (t.weight != 0.0) terms.push_back(t);
  std::vector<double> lo(n, kInf), hi(n, -kInf);
  std::vector<std::vector<double>> breakpoints(n);
  bool aligned = true;
  bool piecewise_constant = true;
  bool any = false;
  for (const DiscreteTerm& t : terms) {
    Matrix m = Matrix::Identity(n, n);
    if (t.automorphism.family() == AutomorphismFamily::linear) m = t.automorphism.parameter();
    else if (t.automorphism.family() != AutomorphismFamily::identity)
      throw DomainError("L1 quadrature on R^n supports identity and linear terms");
    const bool diagonal = (m - Matrix(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
    const Matrix inverse = m.inverse();
    for (std::size_t j = 0; j < f.atoms().size(); ++j) {
      const Atom& a = f.atoms()[j];
      if (f.coefficients()[j] == 0.0) continue;
      any = true;
      piecewise_constant = piecewise_constant && a.piecewise_constant();
      const Vector c = a.center().col(0);
      // Bounding box of M^{-1}(c + [-r, r]^n).
      for (int i = 0; i < n; ++i) {
        const double mid = (inverse.row(i) * c)(0);
        const double half = a.radius() * inverse.row(i).cwiseAbs().sum();
        lo[i] = std::min(lo[i], mid - half);
        hi[i] = std::max(hi[i], mid + half);
      }
      if (!diagonal || a.breakpoints().empty()) {
        aligned = false;
        continue;
      }
      for (int i = 0; i < n; ++i)
        for (double p : a.breakpoints()[static_cast<std::size_t>(i)]) breakpoints[i].push_back(p / m(i, i));
    }
  }
  L1Norm out;
  out.method = "tensor Gauss-Legendre";
  if (!any) return out;
  const int order = n == 1 ? options.quadrature_order : std::min(options.quadrature_order, 4);
  const double cells = aligned && piecewise_constant ? 4.0 : (n == 1 ? 256.0 : 16.0);
  auto integrate = [&](double refine) {
    std::vector<std::vector<double>> edges(n);
    for (int i = 0; i < n; ++i) edges[i] = axis_cells(lo[i], hi[i], breakpoints[i], (hi[i] - lo[i]) / (cells * refine));
    const TensorRule rule(edges, order);
    out.evaluations += rule.size();
    return rule.integrate([&](const Vector& x) {
      const Point p = x;
      double s = 0.0;
      for (const DiscreteTerm& t : terms) s += t.weight * f(t.automorphism.apply(p));
      return std::abs(s);
    });
  };
  const double coarse = integrate(1.0);
  const double fine = integrate(2.0);
  if (!std::isfinite(fine)) throw NumericalError("non-finite L1 quadrature");
  out.value = {fine, 0.0};
  out.budget = std::abs(fine - coarse) + 1e-9 * std::max(1.0, std::abs(fine));
  return out;
}

std::vector<Component> image_balls(const KernelSpec& kernel, const AtomicFunction& f) {
  const Space& space = kernel.space();
  std::vector<Component> out;
  for (const DiscreteTerm& t : kernel.terms()) {
    if (t.weight == 0.0) continue;
    // Conjugations act isometrically on the sphere; on a group A^{-1} is
    // k-Lipschitz, so A^{-1}(B(c, r)) lies in B(A^{-1} c, k r).
    double k = 1.0;
    const bool isometric_sphere = space.kind() == SpaceKind::sphere &&
                                  (t.automorphism.family() == AutomorphismFamily::identity ||
                                   t.automorphism.family() == AutomorphismFamily::conjugation);
    if (space.kind() == SpaceKind::sphere && !isometric_sphere) k = kInf;
    else if (!isometric_sphere) k = k_factor(t.automorphism, NormChoice::spectral);
    const Automorphism inverse = t.automorphism.inverse();
    for (std::size_t j = 0; j < f.atoms().size(); ++j) {
      const Atom& a = f.atoms()[j];
      const double lambda = f.coefficients()[j];
      if (lambda == 0.0) continue;
      const double r = k * a.radius();
      Component c;
      c.whole = !(r < space.diameter());
      c.center = c.whole ? Point() : act(space, inverse, a.center());
      c.radius = c.whole ? space.diameter() : r;
      c.volume = c.whole ? 1.0 : space.ball_volume(r);
      c.mass = std::abs(lambda * t.weight);
      out.push_back(std::move(c));
    }
  }
  return out;
}

L1Norm compact_discrete_l1(const KernelSpec& kernel, const AtomicFunction& f, std::uint64_t seed,
                           const L1Options& options) {
  const Space& space = kernel.space();
  const std::vector<DiscreteTerm> terms = kernel.terms();
  const std::vector<Component> parts = image_balls(kernel, f);
  L1Norm out;
  out.method = "mixture importance sampling over image balls";
  if (parts.empty()) return out;
  std::vector<double> cumulative(parts.size());
  double total = 0.0;
  for (std::size_t m = 0; m < parts.size(); ++m) cumulative[m] = total += parts[m].mass;
  const auto hf = [&](const Point& x) {
    double s = 0.0;
    for (const DiscreteTerm& t : terms)
      if (t.weight != 0.0) s += t.weight * f(act(space, t.automorphism, x));
    return s;
  };
  const auto density = [&](const Point& x) {
    double q = 0.0;
    for (const Component& c : parts)
      if (c.whole || space.within(x, c.center, c.radius)) q += c.mass / (total * c.volume);
    return q;
  };
  const std::uint64_t pick_seed = derive_seed(seed, "component");
  const std::uint64_t point_seed = derive_seed(seed, "point");
  const std::size_t n = std::max<std::size_t>(options.outer_samples, 2);
  const std::vector<double> values = parallel_map(n, [&](std::size_t i) {
    CounterRng rng(pick_seed, i);
    const double u = rng.uniform() * total;
    const auto m = std::min<std::size_t>(
        static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin()),
        parts.size() - 1);
    const Component& c = parts[m];
    std::pair<Point, Point> pair;
    if (c.whole) pair = {space.uniform_sample_one(point_seed, 2 * i), space.uniform_sample_one(point_seed, 2 * i + 1)};
    else pair = space.ball_sample_pair(c.center, c.radius, point_seed, i);
    double v = 0.0;
    for (const Point* x : {&pair.first, &pair.second}) {
      const double q = density(*x);
      if (!(q > 0.0)) throw NumericalError("importance density vanished at a sampled point");
      v += 0.5 * std::abs(hf(*x)) / q;
    }
    if (!std::isfinite(v)) throw NumericalError("non-finite value of H f");
    return v;
  });
  out.value = mean_estimate(values);
  out.budget = out.value.half_width(options.z);
  out.evaluations = 2 * n * terms.size();
  return out;
}

L1Norm compact_continuous_l1(const KernelSpec& kernel, const AtomicFunction& f, std::uint64_t seed,
                             const L1Options& options) {
  const Space& space = kernel.space();
  L1Norm out;
  out.method = "nested Monte-Carlo";
  bool any = false;
  for (std::size_t j = 0; j < f.atoms().size(); ++j)
    any = any || f.coefficients()[j] != 0.0;
  if (!any) return out;
  const std::size_t outer = std::max<std::size_t>(options.outer_samples, 2);
  const std::size_t inner = std::max<std::size_t>(options.inner_samples, 2);
  const std::uint64_t outer_seed = derive_seed(seed, "outer");
  const std::uint64_t inner_seed = derive_seed(seed, "inner");
  std::vector<double> abs_values(outer), inner_errors(outer);
  parallel_for(outer, [&](std::size_t i) {
    const Point x = space.uniform_sample_one(outer_seed, i);
    const std::uint64_t s = CounterRng(inner_seed, i)();
    std::vector<double> values(inner);
    for (std::size_t j = 0; j < inner; ++j) {
      const ParameterDraw d = kernel.draw(s, j, 0);
      const double v = d.phi == 0.0 ? 0.0 : d.weight * d.phi * f(act(space, d.automorphism, x));
      if (!std::isfinite(v)) throw NumericalError("non-finite value of H f");
      values[j] = v;
    }
    const Estimate e = mean_estimate(values);
    abs_values[i] = std::abs(e.value);
    inner_errors[i] = e.std_error;
  });
  out.value = mean_estimate(abs_values);
  double bias = 0.0;
  for (double e : inner_errors) bias += e;
  bias /= static_cast<double>(outer);
  // E|mean - H f(x)| <= sigma / sqrt(m) bounds the upward bias of |mean|.
  out.budget = out.value.half_width(options.z) + bias;
  out.evaluations = outer * inner;
  return out;
}

}  // namespace

L1Norm operator_l1_norm(const KernelSpec& kernel, const AtomicFunction& f, std::uint64_t seed,
                        const L1Options& options) {
  if (!(f.space() == kernel.space())) throw DomainError("function and kernel live on different spaces");
  if (!kernel.space().compact()) {
    if (kernel.mode() == KernelMode::discrete || kernel.finite_support()) return euclidean_discrete_l1(kernel, f, options);
    throw DomainError("L1 norms of continuous kernels on R^n are not supported");
  }
  if (kernel.mode() == KernelMode::discrete || kernel.finite_support()) return compact_discrete_l1(kernel, f, seed, options);
  return compact_continuous_l1(kernel, f, seed, options);
}

ConsistencyReport bound_consistency(const KernelSpec& kernel, const std::vector<AtomicFunction>& functions, double q,
                                    double c_nu, double d, NormChoice norm, std::size_t phi_samples,
                                    std::uint64_t seed, const L1Options& options) {
  ConsistencyReport report;
  report.bound = bound_report(kernel, q, c_nu, d, norm, phi_samples, derive_seed(seed, "phi"));
  if (report.bound.infinite) {
    report.skipped = true;
    report.pass = true;
    return report;
  }
  for (std::size_t i = 0; i < functions.size(); ++i) {
    if (std::abs(functions[i].q() - q) > 0.0 && !(std::isinf(q) && std::isinf(functions[i].q())))
      throw DomainError("test function exponent differs from q");
    ConsistencyRow row;
    row.index = i;
    row.atomic_norm = functions[i].atomic_norm_bound();
    row.l1 = operator_l1_norm(kernel, functions[i], CounterRng(derive_seed(seed, "l1"), i)(), options);
    row.limit = report.bound.bound_upper * row.atomic_norm;
    row.margin = row.limit - (row.l1.value.value - row.l1.budget);
    row.violation = row.margin < 0.0;
    report.violations += row.violation ? 1 : 0;
    report.rows.push_back(std::move(row));
  }
  report.pass = report.violations == 0;
  return report;
}

}  // namespace hausdorff
