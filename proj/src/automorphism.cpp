#include "hausdorff/automorphism.hpp"

#include "hausdorff/parallel.hpp"

#include <algorithm>

namespace hausdorff {

std::string to_string(AutomorphismFamily family) {
  switch (family) {
    case AutomorphismFamily::identity:
      return "identity";
    case AutomorphismFamily::linear:
      return "linear";
    case AutomorphismFamily::conjugation:
      return "conjugation";
    case AutomorphismFamily::custom:
      return "custom";
  }
  return "unknown";
}

std::string to_string(NormChoice choice) {
  return choice == NormChoice::spectral ? "spectral" : "hilbert_schmidt";
}

NormChoice norm_choice_from_string(const std::string& name) {
  if (name == "spectral") return NormChoice::spectral;
  if (name == "hilbert_schmidt") return NormChoice::hilbert_schmidt;
  throw DomainError("unknown norm choice: " + name);
}

Automorphism Automorphism::identity(const Group& group) {
  const int n = group.dimension();
  return Automorphism(group, AutomorphismFamily::identity, Matrix::Identity(n, n), "identity");
}

Automorphism Automorphism::linear(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) throw DomainError("linear automorphism needs a square matrix");
  if (!m.allFinite() || std::abs(m.determinant()) == 0.0) throw DomainError("linear automorphism is singular");
  return Automorphism(Group::euclidean(static_cast<int>(m.rows())), AutomorphismFamily::linear, m, "linear");
}

Automorphism Automorphism::conjugation(const Matrix& g) {
  const auto n = g.rows();
  if (g.cols() != n || n < 1) throw DomainError("conjugation needs a square matrix");
  if ((g.transpose() * g - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
    throw DomainError("conjugating matrix is not orthogonal");
  return Automorphism(Group::special_orthogonal(static_cast<int>(n)), AutomorphismFamily::conjugation, g,
                      "conjugation");
}

Automorphism Automorphism::custom(const Group& group, Map forward, Map inverse, std::string label) {
  const int n = group.dimension();
  Automorphism a(group, AutomorphismFamily::custom, Matrix::Identity(n, n), std::move(label));
  a.forward_ = std::make_shared<const Map>(std::move(forward));
  a.backward_ = std::make_shared<const Map>(std::move(inverse));
  return a;
}

Point Automorphism::apply(const Point& x) const {
  switch (family_) {
    case AutomorphismFamily::identity:
      return x;
    case AutomorphismFamily::linear:
      return parameter_ * x;
    case AutomorphismFamily::conjugation:
      return parameter_.transpose() * x * parameter_;
    case AutomorphismFamily::custom:
      return (*forward_)(x);
  }
  return x;
}

Point Automorphism::apply_inverse(const Point& x) const {
  switch (family_) {
    case AutomorphismFamily::identity:
      return x;
    case AutomorphismFamily::linear:
      return parameter_.partialPivLu().solve(x);
    case AutomorphismFamily::conjugation:
      return parameter_ * x * parameter_.transpose();
    case AutomorphismFamily::custom:
      return (*backward_)(x);
  }
  return x;
}

Automorphism Automorphism::inverse() const {
  Automorphism inv = *this;
  switch (family_) {
    case AutomorphismFamily::identity:
      break;
    case AutomorphismFamily::linear:
      inv.parameter_ = parameter_.inverse();
      break;
    case AutomorphismFamily::conjugation:
      inv.parameter_ = parameter_.transpose();
      break;
    case AutomorphismFamily::custom:
      std::swap(inv.forward_, inv.backward_);
      inv.label_ = label_ + "^-1";
      break;
  }
  return inv;
}

Automorphism Automorphism::compose(const Automorphism& inner) const {
  if (!(group_ == inner.group_)) throw DomainError("cannot compose automorphisms of different groups");
  if (family_ == AutomorphismFamily::identity) return inner;
  if (inner.family_ == AutomorphismFamily::identity) return *this;
  if (family_ == AutomorphismFamily::linear && inner.family_ == AutomorphismFamily::linear)
    return linear(parameter_ * inner.parameter_);
  // (g^{-1} (h^{-1} x h) g) = (hg)^{-1} x (hg)
  if (family_ == AutomorphismFamily::conjugation && inner.family_ == AutomorphismFamily::conjugation)
    return conjugation(inner.parameter_ * parameter_);
  const Automorphism outer = *this;
  const Automorphism first = inner;
  return custom(
      group_, [outer, first](const Point& x) { return outer.apply(first.apply(x)); },
      [outer, first](const Point& x) { return first.apply_inverse(outer.apply_inverse(x)); },
      label_ + "*" + inner.label_);
}

Automorphism Automorphism::with_preserves_k(bool value) const {
  Automorphism copy = *this;
  copy.preserves_k_ = value;
  return copy;
}

Differential differential_matrix(const Automorphism& automorphism) {
  const Group& group = automorphism.group();
  const int dim = group.lie_algebra_dim();
  Differential out;
  switch (automorphism.family()) {
    case AutomorphismFamily::identity:
      out.matrix = Matrix::Identity(dim, dim);
      return out;
    case AutomorphismFamily::linear:
      out.matrix = automorphism.parameter();
      return out;
    case AutomorphismFamily::conjugation: {
      // X -> g^{-1} X g, expressed in the orthonormal so(n) basis.
      const Matrix& g = automorphism.parameter();
      out.matrix.resize(dim, dim);
      for (int b = 0; b < dim; ++b) {
        const Matrix image = g.transpose() * group.algebra_basis(b) * g;
        out.matrix.col(b) = group.algebra_coordinates(image);
      }
      return out;
    }
    case AutomorphismFamily::custom: {
      out.finite_difference = true;
      out.matrix.resize(dim, dim);
      const double h = kDifferentialStep;
      for (int b = 0; b < dim; ++b) {
        const Matrix e = group.algebra_basis(b);
        const Matrix plus = group.log(automorphism.apply(group.exp(h * e)));
        const Matrix minus = group.log(automorphism.apply(group.exp(-h * e)));
        out.matrix.col(b) = group.algebra_coordinates((plus - minus) / (2.0 * h));
      }
      return out;
    }
  }
  return out;
}

double modulus(const Automorphism& automorphism) {
  if (automorphism.group().compact()) return 1.0;
  switch (automorphism.family()) {
    case AutomorphismFamily::identity:
      return 1.0;
    case AutomorphismFamily::linear:
      return std::abs(automorphism.parameter().determinant());
    default:
      return std::abs(differential_matrix(automorphism).matrix.determinant());
  }
}

double matrix_norm(const Matrix& m, NormChoice choice) {
  if (choice == NormChoice::hilbert_schmidt) return m.norm();
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

KFactors k_factors(const Automorphism& automorphism) {
  const Differential differential = differential_matrix(automorphism.inverse());
  const Matrix& d = differential.matrix;
  if (!d.allFinite()) throw NumericalError("k_factor: differential is not finite");
  Eigen::JacobiSVD<Matrix> svd(d);
  const auto& sv = svd.singularValues();
  // Central differences carry O(step^2) error, so tiny singular values are zero.
  const double tol = differential.finite_difference ? 1e-8 * std::max(1.0, sv(0)) : 0.0;
  if (sv(sv.size() - 1) <= tol) throw DomainError("k_factor: singular differential");
  return {sv(0), sv.norm()};
}

double k_factor(const Automorphism& automorphism, NormChoice choice) {
  const KFactors k = k_factors(automorphism);
  return choice == NormChoice::spectral ? k.spectral : k.hilbert_schmidt;
}

LipschitzReport lipschitz_check(const Automorphism& automorphism, std::size_t pairs, std::uint64_t seed,
                                double tolerance, double window) {
  const Group& group = automorphism.group();
  LipschitzReport report;
  report.pairs = pairs;
  report.lipschitz_constant = matrix_norm(differential_matrix(automorphism).matrix, NormChoice::spectral);
  auto draw = [&](CounterRng& rng) -> Point {
    if (group.compact()) return random_rotation(group.dimension(), rng);
    Point p(group.dimension(), 1);
    for (int i = 0; i < p.rows(); ++i) p(i, 0) = rng.uniform(-window, window);
    return p;
  };
  const std::vector<double> ratios = parallel_map(pairs, [&](std::size_t i) {
    CounterRng rng(seed, i);
    const Point p = draw(rng);
    const Point q = draw(rng);
    const double before = group.distance(p, q);
    const double after = group.distance(automorphism.apply(p), automorphism.apply(q));
    if (before == 0.0) return after == 0.0 ? 0.0 : kInf;
    return after / before;
  });
  const double allowed = report.lipschitz_constant * (1.0 + tolerance);
  for (double r : ratios) {
    report.max_ratio = std::max(report.max_ratio, r);
    if (r > allowed) ++report.violations;
  }
  return report;
}

}  // namespace hausdorff
