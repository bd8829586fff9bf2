#include "hausdorff/serialize.hpp"

namespace hausdorff {

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DomainError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double number(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number()) throw DomainError(std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

}  // namespace

Json q_to_json(double q) {
  if (std::isinf(q)) return "inf";
  return q;
}

double q_from_json(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    throw DomainError("q must be a number or \"inf\"");
  }
  if (!j.is_number()) throw DomainError("q must be a number or \"inf\"");
  const double q = j.get<double>();
  if (!(q > 1.0)) throw DomainError("q must lie in (1, inf]");
  return q;
}

Json to_json(const Space& space) { return Json{{"kind", to_string(space.kind())}, {"n", space.dimension()}}; }

Space space_from_json(const Json& j) {
  const SpaceKind kind = space_kind_from_string(require(j, "kind").get<std::string>());
  const Json& n = require(j, "n");
  if (!n.is_number_integer() || n.get<int>() < 1) throw DomainError("field \"n\" must be a positive integer");
  switch (kind) {
    case SpaceKind::euclidean:
      return Space::euclidean(n.get<int>());
    case SpaceKind::special_orthogonal:
      return Space::special_orthogonal(n.get<int>());
    case SpaceKind::sphere:
      return Space::sphere(n.get<int>());
  }
  throw DomainError("unknown space kind");
}

Json point_to_json(const Point& p) {
  if (p.cols() == 1) return std::vector<double>(p.data(), p.data() + p.rows());
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(p.cols()));
    for (Eigen::Index k = 0; k < p.cols(); ++k) row[static_cast<std::size_t>(k)] = p(i, k);
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw DomainError("expected a nonempty array");
  if (j.front().is_number()) {
    Matrix m(static_cast<Eigen::Index>(j.size()), 1);
    for (std::size_t i = 0; i < j.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = j[i].get<double>();
    return m;
  }
  const std::size_t cols = j.front().size();
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw DomainError("matrix rows must have equal length");
    for (std::size_t k = 0; k < cols; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
  }
  return m;
}

Point point_from_json(const Json& j, const Space& space) {
  const Point p = matrix_from_json(j);
  if (!space.contains(p, 1e-8)) throw DomainError("point is not in " + space.name());
  return p;
}

Json to_json(const Automorphism& a) {
  const Json group{{"kind", to_string(a.group().kind())}, {"n", a.group().dimension()}};
  switch (a.family()) {
    case AutomorphismFamily::identity:
      return Json{{"family", "identity"}, {"group", group}};
    case AutomorphismFamily::linear:
    case AutomorphismFamily::conjugation:
      return Json{{"family", to_string(a.family())}, {"group", group}, {"matrix", point_to_json(a.parameter())}};
    case AutomorphismFamily::custom:
      break;
  }
  throw DomainError("custom automorphism \"" + a.label() + "\" has no serial form");
}

Automorphism automorphism_from_json(const Json& j) {
  const std::string family = require(j, "family").get<std::string>();
  if (family == "linear" || family == "conjugation") {
    Matrix m = matrix_from_json(require(j, "matrix"));
    if (m.cols() == 1 && m.rows() > 0 && family == "linear") m = Matrix(m.col(0).asDiagonal());
    return family == "linear" ? Automorphism::linear(m) : Automorphism::conjugation(m);
  }
  if (family == "identity") {
    const Json& g = require(j, "group");
    const GroupKind kind = group_kind_from_string(require(g, "kind").get<std::string>());
    const int n = require(g, "n").get<int>();
    return Automorphism::identity(kind == GroupKind::euclidean ? Group::euclidean(n) : Group::special_orthogonal(n));
  }
  throw DomainError("unknown automorphism family: " + family);
}

Json to_json(const Atom& atom) {
  if (atom.recipe().is_null()) throw DomainError("atom built from a callback has no serial form");
  return atom.recipe();
}

Atom atom_from_json(const Json& j) {
  const AtomProfile profile = atom_profile_from_string(require(j, "profile").get<std::string>());
  switch (profile) {
    case AtomProfile::invariant:
      return make_invariant_atom(atom_from_json(require(j, "base")));
    case AtomProfile::pullback: {
      const NormChoice norm =
          j.contains("norm") ? norm_choice_from_string(j.at("norm").get<std::string>()) : NormChoice::spectral;
      return pullback_atom(atom_from_json(require(j, "base")), automorphism_from_json(require(j, "automorphism")),
                           number(j, "c_nu"), number(j, "d"), norm)
          .atom;
    }
    case AtomProfile::global:
      return make_named_global_atom(space_from_json(require(j, "space")), q_from_json(require(j, "q")),
                                    require(j, "name").get<std::string>());
    default: {
      const Space space = space_from_json(require(j, "space"));
      const Point center = point_from_json(require(j, "center"), space);
      const double radius = number(j, "radius");
      const double q = q_from_json(require(j, "q"));
      if (profile == AtomProfile::zero) return make_zero_atom(space, center, radius, q);
      return make_ball_atom(space, center, radius, q, profile);
    }
  }
}

Json to_json(const AtomicFunction& f) {
  Json terms = Json::array();
  for (std::size_t k = 0; k < f.atoms().size(); ++k)
    terms.push_back(Json{{"coefficient", f.coefficients()[k]}, {"atom", to_json(f.atoms()[k])}});
  return Json{{"space", to_json(f.space())}, {"q", q_to_json(f.q())}, {"terms", terms}};
}

AtomicFunction atomic_function_from_json(const Json& j) {
  std::vector<double> coefficients;
  std::vector<Atom> atoms;
  for (const Json& term : require(j, "terms")) {
    coefficients.push_back(number(term, "coefficient"));
    atoms.push_back(atom_from_json(require(term, "atom")));
  }
  return AtomicFunction(space_from_json(require(j, "space")), q_from_json(require(j, "q")), coefficients, atoms);
}

Json to_json(const Estimate& e) { return Json{{"value", e.value}, {"std_error", e.std_error}}; }

Json to_json(const AtomValidation& v) {
  return Json{{"pass", v.pass},
              {"support_ok", v.support_ok},
              {"norm_ok", v.norm_ok},
              {"mean_ok", v.mean_ok},
              {"support_leakage", v.support_leakage},
              {"norm", v.norm},
              {"norm_bound", v.norm_bound},
              {"norm_excess", v.norm_excess},
              {"mean", to_json(v.mean)},
              {"mean_residual", v.mean_residual},
              {"monte_carlo", v.monte_carlo},
              {"evaluations", v.evaluations},
              {"method", v.method}};
}

}  // namespace hausdorff
