#pragma once

#include "hausdorff/atoms.hpp"

#include <json.hpp>

namespace hausdorff {

using Json = nlohmann::json;

/// q as a number, or the string "inf".
Json q_to_json(double q);
double q_from_json(const Json& j);

/// {"kind": "euclidean" | "special_orthogonal" | "sphere", "n": n}
Json to_json(const Space& space);
Space space_from_json(const Json& j);

/// Columns as flat arrays, matrices as arrays of rows.
Json point_to_json(const Point& p);
Point point_from_json(const Json& j, const Space& space);
Matrix matrix_from_json(const Json& j);

/// {"family": "identity" | "linear" | "conjugation", "group": {...}, "matrix": [[...]]}.
/// Custom automorphisms have no serial form and throw DomainError.
Json to_json(const Automorphism& automorphism);
Automorphism automorphism_from_json(const Json& j);

/// An atom's recipe; throws DomainError for atoms built from opaque callbacks.
Json to_json(const Atom& atom);
Atom atom_from_json(const Json& j);

/// {"space": ..., "q": ..., "terms": [{"coefficient": c, "atom": {...}}, ...]}
Json to_json(const AtomicFunction& f);
AtomicFunction atomic_function_from_json(const Json& j);

Json to_json(const Estimate& e);
Json to_json(const AtomValidation& v);

}  // namespace hausdorff
