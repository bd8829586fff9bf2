#include "hausdorff/scenario.hpp"

#include "hausdorff/doubling.hpp"
#include "hausdorff/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace hausdorff {

namespace {

struct ScenarioInfo {
  std::string name;
  std::map<std::string, std::size_t> samples;
  std::string primary;
  std::vector<double> q;
  Json backend;
};

const std::vector<ScenarioInfo>& registry() {
  static const std::vector<ScenarioInfo> infos{
      {"doubling-profile", {{"mc", 100000}}, "mc", {}, {{"kind", "special_orthogonal"}, {"n", 3}}},
      {"atom-pushforward", {{"pairs", 20}, {"mc", 100000}}, "mc", {2.0, 4.0, kInf}, {{"kind", "euclidean"}, {"n", 2}}},
      {"lipschitz", {{"automorphisms", 5}, {"pairs", 10000}}, "pairs", {}, {{"kind", "special_orthogonal"}, {"n", 3}}},
      {"weil", {{"mc", 100000}}, "mc", {}, {{"kind", "sphere"}, {"n", 3}}},
      {"sphere-slice",
       {{"mc", 20000}, {"draws", 100}, {"levels", 5}, {"points", 6}, {"phi", 20000}},
       "mc",
       {2.0, kInf},
       {{"kind", "sphere"}, {"n", 3}}},
      {"delsarte-line",
       {{"triples", 50}, {"mc", 4000}, {"functions", 20}, {"phi", 20000}, {"outer", 20000}, {"inner", 256}},
       "mc",
       {2.0, kInf},
       {{"kind", "euclidean"}, {"n", 1}}},
      {"remark2", {{"atoms", 20}, {"points", 5}, {"phi", 20000}}, "phi", {2.0, kInf}, {{"kind", "euclidean"}, {"n", 1}}},
      {"bound-consistency",
       {{"functions", 20}, {"phi", 20000}, {"outer", 20000}, {"inner", 256}},
       "outer",
       {2.0, kInf},
       nullptr},
  };
  return infos;
}

const ScenarioInfo& info(const std::string& name) {
  for (const auto& s : registry())
    if (s.name == name) return s;
  throw ConfigError("unknown scenario: " + name);
}

std::string q_label(double q) {
  if (std::isinf(q)) return "inf";
  std::ostringstream out;
  out << q;
  return out.str();
}

Space resolve_space(const ScenarioConfig& c) {
  const Json& backend = c.backend.is_null() ? info(c.scenario).backend : c.backend;
  if (backend.is_null()) throw ConfigError("scenario " + c.scenario + " needs a backend");
  try {
    return space_from_json(backend);
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(std::string("backend: ") + e.what());
  }
}

std::vector<double> resolve_q(const ScenarioConfig& c) {
  if (!c.q.empty()) return c.q;
  const auto& q = info(c.scenario).q;
  return q.empty() ? std::vector<double>{2.0} : q;
}

std::string default_group_name(const Space& space) {
  switch (space.kind()) {
    case SpaceKind::euclidean:
      return "signs";
    case SpaceKind::special_orthogonal:
      return "rotation_conjugations";
    case SpaceKind::sphere:
      return "isotropy_conjugations";
  }
  return "";
}

CompactAutomorphismGroup group_from_name(const std::string& name, const Space& space) {
  const int n = space.dimension();
  if (name == "signs" && space.kind() == SpaceKind::euclidean) return sign_group(n);
  if (name == "rotation_conjugations" && space.kind() == SpaceKind::special_orthogonal) return rotation_conjugations(n);
  if (name == "isotropy_conjugations" && space.kind() != SpaceKind::euclidean && n >= 2) return isotropy_conjugations(n);
  throw ConfigError("automorphism group \"" + name + "\" does not act on " + space.name());
}

std::string delsarte_group_name(const ScenarioConfig& c, const Space& space) {
  if (c.kernel.is_object() && c.kernel.contains("group")) return c.kernel.at("group").get<std::string>();
  return default_group_name(space);
}

std::function<double(const Matrix&)> phi_from_json(const Json& j, int m) {
  if (j.is_null()) return nullptr;
  const std::string type = j.value("type", "constant");
  if (type == "constant") {
    const double value = j.value("value", 1.0);
    return [value](const Matrix&) { return value; };
  }
  if (type != "indicator_mixture") throw ConfigError("unknown Phi type: " + type);
  struct Component {
    double weight;
    Matrix center;
    double radius;
  };
  std::vector<Component> components;
  for (const Json& c : j.at("components")) {
    Component comp{c.at("weight").get<double>(), Matrix::Identity(m, m), c.at("radius").get<double>()};
    if (c.contains("center")) comp.center = matrix_from_json(c.at("center"));
    if (comp.center.rows() != m || comp.center.cols() != m)
      throw ConfigError("indicator center must be a " + std::to_string(m) + " x " + std::to_string(m) + " matrix");
    if (!(comp.radius > 0.0)) throw ConfigError("indicator radius must be positive");
    components.push_back(std::move(comp));
  }
  if (components.empty()) throw ConfigError("indicator mixture needs at least one component");
  return [components](const Matrix& u) {
    double sum = 0.0;
    for (const auto& c : components)
      if ((u - c.center).norm() <= c.radius) sum += c.weight;
    return sum;
  };
}

NormChoice resolve_norm(const Json& parameters) {
  return norm_choice_from_string(parameters.value("norm", std::string("spectral")));
}

double resolve_c_nu(const Json& parameters, const Space& space) {
  const double c = parameters.value("c_nu", space_doubling_constant(space));
  if (!(c >= 1.0)) throw ConfigError("c_nu must be at least 1");
  return c;
}

double fmax0(double x) { return std::max(0.0, x); }

bool non_negative_integer(const Json& j) {
  return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& s : registry()) out.push_back(s.name);
    return out;
  }();
  return names;
}

std::map<std::string, std::size_t> default_samples(const std::string& scenario) { return info(scenario).samples; }

std::string primary_sample_key(const std::string& scenario) { return info(scenario).primary; }

std::vector<std::string> available_checks(const ScenarioConfig& c) {
  const Space space = resolve_space(c);
  const std::vector<double> qs = resolve_q(c);
  std::vector<std::string> out;
  const auto per_q = [&](const std::string& stem) {
    for (double q : qs) out.push_back(stem + ":q=" + q_label(q));
  };
  const std::string& s = c.scenario;
  if (s == "doubling-profile") {
    out.push_back("ratios_at_least_one");
    if (space.kind() == SpaceKind::euclidean) {
      out.push_back("closed_form");
    } else {
      out.push_back("finite_constant");
      out.push_back("seed_stability");
    }
  } else if (s == "atom-pushforward") {
    out = {"pushforward_atoms_valid", "scale_factor_exact"};
  } else if (s == "lipschitz") {
    out = {"zero_violations"};
  } else if (s == "weil") {
    if (space.kind() != SpaceKind::sphere) throw ConfigError("weil needs a sphere backend");
    for (const auto& f : weil_integrands(space.dimension())) out.push_back("weil:" + f.name);
  } else if (s == "sphere-slice") {
    if (space.kind() != SpaceKind::sphere || space.dimension() < 3)
      throw ConfigError("sphere-slice needs a sphere backend with n >= 3");
    out = {"k_equals_one", "modulus_equals_one"};
    for (const auto& f : nonzonal_functions(space.dimension())) out.push_back("zonal:" + f.name);
    out.push_back("slice_average_closed_form");
    per_q("phi_norm_is_mass");
  } else if (s == "delsarte-line") {
    if (space.kind() == SpaceKind::euclidean && space.dimension() == 1 && delsarte_group_name(c, space) == "signs")
      out.push_back("closed_form");
    out.push_back("factorization");
    per_q("bound_value");
    per_q("consistency");
  } else if (s == "remark2") {
    if (space.kind() != SpaceKind::euclidean) throw ConfigError("remark2 needs a euclidean backend");
    out.push_back("vanishes");
    per_q("phi_norm_divergent");
  } else if (s == "bound-consistency") {
    per_q("consistency");
  }
  return out;
}

ScenarioConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{"scenario", "seed",       "backend", "kernel", "atoms",
                                           "q",        "samples",    "parameters", "checks", "output"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw ConfigError("unknown config field: " + item.key());

  ScenarioConfig c;
  if (!j.contains("scenario") || !j.at("scenario").is_string()) throw ConfigError("missing field: scenario");
  c.scenario = j.at("scenario").get<std::string>();
  const ScenarioInfo& scenario = info(c.scenario);

  if (!j.contains("seed")) throw ConfigError("missing mandatory field: seed");
  const Json& seed = j.at("seed");
  if (!non_negative_integer(seed)) throw ConfigError("seed must be a non-negative integer");
  c.seed = seed.get<std::uint64_t>();

  for (const char* key : {"backend", "kernel", "atoms"}) {
    if (!j.contains(key)) continue;
    if (!j.at(key).is_object()) throw ConfigError(std::string(key) + " must be an object");
  }
  if (j.contains("backend")) c.backend = j.at("backend");
  if (j.contains("kernel")) {
    c.kernel = j.at("kernel");
    if (!c.kernel.contains("type") || !c.kernel.at("type").is_string()) throw ConfigError("kernel needs a type");
  }
  if (j.contains("atoms")) c.atoms = j.at("atoms");

  if (j.contains("q")) {
    const Json& q = j.at("q");
    try {
      if (q.is_array()) {
        for (const Json& v : q) c.q.push_back(q_from_json(v));
      } else {
        c.q.push_back(q_from_json(q));
      }
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    if (c.q.empty()) throw ConfigError("q list is empty");
  }

  if (j.contains("samples")) {
    const Json& samples = j.at("samples");
    if (!samples.is_object()) throw ConfigError("samples must be an object");
    for (const auto& item : samples.items()) {
      if (!scenario.samples.count(item.key()))
        throw ConfigError("scenario " + c.scenario + " has no sample count \"" + item.key() + "\"");
      if (!non_negative_integer(item.value()) || item.value().get<std::size_t>() < 1)
        throw ConfigError("sample count \"" + item.key() + "\" must be an integer >= 1");
      c.samples[item.key()] = item.value().get<std::size_t>();
    }
  }

  if (j.contains("parameters")) {
    if (!j.at("parameters").is_object()) throw ConfigError("parameters must be an object");
    c.parameters = j.at("parameters");
  }

  if (j.contains("output")) {
    if (!j.at("output").is_string()) throw ConfigError("output must be a string");
    c.output = j.at("output").get<std::string>();
  }

  if (j.contains("checks")) {
    const Json& checks = j.at("checks");
    if (!checks.is_array()) throw ConfigError("checks must be an array of names");
    if (checks.empty()) throw ConfigError("empty check list");
    const std::vector<std::string> available = available_checks(c);
    std::set<std::string> seen;
    for (const Json& name : checks) {
      if (!name.is_string()) throw ConfigError("check names must be strings");
      const std::string s = name.get<std::string>();
      if (std::find(available.begin(), available.end(), s) == available.end())
        throw ConfigError("scenario " + c.scenario + " has no check \"" + s + "\"");
      if (!seen.insert(s).second) throw ConfigError("check listed twice: " + s);
      c.checks.push_back(s);
    }
  } else {
    available_checks(c);
  }
  return c;
}

Json to_json(const ScenarioConfig& c) {
  Json j{{"scenario", c.scenario}, {"seed", c.seed}};
  if (!c.backend.is_null()) j["backend"] = c.backend;
  if (!c.kernel.is_null()) j["kernel"] = c.kernel;
  if (!c.atoms.is_null()) j["atoms"] = c.atoms;
  if (!c.q.empty()) {
    Json q = Json::array();
    for (double v : c.q) q.push_back(q_to_json(v));
    j["q"] = q;
  }
  if (!c.samples.empty()) j["samples"] = c.samples;
  if (!c.parameters.empty()) j["parameters"] = c.parameters;
  if (!c.checks.empty()) j["checks"] = c.checks;
  if (!c.output.empty()) j["output"] = c.output;
  return j;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

KernelSpec kernel_from_json(const Json& j, const Space& space, std::uint64_t seed) {
  if (!j.is_object() || !j.contains("type")) throw ConfigError("kernel needs a type");
  const std::string type = j.at("type").get<std::string>();
  const std::string label = j.value("label", type);
  if (type == "discrete" || type == "random_discrete") {
    std::vector<DiscreteTerm> terms;
    if (type == "discrete") {
      for (const Json& t : j.at("terms")) {
        const Automorphism a = automorphism_from_json(t.at("automorphism"));
        check_acts_on(space, a);
        terms.push_back({t.at("weight").get<double>(), a});
      }
    } else {
      const std::size_t count = j.value("terms", std::size_t{3});
      std::vector<double> weights(count, 1.0 / static_cast<double>(count));
      if (j.contains("weights")) weights = j.at("weights").get<std::vector<double>>();
      if (weights.size() != count) throw ConfigError("random_discrete: weights and terms differ in length");
      for (std::size_t i = 0; i < count; ++i)
        terms.push_back({weights[i], random_automorphism(space, derive_seed(seed, "kernel"), i)});
    }
    if (terms.empty()) throw ConfigError("discrete kernel needs at least one term");
    return KernelSpec::discrete(space, std::move(terms), label).with_recipe(j);
  }
  if (type == "delsarte") {
    const std::string group = j.value("group", default_group_name(space));
    return delsarte_kernel(space, group_from_name(group, space)).with_recipe(j);
  }
  if (type == "slice") {
    if (space.kind() != SpaceKind::sphere || space.dimension() < 3)
      throw ConfigError("slice kernel needs a sphere backend with n >= 3");
    const int n = space.dimension();
    return slice_kernel(n, phi_from_json(j.value("phi", Json()), n - 1), label).with_recipe(j);
  }
  if (type == "remark2") {
    if (space.kind() != SpaceKind::euclidean) throw ConfigError("remark2 kernel needs a euclidean backend");
    return remark2_kernel(space.dimension(), j.value("t0", 1.0), j.value("levels", 6)).with_recipe(j);
  }
  throw ConfigError("unknown kernel type: " + type);
}

bool RunReport::pass() const {
  if (checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::vector<std::string> RunReport::failures() const {
  std::vector<std::string> out;
  for (const Check& c : checks)
    if (!c.pass) out.push_back(c.name);
  return out;
}

Json number_to_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

namespace {

Json range_to_json(const Range& r) {
  if (r.min > r.max) return nullptr;
  return Json::array({number_to_json(r.min), number_to_json(r.max)});
}

Json estimate_to_json(const Estimate& e) {
  return Json{{"value", number_to_json(e.value)}, {"std_error", number_to_json(e.std_error)}};
}

Json check_to_json(const Check& c) {
  return Json{{"name", c.name},
              {"pass", c.pass},
              {"residual", number_to_json(c.residual)},
              {"tolerance", number_to_json(c.tolerance)},
              {"detail", c.detail}};
}

class Runner {
 public:
  explicit Runner(const ScenarioConfig& config)
      : config_(config),
        space_(resolve_space(config)),
        qs_(resolve_q(config)),
        planned_(available_checks(config)),
        wanted_(config.checks.empty() ? planned_ : config.checks) {
    report_.config = config;
    samples_ = info(config.scenario).samples;
    for (const auto& [k, v] : config.samples) samples_[k] = v;
  }

  RunReport run() {
    const auto start = std::chrono::steady_clock::now();
    const std::string& s = config_.scenario;
    if (s == "doubling-profile") doubling();
    else if (s == "atom-pushforward") pushforward();
    else if (s == "lipschitz") lipschitz();
    else if (s == "weil") weil();
    else if (s == "sphere-slice") sphere_slice();
    else if (s == "delsarte-line") delsarte();
    else if (s == "remark2") remark2();
    else if (s == "bound-consistency") consistency_scenario();

    std::vector<Check> ordered;
    for (const std::string& name : wanted_) {
      const auto matches = std::count_if(report_.checks.begin(), report_.checks.end(),
                                         [&](const Check& c) { return c.name == name; });
      if (matches != 1) throw std::logic_error("check " + name + " produced " + std::to_string(matches) + " times");
      ordered.push_back(*std::find_if(report_.checks.begin(), report_.checks.end(),
                                      [&](const Check& c) { return c.name == name; }));
    }
    report_.checks = std::move(ordered);
    report_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return std::move(report_);
  }

 private:
  bool wanted(const std::string& name) const {
    return std::find(wanted_.begin(), wanted_.end(), name) != wanted_.end();
  }
  bool any_wanted(const std::string& prefix) const {
    return std::any_of(wanted_.begin(), wanted_.end(), [&](const std::string& n) { return n.rfind(prefix, 0) == 0; });
  }
  void add(Check c) {
    if (wanted(c.name)) report_.checks.push_back(std::move(c));
  }
  std::size_t samples(const std::string& key) const { return samples_.at(key); }
  std::uint64_t seed(const std::string& tag) const { return derive_seed(config_.seed, tag); }
  Table& table(const std::string& name, std::vector<std::string> columns) {
    for (Table& t : report_.tables)
      if (t.name == name) return t;
    report_.tables.push_back({name, std::move(columns), {}});
    return report_.tables.back();
  }
  const Json& parameters() const { return config_.parameters; }

  KernelSpec kernel(const Json& fallback) const {
    return kernel_from_json(config_.kernel.is_null() ? fallback : config_.kernel, space_, seed("kernel"));
  }

  std::vector<AtomicFunction> functions(double q, std::size_t count, const std::string& tag) const {
    std::vector<AtomicFunction> out;
    if (config_.atoms.is_object() && config_.atoms.contains("functions")) {
      for (Json f : config_.atoms.at("functions")) {
        if (!f.contains("space")) f["space"] = to_json(space_);
        f["q"] = q_to_json(q);
        out.push_back(atomic_function_from_json(f));
        if (!(out.back().space() == space_)) throw ConfigError("atomic function lives on another space");
      }
      return out;
    }
    const std::size_t terms = config_.atoms.is_object() ? config_.atoms.value("terms", std::size_t{2}) : 2;
    for (std::size_t i = 0; i < count; ++i)
      out.push_back(random_atomic_function(space_, q, terms, seed(tag + ":q=" + q_label(q)), i));
    return out;
  }

  void record_bound(const BoundReport& b, const std::string& kernel_label) {
    Json j = to_json(b);
    j["kernel"] = kernel_label;
    report_.bounds.push_back(j);
    Table& t = table("bound_records", {"kernel", "q", "index", "phi_abs", "weight", "modulus", "k_spectral",
                                       "k_hilbert_schmidt", "contribution", "parameter"});
    for (const TermRecord& r : b.phi.records)
      t.rows.push_back({kernel_label, q_to_json(b.q), r.index, number_to_json(r.phi_abs), number_to_json(r.weight),
                        number_to_json(r.modulus), number_to_json(r.k_spectral), number_to_json(r.k_hilbert_schmidt),
                        number_to_json(r.contribution), r.parameter});
  }

  void doubling() {
    if (space_.kind() == SpaceKind::sphere) throw ConfigError("doubling-profile needs a group backend");
    const Group& g = space_.group();
    std::vector<double> radii;
    if (parameters().contains("radii")) {
      radii = parameters().at("radii").get<std::vector<double>>();
    } else if (g.compact()) {
      for (int i = 0; i < 7; ++i) radii.push_back(g.diameter() * (0.2 + 0.05 * i));
    } else {
      radii = {0.25, 0.5, 1.0, 2.0};
    }
    try {
      const DoublingProfile p = doubling_profile(g, radii, samples("mc"), seed("profile"));
      Table& t = table("doubling_profile", {"radius", "volume", "volume_se", "double_volume", "double_volume_se",
                                            "ratio", "ratio_upper", "excluded"});
      double min_upper = kInf, min_point = kInf;
      std::size_t used = 0;
      for (const DoublingRow& r : p.rows) {
        t.rows.push_back({r.radius, r.volume.estimate.value, r.volume.estimate.std_error,
                          r.double_volume.estimate.value, r.double_volume.estimate.std_error, number_to_json(r.ratio),
                          number_to_json(r.ratio_upper), r.excluded});
        if (r.excluded) continue;
        ++used;
        min_upper = std::min(min_upper, r.ratio_upper);
        min_point = std::min(min_point, r.ratio);
      }
      const Json summary{{"doubling_constant", number_to_json(p.doubling_constant)},
                         {"doubling_constant_point", number_to_json(p.doubling_constant_point)},
                         {"dimension", number_to_json(p.dimension)},
                         {"excluded_radii", p.excluded_radii}};
      add({"ratios_at_least_one", used > 0 && min_upper >= 1.0, fmax0(1.0 - min_upper), 0.0,
           Json{{"min_ratio_upper", number_to_json(min_upper)}, {"min_ratio", number_to_json(min_point)},
                {"rows_used", used}, {"profile", summary}}});
      if (!g.compact()) {
        const double expected = std::ldexp(1.0, g.dimension());
        add({"closed_form", p.doubling_constant == expected && p.dimension == g.dimension(),
             std::abs(p.doubling_constant - expected), 0.0,
             Json{{"expected", expected}, {"profile", summary}}});
        return;
      }
      add({"finite_constant", std::isfinite(p.doubling_constant) && p.doubling_constant >= 1.0, 0.0, 0.0, summary});
      if (wanted("seed_stability")) {
        const DoublingProfile other = doubling_profile(g, radii, samples("mc"), seed("profile:second"));
        const double rel = std::abs(other.doubling_constant - p.doubling_constant) / p.doubling_constant;
        add({"seed_stability", rel <= 0.1, rel, 0.1,
             Json{{"first", number_to_json(p.doubling_constant)}, {"second", number_to_json(other.doubling_constant)}}});
      }
    } catch (const DomainError& e) {
      throw ConfigError(std::string("doubling-profile: ") + e.what());
    }
  }

  void pushforward() {
    const double c_nu = resolve_c_nu(parameters(), space_);
    const double d = std::log2(c_nu);
    const NormChoice norm = resolve_norm(parameters());
    Table& t = table("pushforward", {"q", "index", "profile", "scale", "expected_scale", "k", "modulus", "radius",
                                     "norm", "norm_bound", "mean", "mean_se", "leakage", "pass"});
    std::size_t failures = 0, total = 0;
    double worst_scale = 0.0, worst_norm_ratio = 0.0;
    for (double q : qs_) {
      const std::string tag = "q=" + q_label(q);
      for (std::size_t i = 0; i < samples("pairs"); ++i) {
        const Atom a = random_ball_atom(space_, q, seed("atom:" + tag), i);
        const Automorphism A = random_automorphism(space_, seed("automorphism:" + tag), i);
        const Pullback pb = pullback_atom(a, A, c_nu, d, norm);
        ValidationOptions options;
        options.mc_samples = samples("mc");
        options.seed = CounterRng(seed("validate:" + tag), i)();
        const AtomValidation v = validate_atom(pb.atom, options);
        const double expected = expected_scale(A, c_nu, d, q, norm);
        const double scale_error = std::abs(pb.scale - expected) / expected;
        worst_scale = std::max(worst_scale, scale_error);
        worst_norm_ratio = std::max(worst_norm_ratio, v.norm / v.norm_bound);
        ++total;
        if (!v.pass) ++failures;
        t.rows.push_back({q_to_json(q), i, to_string(a.profile()), pb.scale, expected, pb.k, pb.modulus,
                          pb.atom.radius(), v.norm, v.norm_bound, v.mean.value, v.mean.std_error, v.support_leakage,
                          v.pass});
      }
    }
    add({"pushforward_atoms_valid", failures == 0 && total > 0, static_cast<double>(failures), 0.0,
         Json{{"pairs", total}, {"failures", failures}, {"max_norm_over_bound", worst_norm_ratio},
              {"c_nu", c_nu}, {"d", d}, {"norm", to_string(norm)}}});
    add({"scale_factor_exact", worst_scale <= 1e-12, worst_scale, 1e-12, Json{{"pairs", total}}});
  }

  // Scale factor from the automorphism's matrix parameter alone.
  double expected_scale(const Automorphism& a, double c_nu, double d, double q, NormChoice norm) const {
    double mod = 1.0, k = 1.0;
    if (a.family() == AutomorphismFamily::linear) {
      const Matrix inv = a.parameter().inverse();
      mod = std::abs(a.parameter().determinant());
      k = norm == NormChoice::spectral ? Eigen::JacobiSVD<Matrix>(inv).singularValues()(0) : inv.norm();
    } else if (norm == NormChoice::hilbert_schmidt) {
      k = std::sqrt(static_cast<double>(a.group().lie_algebra_dim()));
    }
    const double s = reciprocal_exponent(q);
    return std::pow(c_nu, s - 1.0) * std::pow(mod, s) * std::pow(k, (s - 1.0) * d);
  }

  void lipschitz() {
    if (space_.kind() == SpaceKind::sphere) throw ConfigError("lipschitz needs a group backend");
    const double tolerance = parameters().value("tolerance", 1e-8);
    const double window = parameters().value("window", 1.0);
    if (!(tolerance >= 0.0) || !(window > 0.0)) throw ConfigError("lipschitz needs tolerance >= 0 and window > 0");
    Table& t = table("lipschitz", {"index", "family", "lipschitz_constant", "max_ratio", "pairs", "violations"});
    std::size_t violations = 0;
    for (std::size_t i = 0; i < samples("automorphisms"); ++i) {
      const Automorphism A = i == 0 ? Automorphism::identity(space_.group())
                                    : random_automorphism(space_, seed("automorphism"), i);
      const LipschitzReport r =
          lipschitz_check(A, samples("pairs"), CounterRng(seed("pairs"), i)(), tolerance, window);
      violations += r.violations;
      t.rows.push_back({i, to_string(A.family()), r.lipschitz_constant, r.max_ratio, r.pairs, r.violations});
    }
    add({"zero_violations", violations == 0, static_cast<double>(violations), 0.0,
         Json{{"automorphisms", samples("automorphisms")}, {"pairs_each", samples("pairs")}, {"tolerance", tolerance}}});
  }

  void weil() {
    const QuotientSpace& quotient = space_.quotient();
    const double z = parameters().value("z", 3.0);
    if (!(z > 0.0)) throw ConfigError("weil needs z > 0");
    Table& t = table("weil", {"integrand", "group_side", "group_se", "quotient_side", "quotient_se", "discrepancy",
                              "combined_sigma", "relative_discrepancy", "pass"});
    for (const NamedFunction& f : weil_integrands(space_.dimension())) {
      const std::string name = "weil:" + f.name;
      if (!wanted(name)) continue;
      const WeilReport r = weil_check(quotient, f.f, samples("mc"), seed(name), f.right_k_invariant, z);
      t.rows.push_back({f.name, r.group_side.value, r.group_side.std_error, r.quotient_side.value,
                        r.quotient_side.std_error, r.discrepancy, r.combined_sigma, r.relative_discrepancy, r.pass});
      Json detail{{"group_side", estimate_to_json(r.group_side)},
                  {"quotient_side", estimate_to_json(r.quotient_side)},
                  {"combined_sigma", r.combined_sigma},
                  {"relative_discrepancy", r.relative_discrepancy},
                  {"relative", r.relative}};
      if (r.invariant_collapse_error) detail["invariant_collapse_error"] = *r.invariant_collapse_error;
      add({name, r.pass, r.discrepancy, z * r.combined_sigma, detail});
    }
  }

  void sphere_slice() {
    const int n = space_.dimension();
    const QuotientSpace& quotient = space_.quotient();

    Table& kt = table("k_records", {"index", "det_u", "k_spectral", "k_hilbert_schmidt", "modulus"});
    double k_error = 0.0;
    bool modulus_one = true;
    for (std::size_t i = 0; i < samples("draws"); ++i) {
      const Matrix u = orthogonal_sample(n - 1, seed("k"), i);
      const Automorphism A = Automorphism::conjugation(quotient.embed(u));
      const KFactors k = k_factors(A);
      const double mod = modulus(A);
      k_error = std::max(k_error, std::abs(k.spectral - 1.0));
      modulus_one = modulus_one && mod == 1.0;
      kt.rows.push_back({i, u.determinant(), k.spectral, k.hilbert_schmidt, mod});
    }
    add({"k_equals_one", k_error <= 1e-10, k_error, 1e-10, Json{{"draws", samples("draws")}}});
    add({"modulus_equals_one", modulus_one, 0.0, 0.0, Json{{"draws", samples("draws")}}});

    Table& zt = table("zonal", {"function", "level", "point", "value", "std_error"});
    for (const NamedFunction& f : nonzonal_functions(n)) {
      const std::string name = "zonal:" + f.name;
      if (!wanted(name)) continue;
      const ZonalReport r = zonal_check(n, slice_average(n, f.f, samples("mc"), seed("slice:" + f.name)),
                                        samples("levels"), samples("points"), seed(name), 4.0);
      Json levels = Json::array();
      for (const ZonalLevel& l : r.levels) {
        for (std::size_t p = 0; p < l.values.size(); ++p)
          zt.rows.push_back({f.name, l.level, p, l.values[p], l.std_errors[p]});
        levels.push_back({{"level", l.level}, {"spread", l.spread}, {"combined_sigma", l.combined_sigma},
                          {"pass", l.pass}});
      }
      add({name, r.pass, r.max_ratio, 4.0,
           Json{{"max_spread", r.max_spread}, {"residual_unit", "sigma"}, {"levels", levels}}});
    }

    if (wanted("slice_average_closed_form")) {
      const std::vector<double> levels = parameters().value("levels", std::vector<double>{0.0, 0.5, 0.9});
      const Function first_squared = [](const Point& s) { return s(0, 0) * s(0, 0); };
      double worst = 0.0;
      bool pass = true;
      Json rows = Json::array();
      for (std::size_t i = 0; i < levels.size(); ++i) {
        const double c = levels[i];
        if (!(std::abs(c) < 1.0)) throw ConfigError("slice levels must lie in (-1, 1)");
        CounterRng rng(seed("slice_point"), i);
        Vector s(n);
        s.head(n - 1) = random_tangent(Vector::Unit(n, n - 1), rng).head(n - 1) * std::sqrt(1.0 - c * c);
        s(n - 1) = c;
        const Estimate e = slice_transform(first_squared, s, samples("mc"), CounterRng(seed("slice_value"), i)());
        const double expected = (1.0 - c * c) / (n - 1);
        const double diff = std::abs(e.value - expected);
        pass = pass && diff <= 3.0 * e.std_error + 1e-12;
        worst = std::max(worst, diff / e.std_error);
        rows.push_back({{"level", c}, {"value", estimate_to_json(e)}, {"expected", expected}});
      }
      add({"slice_average_closed_form", pass, worst, 3.0, Json{{"levels", rows}, {"residual_unit", "sigma"}}});
    }

    if (any_wanted("phi_norm_is_mass")) {
      const KernelSpec k = kernel(Json{{"type", "slice"}});
      const double c_nu = resolve_c_nu(parameters(), space_);
      const NormChoice norm = resolve_norm(parameters());
      for (double q : qs_) {
        const std::string name = "phi_norm_is_mass:q=" + q_label(q);
        if (!wanted(name)) continue;
        const BoundReport b =
            bound_report(k, q, c_nu, std::log2(c_nu), norm, samples("phi"), seed("phi:" + q_label(q)));
        record_bound(b, k.label());
        // mod = k = 1 reduces the norm to the total variation of Phi d mu.
        std::vector<double> mass(samples("phi"));
        const std::uint64_t mass_seed = seed("mass:" + q_label(q));
        for (std::size_t i = 0; i < mass.size(); ++i) {
          const ParameterDraw draw = k.draw(mass_seed, i);
          mass[i] = std::abs(draw.phi) * draw.weight;
        }
        const Estimate m = mean_estimate(mass);
        const double sigma = std::hypot(b.phi.value.std_error, m.std_error);
        const double diff = std::abs(b.phi.value.value - m.value);
        add({name, !b.infinite && diff <= 3.0 * sigma + 1e-12, diff, 3.0 * sigma + 1e-12,
             Json{{"phi_norm", estimate_to_json(b.phi.value)}, {"mass", estimate_to_json(m)},
                  {"bound", number_to_json(b.bound)}}});
      }
    }
  }

  void delsarte() {
    const std::string group_name = delsarte_group_name(config_, space_);
    const CompactAutomorphismGroup group = group_from_name(group_name, space_);
    const KernelSpec k = kernel(Json{{"type", "delsarte"}, {"group", group_name}});
    const std::size_t triples = samples("triples");

    const auto triple = [&](std::size_t i) {
      const AtomicFunction f = random_atomic_function(space_, 2.0, 2, seed("triple:f"), i);
      const Point x = random_point(space_, seed("triple:x"), i);
      const Point h = space_.kind() == SpaceKind::sphere ? space_.group().haar_sample_one(seed("triple:h"), i)
                                                         : random_point(space_, seed("triple:h"), i);
      return std::tuple{f, x, h};
    };

    if (wanted("closed_form")) {
      double worst = 0.0;
      for (std::size_t i = 0; i < triples; ++i) {
        const auto [f, x, h] = triple(i);
        const Estimate t = delsarte_shift(space_, f.function(), x, h, group, 0, 0);
        const double oracle = 0.5 * (f(Point(h + x)) + f(Point(h - x)));
        worst = std::max(worst, std::abs(t.value - oracle));
      }
      add({"closed_form", worst <= 1e-12, worst, 1e-12, Json{{"triples", triples}}});
    }

    if (wanted("factorization")) {
      Table& t = table("delsarte", {"index", "direct", "direct_se", "factored", "factored_se", "independent",
                                    "independent_se"});
      double worst = 0.0, worst_independent = 0.0;
      bool pass = true;
      for (std::size_t i = 0; i < triples; ++i) {
        const auto [f, x, h] = triple(i);
        const std::uint64_t s = CounterRng(seed("factorization"), i)();
        const Estimate direct = delsarte_shift(space_, f.function(), x, h, group, samples("mc"), s);
        const Function shifted = translated(space_, f.function(), h);
        const Estimate factored = apply(k, shifted, {x}, samples("mc"), s).at(0);
        const Estimate independent =
            apply(k, shifted, {x}, samples("mc"), CounterRng(seed("factorization:independent"), i)()).at(0);
        const double sigma = std::hypot(direct.std_error, factored.std_error);
        const double diff = std::abs(direct.value - factored.value);
        pass = pass && diff <= 3.0 * sigma + 1e-12;
        worst = std::max(worst, diff);
        const double sigma_ind = std::hypot(direct.std_error, independent.std_error);
        if (sigma_ind > 0.0) worst_independent = std::max(worst_independent, std::abs(direct.value - independent.value) / sigma_ind);
        t.rows.push_back({i, direct.value, direct.std_error, factored.value, factored.std_error, independent.value,
                          independent.std_error});
      }
      add({"factorization", pass, worst, 1e-12,
           Json{{"triples", triples}, {"group", group.label}, {"samples", samples("mc")},
                {"common_random_numbers", true},
                {"max_independent_discrepancy_sigma", worst_independent}}});
    }

    const double c_nu = resolve_c_nu(parameters(), space_);
    const double d = std::log2(c_nu);
    const NormChoice norm = resolve_norm(parameters());
    const L1Options l1{samples("outer"), samples("inner"), 8, 3.0};
    for (double q : qs_) {
      const std::string label = q_label(q);
      const bool want_bound = wanted("bound_value:q=" + label);
      const bool want_consistency = wanted("consistency:q=" + label);
      if (!want_bound && !want_consistency) continue;
      const std::vector<AtomicFunction> fs =
          want_consistency ? functions(q, samples("functions"), "functions") : std::vector<AtomicFunction>{};
      const ConsistencyReport r =
          bound_consistency(k, fs, q, c_nu, d, norm, samples("phi"), seed("consistency:q=" + label), l1);
      record_bound(r.bound, k.label());
      const double expected = std::pow(c_nu, 1.0 - reciprocal_exponent(q));
      add({"bound_value:q=" + label, std::abs(r.bound.bound - expected) <= 1e-12,
           std::abs(r.bound.bound - expected), 1e-12,
           Json{{"bound", number_to_json(r.bound.bound)}, {"expected", expected}}});
      if (want_consistency) add(consistency_check("consistency:q=" + label, r, q));
    }
  }

  Check consistency_check(const std::string& name, const ConsistencyReport& r, double q) {
    Table& t = table("consistency", {"q", "index", "atomic_norm", "l1", "l1_se", "budget", "method", "limit",
                                     "margin", "violation"});
    double worst = kInf;
    for (const ConsistencyRow& row : r.rows) {
      t.rows.push_back({q_to_json(q), row.index, row.atomic_norm, row.l1.value.value, row.l1.value.std_error,
                        row.l1.budget, row.l1.method, number_to_json(row.limit), number_to_json(row.margin),
                        row.violation});
      worst = std::min(worst, row.margin);
    }
    return {name, r.pass, static_cast<double>(r.violations), 0.0,
            Json{{"functions", r.rows.size()}, {"violations", r.violations}, {"skipped", r.skipped},
                 {"min_margin", number_to_json(worst)}, {"bound", number_to_json(r.bound.bound)},
                 {"bound_upper", number_to_json(r.bound.bound_upper)}}};
  }

  void remark2() {
    const int n = space_.dimension();
    const KernelSpec k = kernel(Json{{"type", "remark2"}, {"n", n}});
    if (wanted("vanishes")) {
      std::vector<Vector> points;
      if (parameters().contains("x")) {
        for (const Json& p : parameters().at("x")) {
          const Point x = point_from_json(p, space_);
          points.push_back(x.col(0));
        }
      } else {
        for (std::size_t i = 0; i < samples("points"); ++i) {
          CounterRng rng(seed("points"), i);
          Vector x(n);
          for (int j = 0; j < n; ++j) x(j) = (rng.coin() ? -1.0 : 1.0) * rng.uniform(0.2, 2.0);
          points.push_back(x);
        }
      }
      Table& t = table("remark2", {"atom", "profile", "point", "value", "error_estimate", "evaluations"});
      double worst = 0.0;
      for (std::size_t a = 0; a < samples("atoms"); ++a) {
        const Atom atom = random_ball_atom(space_, qs_.front(), seed("atoms"), a);
        for (std::size_t p = 0; p < points.size(); ++p) {
          const Remark2Value v = remark2_vanish(atom, points[p]);
          worst = std::max(worst, std::abs(v.value));
          t.rows.push_back({a, to_string(atom.profile()), p, v.value, v.error_estimate, v.evaluations});
        }
      }
      add({"vanishes", worst <= 1e-6, worst, 1e-6, Json{{"atoms", samples("atoms")}, {"points", points.size()}}});
    }
    const NormChoice norm = resolve_norm(parameters());
    const double c_nu = resolve_c_nu(parameters(), space_);
    for (double q : qs_) {
      const std::string name = "phi_norm_divergent:q=" + q_label(q);
      if (!wanted(name)) continue;
      const BoundReport b = bound_report(k, q, c_nu, std::log2(c_nu), norm, samples("phi"), seed(name));
      record_bound(b, k.label());
      Json partial = Json::array();
      for (const Estimate& e : b.phi.partial) partial.push_back(estimate_to_json(e));
      add({name, b.phi.divergent, 0.0, 0.0,
           Json{{"partial", partial}, {"diagnostics", b.phi.diagnostics}, {"infinite_bound", b.infinite}}});
    }
  }

  void consistency_scenario() {
    if (config_.kernel.is_null()) throw ConfigError("bound-consistency needs a kernel");
    const KernelSpec k = kernel(config_.kernel);
    const double c_nu = resolve_c_nu(parameters(), space_);
    const NormChoice norm = resolve_norm(parameters());
    const L1Options l1{samples("outer"), samples("inner"), 8, 3.0};
    for (double q : qs_) {
      const std::string name = "consistency:q=" + q_label(q);
      if (!wanted(name)) continue;
      const ConsistencyReport r = bound_consistency(k, functions(q, samples("functions"), "functions"), q, c_nu,
                                                    std::log2(c_nu), norm, samples("phi"), seed(name), l1);
      record_bound(r.bound, k.label());
      add(consistency_check(name, r, q));
    }
  }

  const ScenarioConfig& config_;
  Space space_;
  std::vector<double> qs_;
  std::vector<std::string> planned_;
  std::vector<std::string> wanted_;
  std::map<std::string, std::size_t> samples_;
  RunReport report_;
};

std::string csv_cell(const Json& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    return quoted + "\"";
  }
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_null()) return "";
  return v.dump();
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& config) { return Runner(config).run(); }

Json to_json(const BoundReport& b) {
  Json partial = Json::array();
  for (const Estimate& e : b.phi.partial) partial.push_back(estimate_to_json(e));
  return Json{{"q", q_to_json(b.q)},
              {"c_nu", b.c_nu},
              {"d", b.d},
              {"bound", number_to_json(b.bound)},
              {"bound_upper", number_to_json(b.bound_upper)},
              {"infinite", b.infinite},
              {"phi_norm",
               {{"norm", to_string(b.phi.norm)},
                {"value", estimate_to_json(b.phi.value)},
                {"divergent", b.phi.divergent},
                {"monte_carlo", b.phi.monte_carlo},
                {"partial", partial},
                {"modulus_range", range_to_json(b.phi.modulus_range)},
                {"k_spectral_range", range_to_json(b.phi.k_spectral_range)},
                {"k_hilbert_schmidt_range", range_to_json(b.phi.k_hilbert_schmidt_range)},
                {"records", b.phi.records.size()},
                {"diagnostics", b.phi.diagnostics}}}};
}

Json to_json(const RunReport& r) {
  Json checks = Json::array();
  for (const Check& c : r.checks) checks.push_back(check_to_json(c));
  Json tables = Json::array();
  for (const Table& t : r.tables) tables.push_back({{"name", t.name}, {"rows", t.rows.size()}});
  return Json{{"config", to_json(r.config)},
              {"pass", r.pass()},
              {"failures", r.failures()},
              {"checks", checks},
              {"bounds", r.bounds},
              {"tables", tables},
              {"timing", {{"seconds", r.seconds}}}};
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + csv_cell(t.columns[i]);
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
    out += '\n';
  }
  return out;
}

std::vector<std::string> emit_report(const RunReport& report, const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + directory + ": " + ec.message());
  std::vector<std::string> written;
  const auto write = [&](const std::string& name, const std::string& content) {
    const fs::path path = fs::path(directory) / name;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path.string());
  };
  write("report.json", to_json(report).dump(2) + "\n");
  for (const Table& t : report.tables) write(t.name + ".csv", to_csv(t));
  return written;
}

}  // namespace hausdorff
