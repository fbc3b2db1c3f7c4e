#include "config.hpp"

#include <algorithm>
#include <cstdio>

namespace mslab {

namespace {

std::vector<PolyTerm> terms_from_json(const json& j) {
  std::vector<PolyTerm> out;
  for (const json& t : j) {
    require(t.is_array() && t.size() >= 2 && t.size() <= 4,
            "polynomial term must be [c, p1, p2, p3]");
    PolyTerm term;
    term.c = t[0].get<double>();
    for (std::size_t a = 1; a < t.size(); ++a) term.powers[a - 1] = t[a].get<int>();
    out.push_back(term);
  }
  return out;
}

json terms_to_json(const std::vector<PolyTerm>& terms) {
  json out = json::array();
  for (const PolyTerm& t : terms) out.push_back({t.c, t.powers[0], t.powers[1], t.powers[2]});
  return out;
}

PotentialSpec potential_from_json(const json& j) {
  if (j.is_null()) return {};
  require(j.is_object(), "potential must be an object");
  const std::string kind = j.value("kind", "zero");
  if (kind == "zero") return {};
  if (kind == "constant") {
    const double v = j.at("value").get<double>();
    require(v >= 0.0, "electric potential must be nonnegative");
    return constant_potential(v);
  }
  if (kind == "radial") {
    Point c{0.5, 0.5, 0.5};
    if (j.contains("center")) {
      const auto v = j.at("center").get<std::vector<double>>();
      for (std::size_t a = 0; a < std::min<std::size_t>(3, v.size()); ++a) c[a] = v[a];
    }
    return radial_potential(j.value("scale", 1.0), j.value("gamma", 1.0), c);
  }
  if (kind == "polynomial") {
    PotentialSpec V;
    V.kind = PotentialSpec::Kind::kPolynomial;
    V.terms = terms_from_json(j.at("terms"));
    return V;
  }
  if (kind == "expression") return expression_potential(j.at("text").get<std::string>());
  throw Error(ErrorCode::kInvalidArgument, "unknown potential kind '" + kind + "'");
}

json potential_to_json(const PotentialSpec& V) {
  switch (V.kind) {
    case PotentialSpec::Kind::kZero: return {{"kind", "zero"}};
    case PotentialSpec::Kind::kConstant: return {{"kind", "constant"}, {"value", V.value}};
    case PotentialSpec::Kind::kRadial:
      return {{"kind", "radial"}, {"scale", V.value}, {"gamma", V.gamma},
              {"center", {V.center[0], V.center[1], V.center[2]}}};
    case PotentialSpec::Kind::kPolynomial:
      return {{"kind", "polynomial"}, {"terms", terms_to_json(V.terms)}};
    case PotentialSpec::Kind::kExpression: return {{"kind", "expression"}, {"text", V.expression}};
  }
  return nullptr;
}

// Parses expressions now so that a bad potential fails before any experiment runs.
void validate_scenario(const Scenario& s, const GridSpec& g) {
  magnetic_potential(s, g.n, g.L);
  if (s.potential.kind == PotentialSpec::Kind::kExpression) Expr::parse(s.potential.expression, g.n);
}

}  // namespace

const std::vector<std::string>& scenario_catalog() {
  static const std::vector<std::string> names{"free", "constant_field", "symmetric_gauge",
                                              "polynomial_field", "expression_field"};
  return names;
}

Scenario scenario_from_json(const json& j) {
  const json obj = j.is_string() ? json{{"name", j.get<std::string>()}} : j;
  require(obj.is_object() && obj.contains("name"), "scenario needs a name");
  const std::string name = obj.at("name").get<std::string>();
  const PotentialSpec V = potential_from_json(obj.value("potential", json()));
  Scenario s;
  if (name == "free") {
    s = Scenario::free(V);
  } else if (name == "constant_field") {
    s = Scenario::constant_field(obj.value("w0", 1.0), V);
  } else if (name == "symmetric_gauge") {
    // a = (-w0 (x2 - L/2) / 2, w0 (x1 - L/2) / 2), the constant-field potential.
    s = Scenario::constant_field(obj.value("w0", 1.0), V);
  } else if (name == "polynomial_field") {
    s = obj.contains("terms") ? Scenario::polynomial_field(terms_from_json(obj.at("terms")), V)
                              : Scenario::standard_polynomial(V);
  } else if (name == "expression_field") {
    s.field.kind = FieldSpec::Kind::kExpression;
    require(obj.contains("a") && obj.at("a").is_array(), "expression_field needs a list 'a' of component expressions");
    s.field.potential = obj.at("a").get<std::vector<std::string>>();
    s.potential = V;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown scenario '" + name + "'");
  }
  s.name = name;
  s.shift = obj.value("shift", 0.0);
  require(s.shift >= 0.0, "shift must be nonnegative");
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j{{"name", s.name}, {"potential", potential_to_json(s.potential)}, {"shift", s.shift}};
  switch (s.field.kind) {
    case FieldSpec::Kind::kNone: break;
    case FieldSpec::Kind::kConstant: j["w0"] = s.field.w0; break;
    case FieldSpec::Kind::kPolynomial: j["terms"] = terms_to_json(s.field.terms); break;
    case FieldSpec::Kind::kExpression: j["a"] = s.field.potential; break;
  }
  return j;
}

GridSpec grid_from_json(const json& j) {
  require(j.is_object(), "grid must be an object");
  return GridSpec::make(j.value("n", 2), j.value("N", 16), j.value("L", 1.0));
}

json grid_to_json(const GridSpec& g) { return {{"n", g.n}, {"N", g.N}, {"L", g.L}}; }

const std::vector<std::string>& experiment_types() {
  static const std::vector<std::string> types{
      "build-operator", "weights-rh", "weights-m",       "riesz-norms", "riesz-reverse",
      "cz-run",         "gauge-check", "fp-check", "solutions-check", "report"};
  return types;
}

Config parse_config(const json& j) {
  require(j.is_object(), "config must be a JSON object");
  Config c;
  c.grid = grid_from_json(j.value("grid", json::object()));
  c.scenario = scenario_from_json(j.value("scenario", json("free")));
  validate_scenario(c.scenario, c.grid);
  c.seed = j.value("seed", std::uint64_t{0});
  c.output_dir = j.value("output_dir", c.output_dir);
  const json list = j.value("experiments", json::array());
  require(list.is_array(), "experiments must be a list");
  const auto& types = experiment_types();
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& e = list[i];
    require(e.is_object() && e.contains("type"), "experiment " + std::to_string(i) + " needs a type");
    ExperimentConfig ec;
    ec.type = e.at("type").get<std::string>();
    require(std::find(types.begin(), types.end(), ec.type) != types.end(),
            "unknown experiment type '" + ec.type + "'");
    char prefix[8];
    std::snprintf(prefix, sizeof(prefix), "%02zu-", i);
    ec.name = e.value("name", prefix + ec.type);
    ec.grid = e.contains("grid") ? grid_from_json(e.at("grid")) : c.grid;
    ec.scenario = e.contains("scenario") ? scenario_from_json(e.at("scenario")) : c.scenario;
    validate_scenario(ec.scenario, ec.grid);
    ec.seed = e.value("seed", c.seed);
    ec.params = e;
    c.experiments.push_back(std::move(ec));
  }
  return c;
}

}  // namespace mslab
