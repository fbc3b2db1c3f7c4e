#include "scenario.hpp"

#include <cmath>

namespace mslab {

double eval_poly(const std::vector<PolyTerm>& terms, const Point& x) {
  double acc = 0.0;
  for (const PolyTerm& t : terms)
    acc += t.c * std::pow(x[0], t.powers[0]) * std::pow(x[1], t.powers[1]) * std::pow(x[2], t.powers[2]);
  return acc;
}

Scenario Scenario::constant_field(double w0, PotentialSpec V) {
  Scenario s;
  s.name = "constant_field";
  s.field.kind = FieldSpec::Kind::kConstant;
  s.field.w0 = w0;
  s.potential = std::move(V);
  return s;
}

Scenario Scenario::polynomial_field(std::vector<PolyTerm> terms, PotentialSpec V) {
  Scenario s;
  s.name = "polynomial_field";
  s.field.kind = FieldSpec::Kind::kPolynomial;
  s.field.terms = std::move(terms);
  s.potential = std::move(V);
  return s;
}

Scenario Scenario::free(PotentialSpec V) {
  Scenario s;
  s.name = "free";
  s.potential = std::move(V);
  return s;
}

Scenario Scenario::standard_polynomial(PotentialSpec V) {
  return polynomial_field({{1.0, {0, 0, 0}}, {1.0, {1, 0, 0}}, {1.0, {0, 2, 0}}}, std::move(V));
}

PotentialSpec constant_potential(double c) {
  PotentialSpec V;
  V.kind = PotentialSpec::Kind::kConstant;
  V.value = c;
  return V;
}

PotentialSpec radial_potential(double scale, double gamma, Point center) {
  PotentialSpec V;
  V.kind = PotentialSpec::Kind::kRadial;
  V.value = scale;
  V.gamma = gamma;
  V.center = center;
  return V;
}

PotentialSpec expression_potential(const std::string& text) {
  PotentialSpec V;
  V.kind = PotentialSpec::Kind::kExpression;
  V.expression = text;
  return V;
}

PotentialFn magnetic_potential(const Scenario& s, int n, double L) {
  const FieldSpec& f = s.field;
  switch (f.kind) {
    case FieldSpec::Kind::kNone:
      return [](int, const Point&) { return 0.0; };
    case FieldSpec::Kind::kConstant: {
      const double w0 = f.w0, c = 0.5 * L;
      return [w0, c](int axis, const Point& x) {
        if (axis == 0) return -0.5 * w0 * (x[1] - c);
        if (axis == 1) return 0.5 * w0 * (x[0] - c);
        return 0.0;
      };
    }
    case FieldSpec::Kind::kPolynomial: {
      // a_2 = -int_0^{x1} b: raise the x1 power of every term.
      std::vector<PolyTerm> a2;
      for (const PolyTerm& t : f.terms) {
        require(t.powers[0] >= 0 && t.powers[1] >= 0, "polynomial powers must be nonnegative");
        PolyTerm u = t;
        u.powers[2] = 0;
        u.c = -t.c / (t.powers[0] + 1);
        ++u.powers[0];
        a2.push_back(u);
      }
      return [a2](int axis, const Point& x) { return axis == 1 ? eval_poly(a2, x) : 0.0; };
    }
    case FieldSpec::Kind::kExpression: {
      require(static_cast<int>(f.potential.size()) == n,
              "expression field needs one component per axis");
      std::vector<Expr> comps;
      for (const std::string& text : f.potential) comps.push_back(Expr::parse(text, n));
      return [comps](int axis, const Point& x) { return comps[axis].eval(x); };
    }
  }
  throw Error(ErrorCode::kInternal, "unknown field kind");
}

namespace {

RealField sample_potential_field(const PotentialSpec& V, const GridSpec& g) {
  switch (V.kind) {
    case PotentialSpec::Kind::kZero: return RealField(g);
    case PotentialSpec::Kind::kConstant: return RealField(g, V.value);
    case PotentialSpec::Kind::kRadial: {
      require(V.gamma > 0.0, "radial exponent must be positive");
      Point c = V.center;
      for (double& v : c) v *= g.L;
      return sample(g, [&](const Point& x) {
        double r2 = 0.0;
        for (int a = 0; a < g.n; ++a) r2 += (x[a] - c[a]) * (x[a] - c[a]);
        return V.value * std::pow(std::sqrt(r2), V.gamma);
      });
    }
    case PotentialSpec::Kind::kPolynomial:
      return sample(g, [&](const Point& x) { return eval_poly(V.terms, x); });
    case PotentialSpec::Kind::kExpression: {
      const Expr e = Expr::parse(V.expression, g.n);
      return sample(g, [&](const Point& x) { return e.eval(x); });
    }
  }
  throw Error(ErrorCode::kInternal, "unknown potential kind");
}

}  // namespace

ScenarioData build_scenario(const Scenario& s, const GridSpec& g, bool with_aux) {
  const PotentialFn a = magnetic_potential(s, g.n, g.L);
  MagneticData B = curl(sample_potential(g, a));
  RealField V = sample_potential_field(s.potential, g);
  MagneticOperator H(LinkField::from_potential(g, a), V, s.shift);
  std::optional<RealField> aux;
  if (with_aux) {
    bool any = false;
    for (double v : B.abs_b.values()) any = any || v > 0.0;
    if (any) aux = aux_field(Weight(B.abs_b)).values;
  }
  return ScenarioData{g, std::move(B), std::move(V), std::move(H), std::move(aux)};
}

}  // namespace mslab
