#pragma once

// Scenario catalog: a magnetic potential and an electric potential, both
// given in physical coordinates so that a scenario can be sampled on any grid.

#include <optional>
#include <string>
#include <vector>

#include "expr.hpp"
#include "magnetic.hpp"

namespace mslab {

struct PolyTerm {
  double c = 0.0;
  std::array<int, 3> powers{0, 0, 0};
};

double eval_poly(const std::vector<PolyTerm>& terms, const Point& x);

struct FieldSpec {
  enum class Kind { kNone, kConstant, kPolynomial, kExpression };
  Kind kind = Kind::kNone;
  double w0 = 0.0;                     // constant: b_12 = -w0 in the symmetric gauge about the centre
  std::vector<PolyTerm> terms;         // polynomial: b_12 = -sum c x1^i x2^j (powers[2] ignored)
  std::vector<std::string> potential;  // expression: one a_j per axis
};

struct PotentialSpec {
  enum class Kind { kZero, kConstant, kRadial, kPolynomial, kExpression };
  Kind kind = Kind::kZero;
  double value = 0.0;                // constant value, or radial scale
  double gamma = 1.0;                // radial exponent, > 0
  Point center{0.5, 0.5, 0.5};       // radial centre, in units of L
  std::vector<PolyTerm> terms;
  std::string expression;
};

struct Scenario {
  std::string name;
  FieldSpec field;
  PotentialSpec potential;
  double shift = 0.0;

  static Scenario constant_field(double w0, PotentialSpec V = {});
  // b(x) = sum of terms, realized as a = (0, -int_0^{x1} b ds).
  static Scenario polynomial_field(std::vector<PolyTerm> terms, PotentialSpec V = {});
  static Scenario free(PotentialSpec V = {});
  // The field 1 + x1 + x2^2 used throughout the refinement studies.
  static Scenario standard_polynomial(PotentialSpec V = {});
};

PotentialSpec constant_potential(double c);
PotentialSpec radial_potential(double scale, double gamma, Point center = {0.5, 0.5, 0.5});
PotentialSpec expression_potential(const std::string& text);

// Analytic magnetic potential a_j(x) of the scenario on a box of side L.
PotentialFn magnetic_potential(const Scenario& s, int n, double L);

struct ScenarioData {
  GridSpec grid;
  MagneticData B;
  RealField V;
  MagneticOperator H;
  std::optional<RealField> aux;  // m(., |B|), absent when |B| vanishes identically
};

// Samples the scenario; aux_m is computed only when with_aux is set.
ScenarioData build_scenario(const Scenario& s, const GridSpec& grid, bool with_aux = true);

}  // namespace mslab
