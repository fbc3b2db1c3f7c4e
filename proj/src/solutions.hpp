#pragma once

// Discrete weak solutions of H u = 0 in 4Q and the solution-level estimates:
// pointwise decay, reverse Hölder bounds, the subharmonic identity
// Delta |u|^2 = 2 |Lu|^2 + 2 V |u|^2 and the weighted mean value inequality.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "magnetic.hpp"

namespace mslab {

struct InteriorSolution {
  Cube Q;              // the solution lives on 4Q
  IndexBox domain;     // clip(4Q)
  IndexBox interior;   // domain without its outer layer (the boundary ring)
  ComplexField u;      // zero outside `domain`
  std::string boundary_id;
  double residual = 0.0;  // ||Hu||_2 over interior nodes, relative to ||u||_2 over the domain
};

using BoundaryFn = std::function<complex(const Point&)>;

// solve_interior guarantees ||Hu|| <= kInteriorResidual ||u|| on the interior nodes.
inline constexpr double kInteriorResidual = 1e-11;

// Prescribes u = boundary(x) on the ring of clip(4Q) and solves H u = 0 at
// the interior nodes. Requires 4Q inside the box.
InteriorSolution solve_interior(const Cube& Q, const BoundaryFn& boundary,
                                const MagneticOperator& H, const std::string& boundary_id = "",
                                double tol = 1e-12);

// |L u| at the nodes.
RealField gradient_modulus(const ComplexField& u, const MagneticOperator& H);

struct DecayReport {
  std::vector<double> radii;
  std::vector<double> ratios;  // |u(x0)| / (avg_{Q(x0,R)} |u|^2)^{1/2}
  std::array<double, 3> C{0.0, 0.0, 0.0};  // C_k for k = 1, 2, 3
  double fitted_k = 0.0;                   // least-squares decay exponent
  double m0 = 0.0;                         // m(x0, |B|)
  bool vacuous = false;
};

// Nested cubes Q(x0, R) around the centre x0 of sol.Q, with R up to the side of 4Q.
DecayReport check_decay(const InteriorSolution& sol, const RealField& m);

enum class RHSolutionKind {
  kAux,          // (avg_Q |m u|^q)^{1/q} <= C (avg_3Q |m u|^2)^{1/2}
  kGradient,     // (avg_Q |Lu|^q)^{1/q} <= C (avg_3Q |Lu|^2 + |m u|^2)^{1/2}
  kPotential,    // (avg_Q |V^{1/2} u|^{2q})^{1/2q} <= C (avg_3Q |V^{1/2} u|^2)^{1/2}
  kGradientV,    // (avg_Q |Lu|^qt)^{1/qt} <= C (1 + R^2 avg_Q V)^{-k} (avg_2Q |Lu|^2 + |m u|^2 + V|u|^2)^{1/2}
};

const char* rh_solution_name(RHSolutionKind kind);

// Relative level, in units of |u| / h, below which a gradient side counts as zero.
inline constexpr double kGradientFloor = 1e-10;

struct RHSolutionValue {
  double constant = 0.0;
  double exponent = 0.0;  // exponent used on the left
  double lhs = 0.0;
  double rhs = 0.0;
  bool vacuous = false;
  bool unbounded = false;
};

// For kGradientV, q is the reverse Hölder exponent of V and the left exponent
// is min(q*, 2q); `decay_k` is the power k of the decay factor.
RHSolutionValue check_rh_solution(const InteriorSolution& sol, double q, RHSolutionKind kind,
                                  const MagneticOperator& H, const std::optional<RealField>& m,
                                  double decay_k = 0.0);

struct SubharmonicReport {
  double centered_residual = 0.0;  // edge-averaged |Lu|^2, exact at solution nodes
  double forward_residual = 0.0;   // forward edges only, first order in h
  double min_laplacian = 0.0;      // min of Delta_h |u|^2 relative to scale
  double scale = 0.0;              // max |Delta_h |u|^2|
  std::size_t nodes = 0;
};

// Evaluated at the nodes of clip(Q), well inside the solution domain.
SubharmonicReport check_subharmonic(const InteriorSolution& sol, const MagneticOperator& H);

// C in (avg_Q (w v^s)^r)^{1/r} <= C avg_{mu Q} w v^s; r = infinity uses
// sup_Q v^s <= C (avg_Q w)^{-1} avg_{mu Q} w v^s.
double check_weighted_mean_value(const RealField& w, const RealField& v, const Cube& Q, double r,
                                 double s, double mu = 2.0);

// nq/(n-q) for q < n, infinity otherwise.
double sobolev_conjugate(double q, int n);

}  // namespace mslab
