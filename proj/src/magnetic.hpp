#pragma once

// Discrete magnetic Schrödinger operator H(a,V) = sum_j L_j^* L_j + V + shift
// on the Dirichlet box, built from unit-modulus link variables.
//
// Edge e along axis j (0 <= e <= N) joins node e-1 to node e; its midpoint
// sits at coordinate e*h. Nodes -1 and N are ghosts carrying zero. The
// covariant difference lives on edges:
//   (L_j u)(e) = (U_j(e) u(e) - u(e-1)) / (i h),  U_j(e) = exp(-i h a_j(e h)).

#include <functional>
#include <optional>
#include <vector>

#include "grid.hpp"
#include "weights.hpp"

namespace mslab {

using PotentialFn = std::function<double(int axis, const Point& x)>;

struct MagneticData {
  VectorField a;
  // Components b_jk for j < k in lexicographic order: (0,1) in 2D;
  // (0,1), (0,2), (1,2) in 3D.
  std::vector<RealField> b;
  RealField abs_b;  // sum over ordered pairs (j,k) of |b_jk|

  static std::vector<std::pair<int, int>> pairs(int n);
  // b_jk for any ordered pair, with b_jj = 0 and b_kj = -b_jk.
  double component(int j, int k, std::size_t idx) const;
};

MagneticData curl(const VectorField& a);
VectorField sample_potential(const GridSpec& grid, const PotentialFn& a);

// Sum over ordered pairs of the Euclidean norm of grad b_jk.
RealField grad_b_magnitude(const MagneticData& B);

// Values on the edges of one axis; the axis direction has N+1 entries.
class EdgeField {
 public:
  EdgeField() = default;
  EdgeField(const GridSpec& grid, int axis);

  const GridSpec& grid() const { return grid_; }
  int axis() const { return axis_; }
  std::size_t size() const { return values_.size(); }
  // ix[axis] ranges over 0..N.
  std::size_t index(const Index& ix) const;
  complex& operator[](std::size_t i) { return values_[i]; }
  const complex& operator[](std::size_t i) const { return values_[i]; }
  std::vector<complex>& raw() { return values_; }
  const std::vector<complex>& raw() const { return values_; }

  // (h^n sum_e |v(e)|^p)^(1/p); p = infinity gives the maximum.
  double lp_norm(double p) const;

 private:
  GridSpec grid_;
  int axis_ = 0;
  std::array<std::size_t, 3> strides_{0, 0, 0};
  std::vector<complex> values_;
};

class LinkField {
 public:
  LinkField() = default;
  static LinkField from_potential(const GridSpec& grid, const PotentialFn& a);
  // Midpoint values by multilinear interpolation of node samples.
  static LinkField from_nodes(const VectorField& a);
  static LinkField trivial(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  const EdgeField& axis(int j) const { return links_[j]; }

  // Exact discrete gauge change: the result H' satisfies
  // H' = e^{i phi} H e^{-i phi}, the lattice form of a -> a + grad phi.
  LinkField gauge_transformed(const RealField& phi) const;

  double max_modulus_defect() const;  // max | |U| - 1 |

 private:
  GridSpec grid_;
  std::vector<EdgeField> links_;
};

struct EnergyParts {
  double kinetic = 0.0;    // sum_j ||L_j u||^2
  double potential = 0.0;  // ||V^{1/2} u||^2
  double shift = 0.0;      // shift ||u||^2
  double form = 0.0;       // Re <Hu, u>
};

class MagneticOperator {
 public:
  MagneticOperator(LinkField links, RealField V, double shift = 0.0);

  const GridSpec& grid() const { return links_.grid(); }
  std::size_t dim() const { return grid().size(); }
  const LinkField& links() const { return links_; }
  const RealField& potential() const { return V_; }
  double shift() const { return shift_; }

  ComplexField apply(const ComplexField& u) const;
  void apply(const complex* in, complex* out) const;

  EdgeField covariant(int j, const ComplexField& u) const;
  ComplexField covariant_adjoint(const EdgeField& v) const;

  // Covariant difference averaged onto nodes: (L_j u(i) + L_j u(i+1)) / 2.
  ComplexField covariant_centered(int j, const ComplexField& u) const;
  // Adjoint of covariant_centered.
  ComplexField covariant_centered_adjoint(int j, const ComplexField& v) const;

  // Node density of sum_j |L_j u|^2: each node takes half of its two
  // edges, boundary nodes also take their ghost edge whole, so the node sum
  // equals the edge sum exactly.
  RealField covariant_density(const ComplexField& u) const;
  // Same as covariant_density restricted to one axis.
  RealField covariant_density(int j, const ComplexField& u) const;

  EnergyParts energy(const ComplexField& u) const;

  // Column-major dense matrix of H (dim x dim).
  std::vector<complex> dense() const;

 private:
  LinkField links_;
  RealField V_;
  double shift_;
};

MagneticOperator assemble(const LinkField& links, const RealField& V, double shift = 0.0);

double inner_product_re(const ComplexField& a, const ComplexField& b);
complex inner_product(const ComplexField& a, const ComplexField& b);  // h^n sum conj(a) b

struct DiamagneticReport {
  double max_violation = 0.0;  // max over edges of |d|u|| - |L_j u|, positive = violated
  double max_gap = 0.0;        // max over edges of |L_j u| - |d|u||
  double scale = 0.0;          // max |L_j u|
  std::size_t edges = 0;
};

DiamagneticReport diamagnetic_check(const ComplexField& u, const MagneticOperator& H);

struct KatoSimonReport {
  double min_slack = 0.0;  // min of (free resolvent of f) - |magnetic resolvent of f|
  double max_gap = 0.0;    // max of the same quantity
  double f_sup = 0.0;
  double lambda = 0.0;
};

// f >= 0; `magnetic` and `free` are assembled without shift, lambda is added here.
KatoSimonReport kato_simon_check(const RealField& f, double lambda, const MagneticOperator& magnetic,
                                 const MagneticOperator& free, double tol = 1e-12);

struct ShenReport {
  double field_constant = 0.0;  // smallest c with |grad B| <= c m(.,|B|)^3
  Point field_worst{0.0, 0.0, 0.0};
  std::optional<double> potential_constant;  // smallest C with V <= C m(.,|B|+V)^2
  Point potential_worst{0.0, 0.0, 0.0};
  bool field_vanishes = false;
};

// Only grid points away from the boundary layer enter the field constant.
ShenReport check_shen_conditions(const MagneticData& B, const RealField* V);

double caccioppoli_check(const ComplexField& u, const ComplexField& f, const Cube& Q,
                         const MagneticOperator& H);

}  // namespace mslab
