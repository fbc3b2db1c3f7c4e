#pragma once

// Reverse Hölder analysis of weights and the critical-radius function
// m(x, w): 1/m(x, w) = sup{ r > 0 : r^2 avg_{Q(x,r)} w <= 1 }, Q(x,r) the
// cube of sidelength r centred at x.

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "grid.hpp"

namespace mslab {

class Weight {
 public:
  // Values below `floor` are raised to it when floor > 0.
  explicit Weight(RealField field, double floor = 0.0);

  const RealField& field() const { return field_; }
  const GridSpec& grid() const { return field_.grid(); }
  double floor() const { return floor_; }

 private:
  RealField field_;
  double floor_;
};

struct RHReport {
  double q = 2.0;
  double constant = 1.0;
  Cube worst_cube;
  std::size_t family_size = 0;
};

// q = +infinity uses the maximum over the cube on the left side.
RHReport rh_constant(const Weight& w, double q, const std::vector<Cube>& cubes);

// max over the family of (int_{2Q} w) / (int_Q w), clipped to the box.
double doubling_constant(const Weight& w, const std::vector<Cube>& cubes);

enum class AuxFlag { kInterior, kClampedLarge, kSubCell };

struct AuxValue {
  double m = 0.0;
  AuxFlag flag = AuxFlag::kInterior;
};

struct AuxField {
  RealField values;
  std::vector<AuxFlag> flags;
  double r_max = 1.0;
  double tolerance = 1e-8;
};

class AuxEvaluator {
 public:
  explicit AuxEvaluator(const Weight& w, double rel_tol = 1e-8);

  AuxValue at(const Point& x) const;
  AuxField field() const;

  // r^2 times the clipped average of w over Q(x, r); nullopt if Q holds no grid point.
  std::optional<double> critical_ratio(const Point& x, double r) const;

 private:
  double nearest_value(const Point& x) const;

  Weight weight_;
  BoxSum sums_;
  double rel_tol_;
};

AuxValue aux_m(const Weight& w, const Point& x);
AuxField aux_field(const Weight& w);

struct MPropertiesReport {
  double comparability = 1.0;   // C with m(x)/m(y) in [1/C, C] when |x-y| < radius/m(x)
  double k0 = 0.0;              // least-squares growth exponent
  double upper_constant = 1.0;  // C in m(y) <= C (1 + |x-y| m(x))^k0 m(x)
  double lower_constant = 1.0;  // C in m(y) >= C m(x) / (1 + |x-y| m(x))^(k0/(k0+1))
  std::size_t near_pairs = 0;
  std::size_t pairs = 0;
};

using PointPair = std::pair<Point, Point>;

MPropertiesReport check_m_properties(const Weight& w, const std::vector<PointPair>& pairs,
                                     double near_radius = 0.5);

// Seeded sample pairs: x uniform in the box, |x - y| log-uniform in
// [0.05, 5] / m(x) in a random direction, y kept inside the box.
std::vector<PointPair> sample_pairs(const Weight& w, std::size_t count, std::uint64_t seed);

}  // namespace mslab
