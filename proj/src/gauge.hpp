#pragma once

// Iwatsuka gauge on a cube Q: with g_j(x,y) = sum_k (x_k - y_k) int_0^1 b_jk(y + t(x-y)) t dt,
//   h_j(x) = avg_{y in Q} g_j(x,y),
//   phi(x) = avg_{y in Q} sum_k (x_k - y_k) int_0^1 a_k(y + t(x-y)) dt,
// so that h = a - grad phi and curl h = B on Q.

#include <optional>

#include "magnetic.hpp"

namespace mslab {

struct GaugePair {
  Cube Q;
  IndexBox box;
  int quad_order = 8;
  VectorField h;   // zero outside `box`
  RealField phi;   // zero mean over `box`, zero outside
  double curl_residual = 0.0;       // max |curl h - b| over nodes with all neighbours in box
  double potential_residual = 0.0;  // max |h - (a - grad phi)| over the same nodes
};

// quad_order is the number of Gauss-Legendre points in t: 4, 8 or 16.
GaugePair iwatsuka(const MagneticData& B, const Cube& Q, int quad_order = 8);

struct GaugeBound {
  std::optional<double> ratio;  // empty when |B| vanishes on Q
  double h_norm = 0.0;          // (avg_Q |h|^n)^{1/n}
  double field_norm = 0.0;      // (avg_Q |B|^{n/2})^{2/n}
};

GaugeBound gauge_bound(const GaugePair& pair, const MagneticData& B);

// Discrete average of (x_a - c_a)^2 over k equispaced cell centres filling
// a side of length R: R^2 (1 - 1/k^2) / 12.
double centered_second_moment(double R, int k);

}  // namespace mslab
