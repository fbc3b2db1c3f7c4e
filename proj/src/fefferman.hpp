#pragma once

// Fefferman-Phong checks on a cube Q with sidelength R:
//   classical:  int_Q |u|^p min{(avg_Q w)^{p/2}, R^{-p}}  <=  C int_Q |Lu|^p + w |u|^p
//   improved:   m_beta(R^2 avg_Q w) R^{-2} int_Q |u|^2      <=  C int_Q |Lu|^2 + w |u|^2
// Each check reports C = left / right for the given u.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "magnetic.hpp"
#include "probes.hpp"

namespace mslab {

// x for x <= 1, x^beta for x >= 1.
double m_beta(double x, double beta);

enum class FPForm { kClassical, kImproved };

struct FPValue {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;  // lhs / rhs, +infinity when rhs = 0 < lhs
  bool vacuous = false;   // lhs = rhs = 0
  bool unbounded = false;
};

FPValue fp_classical(const ComplexField& u, const RealField& w, const Cube& Q, double p,
                     const MagneticOperator& H);
FPValue fp_improved(const ComplexField& u, const RealField& w, const Cube& Q, double beta,
                    const MagneticOperator& H);

struct FPReport {
  FPForm form = FPForm::kClassical;
  double p = 2.0;
  double beta = 0.0;
  double constant = 0.0;
  Cube worst_cube;
  std::string worst_probe;
  std::size_t evaluated = 0;
  std::size_t vacuous = 0;
  bool unbounded = false;
};

// Seeded (probe, cube) pairs: cube sides in [L/4, L/2], centres keeping Q inside the box.
struct FPPair {
  std::size_t probe = 0;
  Cube cube;
};
std::vector<FPPair> fp_pairs(const GridSpec& grid, std::size_t probes, std::size_t count,
                             std::uint64_t seed);

FPReport fp_batch(FPForm form, double p, double beta, const RealField& w, const ProbeFamily& probes,
                  const std::vector<FPPair>& pairs, const MagneticOperator& H);

const char* fp_form_name(FPForm form);

}  // namespace mslab
