#pragma once

// Empirical L^p operator norms (lower bounds over a probe family) for the
// Riesz transforms and their relatives, the reverse inequality, and the
// local-to-global criterion diagnostic.

#include <optional>
#include <string>
#include <vector>

#include "decomp.hpp"
#include "probes.hpp"
#include "spectral.hpp"

namespace mslab {

enum class OperatorKind {
  kIdentity,
  kZero,
  kRieszComponent,  // L_j H^{-1/2}
  kRieszVector,     // (L_1, ..., L_n) H^{-1/2}
  kAuxHalf,         // m H^{-1/2}
  kAuxInverse,      // m^2 H^{-1}
  kPotentialInverse,  // V H^{-1}
  kFreeRatio,       // H(a,0) H(a,V)^{-1}
  kSecondOrder,     // L_s L_k H^{-1}
  kPotentialHalf,   // V^{1/2} H^{-1/2}
};

struct OperatorSpec {
  OperatorKind kind = OperatorKind::kIdentity;
  int j = 0;  // component index (L_j) or s for the second-order transform
  int k = 0;  // k for the second-order transform

  std::string id() const;
  // Accepts the strings produced by id().
  static OperatorSpec parse(const std::string& text);
};

// The operator, its spectral decomposition and m(., |B|) (absent when the
// field vanishes identically).
class RieszEngine {
 public:
  RieszEngine(const MagneticOperator& H, const SpectralDecomposition& dec,
              std::optional<RealField> aux_m);

  const MagneticOperator& op() const { return H_; }

  // ||T f||_p for every probe (rows) and exponent (columns).
  std::vector<std::vector<double>> output_norms(const OperatorSpec& T,
                                                const std::vector<ComplexField>& probes,
                                                const std::vector<double>& ps) const;

  // (L_j H^{-1/2} f) on the edges of axis j.
  EdgeField riesz_apply(int j, const ComplexField& f) const;

  // Norms of the covariant gradient, |L u| located at nodes.
  double gradient_norm(const ComplexField& u, double p) const;

  const SpectralDecomposition& decomposition() const { return dec_; }
  const std::optional<RealField>& aux() const { return aux_m_; }

 private:
  const MagneticOperator& H_;
  const SpectralDecomposition& dec_;
  std::optional<RealField> aux_m_;
};

struct NormEstimate {
  std::string op;
  double p = 2.0;
  double lower_bound = 0.0;
  std::string probe_id;
  int N = 0;
  std::uint64_t seed = 0;
};

std::vector<NormEstimate> norm_curve(const OperatorSpec& T, const std::vector<double>& ps,
                                     const ProbeFamily& probes, const RieszEngine& engine);

struct ReverseReport {
  double constant = 0.0;  // max ||H^{1/2} f||_p / (||Lf||_p + |||B|^{1/2} f||_p + ||V^{1/2} f||_p)
  std::string probe_id;
  std::optional<double> aux_constant;  // |B|^{1/2} replaced by m(., |B|)
  std::string aux_probe_id;
  std::size_t skipped = 0;
};

ReverseReport reverse_constant(double p, const ProbeFamily& probes, const RieszEngine& engine,
                               const RealField& abs_b);

struct LocalCriterionReport {
  double constant = 0.0;
  std::optional<Cube> worst_cube;
  std::string worst_probe;
  std::size_t evaluated = 0;  // (probe, cube) pairs used
  std::size_t rejected = 0;   // pairs skipped because the probe meets 4Q
  std::vector<std::string> diagnostics;
};

// kGradientInverseAdjoint is T = L H^{-1} L^* on F = f e_1, with L the
// node-centred covariant difference; S is (M |m H^{-1} L^* F|^2)^{1/2}.
enum class CriterionOperator { kZero, kGradientInverseAdjoint };

LocalCriterionReport local_criterion_check(CriterionOperator T, const std::vector<Cube>& cubes,
                                           double p0, double q0, const ProbeFamily& probes,
                                           const RieszEngine& engine);

}  // namespace mslab
