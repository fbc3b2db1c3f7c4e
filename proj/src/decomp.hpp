#pragma once

// Maximal function, Whitney cubes, partition of unity and the gauge-adapted
// Calderón-Zygmund decomposition f = g + sum_k b_k.

#include <cstdint>
#include <optional>
#include <vector>

#include "gauge.hpp"
#include "magnetic.hpp"

namespace mslab {

// Max of avg_Q F over the dyadic + half-shifted cubes Q containing each point.
// At most the all-cube maximal function and at least 4^-n times it.
RealField maximal_function(const RealField& F);

struct OpenSetMask {
  GridSpec grid;
  std::vector<std::uint8_t> inside;  // 1 for grid cells of Omega

  static OpenSetMask level_set(const RealField& F, double threshold);  // {F > threshold}
  std::size_t count() const;
  bool empty() const { return count() == 0; }
};

// A maximal dyadic cube Q of Omega with dist(Q, F) >= side(Q). Distances
// are sup-norm distances between grid points and side(Q) is the sup-norm
// diameter; the resulting ratio dist/side lies in [1, 3). F contains the
// ghost layer outside the box, where f vanishes, so a level set may fill the
// whole box.
struct WhitneyCube {
  Cube cube;
  IndexBox box;
  int level = 0;
  double ratio = 0.0;
};

// Smallest dilation guaranteed to reach the complement: 7Q meets F for
// every cube of the construction above.
inline constexpr double kWhitneyReach = 7.0;

std::vector<WhitneyCube> whitney(const OpenSetMask& omega);

struct WhitneyAudit {
  bool disjoint = true;
  bool covers = true;
  bool doubles_inside_omega = true;  // 2Q_k misses F
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double max_reach = 0.0;           // largest dilation c needed for cQ_k to meet F
  std::size_t reach_hits = 0;       // cubes with kWhitneyReach * Q meeting F
  std::size_t fourfold_hits = 0;    // cubes with 4Q meeting F
  std::size_t cubes = 0;
};

WhitneyAudit audit_whitney(const OpenSetMask& omega, const std::vector<WhitneyCube>& cubes);

struct PartitionOfUnity {
  GridSpec grid;
  std::vector<IndexBox> supports;            // clip of 2Q_k
  std::vector<std::vector<double>> values;   // chi_k on its support, IndexBox::for_each order
  std::vector<double> bounds;                // ||chi_k||_inf + R_k ||grad chi_k||_inf
  double max_bound = 0.0;

  RealField field(std::size_t k) const;
};

// C^1 tensor bumps equal to 1 on Q_k and vanishing outside 2Q_k, normalized by their sum.
PartitionOfUnity partition_of_unity(const GridSpec& grid, const std::vector<WhitneyCube>& cubes);

enum class CubeType { kType1 = 1, kType2 = 2 };

// Type 1 when R^2 avg_Q |B| > 1, type 2 otherwise.
CubeType classify_cube(const Cube& Q, const RealField& abs_b);

struct CZCube {
  WhitneyCube whitney;
  CubeType type = CubeType::kType1;
  bool gauge_fallback = false;  // type 2 by size, treated as type 1 because 2Q leaves the box
};

struct CZConstants {
  double czb = 0.0;       // ||Lg||_n + |||B|^{1/2} g||_n over alpha^{1-p/n} (...)^{p/n}
  double czc = 0.0;       // max_k (int |L b_k|^p + R_k^{-p} |b_k|^p) / (alpha^p |Q_k|)
  double czd = 0.0;       // sum |Q_k| over alpha^{-p} int G
  double overlap = 0.0;   // max_x sum_k 1_{2Q_k}(x)
  double weak = 0.0;      // |Omega| over alpha^{-p} int G
  double identity_residual = 0.0;
  double f_energy = 0.0;  // ||Lf||_p + |||B|^{1/2} f||_p
  double g_energy = 0.0;  // ||Lg||_n + |||B|^{1/2} g||_n
  double omega_measure = 0.0;
  std::size_t type1 = 0;
  std::size_t type2 = 0;
  std::size_t fallbacks = 0;
};

struct CZResult {
  GridSpec grid;
  double p = 1.0;
  double alpha = 1.0;
  ComplexField f;
  ComplexField g;
  std::vector<CZCube> cubes;
  std::vector<ComplexField> bad;
  std::vector<std::optional<RealField>> phases;  // phi_k on 2Q_k for type-2 cubes
  PartitionOfUnity chi;
  RealField maximal;
  OpenSetMask omega;
  CZConstants constants;
};

// G = |Lf|^p + ||B|^{1/2} f|^p at the grid points.
RealField cz_density(const ComplexField& f, double p, const MagneticOperator& H, const RealField& abs_b);

CZResult cz_decompose(const ComplexField& f, double p, double alpha, const MagneticOperator& H,
                      const MagneticData& B, int quad_order = 8);

// alpha with alpha^p equal to the median of the maximal function of G.
double median_alpha(const ComplexField& f, double p, const MagneticOperator& H, const RealField& abs_b);

// Recomputes every constant from the stored parts. Throws "decomposition
// broken" when f - g - sum b_k exceeds 1e-10 relative to max |f|.
CZConstants verify_cz(const CZResult& result, const MagneticOperator& H, const MagneticData& B);

}  // namespace mslab
