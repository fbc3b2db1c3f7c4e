#include <doctest.h>

#include <cmath>
#include <limits>

#include "decomp.hpp"
#include "helpers.hpp"
#include "probes.hpp"
#include "scenario.hpp"

using namespace mslab;

namespace {

OpenSetMask mask_of(const GridSpec& g, const IndexBox& box) {
  OpenSetMask m{g, std::vector<std::uint8_t>(g.size(), 0)};
  box.for_each(g, [&](std::size_t idx) { m.inside[idx] = 1; });
  return m;
}

// Sup-norm index distance from a block of nodes to the complement,
// the ghost layer included, by direct search.
int brute_distance(const OpenSetMask& m, const IndexBox& box) {
  const GridSpec& g = m.grid;
  int best = std::numeric_limits<int>::max();
  for (int i = -1; i <= g.N; ++i)
    for (int j = -1; j <= g.N; ++j) {
      const bool ghost = i < 0 || j < 0 || i == g.N || j == g.N;
      if (!ghost && m.inside[g.ravel({i, j, 0})]) continue;
      for (int a = box.lo[0]; a < box.hi[0]; ++a)
        for (int b = box.lo[1]; b < box.hi[1]; ++b) best = std::min(best, std::max(std::abs(a - i), std::abs(b - j)));
    }
  return best;
}

bool admissible(const OpenSetMask& m, int level, int bi, int bj) {
  const GridSpec& g = m.grid;
  const int side = g.N >> level;
  const IndexBox box{{bi * side, bj * side, 0}, {(bi + 1) * side, (bj + 1) * side, 1}};
  bool inside = true;
  box.for_each(g, [&](std::size_t idx) { inside = inside && m.inside[idx]; });
  return inside && brute_distance(m, box) >= side;
}

std::size_t brute_whitney_count(const OpenSetMask& m) {
  std::size_t count = 0;
  for (int level = 0; level <= m.grid.levels(); ++level)
    for (int bi = 0; bi < (1 << level); ++bi)
      for (int bj = 0; bj < (1 << level); ++bj)
        if (admissible(m, level, bi, bj) && (level == 0 || !admissible(m, level - 1, bi / 2, bj / 2))) ++count;
  return count;
}

ComplexField bump(const GridSpec& g) {
  return sample_complex(g, [&g](const Point& x) {
    const double r2 = (x[0] - 0.4) * (x[0] - 0.4) + (x[1] - 0.55) * (x[1] - 0.55);
    return std::polar(std::exp(-30.0 * r2), 3.0 * x[0]) * probe_window(g, x);
  });
}

}  // namespace

TEST_SUITE("decomp") {
  TEST_CASE("maximal_function") {
    const GridSpec g = GridSpec::make(2, 16);
    // Summed-area tables round relative to the total mass, not to F[i].
    const double eps = std::numeric_limits<double>::epsilon();
    const RealField flat = maximal_function(RealField(g, 2.5));
    for (double v : flat.values()) CHECK(std::abs(v - 2.5) <= 8 * eps * 2.5 * g.size());
    const RealField F = testing::random_real(g, 4);
    const RealField MF = maximal_function(F);
    double mass = 0.0;
    for (double v : F.values()) mass += v;
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(MF[i] >= F[i] - 8 * eps * mass);

    // Spike: equal to a direct search over the family, and within 4^n of the
    // search over every grid-aligned square (any k-cell square sits inside a
    // family cube of side below 4k).
    RealField spike(g);
    spike[g.ravel({5, 9, 0})] = 1.0;
    const RealField Ms = maximal_function(spike);
    const BoxSum sums(spike);
    const std::vector<Cube> family = cube_family(g, CubeStrategy::kDyadicHalfShifted);
    double worst = 0.0;
    for_each_node(g, [&](std::size_t idx, const Index& x) {
      double direct = 0.0;
      for (const Cube& q : family)
        if (q.clip(g).contains(x, g.n)) direct = std::max(direct, cube_average(spike, q));
      CHECK(Ms[idx] == doctest::Approx(direct).epsilon(1e-13));

      double oracle = 0.0;
      for (int k = 1; k <= g.N; ++k)
        for (int i0 = std::max(0, x[0] - k + 1); i0 <= std::min(x[0], g.N - k); ++i0)
          for (int j0 = std::max(0, x[1] - k + 1); j0 <= std::min(x[1], g.N - k); ++j0)
            oracle = std::max(oracle, sums.sum(IndexBox{{i0, j0, 0}, {i0 + k, j0 + k, 1}}) / (k * k));
      CHECK(Ms[idx] <= oracle * (1 + 1e-12));
      CHECK(Ms[idx] >= oracle / 16.0);
      worst = std::max(worst, oracle / Ms[idx]);
    });
    MESSAGE("largest all-square / family ratio: " << worst);
  }

  TEST_CASE("whitney cubes of a dyadic square") {
    const GridSpec g = GridSpec::make(2, 32);
    const OpenSetMask m = mask_of(g, IndexBox{{8, 16, 0}, {16, 24, 1}});
    const auto cubes = whitney(m);
    CHECK(cubes.size() == brute_whitney_count(m));
    const WhitneyAudit a = audit_whitney(m, cubes);
    CHECK(a.disjoint);
    CHECK(a.covers);
    CHECK(a.min_ratio >= 1.0);
    CHECK(a.max_ratio < 3.0);
    CHECK(a.reach_hits == cubes.size());
    CHECK(a.max_reach <= kWhitneyReach);
    CHECK(whitney(mask_of(g, IndexBox{{0, 0, 0}, {0, 0, 1}})).empty());

    // A level set that fills the box still decomposes: the ghost layer is in F.
    const OpenSetMask full = mask_of(g, IndexBox{{0, 0, 0}, {32, 32, 1}});
    const auto fc = whitney(full);
    CHECK(fc.size() == brute_whitney_count(full));
    CHECK(audit_whitney(full, fc).covers);
  }

  TEST_CASE("partition_of_unity") {
    const GridSpec g = GridSpec::make(2, 32);
    const OpenSetMask one = mask_of(g, IndexBox{{12, 12, 0}, {16, 16, 1}});
    const auto single = whitney(one);
    const PartitionOfUnity p1 = partition_of_unity(g, single);
    for (std::size_t k = 0; k < single.size(); ++k) {
      const RealField chi = p1.field(k);
      if (single.size() == 1) single[k].box.for_each(g, [&](std::size_t i) { CHECK(chi[i] == doctest::Approx(1.0)); });
    }

    const OpenSetMask two = mask_of(g, IndexBox{{8, 8, 0}, {24, 16, 1}});
    const auto cubes = whitney(two);
    REQUIRE(cubes.size() >= 2);
    const PartitionOfUnity pu = partition_of_unity(g, cubes);
    RealField total(g);
    for (std::size_t k = 0; k < cubes.size(); ++k) {
      const RealField chi = pu.field(k);
      for (std::size_t i = 0; i < g.size(); ++i) total[i] += chi[i];
    }
    for (std::size_t i = 0; i < g.size(); ++i)
      if (two.inside[i]) CHECK(std::abs(total[i] - 1.0) <= 1e-10);
    CHECK(pu.max_bound <= 10.0);
  }

  TEST_CASE("classify_cube") {
    const GridSpec g = GridSpec::make(2, 16);
    CHECK(classify_cube(Cube{{0.5, 0.5, 0}, 1.0}, RealField(g, 2.0)) == CubeType::kType1);
    CHECK(classify_cube(Cube{{0.5, 0.5, 0}, 0.5}, RealField(g, 2.0)) == CubeType::kType2);
    CHECK(classify_cube(Cube{{0.5, 0.5, 0}, 0.5}, RealField(g, 4.0)) == CubeType::kType2);
  }

  TEST_CASE("cz_decompose branches and verification") {
    const GridSpec g = GridSpec::make(2, 32);
    const ScenarioData sd = build_scenario(Scenario::constant_field(3.0), g, false);
    const ComplexField f = bump(g);
    const double p = 1.5;
    const RealField MF = maximal_function(cz_density(f, p, sd.H, sd.B.abs_b));
    double top = 0.0;
    for (double v : MF.values()) top = std::max(top, v);

    const CZResult empty = cz_decompose(f, p, 1.01 * std::pow(top, 1.0 / p), sd.H, sd.B);
    CHECK(empty.cubes.empty());
    CHECK(empty.g.raw() == f.raw());
    const CZConstants ce = verify_cz(empty, sd.H, sd.B);
    CHECK(ce.identity_residual == 0.0);
    CHECK(ce.czd == 0.0);

    const double alpha = median_alpha(f, p, sd.H, sd.B.abs_b);
    const CZResult r = cz_decompose(f, p, alpha, sd.H, sd.B);
    CHECK(!r.cubes.empty());
    const CZConstants c = verify_cz(r, sd.H, sd.B);
    CHECK(c.identity_residual <= 1e-12);
    CHECK(std::isfinite(c.czb));
    CHECK(std::isfinite(c.czc));
    CHECK(std::isfinite(c.czd));
    CHECK(c.overlap <= 30.0);

    CZResult broken = r;
    broken.g[g.ravel({16, 16, 0})] += 0.1;
    CHECK_THROWS_WITH_AS(verify_cz(broken, sd.H, sd.B), "decomposition broken", Error);
  }

  TEST_CASE("zero field gives type-2 cubes with constant phases") {
    const GridSpec g = GridSpec::make(2, 32);
    const ScenarioData sd = build_scenario(Scenario::free(), g, false);
    const ComplexField f = bump(g);
    const CZResult r = cz_decompose(f, 1.5, median_alpha(f, 1.5, sd.H, sd.B.abs_b), sd.H, sd.B);
    REQUIRE(!r.cubes.empty());
    for (std::size_t k = 0; k < r.cubes.size(); ++k) {
      if (r.cubes[k].gauge_fallback) continue;
      CHECK(r.cubes[k].type == CubeType::kType2);
      REQUIRE(r.phases[k].has_value());
      for (double v : r.phases[k]->values()) CHECK(std::abs(v) <= 1e-12);
    }
  }
}
