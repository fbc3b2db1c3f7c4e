#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "weights.hpp"

using namespace mslab;

namespace {

// Brute-force RH_2 over every grid-aligned square touching x1 = 0.
double rh2_x1_oracle(const RealField& w) {
  const GridSpec& g = w.grid();
  double worst = 0.0;
  for (int k = 1; k <= g.N; ++k)
    for (int j0 = 0; j0 + k <= g.N; ++j0) {
      double s1 = 0.0, s2 = 0.0;
      for (int a = 0; a < k; ++a)
        for (int b = j0; b < j0 + k; ++b) {
          const double v = w[g.ravel({a, b, 0})];
          s1 += v;
          s2 += v * v;
        }
      const double cnt = double(k) * k;
      worst = std::max(worst, std::sqrt(s2 / cnt) / (s1 / cnt));
    }
  return worst;
}

}  // namespace

TEST_SUITE("weights") {
  TEST_CASE("rh_constant of constants and of x1") {
    const GridSpec g = GridSpec::make(2, 32);
    const auto family = cube_family(g, CubeStrategy::kDyadicHalfShifted);
    for (double q : {2.0, 4.0, double(INFINITY)})
      CHECK(std::abs(rh_constant(Weight(RealField(g, 3.0)), q, family).constant - 1.0) <= 1e-12);
    const RealField x1 = sample(g, [](const Point& x) { return x[0]; });
    const RHReport r2 = rh_constant(Weight(x1), 2.0, family);
    CHECK(r2.constant == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(0.02));
    CHECK(r2.constant <= rh2_x1_oracle(x1) + 1e-12);
    CHECK(r2.worst_cube.center[0] - r2.worst_cube.R / 2 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rh_constant(Weight(x1), INFINITY, family).constant == doctest::Approx(2.0).epsilon(0.02));
    CHECK_THROWS_AS(rh_constant(Weight(x1), 1.0, family), Error);
  }

  TEST_CASE("doubling_constant") {
    const GridSpec g = GridSpec::make(2, 32);
    std::vector<Cube> interior;
    for (const Cube& q : cube_family(g, CubeStrategy::kDyadicHalfShifted))
      if (q.dilate(2.0).inside_box(g)) interior.push_back(q);
    REQUIRE(!interior.empty());
    CHECK(std::abs(doubling_constant(Weight(RealField(g, 1.0)), interior) - 4.0) <= 1e-12);
    const RealField x1 = sample(g, [](const Point& x) { return x[0]; });
    CHECK(doubling_constant(Weight(x1), interior) <= 8.0);
    // Centred on node (16, 16) so the grid resolves the spike.
    const double c = 16.5 * g.h();
    const RealField spike = sample(g, [c](const Point& x) {
      return std::exp(-((x[0] - c) * (x[0] - c) + (x[1] - c) * (x[1] - c)) / 1e-4) + 1e-12;
    });
    const double big = doubling_constant(Weight(spike), cube_family(g, CubeStrategy::kDyadic));
    CHECK(std::isfinite(big));
    CHECK(big > 100.0);
  }

  TEST_CASE("weight validation") {
    const GridSpec g = GridSpec::make(2, 8);
    CHECK_THROWS_AS(Weight(RealField(g, 0.0)), Error);
    CHECK_THROWS_AS(Weight(RealField(g, -1.0)), Error);
    RealField f(g, 0.0);
    f[3] = 1.0;
    CHECK_NOTHROW(Weight(f, 0.01));
  }

  TEST_CASE("aux_m of constant weights") {
    const GridSpec g = GridSpec::make(2, 32);
    CHECK(aux_m(Weight(RealField(g, 4.0)), {0.5, 0.5, 0}).m == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(aux_m(Weight(RealField(g, 2.0)), {0.3, 0.6, 0}).m == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    // Radius below one cell: the nearest grid value decides.
    const AuxValue sub = aux_m(Weight(RealField(g, 1e6)), {0.5, 0.5, 0});
    CHECK(sub.flag == AuxFlag::kSubCell);
    CHECK(sub.m == doctest::Approx(1000.0).epsilon(1e-9));
  }

  TEST_CASE("aux_m stays finite where the weight vanishes") {
    const GridSpec g = GridSpec::make(2, 32);
    const RealField w = sample(g, [](const Point& x) { return x[0] < 0.5 ? 0.0 : 10.0; });
    const AuxField m = aux_field(Weight(w));
    for (double v : m.values.values()) {
      CHECK(std::isfinite(v));
      CHECK(v > 0.0);
    }
    // Oracle: bisection on r^2 avg w = 1 at a point of the zero region.
    const Point x{0.2, 0.5, 0};
    const AuxEvaluator eval{Weight(w)};
    double lo = 1e-3, hi = 10.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (eval.critical_ratio(x, mid).value_or(0.0) <= 1.0 ? lo : hi) = mid;
    }
    CHECK(eval.at(x).m == doctest::Approx(1.0 / lo).epsilon(1e-6));
  }

  TEST_CASE("check_m_properties") {
    const GridSpec g = GridSpec::make(2, 32);
    const Weight c(RealField(g, 5.0));
    const MPropertiesReport rc = check_m_properties(c, sample_pairs(c, 200, 1));
    CHECK(rc.comparability == doctest::Approx(1.0).epsilon(1e-9));

    std::vector<double> k0;
    for (int N : {32, 64}) {
      const GridSpec gN = GridSpec::make(2, N);
      const Weight w(sample(gN, [](const Point& x) { return 50.0 * (1.0 + x[0] * x[0] + x[1] * x[1]); }));
      const auto pairs = sample_pairs(w, 400, 7);
      const MPropertiesReport r = check_m_properties(w, pairs);
      CHECK(std::isfinite(r.k0));
      CHECK(r.near_pairs > 0);
      k0.push_back(r.k0);
      // Near pairs are comparable within the fitted constant.
      const AuxEvaluator m(w);
      for (const auto& [x, y] : pairs) {
        const double mx = m.at(x).m, my = m.at(y).m;
        const double d = std::hypot(x[0] - y[0], x[1] - y[1]);
        if (d < 0.5 / mx) {
          CHECK(mx / my <= r.comparability * (1 + 1e-12));
          CHECK(my / mx <= r.comparability * (1 + 1e-12));
        }
      }
    }
    CHECK(std::abs(k0[1] / k0[0] - 1.0) <= 0.2);
  }
}
