#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "scenario.hpp"
#include "solutions.hpp"
#include "spectral.hpp"

using namespace mslab;

namespace {

const Cube kQ{{0.5, 0.5, 0}, 0.125};

MagneticOperator free_operator(const GridSpec& g) { return assemble(LinkField::trivial(g), RealField(g)); }

complex quadratic(const Point& x) {
  return complex((x[0] - 0.5) * (x[0] - 0.5) - (x[1] - 0.5) * (x[1] - 0.5));
}

}  // namespace

TEST_SUITE("solutions") {
  TEST_CASE("harmonic extensions") {
    const GridSpec g = GridSpec::make(2, 32);
    const MagneticOperator H = free_operator(g);
    const InteriorSolution one = solve_interior(kQ, [](const Point&) { return complex(1.0); }, H);
    one.domain.for_each(g, [&](std::size_t i) { CHECK(std::abs(one.u[i] - 1.0) <= 1e-12); });

    // Re (x1 + i x2)^2 is discretely harmonic: the five-point Laplacian of x1^2 - x2^2 vanishes.
    const InteriorSolution q = solve_interior(kQ, quadratic, H);
    q.interior.for_each(g, [&](std::size_t i) { CHECK(std::abs(q.u[i] - quadratic(g.position(i))) <= 1e-10); });
    CHECK_THROWS_AS(solve_interior(Cube{{0.2, 0.5, 0}, 0.125}, quadratic, H), Error);
  }

  TEST_CASE("residual invariant with a magnetic field") {
    const GridSpec g = GridSpec::make(2, 64);
    const ScenarioData sd = build_scenario(Scenario::constant_field(8.0), g, false);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> d;
    std::vector<complex> table(4 * g.N);
    for (auto& v : table) v = {d(rng), d(rng)};
    const BoundaryFn random = [&](const Point& x) {
      return table[static_cast<std::size_t>((x[0] + 3 * x[1]) * g.N) % table.size()];
    };
    const InteriorSolution sol = solve_interior(kQ, random, sd.H);
    CHECK(sol.residual <= kInteriorResidual);
    CHECK(sol.residual <= 1e-10);
  }

  TEST_CASE("check_decay") {
    const GridSpec g = GridSpec::make(2, 32);
    const ScenarioData strong = build_scenario(Scenario::constant_field(16.0), g);
    InteriorSolution zero = solve_interior(kQ, [](const Point&) { return complex(0.0); }, strong.H);
    CHECK(check_decay(zero, *strong.aux).vacuous);

    const ScenarioData weak = build_scenario(Scenario::constant_field(1e-3), g);
    const InteriorSolution wsol = solve_interior(kQ, [](const Point& x) { return complex(1.0 + x[0], x[1]); }, weak.H);
    const DecayReport wr = check_decay(wsol, *weak.aux);
    for (double c : wr.C) CHECK(c < 10.0);

    std::vector<double> C2;
    for (int N : {32, 64}) {
      const ScenarioData sd = build_scenario(Scenario::constant_field(16.0), GridSpec::make(2, N));
      const InteriorSolution sol = solve_interior(kQ, [](const Point& x) { return complex(1.0 + x[0], x[1]); }, sd.H);
      const DecayReport r = check_decay(sol, *sd.aux);
      CHECK(std::isfinite(r.C[1]));
      C2.push_back(r.C[1]);
    }
    CHECK(std::abs(C2[1] / C2[0] - 1.0) <= 0.3);
  }

  TEST_CASE("check_rh_solution") {
    const GridSpec g = GridSpec::make(2, 32);
    const MagneticOperator H = free_operator(g);
    const InteriorSolution c = solve_interior(kQ, [](const Point&) { return complex(2.0); }, H);
    const RHSolutionValue v = check_rh_solution(c, 4.0, RHSolutionKind::kGradient, H, RealField(g, 0.0));
    CHECK(v.vacuous);

    const ScenarioData rad = build_scenario(Scenario::constant_field(4.0, radial_potential(50.0, 1.0)), g);
    const InteriorSolution s = solve_interior(kQ, [](const Point& x) { return complex(1.0, x[0] - x[1]); }, rad.H);
    for (RHSolutionKind k : {RHSolutionKind::kAux, RHSolutionKind::kGradient, RHSolutionKind::kPotential,
                             RHSolutionKind::kGradientV}) {
      const RHSolutionValue r = check_rh_solution(s, 4.0, k, rad.H, rad.aux);
      CHECK(std::isfinite(r.constant));
      CHECK(r.constant > 0.0);
    }
    CHECK(check_rh_solution(s, 4.0, RHSolutionKind::kGradientV, rad.H, rad.aux).exponent ==
          doctest::Approx(8.0));
  }

  TEST_CASE("check_subharmonic") {
    const GridSpec g = GridSpec::make(2, 32);
    const MagneticOperator H = free_operator(g);
    const InteriorSolution q = solve_interior(kQ, quadratic, H);
    const SubharmonicReport r = check_subharmonic(q, H);
    CHECK(r.centered_residual <= 1e-8);
    CHECK(r.min_laplacian >= -1e-10);

    const ScenarioData sd = build_scenario(Scenario::standard_polynomial(), g, false);
    const InteriorSolution s = solve_interior(kQ, [](const Point& x) { return complex(1.0 + 0.5 * x[0], 0.25 * x[1]); }, sd.H);
    const SubharmonicReport rs = check_subharmonic(s, sd.H);
    CHECK(rs.centered_residual <= 1e-8);
    CHECK(rs.min_laplacian >= -1e-10);
    CHECK(rs.forward_residual > rs.centered_residual);
  }

  TEST_CASE("check_weighted_mean_value") {
    const GridSpec g = GridSpec::make(2, 32);
    const Cube Q{{0.5, 0.5, 0}, 0.25};
    CHECK(std::abs(check_weighted_mean_value(RealField(g, 1.0), RealField(g, 1.0), Q, 2.0, 1.0) - 1.0) <= 1e-12);
    const MagneticOperator H = free_operator(g);
    const InteriorSolution q = solve_interior(kQ, quadratic, H);
    RealField v(g);
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::norm(q.u[i]);
    const double c = check_weighted_mean_value(RealField(g, 1.0), v, Q, INFINITY, 0.5);
    CHECK(std::isfinite(c));
    CHECK(c < 10.0);
    CHECK_THROWS_AS(check_weighted_mean_value(RealField(g, 1.0), v, Q, 2.0, 0.5, 2.5), Error);

    std::vector<double> C;
    for (int N : {32, 64}) {
      const GridSpec gN = GridSpec::make(2, N);
      const RealField w = sample(gN, [](const Point& x) { return x[0]; });
      const RealField vN = sample(gN, [&](const Point& x) { return std::norm(quadratic(x)) + 0.01; });
      C.push_back(check_weighted_mean_value(w, vN, Q, 2.0, 0.5));
    }
    CHECK(std::abs(C[1] / C[0] - 1.0) <= 0.3);
  }

  TEST_CASE("sobolev_conjugate") {
    CHECK(sobolev_conjugate(1.0, 2) == doctest::Approx(2.0));
    CHECK(std::isinf(sobolev_conjugate(2.0, 2)));
    CHECK(sobolev_conjugate(2.0, 3) == doctest::Approx(6.0));
  }
}
