#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "magnetic.hpp"
#include "scenario.hpp"
#include "solutions.hpp"
#include "spectral.hpp"

using namespace mslab;

namespace {

MagneticOperator free_operator(const GridSpec& g, double V = 0.0) {
  return assemble(LinkField::trivial(g), RealField(g, V));
}

}  // namespace

TEST_SUITE("operator") {
  TEST_CASE("curl") {
    const GridSpec g = GridSpec::make(2, 16);
    const MagneticData sym = curl(sample_potential(g, [](int j, const Point& x) {
      return j == 0 ? -x[1] / 2 : x[0] / 2;
    }));
    for_each_node(g, [&](std::size_t idx, const Index& ix) {
      if (ix[0] == 0 || ix[1] == 0 || ix[0] == g.N - 1 || ix[1] == g.N - 1) return;
      CHECK(sym.b[0][idx] == doctest::Approx(-1.0).epsilon(1e-12));
      CHECK(sym.abs_b[idx] == doctest::Approx(2.0).epsilon(1e-12));
    });
    const MagneticData grad = curl(sample_potential(g, [](int j, const Point& x) { return j == 0 ? x[1] : x[0]; }));
    for_each_node(g, [&](std::size_t idx, const Index& ix) {
      if (ix[0] == 0 || ix[1] == 0 || ix[0] == g.N - 1 || ix[1] == g.N - 1) return;
      CHECK(std::abs(grad.b[0][idx]) <= 1e-12);
    });
    const MagneticData zero = curl(sample_potential(g, [](int, const Point&) { return 0.0; }));
    for (double v : zero.abs_b.values()) CHECK(v == 0.0);
  }

  TEST_CASE("Dirichlet Laplacian spectrum and stencil") {
    const GridSpec g = GridSpec::make(2, 8);
    const MagneticOperator H = free_operator(g);
    const SpectralDecomposition dec = eig(H);
    const double h = g.h();
    const double lowest = 2.0 * 2 * (1.0 - std::cos(std::numbers::pi / (g.N + 1))) / (h * h);
    CHECK(std::abs(dec.eigenvalues.front() - lowest) <= 1e-10 * lowest);

    ComplexField u(g);
    const std::size_t c = g.ravel({3, 4, 0});
    u[c] = 1.0;
    const ComplexField Hu = H.apply(u);
    CHECK(std::abs(Hu[c] - complex(4.0 / (h * h))) <= 1e-9);
  }

  TEST_CASE("energy identity and hermiticity") {
    const GridSpec g = GridSpec::make(2, 16);
    const ScenarioData sd = build_scenario(Scenario::constant_field(4.0, radial_potential(10.0, 1.0)), g, false);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const ComplexField u = testing::random_complex(g, seed);
      const EnergyParts E = sd.H.energy(u);
      CHECK(std::abs(E.form - (E.kinetic + E.potential + E.shift)) <= 1e-12 * E.form);
      const ComplexField v = testing::random_complex(g, seed + 100);
      const complex a = inner_product(sd.H.apply(u), v), b = inner_product(u, sd.H.apply(v));
      CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
    }
    CHECK(sd.H.links().max_modulus_defect() <= 1e-14);
  }

  TEST_CASE("gauge transformed links conjugate the operator") {
    const GridSpec g = GridSpec::make(2, 16);
    const ScenarioData sd = build_scenario(Scenario::constant_field(3.0), g, false);
    const RealField phi = sample(g, [](const Point& x) { return std::sin(3 * x[0]) + x[0] * x[1]; });
    const MagneticOperator H2(sd.H.links().gauge_transformed(phi), sd.V);
    const ComplexField u = testing::random_complex(g, 1);
    ComplexField eu(g);
    for (std::size_t i = 0; i < g.size(); ++i) eu[i] = std::polar(1.0, phi[i]) * u[i];
    const ComplexField lhs = H2.apply(eu), rhs = sd.H.apply(u);
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(std::abs(lhs[i] - std::polar(1.0, phi[i]) * rhs[i]) <= 1e-9 * (1 + std::abs(rhs[i])));
  }

  TEST_CASE("diamagnetic_check") {
    const GridSpec g = GridSpec::make(2, 16);
    const ScenarioData sd = build_scenario(Scenario::constant_field(5.0), g, false);
    const ComplexField u = testing::random_complex(g, 3);
    CHECK(diamagnetic_check(u, sd.H).max_violation <= 1e-12 * diamagnetic_check(u, sd.H).scale);

    const MagneticOperator H0 = free_operator(g);
    const RealField rho = testing::random_real(g, 4);
    const DiamagneticReport eq = diamagnetic_check(to_complex(rho), H0);
    CHECK(eq.max_gap <= 1e-12 * eq.scale);

    const RealField theta = testing::random_real(g, 5, 0.0, 6.28);
    ComplexField twisted(g);
    for (std::size_t i = 0; i < g.size(); ++i) twisted[i] = std::polar(rho[i], theta[i]);
    CHECK(diamagnetic_check(twisted, H0).max_gap > 1e-3);
  }

  TEST_CASE("kato_simon_check") {
    const GridSpec g = GridSpec::make(2, 16);
    const RealField bump = sample(g, [](const Point& x) {
      return std::exp(-20.0 * ((x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5)));
    });
    const MagneticOperator H0 = free_operator(g);
    const KatoSimonReport same = kato_simon_check(bump, 1.0, H0, H0);
    CHECK(std::abs(same.min_slack) <= 1e-9 * same.f_sup);
    CHECK(std::abs(same.max_gap) <= 1e-9 * same.f_sup);

    const ScenarioData sd = build_scenario(Scenario::constant_field(1.0), g, false);
    for (double lambda : {0.1, 1.0, 10.0}) {
      const KatoSimonReport r = kato_simon_check(bump, lambda, sd.H, H0);
      CHECK(r.min_slack >= -1e-9 * r.f_sup);
      if (lambda == 1.0) CHECK(r.max_gap > 0.0);
    }
  }

  TEST_CASE("check_shen_conditions") {
    const GridSpec g = GridSpec::make(2, 32);
    const ScenarioData c = build_scenario(Scenario::constant_field(2.0), g, false);
    CHECK(check_shen_conditions(c.B, nullptr).field_constant <= 1e-9);

    std::vector<double> cs;
    for (int N : {32, 64}) {
      const ScenarioData p = build_scenario(Scenario::polynomial_field({{1.0, {0, 0, 0}}, {1.0, {1, 0, 0}}}),
                                            GridSpec::make(2, N), false);
      const ShenReport r = check_shen_conditions(p.B, nullptr);
      CHECK(std::isfinite(r.field_constant));
      CHECK(r.field_constant > 0.0);
      cs.push_back(r.field_constant);
    }
    CHECK(std::abs(cs[1] / cs[0] - 1.0) <= 0.2);

    // |B| = 2 and V = 2 give m(., |B| + V)^2 = 4, so V <= 0.5 m^2.
    const ScenarioData v = build_scenario(Scenario::constant_field(1.0, constant_potential(2.0)), g, false);
    const ShenReport rv = check_shen_conditions(v.B, &v.V);
    REQUIRE(rv.potential_constant.has_value());
    CHECK(*rv.potential_constant == doctest::Approx(0.5).epsilon(0.1));

    const ScenarioData z = build_scenario(Scenario::free(), g, false);
    CHECK(check_shen_conditions(z.B, nullptr).field_vanishes);
  }

  TEST_CASE("caccioppoli_check") {
    const Cube Q{{0.5, 0.5, 0}, 0.125};
    const GridSpec g = GridSpec::make(2, 32);
    const MagneticOperator H0 = free_operator(g);
    CHECK(caccioppoli_check(ComplexField(g), ComplexField(g), Q, H0) == 0.0);
    CHECK_THROWS_AS(caccioppoli_check(ComplexField(g), ComplexField(g), Cube{{0.1, 0.1, 0}, 0.25}, H0), Error);

    const BoundaryFn bump = [](const Point& x) {
      return complex(std::exp(-10.0 * ((x[0] - 0.2) * (x[0] - 0.2) + (x[1] - 0.3) * (x[1] - 0.3))));
    };
    std::vector<double> C;
    for (int N : {32, 64}) {
      const GridSpec gN = GridSpec::make(2, N);
      const MagneticOperator H = free_operator(gN);
      const InteriorSolution sol = solve_interior(Q, bump, H);
      const double c = caccioppoli_check(sol.u, ComplexField(gN), Q, H);
      CHECK(std::isfinite(c));
      C.push_back(c);
    }
    CHECK(std::abs(C[1] / C[0] - 1.0) <= 0.3);

    const ScenarioData sd = build_scenario(Scenario::constant_field(8.0), g, false);
    const InteriorSolution sol = solve_interior(Q, bump, sd.H);
    CHECK(std::isfinite(caccioppoli_check(sol.u, ComplexField(g), Q, sd.H)));
  }
}
