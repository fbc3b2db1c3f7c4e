#include "fefferman.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace mslab {

namespace {

struct CubeIntegrals {
  double u_p = 0.0;       // int_Q |u|^p
  double grad_p = 0.0;    // int_Q |Lu|^p
  double weighted = 0.0;  // int_Q w |u|^p
  double w_avg = 0.0;
};

CubeIntegrals integrate(const ComplexField& u, const RealField& w, const Cube& Q, double p,
                        const MagneticOperator& H) {
  require(u.grid() == H.grid() && w.grid() == H.grid(), "fields must share the operator grid");
  const GridSpec& g = H.grid();
  const RealField density = H.covariant_density(u);
  const IndexBox box = Q.clip(g);
  require(!box.empty(), "degenerate cube", ErrorCode::kDegenerate);
  CubeIntegrals out;
  std::size_t count = 0;
  box.for_each(g, [&](std::size_t idx) {
    const double mod = std::pow(std::abs(u[idx]), p);
    out.u_p += mod;
    out.grad_p += std::pow(density[idx], 0.5 * p);
    out.weighted += w[idx] * mod;
    out.w_avg += w[idx];
    ++count;
  });
  const double vol = g.cell_volume();
  out.u_p *= vol;
  out.grad_p *= vol;
  out.weighted *= vol;
  out.w_avg /= static_cast<double>(count);
  return out;
}

FPValue ratio(double lhs, double rhs) {
  FPValue v;
  v.lhs = lhs;
  v.rhs = rhs;
  if (rhs > 0.0) {
    v.constant = lhs / rhs;
  } else if (lhs > 0.0) {
    v.constant = std::numeric_limits<double>::infinity();
    v.unbounded = true;
  } else {
    v.vacuous = true;
  }
  return v;
}

}  // namespace

double m_beta(double x, double beta) {
  require(x >= 0.0, "m_beta needs a nonnegative argument");
  return x <= 1.0 ? x : std::pow(x, beta);
}

const char* fp_form_name(FPForm form) {
  return form == FPForm::kClassical ? "classical" : "improved";
}

FPValue fp_classical(const ComplexField& u, const RealField& w, const Cube& Q, double p,
                     const MagneticOperator& H) {
  require(p >= 1.0, "p must be at least 1");
  const CubeIntegrals I = integrate(u, w, Q, p, H);
  const double factor = std::min(std::pow(I.w_avg, 0.5 * p), std::pow(Q.R, -p));
  return ratio(factor * I.u_p, I.grad_p + I.weighted);
}

FPValue fp_improved(const ComplexField& u, const RealField& w, const Cube& Q, double beta,
                    const MagneticOperator& H) {
  require(beta > 0.0 && beta < 1.0, "beta must lie in (0,1)");
  const CubeIntegrals I = integrate(u, w, Q, 2.0, H);
  const double R2 = Q.R * Q.R;
  return ratio(m_beta(R2 * I.w_avg, beta) / R2 * I.u_p, I.grad_p + I.weighted);
}

std::vector<FPPair> fp_pairs(const GridSpec& g, std::size_t probes, std::size_t count,
                             std::uint64_t seed) {
  require(probes > 0, "probe family must not be empty");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<FPPair> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    FPPair pair;
    pair.probe = static_cast<std::size_t>(rng() % probes);
    pair.cube.R = g.L * (0.25 + 0.25 * unit(rng));
    for (int a = 0; a < g.n; ++a)
      pair.cube.center[a] = 0.5 * pair.cube.R + (g.L - pair.cube.R) * unit(rng);
    out.push_back(pair);
  }
  return out;
}

FPReport fp_batch(FPForm form, double p, double beta, const RealField& w, const ProbeFamily& probes,
                  const std::vector<FPPair>& pairs, const MagneticOperator& H) {
  FPReport rep;
  rep.form = form;
  rep.p = p;
  rep.beta = beta;
  for (const FPPair& pair : pairs) {
    require(pair.probe < probes.members.size(), "probe index out of range");
    const Probe& probe = probes.members[pair.probe];
    const FPValue v = form == FPForm::kClassical ? fp_classical(probe.field, w, pair.cube, p, H)
                                                 : fp_improved(probe.field, w, pair.cube, beta, H);
    ++rep.evaluated;
    if (v.vacuous) {
      ++rep.vacuous;
      continue;
    }
    if (v.constant > rep.constant || rep.worst_probe.empty()) {
      rep.constant = std::max(rep.constant, v.constant);
      rep.worst_cube = pair.cube;
      rep.worst_probe = probe.id;
    }
    rep.unbounded = rep.unbounded || v.unbounded;
  }
  return rep;
}

}  // namespace mslab
