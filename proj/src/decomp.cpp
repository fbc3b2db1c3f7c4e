#include "decomp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace mslab {

namespace {

// 1 on [0, 1/2], C^1 cubic down to 0 at 1.
double bump(double t) {
  const double a = std::abs(t);
  if (a <= 0.5) return 1.0;
  if (a >= 1.0) return 0.0;
  const double s = 2.0 * (a - 0.5);
  return 1.0 - 3.0 * s * s + 2.0 * s * s * s;
}

double bump_derivative(double t) {
  const double a = std::abs(t);
  if (a <= 0.5 || a >= 1.0) return 0.0;
  const double s = 2.0 * (a - 0.5);
  const double d = 2.0 * (-6.0 * s + 6.0 * s * s);
  return t < 0.0 ? -d : d;
}

// Chebyshev distance (in cells) from every grid point to the complement of omega.
std::vector<int> distance_to_complement(const OpenSetMask& omega) {
  const GridSpec& g = omega.grid;
  const std::size_t M = g.size();
  std::vector<int> dist(M, std::numeric_limits<int>::max());
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < M; ++i)
    if (!omega.inside[i]) {
      dist[i] = 0;
      queue.push_back(i);
    }
  const int span = g.n == 3 ? 27 : 9;
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const Index ix = g.unravel(cur);
    for (int code = 0; code < span; ++code) {
      Index nb = ix;
      int c = code;
      bool valid = true;
      bool moved = false;
      for (int a = 0; a < g.n; ++a) {
        const int off = c % 3 - 1;
        c /= 3;
        nb[a] += off;
        moved = moved || off != 0;
        if (nb[a] < 0 || nb[a] >= g.N) valid = false;
      }
      if (!valid || !moved) continue;
      const std::size_t ni = g.ravel(nb);
      if (dist[ni] > dist[cur] + 1) {
        dist[ni] = dist[cur] + 1;
        queue.push_back(ni);
      }
    }
  }
  // The ghost layer just outside the box belongs to the complement.
  for_each_node(g, [&](std::size_t idx, const Index& ix) {
    for (int a = 0; a < g.n; ++a) dist[idx] = std::min({dist[idx], ix[a] + 1, g.N - ix[a]});
  });
  return dist;
}

double lp_of_density(const RealField& density_sq, double p) {
  // (h^n sum (sqrt d)^p)^(1/p) for a field of squared moduli.
  double acc = 0.0;
  for (double d : density_sq.values()) acc += std::pow(d, 0.5 * p);
  return std::pow(acc * density_sq.grid().cell_volume(), 1.0 / p);
}

double energy_norm(const ComplexField& u, double p, const MagneticOperator& H, const RealField& abs_b) {
  const RealField density = H.covariant_density(u);
  RealField field_part(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) field_part[i] = abs_b[i] * std::norm(u[i]);
  return lp_of_density(density, p) + lp_of_density(field_part, p);
}

}  // namespace

RealField maximal_function(const RealField& F) {
  const GridSpec& g = F.grid();
  for (double v : F.values()) require(v >= 0.0, "maximal function needs a nonnegative field");
  const BoxSum sums(F);
  RealField out(g);
  for (const Cube& q : cube_family(g, CubeStrategy::kDyadicHalfShifted)) {
    const IndexBox box = q.clip(g);
    const double avg = sums.sum(box) / static_cast<double>(box.count(g.n));
    box.for_each(g, [&](std::size_t idx) { out[idx] = std::max(out[idx], avg); });
  }
  return out;
}

OpenSetMask OpenSetMask::level_set(const RealField& F, double threshold) {
  OpenSetMask m;
  m.grid = F.grid();
  m.inside.resize(F.size());
  for (std::size_t i = 0; i < F.size(); ++i) m.inside[i] = F[i] > threshold ? 1 : 0;
  return m;
}

std::size_t OpenSetMask::count() const {
  return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
}

std::vector<WhitneyCube> whitney(const OpenSetMask& omega) {
  const GridSpec& g = omega.grid;
  std::vector<WhitneyCube> out;
  const std::size_t inside = omega.count();
  if (inside == 0) return out;

  const std::vector<int> dist = distance_to_complement(omega);
  std::vector<std::uint8_t> covered(g.size(), 0);
  for (int level = 0; level <= g.levels(); ++level) {
    const int side = g.N >> level;
    const int per_axis = 1 << level;
    const int blocks = g.n == 3 ? per_axis * per_axis * per_axis : per_axis * per_axis;
    for (int b = 0; b < blocks; ++b) {
      IndexBox box;
      int rest = b;
      for (int a = g.n - 1; a >= 0; --a) {
        const int k = rest % per_axis;
        rest /= per_axis;
        box.lo[a] = k * side;
        box.hi[a] = (k + 1) * side;
      }
      Index first = box.lo;
      if (covered[g.ravel(first)]) continue;
      bool ok = true;
      int dmin = std::numeric_limits<int>::max();
      box.for_each(g, [&](std::size_t idx) {
        if (!omega.inside[idx]) ok = false;
        dmin = std::min(dmin, dist[idx]);
      });
      if (!ok || dmin < side) continue;
      box.for_each(g, [&](std::size_t idx) { covered[idx] = 1; });
      WhitneyCube w;
      w.box = box;
      w.level = level;
      w.ratio = static_cast<double>(dmin) / side;
      w.cube.R = side * g.h();
      for (int a = 0; a < g.n; ++a) w.cube.center[a] = (box.lo[a] + 0.5 * side) * g.h();
      out.push_back(w);
    }
  }
  return out;
}

WhitneyAudit audit_whitney(const OpenSetMask& omega, const std::vector<WhitneyCube>& cubes) {
  const GridSpec& g = omega.grid;
  WhitneyAudit audit;
  audit.cubes = cubes.size();
  std::vector<int> hits(g.size(), 0);
  std::vector<Point> complement;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!omega.inside[i]) complement.push_back(g.position(i));

  audit.min_ratio = std::numeric_limits<double>::infinity();
  for (const WhitneyCube& w : cubes) {
    w.cube.clip(g).for_each(g, [&](std::size_t idx) { ++hits[idx]; });
    w.cube.dilate(2.0).clip(g).for_each(g, [&](std::size_t idx) {
      if (!omega.inside[idx]) audit.doubles_inside_omega = false;
    });
    double nearest = std::numeric_limits<double>::infinity();
    for (int a = 0; a < g.n; ++a)
      nearest = std::min({nearest, w.cube.center[a] + 0.5 * g.h(), g.L + 0.5 * g.h() - w.cube.center[a]});
    if (nearest < w.cube.R) audit.doubles_inside_omega = false;
    audit.min_ratio = std::min(audit.min_ratio, w.ratio);
    audit.max_ratio = std::max(audit.max_ratio, w.ratio);
    for (const Point& f : complement) {
      double d = 0.0;
      for (int a = 0; a < g.n; ++a) d = std::max(d, std::abs(f[a] - w.cube.center[a]));
      nearest = std::min(nearest, d);
    }
    const double reach = 2.0 * nearest / w.cube.R;
    audit.max_reach = std::max(audit.max_reach, reach);
    if (reach < kWhitneyReach) ++audit.reach_hits;
    if (reach < 4.0) ++audit.fourfold_hits;
  }
  if (cubes.empty()) audit.min_ratio = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (hits[i] > 1) audit.disjoint = false;
    if ((hits[i] == 1) != (omega.inside[i] == 1)) audit.covers = false;
  }
  return audit;
}

RealField PartitionOfUnity::field(std::size_t k) const {
  RealField out(grid);
  std::size_t c = 0;
  supports[k].for_each(grid, [&](std::size_t idx) { out[idx] = values[k][c++]; });
  return out;
}

PartitionOfUnity partition_of_unity(const GridSpec& grid, const std::vector<WhitneyCube>& cubes) {
  const int n = grid.n;
  PartitionOfUnity pu;
  pu.grid = grid;
  RealField total(grid);
  std::vector<RealField> total_grad(n, RealField(grid));

  auto evaluate = [&](const WhitneyCube& w, std::size_t idx, double& psi, std::array<double, 3>& grad) {
    const Point x = grid.position(idx);
    std::array<double, 3> t{0.0, 0.0, 0.0}, b{1.0, 1.0, 1.0}, db{0.0, 0.0, 0.0};
    for (int a = 0; a < n; ++a) {
      t[a] = (x[a] - w.cube.center[a]) / w.cube.R;
      b[a] = bump(t[a]);
      db[a] = bump_derivative(t[a]) / w.cube.R;
    }
    psi = 1.0;
    for (int a = 0; a < n; ++a) psi *= b[a];
    for (int a = 0; a < n; ++a) {
      grad[a] = db[a];
      for (int c = 0; c < n; ++c)
        if (c != a) grad[a] *= b[c];
    }
  };

  for (const WhitneyCube& w : cubes) {
    const IndexBox support = w.cube.dilate(2.0).clip(grid);
    pu.supports.push_back(support);
    support.for_each(grid, [&](std::size_t idx) {
      double psi;
      std::array<double, 3> grad;
      evaluate(w, idx, psi, grad);
      total[idx] += psi;
      for (int a = 0; a < n; ++a) total_grad[a][idx] += grad[a];
    });
  }

  for (std::size_t k = 0; k < cubes.size(); ++k) {
    const WhitneyCube& w = cubes[k];
    std::vector<double> vals;
    double sup = 0.0, grad_sup = 0.0;
    pu.supports[k].for_each(grid, [&](std::size_t idx) {
      double psi;
      std::array<double, 3> grad;
      evaluate(w, idx, psi, grad);
      const double S = total[idx];
      const double chi = S > 0.0 ? psi / S : 0.0;
      double g2 = 0.0;
      if (S > 0.0)
        for (int a = 0; a < n; ++a) {
          const double d = grad[a] / S - psi * total_grad[a][idx] / (S * S);
          g2 += d * d;
        }
      vals.push_back(chi);
      sup = std::max(sup, chi);
      grad_sup = std::max(grad_sup, std::sqrt(g2));
    });
    pu.values.push_back(std::move(vals));
    const double bound = sup + w.cube.R * grad_sup;
    pu.bounds.push_back(bound);
    pu.max_bound = std::max(pu.max_bound, bound);
  }
  return pu;
}

CubeType classify_cube(const Cube& Q, const RealField& abs_b) {
  return Q.R * Q.R * cube_average(abs_b, Q) > 1.0 ? CubeType::kType1 : CubeType::kType2;
}

RealField cz_density(const ComplexField& f, double p, const MagneticOperator& H, const RealField& abs_b) {
  const RealField density = H.covariant_density(f);
  RealField G(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i)
    G[i] = std::pow(density[i], 0.5 * p) + std::pow(abs_b[i] * std::norm(f[i]), 0.5 * p);
  return G;
}

double median_alpha(const ComplexField& f, double p, const MagneticOperator& H, const RealField& abs_b) {
  const RealField MF = maximal_function(cz_density(f, p, H, abs_b));
  std::vector<double> v(MF.values().begin(), MF.values().end());
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return std::pow(v[v.size() / 2], 1.0 / p);
}

CZResult cz_decompose(const ComplexField& f, double p, double alpha, const MagneticOperator& H,
                      const MagneticData& B, int quad_order) {
  const GridSpec& g = f.grid();
  require(p >= 1.0 && p < g.n, "CZ exponent must lie in [1, n)");
  require(alpha > 0.0, "CZ level must be positive");
  CZResult out;
  out.grid = g;
  out.p = p;
  out.alpha = alpha;
  out.f = f;
  out.maximal = maximal_function(cz_density(f, p, H, B.abs_b));
  out.omega = OpenSetMask::level_set(out.maximal, std::pow(alpha, p));
  out.g = f;
  out.chi.grid = g;
  if (out.omega.empty()) {
    out.constants = verify_cz(out, H, B);
    return out;
  }

  const std::vector<WhitneyCube> cubes = whitney(out.omega);
  out.chi = partition_of_unity(g, cubes);
  for (std::size_t k = 0; k < cubes.size(); ++k) {
    CZCube cz;
    cz.whitney = cubes[k];
    cz.type = classify_cube(cubes[k].cube, B.abs_b);
    const Cube twice = cubes[k].cube.dilate(2.0);
    if (cz.type == CubeType::kType2 && !twice.inside_box(g)) cz.gauge_fallback = true;

    ComplexField bk(g);
    const IndexBox& support = out.chi.supports[k];
    const std::vector<double>& chi = out.chi.values[k];
    std::optional<RealField> phase;
    if (cz.type == CubeType::kType2 && !cz.gauge_fallback) {
      GaugePair pair = iwatsuka(B, twice, quad_order);
      complex mean = 0.0;
      std::size_t count = 0;
      pair.box.for_each(g, [&](std::size_t idx) {
        mean += std::polar(1.0, pair.phi[idx]) * f[idx];
        ++count;
      });
      mean /= static_cast<double>(count);
      std::size_t c = 0;
      support.for_each(g, [&](std::size_t idx) {
        bk[idx] = (f[idx] - std::polar(1.0, -pair.phi[idx]) * mean) * chi[c++];
      });
      phase = std::move(pair.phi);
    } else {
      std::size_t c = 0;
      support.for_each(g, [&](std::size_t idx) { bk[idx] = f[idx] * chi[c++]; });
    }
    for (std::size_t i = 0; i < g.size(); ++i) out.g[i] -= bk[i];
    out.bad.push_back(std::move(bk));
    out.phases.push_back(std::move(phase));
    out.cubes.push_back(cz);
  }
  out.constants = verify_cz(out, H, B);
  return out;
}

CZConstants verify_cz(const CZResult& r, const MagneticOperator& H, const MagneticData& B) {
  const GridSpec& g = r.grid;
  const int n = g.n;
  const double p = r.p;
  CZConstants c;

  double fmax = 0.0, resid = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    complex sum = r.g[i];
    for (const ComplexField& b : r.bad) sum += b[i];
    resid = std::max(resid, std::abs(r.f[i] - sum));
    fmax = std::max(fmax, std::abs(r.f[i]));
  }
  c.identity_residual = fmax > 0.0 ? resid / fmax : resid;
  if (c.identity_residual > 1e-10)
    throw Error(ErrorCode::kBrokenInvariant, "decomposition broken");

  c.f_energy = energy_norm(r.f, p, H, B.abs_b);
  c.g_energy = energy_norm(r.g, n, H, B.abs_b);
  const double scale = std::pow(r.alpha, 1.0 - p / n) * std::pow(c.f_energy, p / n);
  c.czb = scale > 0.0 ? c.g_energy / scale : 0.0;

  const RealField G = cz_density(r.f, p, H, B.abs_b);
  double G_int = 0.0;
  for (double v : G.values()) G_int += v;
  G_int *= g.cell_volume();
  const double weak_scale = std::pow(r.alpha, -p) * G_int;

  c.omega_measure = static_cast<double>(r.omega.count()) * g.cell_volume();
  c.weak = weak_scale > 0.0 ? c.omega_measure / weak_scale : 0.0;

  double cube_volume = 0.0;
  std::vector<int> overlap(g.size(), 0);
  for (std::size_t k = 0; k < r.cubes.size(); ++k) {
    const CZCube& cz = r.cubes[k];
    const double R = cz.whitney.cube.R;
    const double vol = std::pow(R, n);
    cube_volume += vol;
    if (cz.type == CubeType::kType1) ++c.type1;
    if (cz.type == CubeType::kType2) ++c.type2;
    if (cz.gauge_fallback) ++c.fallbacks;
    cz.whitney.cube.dilate(2.0).clip(g).for_each(g, [&](std::size_t idx) { ++overlap[idx]; });

    const RealField density = H.covariant_density(r.bad[k]);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      acc += std::pow(density[i], 0.5 * p) + std::pow(std::abs(r.bad[k][i]) / R, p);
    acc *= g.cell_volume();
    c.czc = std::max(c.czc, acc / (std::pow(r.alpha, p) * vol));
  }
  c.czd = weak_scale > 0.0 ? cube_volume / weak_scale : 0.0;
  c.overlap = *std::max_element(overlap.begin(), overlap.end());
  return c;
}

}  // namespace mslab
