#include "gauge.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>

namespace mslab {

namespace {

struct Rule {
  std::vector<double> t;
  std::vector<double> w;
};

template <int Points>
Rule legendre_on_unit_interval() {
  using G = boost::math::quadrature::gauss<double, Points>;
  Rule r;
  const auto x = G::abscissa();
  const auto w = G::weights();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int copies = x[i] == 0.0 ? 1 : 2;
    for (int c = 0; c < copies; ++c) {
      const double xi = c == 0 ? x[i] : -x[i];
      r.t.push_back(0.5 * (1.0 + xi));
      r.w.push_back(0.5 * w[i]);
    }
  }
  return r;
}

Rule gauss_rule(int order) {
  switch (order) {
    case 4: return legendre_on_unit_interval<4>();
    case 8: return legendre_on_unit_interval<8>();
    case 16: return legendre_on_unit_interval<16>();
    default: throw Error(ErrorCode::kInvalidArgument, "quadrature order must be 4, 8 or 16");
  }
}

// Multilinear interpolation weights matching interpolate() in grid.cpp.
struct Stencil {
  std::array<std::size_t, 8> idx{};
  std::array<double, 8> w{};
  int count = 0;

  double eval(const RealField& f) const {
    double acc = 0.0;
    for (int c = 0; c < count; ++c) acc += w[c] * f[idx[c]];
    return acc;
  }
};

Stencil make_stencil(const GridSpec& g, const Point& x) {
  int base[3] = {0, 0, 0};
  double frac[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < g.n; ++a) {
    const double t = x[a] / g.h() - 0.5;
    const int i = std::clamp(static_cast<int>(std::floor(t)), 0, g.N - 2);
    base[a] = i;
    frac[a] = t - i;
  }
  Stencil s;
  s.count = 1 << g.n;
  for (int c = 0; c < s.count; ++c) {
    double weight = 1.0;
    Index ix{0, 0, 0};
    for (int a = 0; a < g.n; ++a) {
      const int bit = (c >> a) & 1;
      ix[a] = base[a] + bit;
      weight *= bit ? frac[a] : 1.0 - frac[a];
    }
    s.idx[c] = g.ravel(ix);
    s.w[c] = weight;
  }
  return s;
}

bool inner_node(const IndexBox& box, const Index& ix, int n) {
  for (int a = 0; a < n; ++a)
    if (ix[a] <= box.lo[a] || ix[a] >= box.hi[a] - 1) return false;
  return true;
}

// Centred difference of f along axis a at an inner node.
double centered(const RealField& f, std::size_t idx, std::size_t stride, double h) {
  return (f[idx + stride] - f[idx - stride]) / (2.0 * h);
}

}  // namespace

double centered_second_moment(double R, int k) {
  return R * R * (1.0 - 1.0 / (static_cast<double>(k) * k)) / 12.0;
}

GaugePair iwatsuka(const MagneticData& B, const Cube& Q, int quad_order) {
  const GridSpec& g = B.abs_b.grid();
  const int n = g.n;
  if (!Q.inside_box(g)) throw Error(ErrorCode::kInvalidArgument, "gauge cube must be interior");
  const Rule rule = gauss_rule(quad_order);
  const auto pairs = MagneticData::pairs(n);

  GaugePair out;
  out.Q = Q;
  out.quad_order = quad_order;
  out.box = Q.clip(g);
  if (out.box.empty()) throw Error(ErrorCode::kDegenerate, "degenerate cube");
  for (int j = 0; j < n; ++j) out.h.components.emplace_back(g);
  out.phi = RealField(g);

  std::vector<std::size_t> nodes;
  out.box.for_each(g, [&](std::size_t idx) { nodes.push_back(idx); });
  std::vector<Point> pos(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) pos[i] = g.position(nodes[i]);
  const double K = static_cast<double>(nodes.size());

  for (std::size_t xi = 0; xi < nodes.size(); ++xi) {
    const Point& x = pos[xi];
    std::array<double, 3> hacc{0.0, 0.0, 0.0};
    double phiacc = 0.0;
    for (const Point& y : pos) {
      Point d{0.0, 0.0, 0.0};
      for (int a = 0; a < n; ++a) d[a] = x[a] - y[a];
      for (std::size_t q = 0; q < rule.t.size(); ++q) {
        const double t = rule.t[q];
        Point p{0.0, 0.0, 0.0};
        for (int a = 0; a < n; ++a) p[a] = y[a] + t * d[a];
        const Stencil s = make_stencil(g, p);
        for (std::size_t c = 0; c < pairs.size(); ++c) {
          const auto [j, k] = pairs[c];
          const double bjk = s.eval(B.b[c]) * t * rule.w[q];
          hacc[j] += d[k] * bjk;
          hacc[k] -= d[j] * bjk;
        }
        double line = 0.0;
        for (int a = 0; a < n; ++a) line += d[a] * s.eval(B.a.components[a]);
        phiacc += line * rule.w[q];
      }
    }
    for (int j = 0; j < n; ++j) out.h.components[j][nodes[xi]] = hacc[j] / K;
    out.phi[nodes[xi]] = phiacc / K;
  }

  double mean = 0.0;
  for (std::size_t idx : nodes) mean += out.phi[idx];
  mean /= K;
  for (std::size_t idx : nodes) out.phi[idx] -= mean;

  const double h = g.h();
  for (std::size_t idx : nodes) {
    const Index ix = g.unravel(idx);
    if (!inner_node(out.box, ix, n)) continue;
    for (std::size_t c = 0; c < pairs.size(); ++c) {
      const auto [j, k] = pairs[c];
      const double curl_h = centered(out.h.components[j], idx, g.stride(k), h) -
                            centered(out.h.components[k], idx, g.stride(j), h);
      out.curl_residual = std::max(out.curl_residual, std::abs(curl_h - B.b[c][idx]));
    }
    for (int j = 0; j < n; ++j) {
      const double target = B.a.components[j][idx] - centered(out.phi, idx, g.stride(j), h);
      out.potential_residual =
          std::max(out.potential_residual, std::abs(out.h.components[j][idx] - target));
    }
  }
  return out;
}

GaugeBound gauge_bound(const GaugePair& pair, const MagneticData& B) {
  const GridSpec& g = B.abs_b.grid();
  const int n = g.n;
  double hsum = 0.0, bsum = 0.0;
  std::size_t count = 0;
  pair.box.for_each(g, [&](std::size_t idx) {
    double h2 = 0.0;
    for (int j = 0; j < n; ++j) h2 += pair.h.components[j][idx] * pair.h.components[j][idx];
    hsum += std::pow(h2, 0.5 * n);
    bsum += std::pow(B.abs_b[idx], 0.5 * n);
    ++count;
  });
  GaugeBound out;
  out.h_norm = std::pow(hsum / count, 1.0 / n);
  out.field_norm = std::pow(bsum / count, 2.0 / n);
  if (out.field_norm > 0.0) out.ratio = out.h_norm / (pair.Q.R * out.field_norm);
  return out;
}

}  // namespace mslab
