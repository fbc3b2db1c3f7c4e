#include "probes.hpp"

#include <cmath>
#include <functional>
#include <cstdio>
#include <numbers>
#include <random>

namespace mslab {

namespace {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double radius(const GridSpec& g, const Point& x, const Point& c) {
  double r2 = 0.0;
  for (int a = 0; a < g.n; ++a) r2 += (x[a] - c[a]) * (x[a] - c[a]);
  return std::sqrt(r2);
}

double compact_bump(double r, double width) {
  const double s = r / width;
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

Point random_point(const GridSpec& g, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo * g.L, hi * g.L);
  Point c{0.0, 0.0, 0.0};
  for (int a = 0; a < g.n; ++a) c[a] = u(rng);
  return c;
}

}  // namespace

const char* probe_kind_name(ProbeKind kind) {
  switch (kind) {
    case ProbeKind::kBump: return "bump";
    case ProbeKind::kWave: return "wave";
    case ProbeKind::kBlobs: return "blobs";
    case ProbeKind::kMollifiedCube: return "cube";
  }
  return "unknown";
}

double probe_window(const GridSpec& g, const Point& x) {
  const double edge = g.L / 16.0;
  double w = 1.0;
  for (int a = 0; a < g.n; ++a) {
    const double d = std::min(x[a], g.L - x[a]);
    w *= smooth_step((d - edge) / edge);
  }
  return w;
}

std::vector<ComplexField> ProbeFamily::fields() const {
  std::vector<ComplexField> out;
  out.reserve(members.size());
  for (const Probe& p : members) out.push_back(p.field);
  return out;
}

ProbeFamily make_probes(const GridSpec& g, std::uint64_t seed, std::size_t size) {
  require(size > 0, "probe family must not be empty");
  ProbeFamily family;
  family.seed = seed;
  const double L = g.L;
  const double two_pi = 2.0 * std::numbers::pi;
  static constexpr double kBlobScales[3] = {0.06, 0.1, 0.16};

  for (std::size_t i = 0; i < size; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), std::uint32_t{0x6d736c}};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    Probe probe;
    probe.kind = static_cast<ProbeKind>(i % 4);
    char name[32];
    std::snprintf(name, sizeof(name), "%s-%03zu", probe_kind_name(probe.kind), i);
    probe.id = name;

    std::function<complex(const Point&)> fn;
    switch (probe.kind) {
      case ProbeKind::kBump: {
        const Point c = random_point(g, rng, 0.3, 0.7);
        const double r = (0.12 + 0.18 * unit(rng)) * L;
        fn = [=, &g](const Point& x) { return complex(compact_bump(radius(g, x, c), r)); };
        break;
      }
      case ProbeKind::kWave: {
        const Point c = random_point(g, rng, 0.3, 0.7);
        const double r = (0.12 + 0.18 * unit(rng)) * L;
        const double kmag = two_pi * (1.0 + 2.0 * unit(rng)) / L;
        Point dir{0.0, 0.0, 0.0};
        double norm = 0.0;
        for (int a = 0; a < g.n; ++a) {
          dir[a] = normal(rng);
          norm += dir[a] * dir[a];
        }
        norm = std::sqrt(norm);
        for (int a = 0; a < g.n; ++a) dir[a] *= kmag / norm;
        fn = [=, &g](const Point& x) {
          double phase = 0.0;
          for (int a = 0; a < g.n; ++a) phase += dir[a] * x[a];
          return compact_bump(radius(g, x, c), r) * std::polar(1.0, phase);
        };
        break;
      }
      case ProbeKind::kBlobs: {
        const double sigma = kBlobScales[(i / 4) % 3] * L;
        struct Blob {
          Point c;
          complex amp;
        };
        std::vector<Blob> blobs(6);
        for (Blob& b : blobs) {
          b.c = random_point(g, rng, 0.2, 0.8);
          b.amp = complex(normal(rng), normal(rng));
        }
        fn = [=, &g](const Point& x) {
          complex acc = 0.0;
          for (const Blob& b : blobs) {
            const double r = radius(g, x, b.c);
            acc += b.amp * std::exp(-0.5 * r * r / (sigma * sigma));
          }
          return acc;
        };
        break;
      }
      case ProbeKind::kMollifiedCube: {
        const Point c = random_point(g, rng, 0.35, 0.65);
        const double side = (0.2 + 0.25 * unit(rng)) * L;
        const double delta = 0.06 * L;
        fn = [=, &g](const Point& x) {
          double v = 1.0;
          for (int a = 0; a < g.n; ++a) {
            const double lo = (x[a] - (c[a] - 0.5 * side)) / delta;
            const double hi = ((c[a] + 0.5 * side) - x[a]) / delta;
            v *= 0.25 * (1.0 + std::erf(lo)) * (1.0 + std::erf(hi));
          }
          return complex(v);
        };
        break;
      }
    }
    probe.field = sample_complex(g, [&](const Point& x) { return probe_window(g, x) * fn(x); });
    family.members.push_back(std::move(probe));
  }
  return family;
}

ComplexField random_complex_field(const GridSpec& g, std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    std::uint32_t{0x72616e64}};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexField out(g);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double re = normal(rng);
    out[i] = complex(re, normal(rng));
  }
  return out;
}

ProbeFamily filter_probes(const ProbeFamily& family, const std::vector<ProbeKind>& kinds) {
  ProbeFamily out;
  out.seed = family.seed;
  for (const Probe& p : family.members)
    for (ProbeKind k : kinds)
      if (p.kind == k) out.members.push_back(p);
  return out;
}

}  // namespace mslab
