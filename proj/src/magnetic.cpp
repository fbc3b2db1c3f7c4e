#include "magnetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "linsolve.hpp"

namespace mslab {

namespace {

constexpr complex kI{0.0, 1.0};

// Visits every edge of one axis with its multi-index (ix[axis] in 0..N).
template <class Fn>
void for_each_edge(const GridSpec& g, int axis, Fn&& fn) {
  std::array<int, 3> ext{1, 1, 1};
  for (int a = 0; a < g.n; ++a) ext[a] = a == axis ? g.N + 1 : g.N;
  std::size_t total = 1;
  for (int a = 0; a < g.n; ++a) total *= static_cast<std::size_t>(ext[a]);
  Index ix{0, 0, 0};
  for (std::size_t e = 0; e < total; ++e) {
    fn(e, static_cast<const Index&>(ix));
    for (int a = g.n - 1; a >= 0; --a) {
      if (++ix[a] < ext[a]) break;
      ix[a] = 0;
    }
  }
}

Point edge_midpoint(const GridSpec& g, int axis, const Index& ix) {
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < g.n; ++a) x[a] = a == axis ? ix[a] * g.h() : g.coord(ix[a]);
  return x;
}

// Node indices of the two ends of an edge; nullopt for a ghost end.
struct EdgeEnds {
  std::optional<std::size_t> prev;
  std::optional<std::size_t> next;
};

EdgeEnds edge_ends(const GridSpec& g, int axis, Index ix) {
  EdgeEnds ends;
  const int e = ix[axis];
  if (e < g.N) ends.next = g.ravel(ix);
  if (e >= 1) {
    ix[axis] = e - 1;
    ends.prev = g.ravel(ix);
  }
  return ends;
}

}  // namespace

std::vector<std::pair<int, int>> MagneticData::pairs(int n) {
  std::vector<std::pair<int, int>> out;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) out.emplace_back(j, k);
  return out;
}

double MagneticData::component(int j, int k, std::size_t idx) const {
  if (j == k) return 0.0;
  const auto list = pairs(a.dim());
  for (std::size_t p = 0; p < list.size(); ++p) {
    if (list[p] == std::make_pair(j, k)) return b[p][idx];
    if (list[p] == std::make_pair(k, j)) return -b[p][idx];
  }
  throw Error(ErrorCode::kInternal, "field component out of range");
}

MagneticData curl(const VectorField& a) {
  require(!a.components.empty(), "potential has no components");
  const GridSpec& g = a.grid();
  require(a.dim() == g.n, "potential must have one component per axis");
  std::vector<VectorField> grads;
  for (const RealField& c : a.components) grads.push_back(fd_gradient(c));

  MagneticData out;
  out.a = a;
  out.abs_b = RealField(g);
  for (const auto& [j, k] : MagneticData::pairs(g.n)) {
    RealField bjk(g);
    for (std::size_t i = 0; i < g.size(); ++i)
      bjk[i] = grads[j].components[k][i] - grads[k].components[j][i];
    for (std::size_t i = 0; i < g.size(); ++i) out.abs_b[i] += 2.0 * std::abs(bjk[i]);
    out.b.push_back(std::move(bjk));
  }
  return out;
}

VectorField sample_potential(const GridSpec& grid, const PotentialFn& a) {
  VectorField out;
  for (int j = 0; j < grid.n; ++j)
    out.components.push_back(sample(grid, [&](const Point& x) { return a(j, x); }));
  return out;
}

RealField grad_b_magnitude(const MagneticData& B) {
  const GridSpec& g = B.abs_b.grid();
  RealField out(g);
  for (const RealField& bjk : B.b) {
    const VectorField grad = fd_gradient(bjk);
    for (std::size_t i = 0; i < g.size(); ++i) {
      double s = 0.0;
      for (const RealField& c : grad.components) s += c[i] * c[i];
      out[i] += 2.0 * std::sqrt(s);
    }
  }
  return out;
}

EdgeField::EdgeField(const GridSpec& grid, int axis) : grid_(grid), axis_(axis) {
  require(axis >= 0 && axis < grid.n, "edge axis out of range");
  std::size_t stride = 1;
  for (int a = grid.n - 1; a >= 0; --a) {
    strides_[a] = stride;
    stride *= static_cast<std::size_t>(a == axis ? grid.N + 1 : grid.N);
  }
  values_.assign(stride, complex(0.0));
}

std::size_t EdgeField::index(const Index& ix) const {
  std::size_t idx = 0;
  for (int a = 0; a < grid_.n; ++a) idx += static_cast<std::size_t>(ix[a]) * strides_[a];
  return idx;
}

double EdgeField::lp_norm(double p) const {
  require(p >= 1.0, "lp_norm requires p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const complex& v : values_) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0.0;
  for (const complex& v : values_) acc += std::pow(std::abs(v), p);
  return std::pow(acc * grid_.cell_volume(), 1.0 / p);
}

LinkField LinkField::from_potential(const GridSpec& grid, const PotentialFn& a) {
  LinkField out;
  out.grid_ = grid;
  const double h = grid.h();
  for (int j = 0; j < grid.n; ++j) {
    EdgeField U(grid, j);
    for_each_edge(grid, j, [&](std::size_t e, const Index& ix) {
      U[e] = std::polar(1.0, -h * a(j, edge_midpoint(grid, j, ix)));
    });
    out.links_.push_back(std::move(U));
  }
  return out;
}

LinkField LinkField::from_nodes(const VectorField& a) {
  const GridSpec& g = a.grid();
  return from_potential(g, [&](int j, const Point& x) { return interpolate(a.components[j], x); });
}

LinkField LinkField::trivial(const GridSpec& grid) {
  return from_potential(grid, [](int, const Point&) { return 0.0; });
}

LinkField LinkField::gauge_transformed(const RealField& phi) const {
  require(phi.grid() == grid_, "gauge function lives on a different grid");
  LinkField out = *this;
  for (int j = 0; j < grid_.n; ++j) {
    EdgeField& U = out.links_[j];
    for_each_edge(grid_, j, [&](std::size_t e, const Index& ix) {
      const EdgeEnds ends = edge_ends(grid_, j, ix);
      // A ghost end copies the phase of its neighbour.
      const double prev = phi[ends.prev ? *ends.prev : *ends.next];
      const double next = phi[ends.next ? *ends.next : *ends.prev];
      U[e] *= std::polar(1.0, prev - next);
    });
  }
  return out;
}

double LinkField::max_modulus_defect() const {
  double m = 0.0;
  for (const EdgeField& U : links_)
    for (const complex& v : U.raw()) m = std::max(m, std::abs(std::abs(v) - 1.0));
  return m;
}

MagneticOperator::MagneticOperator(LinkField links, RealField V, double shift)
    : links_(std::move(links)), V_(std::move(V)), shift_(shift) {
  require(V_.grid() == links_.grid(), "potential and links live on different grids");
  require(shift >= 0.0, "shift must be nonnegative");
  for (double v : V_.values())
    require(v >= 0.0 && std::isfinite(v), "electric potential must be nonnegative");
}

MagneticOperator assemble(const LinkField& links, const RealField& V, double shift) {
  return MagneticOperator(links, V, shift);
}

void MagneticOperator::apply(const complex* u, complex* out) const {
  const GridSpec& g = grid();
  const double inv_h2 = 1.0 / (g.h() * g.h());
  for_each_node(g, [&](std::size_t idx, const Index& ix) {
    complex acc = (V_[idx] + shift_) * u[idx];
    for (int j = 0; j < g.n; ++j) {
      const EdgeField& U = links_.axis(j);
      const std::size_t s = g.stride(j);
      const int i = ix[j];
      complex lap = 2.0 * u[idx];
      Index e = ix;
      if (i + 1 < g.N) {
        e[j] = i + 1;
        lap -= U[U.index(e)] * u[idx + s];
      }
      if (i > 0) {
        e[j] = i;
        lap -= std::conj(U[U.index(e)]) * u[idx - s];
      }
      acc += lap * inv_h2;
    }
    out[idx] = acc;
  });
}

ComplexField MagneticOperator::apply(const ComplexField& u) const {
  require(u.grid() == grid(), "field lives on a different grid");
  ComplexField out(grid());
  apply(u.data(), out.data());
  return out;
}

EdgeField MagneticOperator::covariant(int j, const ComplexField& u) const {
  const GridSpec& g = grid();
  const EdgeField& U = links_.axis(j);
  EdgeField out(g, j);
  const double h = g.h();
  for_each_edge(g, j, [&](std::size_t e, const Index& ix) {
    const EdgeEnds ends = edge_ends(g, j, ix);
    const complex next = ends.next ? U[e] * u[*ends.next] : complex(0.0);
    const complex prev = ends.prev ? u[*ends.prev] : complex(0.0);
    out[e] = -kI * (next - prev) / h;
  });
  return out;
}

ComplexField MagneticOperator::covariant_adjoint(const EdgeField& v) const {
  const GridSpec& g = grid();
  const int j = v.axis();
  const EdgeField& U = links_.axis(j);
  ComplexField out(g);
  const double h = g.h();
  // (L_j^* v)(y) = (i/h) (conj(U(y)) v(y) - v(y+1)), edges y and y+1 flank node y.
  for_each_node(g, [&](std::size_t idx, const Index& ix) {
    Index e = ix;
    const std::size_t lower = U.index(e);
    e[j] = ix[j] + 1;
    const std::size_t upper = U.index(e);
    out[idx] = kI * (std::conj(U[lower]) * v[lower] - v[upper]) / h;
  });
  return out;
}

ComplexField MagneticOperator::covariant_centered(int j, const ComplexField& u) const {
  const EdgeField Lu = covariant(j, u);
  const GridSpec& g = grid();
  ComplexField out(g);
  for_each_node(g, [&](std::size_t idx, const Index& ix) {
    Index e = ix;
    const std::size_t lower = Lu.index(e);
    e[j] = ix[j] + 1;
    out[idx] = 0.5 * (Lu[lower] + Lu[Lu.index(e)]);
  });
  return out;
}

ComplexField MagneticOperator::covariant_centered_adjoint(int j, const ComplexField& v) const {
  const GridSpec& g = grid();
  EdgeField spread(g, j);
  for_each_node(g, [&](std::size_t idx, const Index& ix) {
    Index e = ix;
    spread[spread.index(e)] += 0.5 * v[idx];
    e[j] = ix[j] + 1;
    spread[spread.index(e)] += 0.5 * v[idx];
  });
  return covariant_adjoint(spread);
}

RealField MagneticOperator::covariant_density(int j, const ComplexField& u) const {
  const GridSpec& g = grid();
  const EdgeField Lu = covariant(j, u);
  RealField out(g);
  for_each_node(g, [&](std::size_t idx, const Index& ix) {
    Index e = ix;
    const double lower = std::norm(Lu[Lu.index(e)]);
    e[j] = ix[j] + 1;
    const double upper = std::norm(Lu[Lu.index(e)]);
    double d = 0.5 * (lower + upper);
    if (ix[j] == 0) d += 0.5 * lower;
    if (ix[j] == g.N - 1) d += 0.5 * upper;
    out[idx] = d;
  });
  return out;
}

RealField MagneticOperator::covariant_density(const ComplexField& u) const {
  RealField out(grid());
  for (int j = 0; j < grid().n; ++j) {
    const RealField d = covariant_density(j, u);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += d[i];
  }
  return out;
}

EnergyParts MagneticOperator::energy(const ComplexField& u) const {
  const double dv = grid().cell_volume();
  EnergyParts e;
  for (int j = 0; j < grid().n; ++j) {
    const EdgeField Lu = covariant(j, u);
    for (const complex& v : Lu.raw()) e.kinetic += std::norm(v);
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    e.potential += V_[i] * std::norm(u[i]);
    mass += std::norm(u[i]);
  }
  e.kinetic *= dv;
  e.potential *= dv;
  e.shift = shift_ * mass * dv;
  e.form = inner_product_re(apply(u), u);
  return e;
}

std::vector<complex> MagneticOperator::dense() const {
  const GridSpec& g = grid();
  const std::size_t M = g.size();
  const double inv_h2 = 1.0 / (g.h() * g.h());
  std::vector<complex> A(M * M, complex(0.0));
  for_each_node(g, [&](std::size_t idx, const Index& ix) {
    A[idx + idx * M] = 2.0 * g.n * inv_h2 + V_[idx] + shift_;
    for (int j = 0; j < g.n; ++j) {
      const EdgeField& U = links_.axis(j);
      const std::size_t s = g.stride(j);
      Index e = ix;
      if (ix[j] + 1 < g.N) {
        e[j] = ix[j] + 1;
        A[idx + (idx + s) * M] = -U[U.index(e)] * inv_h2;
      }
      if (ix[j] > 0) {
        e[j] = ix[j];
        A[idx + (idx - s) * M] = -std::conj(U[U.index(e)]) * inv_h2;
      }
    }
  });
  return A;
}

complex inner_product(const ComplexField& a, const ComplexField& b) {
  complex acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc * a.grid().cell_volume();
}

double inner_product_re(const ComplexField& a, const ComplexField& b) {
  return std::real(inner_product(a, b));
}

DiamagneticReport diamagnetic_check(const ComplexField& u, const MagneticOperator& H) {
  const GridSpec& g = H.grid();
  DiamagneticReport rep;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  rep.max_gap = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const EdgeField Lu = H.covariant(j, u);
    for_each_edge(g, j, [&](std::size_t e, const Index& ix) {
      const EdgeEnds ends = edge_ends(g, j, ix);
      const double next = ends.next ? std::abs(u[*ends.next]) : 0.0;
      const double prev = ends.prev ? std::abs(u[*ends.prev]) : 0.0;
      const double lhs = std::abs(next - prev) / g.h();
      const double rhs = std::abs(Lu[e]);
      rep.max_violation = std::max(rep.max_violation, lhs - rhs);
      rep.max_gap = std::max(rep.max_gap, rhs - lhs);
      rep.scale = std::max(rep.scale, rhs);
      ++rep.edges;
    });
  }
  return rep;
}

KatoSimonReport kato_simon_check(const RealField& f, double lambda, const MagneticOperator& magnetic,
                                 const MagneticOperator& free, double tol) {
  require(lambda > 0.0, "resolvent parameter must be positive");
  require(magnetic.grid() == free.grid() && f.grid() == magnetic.grid(),
          "Kato-Simon inputs live on different grids");
  for (double v : f.values()) require(v >= 0.0, "Kato-Simon data must be nonnegative");
  const std::size_t M = f.size();
  const std::size_t budget = 10 * M;
  std::vector<complex> rhs(f.values().begin(), f.values().end());

  auto resolvent = [&](const MagneticOperator& H) {
    auto op = [&](const complex* in, complex* out) {
      H.apply(in, out);
      for (std::size_t i = 0; i < M; ++i) out[i] += lambda * in[i];
    };
    return conjugate_gradient(op, rhs, tol, budget).x;
  };
  const std::vector<complex> x = resolvent(magnetic);
  const std::vector<complex> y = resolvent(free);

  KatoSimonReport rep;
  rep.lambda = lambda;
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < M; ++i) {
    const double slack = std::real(y[i]) - std::abs(x[i]);
    rep.min_slack = std::min(rep.min_slack, slack);
    rep.max_gap = std::max(rep.max_gap, slack);
    rep.f_sup = std::max(rep.f_sup, f[i]);
  }
  return rep;
}

ShenReport check_shen_conditions(const MagneticData& B, const RealField* V) {
  const GridSpec& g = B.abs_b.grid();
  ShenReport rep;
  double total = 0.0;
  for (double v : B.abs_b.values()) total += v;
  rep.field_vanishes = total == 0.0;

  if (!rep.field_vanishes) {
    const AuxEvaluator m(Weight(B.abs_b));
    const RealField grad = grad_b_magnitude(B);
    for_each_node(g, [&](std::size_t idx, const Index& ix) {
      for (int a = 0; a < g.n; ++a)
        if (ix[a] == 0 || ix[a] == g.N - 1) return;
      if (grad[idx] == 0.0) return;
      const Point x = g.position(idx);
      const double mx = m.at(x).m;
      const double c = grad[idx] / (mx * mx * mx);
      if (c > rep.field_constant) {
        rep.field_constant = c;
        rep.field_worst = x;
      }
    });
  }

  if (V != nullptr) {
    require(V->grid() == g, "potential lives on a different grid");
    RealField w(g);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = B.abs_b[i] + (*V)[i];
    const AuxEvaluator m(Weight(std::move(w)));
    double worst = 0.0;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      if ((*V)[idx] == 0.0) continue;
      const Point x = g.position(idx);
      const double mx = m.at(x).m;
      const double c = (*V)[idx] / (mx * mx);
      if (c > worst) {
        worst = c;
        rep.potential_worst = x;
      }
    }
    rep.potential_constant = worst;
  }
  return rep;
}

double caccioppoli_check(const ComplexField& u, const ComplexField& f, const Cube& Q,
                         const MagneticOperator& H) {
  const GridSpec& g = H.grid();
  const Cube Q2 = Q.dilate(2.0);
  require(Q2.inside_box(g), "cube 2Q exceeds the box");
  const RealField density = H.covariant_density(u);
  const RealField& V = H.potential();
  double lhs = 0.0;
  Q.clip(g).for_each(g, [&](std::size_t i) { lhs += density[i] + V[i] * std::norm(u[i]); });
  double source = 0.0, mass = 0.0;
  Q2.clip(g).for_each(g, [&](std::size_t i) {
    source += std::abs(f[i]) * std::abs(u[i]);
    mass += std::norm(u[i]);
  });
  const double rhs = source + mass / (Q.R * Q.R);
  if (lhs == 0.0) return 0.0;
  if (rhs == 0.0) return std::numeric_limits<double>::infinity();
  return lhs / rhs;
}

}  // namespace mslab
