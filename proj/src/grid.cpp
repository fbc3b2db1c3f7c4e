#include "grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mslab {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

// Grid points on the cube boundary are excluded; this slack keeps the
// decision stable against rounding in c +- R/2.
constexpr double kClipSlack = 1e-9;

template <class T>
T average_over(const Field<T>& f, const Cube& q) {
  const IndexBox box = q.clip(f.grid());
  if (box.empty()) throw Error(ErrorCode::kDegenerate, "degenerate cube");
  T acc{};
  box.for_each(f.grid(), [&](std::size_t idx) { acc += f[idx]; });
  return acc / static_cast<double>(box.count(f.grid().n));
}

template <class T>
double norm_of(const Field<T>& f, double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "lp_norm requires p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0.0;
  if (p == 2.0) {
    for (const auto& v : f.values()) acc += std::norm(v);
  } else {
    for (const auto& v : f.values()) acc += std::pow(std::abs(v), p);
  }
  return std::pow(acc * f.grid().cell_volume(), 1.0 / p);
}

}  // namespace

GridSpec GridSpec::make(int n, int N, double L) {
  require(n == 2 || n == 3, "grid dimension must be 2 or 3");
  require(is_power_of_two(N) && N >= 8 && N <= 128,
          "points per axis must be a power of two in [8, 128]");
  require(L > 0.0, "box length must be positive");
  return GridSpec{n, N, L};
}

double GridSpec::cell_volume() const { return std::pow(h(), n); }

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int a = 0; a < n; ++a) s *= static_cast<std::size_t>(N);
  return s;
}

std::size_t GridSpec::stride(int axis) const {
  std::size_t s = 1;
  for (int a = n - 1; a > axis; --a) s *= static_cast<std::size_t>(N);
  return s;
}

Index GridSpec::unravel(std::size_t idx) const {
  Index ix{0, 0, 0};
  for (int a = n - 1; a >= 0; --a) {
    ix[a] = static_cast<int>(idx % N);
    idx /= N;
  }
  return ix;
}

std::size_t GridSpec::ravel(const Index& ix) const {
  std::size_t idx = 0;
  for (int a = 0; a < n; ++a) idx = idx * N + static_cast<std::size_t>(ix[a]);
  return idx;
}

Point GridSpec::position(std::size_t idx) const {
  const Index ix = unravel(idx);
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < n; ++a) x[a] = coord(ix[a]);
  return x;
}

int GridSpec::levels() const {
  int l = 0;
  while ((1 << l) < N) ++l;
  return l;
}

bool IndexBox::empty() const {
  for (int a = 0; a < 3; ++a)
    if (hi[a] <= lo[a]) return true;
  return false;
}

std::size_t IndexBox::count(int n) const {
  if (empty()) return 0;
  std::size_t c = 1;
  for (int a = 0; a < n; ++a) c *= static_cast<std::size_t>(hi[a] - lo[a]);
  return c;
}

bool IndexBox::contains(const Index& ix, int n) const {
  for (int a = 0; a < n; ++a)
    if (ix[a] < lo[a] || ix[a] >= hi[a]) return false;
  return true;
}

void IndexBox::for_each(const GridSpec& grid,
                        const std::function<void(std::size_t)>& fn) const {
  if (empty()) return;
  const int k_lo = grid.n == 3 ? lo[2] : 0;
  const int k_hi = grid.n == 3 ? hi[2] : 1;
  for (int i = lo[0]; i < hi[0]; ++i)
    for (int j = lo[1]; j < hi[1]; ++j)
      for (int k = k_lo; k < k_hi; ++k) {
        Index ix{i, j, k};
        fn(grid.ravel(ix));
      }
}

IndexBox Cube::clip(const GridSpec& grid) const {
  IndexBox box;
  const double h = grid.h();
  for (int a = 0; a < 3; ++a) {
    if (a >= grid.n) {
      box.lo[a] = 0;
      box.hi[a] = 1;
      continue;
    }
    // Points with |(i + 1/2) h - c| < R/2.
    const double lo = (center[a] - 0.5 * R) / h - 0.5;
    const double hi = (center[a] + 0.5 * R) / h - 0.5;
    int ilo = static_cast<int>(std::ceil(lo + kClipSlack));
    int ihi = static_cast<int>(std::floor(hi - kClipSlack));
    ilo = std::max(ilo, 0);
    ihi = std::min(ihi, grid.N - 1);
    box.lo[a] = ilo;
    box.hi[a] = ihi + 1;
  }
  return box;
}

bool Cube::inside_box(const GridSpec& grid) const {
  const double tol = 1e-9 * grid.h();
  for (int a = 0; a < grid.n; ++a) {
    if (center[a] - 0.5 * R < -tol) return false;
    if (center[a] + 0.5 * R > grid.L + tol) return false;
  }
  return true;
}

double Cube::volume(int n) const { return std::pow(R, n); }

RealField sample(const GridSpec& grid, const std::function<double(const Point&)>& fn) {
  RealField f(grid);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = fn(grid.position(i));
  return f;
}

ComplexField sample_complex(const GridSpec& grid,
                            const std::function<complex(const Point&)>& fn) {
  ComplexField f(grid);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = fn(grid.position(i));
  return f;
}

ComplexField to_complex(const RealField& f) {
  ComplexField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
  return out;
}

RealField modulus(const ComplexField& f) {
  RealField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::abs(f[i]);
  return out;
}

double cube_average(const RealField& f, const Cube& q) { return average_over(f, q); }
complex cube_average(const ComplexField& f, const Cube& q) { return average_over(f, q); }

double lp_norm(const RealField& f, double p) { return norm_of(f, p); }
double lp_norm(const ComplexField& f, double p) { return norm_of(f, p); }

VectorField fd_gradient(const RealField& f) {
  const GridSpec& g = f.grid();
  const double h = g.h();
  VectorField grad;
  for (int a = 0; a < g.n; ++a) {
    RealField d(g);
    const std::size_t s = g.stride(a);
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
      const int i = g.unravel(idx)[a];
      if (i == 0) {
        d[idx] = (-11.0 * f[idx] + 18.0 * f[idx + s] - 9.0 * f[idx + 2 * s] + 2.0 * f[idx + 3 * s]) / (6.0 * h);
      } else if (i == g.N - 1) {
        d[idx] = (11.0 * f[idx] - 18.0 * f[idx - s] + 9.0 * f[idx - 2 * s] - 2.0 * f[idx - 3 * s]) / (6.0 * h);
      } else {
        d[idx] = (f[idx + s] - f[idx - s]) / (2.0 * h);
      }
    }
    grad.components.push_back(std::move(d));
  }
  return grad;
}

std::vector<Cube> dyadic_level(const GridSpec& grid, int level) {
  std::vector<Cube> cubes;
  const int per_axis = 1 << level;
  const double s = grid.L / per_axis;
  const int kmax = grid.n == 3 ? per_axis : 1;
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j)
      for (int k = 0; k < kmax; ++k) {
        Cube q;
        q.R = s;
        q.center = {(i + 0.5) * s, (j + 0.5) * s, grid.n == 3 ? (k + 0.5) * s : 0.0};
        cubes.push_back(q);
      }
  return cubes;
}

std::vector<Cube> cube_family(const GridSpec& grid, CubeStrategy strategy) {
  std::vector<Cube> family;
  for (int level = 0; level <= grid.levels(); ++level) {
    const std::vector<Cube> base = dyadic_level(grid, level);
    family.insert(family.end(), base.begin(), base.end());
    if (strategy != CubeStrategy::kDyadicHalfShifted) continue;
    const double s = grid.L / (1 << level);
    for (int mask = 1; mask < (1 << grid.n); ++mask) {
      for (const Cube& q : base) {
        Cube shifted = q;
        for (int a = 0; a < grid.n; ++a)
          if (mask & (1 << a)) shifted.center[a] += 0.5 * s;
        if (!shifted.clip(grid).empty()) family.push_back(shifted);
      }
    }
  }
  return family;
}

double interpolate(const RealField& f, const Point& x) {
  const GridSpec& g = f.grid();
  const double h = g.h();
  int base[3] = {0, 0, 0};
  double w[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < g.n; ++a) {
    const double t = x[a] / h - 0.5;
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 0, g.N - 2);
    base[a] = i;
    w[a] = t - i;
  }
  double acc = 0.0;
  const int corners = 1 << g.n;
  for (int c = 0; c < corners; ++c) {
    double weight = 1.0;
    Index ix{0, 0, 0};
    for (int a = 0; a < g.n; ++a) {
      const int bit = (c >> a) & 1;
      ix[a] = base[a] + bit;
      weight *= bit ? w[a] : 1.0 - w[a];
    }
    acc += weight * f[g.ravel(ix)];
  }
  return acc;
}

BoxSum::BoxSum(const RealField& f) : grid_(f.grid()) {
  const int M = grid_.N + 1;
  const int K = grid_.n == 3 ? M : 2;
  table_.assign(static_cast<std::size_t>(M) * M * K, 0.0);
  for (int i = 1; i < M; ++i)
    for (int j = 1; j < M; ++j)
      for (int k = 1; k < K; ++k) {
        Index ix{i - 1, j - 1, grid_.n == 3 ? k - 1 : 0};
        double v = f[grid_.ravel(ix)];
        v += table_[at(i - 1, j, k)] + table_[at(i, j - 1, k)] + table_[at(i, j, k - 1)];
        v -= table_[at(i - 1, j - 1, k)] + table_[at(i - 1, j, k - 1)] +
             table_[at(i, j - 1, k - 1)];
        v += table_[at(i - 1, j - 1, k - 1)];
        table_[at(i, j, k)] = v;
      }
}

std::size_t BoxSum::at(int i, int j, int k) const {
  const std::size_t M = static_cast<std::size_t>(grid_.N) + 1;
  const std::size_t K = grid_.n == 3 ? M : 2;
  return (static_cast<std::size_t>(i) * M + j) * K + k;
}

double BoxSum::sum(const IndexBox& box) const {
  if (box.empty()) return 0.0;
  const int i0 = box.lo[0], i1 = box.hi[0];
  const int j0 = box.lo[1], j1 = box.hi[1];
  const int k0 = grid_.n == 3 ? box.lo[2] : 0;
  const int k1 = grid_.n == 3 ? box.hi[2] : 1;
  return table_[at(i1, j1, k1)] - table_[at(i0, j1, k1)] - table_[at(i1, j0, k1)] -
         table_[at(i1, j1, k0)] + table_[at(i0, j0, k1)] + table_[at(i0, j1, k0)] +
         table_[at(i1, j0, k0)] - table_[at(i0, j0, k0)];
}

}  // namespace mslab
