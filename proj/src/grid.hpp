#pragma once

// Uniform box discretization of [0,L]^n. Grid points sit at cell centres
// x_i = (i + 1/2) h, h = L/N; fields vanish outside the box (Dirichlet).

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "error.hpp"

namespace mslab {

using complex = std::complex<double>;
using Point = std::array<double, 3>;
using Index = std::array<int, 3>;

struct GridSpec {
  int n = 2;
  int N = 32;
  double L = 1.0;

  static GridSpec make(int n, int N, double L = 1.0);

  double h() const { return L / N; }
  double cell_volume() const;
  std::size_t size() const;
  std::size_t stride(int axis) const;
  double coord(int i) const { return (i + 0.5) * h(); }
  Point position(std::size_t idx) const;
  Index unravel(std::size_t idx) const;
  std::size_t ravel(const Index& ix) const;
  int levels() const;  // log2(N)

  bool operator==(const GridSpec&) const = default;
};

// Half-open per-axis index ranges [lo, hi).
struct IndexBox {
  Index lo{0, 0, 0};
  Index hi{1, 1, 1};

  bool empty() const;
  std::size_t count(int n) const;
  bool contains(const Index& ix, int n) const;
  void for_each(const GridSpec& grid,
                const std::function<void(std::size_t)>& fn) const;
};

struct Cube {
  Point center{0.0, 0.0, 0.0};
  double R = 1.0;

  Cube dilate(double lambda) const { return Cube{center, lambda * R}; }
  // Grid points strictly inside the cube, intersected with the box.
  IndexBox clip(const GridSpec& grid) const;
  bool inside_box(const GridSpec& grid) const;
  double volume(int n) const;
};

template <class T>
class Field {
 public:
  Field() = default;
  explicit Field(const GridSpec& grid, T fill = T{})
      : grid_(grid), values_(grid.size(), fill) {}
  Field(const GridSpec& grid, std::vector<T> values)
      : grid_(grid), values_(std::move(values)) {
    require(values_.size() == grid_.size(), "field size does not match grid");
  }

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }
  T* data() { return values_.data(); }
  const T* data() const { return values_.data(); }
  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  std::vector<T>& raw() { return values_; }
  const std::vector<T>& raw() const { return values_; }

 private:
  GridSpec grid_;
  std::vector<T> values_;
};

using RealField = Field<double>;
using ComplexField = Field<complex>;

struct VectorField {
  std::vector<RealField> components;

  const GridSpec& grid() const { return components.front().grid(); }
  int dim() const { return static_cast<int>(components.size()); }
};

// Visits every grid point in storage order with its multi-index.
template <class Fn>
void for_each_node(const GridSpec& grid, Fn&& fn) {
  Index ix{0, 0, 0};
  const std::size_t total = grid.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    fn(idx, static_cast<const Index&>(ix));
    for (int a = grid.n - 1; a >= 0; --a) {
      if (++ix[a] < grid.N) break;
      ix[a] = 0;
    }
  }
}

RealField sample(const GridSpec& grid, const std::function<double(const Point&)>& fn);
ComplexField sample_complex(const GridSpec& grid,
                            const std::function<complex(const Point&)>& fn);
ComplexField to_complex(const RealField& f);
RealField modulus(const ComplexField& f);

double cube_average(const RealField& f, const Cube& q);
complex cube_average(const ComplexField& f, const Cube& q);

double lp_norm(const RealField& f, double p);
double lp_norm(const ComplexField& f, double p);

// Centred second-order differences; third-order one-sided at the boundary layer,
// so the boundary does not spoil the second-order convergence of the interior.
VectorField fd_gradient(const RealField& f);

enum class CubeStrategy { kDyadic, kDyadicHalfShifted };

std::vector<Cube> cube_family(const GridSpec& grid, CubeStrategy strategy);
std::vector<Cube> dyadic_level(const GridSpec& grid, int level);

// Multilinear interpolation through the grid points (linear extrapolation
// in the half cell between the outermost points and the box wall).
double interpolate(const RealField& f, const Point& x);

// Summed-volume table for O(1) sums over index boxes.
class BoxSum {
 public:
  explicit BoxSum(const RealField& f);
  double sum(const IndexBox& box) const;

 private:
  GridSpec grid_;
  std::vector<double> table_;  // (N+1)^n entries
  std::size_t at(int i, int j, int k) const;
};

}  // namespace mslab
