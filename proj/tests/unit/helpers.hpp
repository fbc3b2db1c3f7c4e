#pragma once

#include <cmath>
#include <random>

#include "grid.hpp"

namespace testing {

inline mslab::RealField random_real(const mslab::GridSpec& g, std::uint64_t seed, double lo = 0.0,
                                    double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  mslab::RealField f(g);
  for (double& v : f.raw()) v = d(rng);
  return f;
}

inline mslab::ComplexField random_complex(const mslab::GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  mslab::ComplexField f(g);
  for (auto& v : f.raw()) v = {d(rng), d(rng)};
  return f;
}

inline double order(double coarse, double fine) { return std::log2(coarse / fine); }

}  // namespace testing
