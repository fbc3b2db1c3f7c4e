#pragma once

// Dense functional calculus for the discrete operator: full Hermitian
// eigendecomposition and spectral powers, plus the matrix-free inverse.

#include <vector>

#include "magnetic.hpp"

namespace mslab {

inline constexpr std::size_t kDenseLimit = 8192;

struct SpectralDecomposition {
  GridSpec grid;
  std::size_t M = 0;
  std::vector<double> eigenvalues;  // ascending
  std::vector<complex> vectors;     // column-major M x M, orthonormal in the plain dot product
};

SpectralDecomposition eig(const MagneticOperator& H);

// sum_i lambda_i^s <v_i, f> v_i.
ComplexField power_apply(const SpectralDecomposition& dec, double s, const ComplexField& f);
// Same for several fields at once.
std::vector<ComplexField> power_apply(const SpectralDecomposition& dec, double s,
                                      const std::vector<ComplexField>& fs);

ComplexField solve_H(const MagneticOperator& H, const ComplexField& f, double tol);

}  // namespace mslab
