#include "spectral.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>

#include "linsolve.hpp"

namespace mslab {

namespace {

constexpr double kInvertibilityFloor = 1e-12;

std::vector<double> spectral_weights(const SpectralDecomposition& dec, double s) {
  require(dec.M > 0, "empty spectral decomposition");
  if (s < 0.0 && dec.eigenvalues.front() <= kInvertibilityFloor)
    throw Error(ErrorCode::kNotInvertible, "operator not invertible");
  std::vector<double> w(dec.M);
  for (std::size_t i = 0; i < dec.M; ++i) {
    const double lam = std::max(dec.eigenvalues[i], 0.0);
    w[i] = s == 1.0 ? lam : std::pow(lam, s);
  }
  return w;
}

}  // namespace

SpectralDecomposition eig(const MagneticOperator& H) {
  const std::size_t M = H.dim();
  if (M > kDenseLimit)
    throw Error(ErrorCode::kTooLarge, "dense eigendecomposition too large: use iterative path");
  SpectralDecomposition dec;
  dec.grid = H.grid();
  dec.M = M;
  std::vector<complex> A = H.dense();
  dec.vectors.assign(M * M, complex(0.0));
  dec.eigenvalues.resize(M);
  std::vector<lapack_int> support(2 * M);
  lapack_int found = 0;
  const auto m = static_cast<lapack_int>(M);
  // zheevd from the bundled OpenBLAS returns wrong eigenvectors for M >= 1024; MRRR is used instead.
  const int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'A', 'U', m,
                                  reinterpret_cast<lapack_complex_double*>(A.data()), m, 0.0, 0.0, 0,
                                  0, 0.0, &found, dec.eigenvalues.data(),
                                  reinterpret_cast<lapack_complex_double*>(dec.vectors.data()), m,
                                  support.data());
  if (info != 0 || found != m)
    throw Error(ErrorCode::kNotConverged, "zheevr failed with info " + std::to_string(info));
  return dec;
}

std::vector<ComplexField> power_apply(const SpectralDecomposition& dec, double s,
                                      const std::vector<ComplexField>& fs) {
  const std::vector<double> w = spectral_weights(dec, s);
  const std::size_t M = dec.M;
  const std::size_t k = fs.size();
  if (k == 0) return {};
  std::vector<complex> F(M * k), C(M * k), out(M * k);
  for (std::size_t c = 0; c < k; ++c) {
    require(fs[c].size() == M, "field does not match the decomposition");
    std::copy(fs[c].raw().begin(), fs[c].raw().end(), F.begin() + c * M);
  }
  const complex one(1.0), zero(0.0);
  const auto m = static_cast<blasint>(M), kk = static_cast<blasint>(k);
  // C = V^H F, scale rows by lambda^s, out = V C.
  cblas_zgemm(CblasColMajor, CblasConjTrans, CblasNoTrans, m, kk, m, &one, dec.vectors.data(), m,
              F.data(), m, &zero, C.data(), m);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t i = 0; i < M; ++i) C[i + c * M] *= w[i];
  cblas_zgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, m, kk, m, &one, dec.vectors.data(), m,
              C.data(), m, &zero, out.data(), m);
  std::vector<ComplexField> result;
  result.reserve(k);
  for (std::size_t c = 0; c < k; ++c)
    result.emplace_back(dec.grid, std::vector<complex>(out.begin() + c * M, out.begin() + (c + 1) * M));
  return result;
}

ComplexField power_apply(const SpectralDecomposition& dec, double s, const ComplexField& f) {
  return power_apply(dec, s, std::vector<ComplexField>{f}).front();
}

ComplexField solve_H(const MagneticOperator& H, const ComplexField& f, double tol) {
  require(tol > 0.0, "tolerance must be positive");
  require(f.grid() == H.grid(), "field lives on a different grid");
  auto op = [&](const complex* in, complex* out) { H.apply(in, out); };
  CGResult res = conjugate_gradient(op, f.raw(), tol, 10 * H.dim());
  return ComplexField(H.grid(), std::move(res.x));
}

}  // namespace mslab
