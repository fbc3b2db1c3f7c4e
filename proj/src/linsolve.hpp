#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "error.hpp"

namespace mslab {

struct CGResult {
  std::vector<std::complex<double>> x;
  std::size_t iterations = 0;
  double relative_residual = 0.0;  // true ||b - Ax|| / ||b||
};

// Conjugate gradients for a Hermitian positive definite operator given as
// apply(in, out). Stops on the recomputed true residual; the recursion is
// restarted from it whenever the recursive estimate drifts below the target.
template <class Apply>
CGResult conjugate_gradient(Apply&& apply, const std::vector<std::complex<double>>& b, double tol,
                            std::size_t max_iter) {
  using cx = std::complex<double>;
  require(tol > 0.0, "tolerance must be positive");
  const std::size_t M = b.size();
  auto dot = [M](const std::vector<cx>& u, const std::vector<cx>& v) {
    cx acc = 0.0;
    for (std::size_t i = 0; i < M; ++i) acc += std::conj(u[i]) * v[i];
    return acc;
  };
  auto norm = [&](const std::vector<cx>& u) { return std::sqrt(std::real(dot(u, u))); };

  CGResult out;
  out.x.assign(M, cx(0.0));
  const double bnorm = norm(b);
  if (bnorm == 0.0) return out;
  const double target = tol * bnorm;

  std::vector<cx> r = b, p(M), Ap(M), Ax(M);
  std::size_t it = 0;
  double true_res = bnorm;
  while (it < max_iter) {
    p = r;
    double rr = std::real(dot(r, r));
    while (it < max_iter && std::sqrt(rr) > target) {
      apply(p.data(), Ap.data());
      const double pAp = std::real(dot(p, Ap));
      if (!(pAp > 0.0))
        throw Error(ErrorCode::kNotConverged, "operator is not positive definite on the Krylov space");
      const double step = rr / pAp;
      for (std::size_t i = 0; i < M; ++i) {
        out.x[i] += step * p[i];
        r[i] -= step * Ap[i];
      }
      const double rr_next = std::real(dot(r, r));
      const double beta = rr_next / rr;
      rr = rr_next;
      for (std::size_t i = 0; i < M; ++i) p[i] = r[i] + beta * p[i];
      ++it;
    }
    apply(out.x.data(), Ax.data());
    for (std::size_t i = 0; i < M; ++i) r[i] = b[i] - Ax[i];
    true_res = norm(r);
    if (true_res <= target) {
      out.iterations = it;
      out.relative_residual = true_res / bnorm;
      return out;
    }
    ++it;  // a restart counts against the budget
  }
  throw Error(ErrorCode::kNotConverged,
              "conjugate gradients did not converge: relative residual " +
                  std::to_string(true_res / bnorm) + " after " + std::to_string(it) + " iterations");
}

}  // namespace mslab
