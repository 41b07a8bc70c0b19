#include "kis/eig.hpp"

#include <lapacke.h>

#include <cmath>

namespace kis {

EigResult eig_dense(CVec a, std::size_t n, bool want_vectors) {
  if (a.size() != n * n) throw std::invalid_argument("eig_dense: size mismatch");
  EigResult res;
  res.values.resize(n);
  if (want_vectors) res.vectors.resize(n * n);

  lapack_int info = LAPACKE_zgeev(
      LAPACK_ROW_MAJOR, 'N', want_vectors ? 'V' : 'N', lapack_int(n),
      reinterpret_cast<lapack_complex_double*>(a.data()), lapack_int(n),
      reinterpret_cast<lapack_complex_double*>(res.values.data()), nullptr,
      lapack_int(n),  // row-major LAPACKE checks ldvl >= n even for jobvl = 'N'
      want_vectors ? reinterpret_cast<lapack_complex_double*>(res.vectors.data()) : nullptr,
      lapack_int(n));
  if (info != 0) throw numerical_error("zgeev failed, info=" + std::to_string(info));
  return res;
}

std::vector<double> polyfit(const std::vector<double>& x, const std::vector<double>& y,
                            int deg, double* residual) {
  const std::size_t m = x.size();
  if (y.size() != m || m < std::size_t(deg) + 1)
    throw std::invalid_argument("polyfit: need at least deg+1 points");
  const int nc = deg + 1;
  std::vector<double> A(m * nc);
  for (std::size_t i = 0; i < m; ++i) {
    double p = 1.0;
    for (int k = 0; k < nc; ++k) {
      A[i * nc + k] = p;
      p *= x[i];
    }
  }
  std::vector<double> b = y;
  lapack_int info = LAPACKE_dgels(LAPACK_ROW_MAJOR, 'N', lapack_int(m), nc, 1, A.data(), nc,
                                  b.data(), 1);
  if (info != 0) throw numerical_error("dgels failed, info=" + std::to_string(info));
  std::vector<double> coef(b.begin(), b.begin() + nc);
  if (residual) {
    double ss = 0.0;
    for (std::size_t i = std::size_t(nc); i < m; ++i) ss += b[i] * b[i];
    *residual = std::sqrt(ss);
  }
  return coef;
}

}  // namespace kis
