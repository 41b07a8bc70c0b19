#pragma once

#include <cstddef>

#include "kis/types.hpp"

namespace kis {

struct EigResult {
  CVec values;   // length n
  CVec vectors;  // row-major n x n, column j is the right eigenvector of values[j]; empty unless requested
};

// Dense general complex eigensolve (LAPACK zgeev). A is row-major n x n and
// is consumed. Eigenvectors, when requested, come back unit-normalized.
EigResult eig_dense(CVec a, std::size_t n, bool want_vectors);

// Least-squares polynomial fit y ~ sum_k c_k x^k, degree deg. Returns the
// deg+1 coefficients (LAPACK dgels) and the residual 2-norm in *residual.
std::vector<double> polyfit(const std::vector<double>& x, const std::vector<double>& y,
                            int deg, double* residual);

}  // namespace kis
