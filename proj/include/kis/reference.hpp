#pragma once

#include "kis/floquet.hpp"
#include "kis/lindblad.hpp"

// Serial reference implementations of the parallel kernels. Plain loops,
// no OpenMP, no cache blocking; kept for correctness tests and the
// kernel benchmark.
namespace kis::ref {

void conjugate_operator_step(CVec& w, const FloquetModel& m);

void period_map(CVec& rho, const DephasingModel& deph);

// (1/D) sum_{m,n} W_{mn} z_l(n) W_{nm} z_l(m)
cplx otoc_contraction(const CVec& w, std::size_t D, int l);

}  // namespace kis::ref
