#pragma once

#include "kis/basis.hpp"
#include "kis/floquet.hpp"
#include "kis/types.hpp"

namespace kis {

// One-period Floquet-Lindblad channel for the kicked chain with bulk
// sigma^z dephasing at rate gamma. Because H_free and all jump operators
// are diagonal in the z-basis and the kick is instantaneous, the period
// solves in closed form: kick conjugation followed by the elementwise mask
// M_{mn} = exp(-i (E_m - E_n) tau) * exp(-2 gamma tau hamming(m, n)).
// The mask is separable and never materialized as a D x D array.
struct DephasingModel {
  FloquetModel model;
  double gamma = 0.0;
  std::vector<double> decay_by_hamming;  // exp(-2 gamma tau h), h = 0..L
  DephasingModel(const FloquetModel& m, double gamma_rate);
  cplx mask(std::size_t m, std::size_t n) const {
    return model.free_phase[m] * std::conj(model.free_phase[n]) *
           decay_by_hamming[hamming_distance(m, n)];
  }
};

// rho -> M .* (U_kick rho U_kick^dag), in place; scratch holds D*D entries.
void period_map(cplx* rho, const DephasingModel& deph, cplx* scratch);
void period_map(CVec& rho, const DephasingModel& deph, CVec& scratch);
CVec period_map(const CVec& rho, const DephasingModel& deph);

// Operator-space parity basis: eigenbasis of the superoperator reflection
// rho -> R rho R, built from orbits of matrix-unit index pairs.
struct OperatorParityBasis {
  int L = 0;
  int parity = +1;
  std::size_t D = 0;
  std::vector<ParityVector> elements;  // indices are vectorized k = m*D + n
  std::size_t dim() const { return elements.size(); }
};

OperatorParityBasis build_operator_parity_basis(int L, int parity);

struct DenseSuperoperator {
  CVec matrix;  // row-major dim x dim
  std::size_t dim = 0;
  int parity = 0;  // 0 = full space, else +-1 sector block
};

// Column k = vectorized period_map of the k-th operator-basis element
// (matrix units for the full space, row-major vectorization k = m*D + n;
// symmetry-adapted elements for a sector block).
DenseSuperoperator build_dense_superoperator(const DephasingModel& deph,
                                             std::size_t cap = kDenseSuperCap);
DenseSuperoperator build_sector_superoperator(const DephasingModel& deph, int parity,
                                              std::size_t cap = kDenseSuperCap);

struct ChannelEigenvalue {
  cplx phi;     // eigenvalue of the one-period map
  cplx lambda;  // ln(phi)/tau, principal branch
};

// Full spectrum sorted by descending |phi|.
std::vector<ChannelEigenvalue> dense_spectrum(const DenseSuperoperator& s, double tau);

struct ParityGaps {
  double g_even = 0.0;
  double g_odd = 0.0;
  double global() const { return std::min(g_even, g_odd); }
};

// Per-sector Liouvillian gaps from dense sector spectra. The even sector
// excludes the steady eigenvalue (|phi - 1| < steady_tol); the odd sector
// has no eigenvalue at 1 generically and uses its largest |phi|.
ParityGaps parity_gaps_dense(const DephasingModel& deph, double steady_tol = 1e-6,
                             std::size_t cap = kDenseSuperCap);

}  // namespace kis
