#pragma once

#include "kis/basis.hpp"
#include "kis/types.hpp"

namespace kis {

struct ModelParams {
  double J = 1.0;
  double h_x = 0.0;
  double h_z = 1.0;
  double tau = 1.0;
  int L = 2;
};

// Kicked Ising Floquet operator U_F = U_free * U_kick in factored form.
// U_free is diagonal in the z-basis with classical Ising energies E_m (open
// boundary, L-1 bonds); U_kick is a product of independent single-site x
// rotations with coefficients cos(h_x tau), sin(h_x tau).
struct FloquetModel {
  ModelParams params;
  std::size_t D;
  std::vector<double> free_energy;  // E_m
  CVec free_phase;                  // exp(-i E_m tau)
  double kick_cos;
  double kick_sin;
  explicit FloquetModel(const ModelParams& p);
};

// In-place kick: Prod_i [cos(h_x tau) I + i sin(h_x tau) sigma_i^x].
// dagger=true applies the conjugate coefficients.
void apply_kick(cplx* state, const FloquetModel& m, bool dagger = false);

// In-place one-period unitary. Forward: kick then free phase.
// Dagger: conjugate phase then dagger kick.
void apply_floquet(cplx* state, const FloquetModel& m, bool dagger = false);

// Size-checked vector overloads.
CVec apply_kick(const CVec& state, const FloquetModel& m, bool dagger = false);
CVec apply_floquet(const CVec& state, const FloquetModel& m, bool dagger = false);

// Heisenberg step W -> U_F^dag W U_F on a row-major D x D matrix.
// Parallelized over rows; scratch must hold D*D entries.
void conjugate_operator_step(CVec& w, const FloquetModel& m, CVec& scratch);
CVec conjugate_operator_step(const CVec& w, const FloquetModel& m);

// Blocked out-of-place conjugate transpose, row-major n x n.
void conj_transpose(const cplx* in, cplx* out, std::size_t n);

// Dense U_F, full space or projected into a parity sector block.
CVec build_dense_unitary(const FloquetModel& m, std::size_t cap = kDenseCap);
CVec build_dense_unitary(const FloquetModel& m, const ParityBasis& sector,
                         std::size_t cap = kDenseCap);

struct QuasienergySpectrum {
  std::vector<double> phases;  // ascending, in (-pi, pi]
  CVec vectors;                // row-major dim x dim, column order matches phases; empty if not requested
  std::size_t dim = 0;
};

// Eigenphases of a unitary matrix (row-major n x n). Unitarity is probed
// with random vectors to 1e-8 before solving.
QuasienergySpectrum quasienergy_spectrum(const CVec& u, std::size_t n, bool want_vectors);

}  // namespace kis
