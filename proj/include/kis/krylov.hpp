#pragma once

#include <cstdint>
#include <functional>

#include "kis/lindblad.hpp"
#include "kis/types.hpp"

namespace kis {

// Applies the channel to a flat Hilbert-Schmidt vector of length N.
using MapFn = std::function<void(const cplx* in, cplx* out)>;

struct ArnoldiOptions {
  int n_max = 150;
  double tol = 1e-8;          // Ritz residual / breakdown tolerance
  double steady_tol = 1e-6;   // |phi - 1| exclusion radius for the steady mode
  std::uint64_t seed = 12345;
  int check_interval = 10;    // Ritz stability check cadence
  double ritz_stability = 1e-6;
  // Channel applications per Krylov step. The weakly dephased channel has
  // its spectrum clustered just inside the unit circle, where plain Arnoldi
  // stalls; building the basis with F^stride separates the leading moduli.
  // 0 selects stride ~ 1/(gamma tau), keeping the contraction per step at a
  // fixed scale (too large a stride kills all but the very top modes).
  int stride = 0;
};

int effective_stride(const ArnoldiOptions& opts, double gamma, double tau);

struct KrylovState {
  std::vector<CVec> basis;  // orthonormal under the HS inner product
  CVec hess;                // row-major (n_max+1) x n_max, leading dimension ld
  int ld = 0;
  int n = 0;                // completed Arnoldi steps
  bool breakdown = false;   // invariant subspace found (clean termination)
  cplx hess_at(int i, int j) const { return hess[std::size_t(i) * ld + j]; }
};

// Plain Arnoldi with modified Gram-Schmidt and one reorthogonalization
// pass per step. stop_check (optional) is called every check_interval
// steps; returning true terminates early.
KrylovState arnoldi(const MapFn& map, const CVec& start, const ArnoldiOptions& opts,
                    const std::function<bool(const KrylovState&)>& stop_check = nullptr);

struct RitzPair {
  cplx phi;
  cplx lambda;  // ln(phi)/tau, principal branch
  double residual = 0.0;
  bool converged = false;
};

struct RitzSpectrum {
  std::vector<RitzPair> pairs;  // sorted by descending |phi|
};

// Eigenvalues of the leading n x n Hessenberg block with the standard
// subdiagonal residual estimate per Ritz pair.
RitzSpectrum ritz_values(const KrylovState& state, double tau, double tol);

// Rayleigh-Ritz projection of the single-period map onto the Krylov basis
// (valid for any stride). Residuals are exact, ||F z - phi z|| for the
// assembled Ritz vector z, computed for the k_residuals leading pairs;
// later pairs are reported unconverged.
RitzSpectrum rayleigh_ritz(const MapFn& base_map, const KrylovState& state, double tau,
                           double tol, int k_residuals);

// Seeded random Hermitian matrix with the trace projected out,
// HS-normalized. The standard start vector for gap runs: orthogonal to
// the steady mode by construction.
CVec random_traceless_hermitian(std::size_t D, std::uint64_t seed);

struct GapResult {
  double g = 0.0;
  double gamma = 0.0;
  int L = 0;
  double h_x = 0.0;
  std::string sector = "global";
  int n_used = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  cplx phi_lead;
};

// Liouvillian gap from matrix-free Arnoldi on the one-period channel.
// The start vector is a seeded random traceless Hermitian matrix
// (HS-normalized); tracelessness is re-projected every application.
GapResult global_gap(const DephasingModel& deph, const ArnoldiOptions& opts);

// Same, restricted to an operator parity sector via the projection
// rho -> (rho + parity * R rho R)/2 applied to the start vector and after
// every map application.
GapResult sector_gap(const DephasingModel& deph, int parity, const ArnoldiOptions& opts);

}  // namespace kis
