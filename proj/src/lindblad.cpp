#include "kis/lindblad.hpp"

#include <algorithm>
#include <cmath>

#include "kis/eig.hpp"

namespace kis {

DephasingModel::DephasingModel(const FloquetModel& m, double gamma_rate)
    : model(m), gamma(gamma_rate) {
  if (gamma < 0.0) throw std::invalid_argument("DephasingModel: gamma must be >= 0");
  decay_by_hamming.resize(m.params.L + 1);
  for (int h = 0; h <= m.params.L; ++h)
    decay_by_hamming[h] = std::exp(-2.0 * gamma * m.params.tau * h);
}

void period_map(cplx* rho, const DephasingModel& deph, cplx* scratch) {
  const FloquetModel& m = deph.model;
  const std::size_t D = m.D;

  // Kick conjugation: rho -> U_kick rho U_kick^dag. Each kick factor is
  // symmetric, so (U_kick^dag)^T = conj(U_kick) = the dagger kick, and both
  // halves act on contiguous rows.
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < D; ++i) apply_kick(&rho[i * D], m, true);  // B = rho U_kick^dag
  conj_transpose(rho, scratch, D);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < D; ++i) apply_kick(&scratch[i * D], m, true);  // B^dag U_kick^dag
  conj_transpose(scratch, rho, D);  // = U_kick B = U_kick rho U_kick^dag

  // Free segment: elementwise phase and Hamming dephasing mask.
#pragma omp parallel for schedule(static)
  for (std::size_t mm = 0; mm < D; ++mm) {
    const cplx pm = m.free_phase[mm];
    cplx* row = &rho[mm * D];
    for (std::size_t nn = 0; nn < D; ++nn) {
      row[nn] *= pm * std::conj(m.free_phase[nn]) * deph.decay_by_hamming[hamming_distance(mm, nn)];
    }
  }
}

void period_map(CVec& rho, const DephasingModel& deph, CVec& scratch) {
  const std::size_t D = deph.model.D;
  if (rho.size() != D * D) throw std::invalid_argument("period_map: rho must be D x D");
  scratch.resize(D * D);
  period_map(rho.data(), deph, scratch.data());
}

CVec period_map(const CVec& rho, const DephasingModel& deph) {
  CVec out = rho, scratch;
  period_map(out, deph, scratch);
  return out;
}

OperatorParityBasis build_operator_parity_basis(int L, int parity) {
  if (L < 2) throw std::invalid_argument("build_operator_parity_basis: L < 2");
  if (parity != +1 && parity != -1)
    throw std::invalid_argument("build_operator_parity_basis: parity must be +-1");
  const std::size_t D = std::size_t(1) << L;
  const auto perm = reflection_permutation(L);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  OperatorParityBasis basis;
  basis.L = L;
  basis.parity = parity;
  basis.D = D;
  for (std::size_t mm = 0; mm < D; ++mm) {
    for (std::size_t nn = 0; nn < D; ++nn) {
      const std::size_t k = mm * D + nn;
      const std::size_t kr = std::size_t(perm[mm]) * D + perm[nn];
      if (kr == k) {
        if (parity == +1) basis.elements.push_back({std::uint32_t(k), std::uint32_t(k), 1.0, 0.0});
      } else if (k < kr) {
        basis.elements.push_back({std::uint32_t(k), std::uint32_t(kr), inv_sqrt2,
                                  parity == +1 ? inv_sqrt2 : -inv_sqrt2});
      }
    }
  }
  return basis;
}

namespace {

// period_map applied to the matrix unit |m><n|: the kick conjugation of a
// unit is the outer product (U_kick e_m)(U_kick e_n)^dag, then the mask.
void period_map_unit(const DephasingModel& deph, std::size_t em, std::size_t en, CVec& u,
                     CVec& v, CVec& out) {
  const FloquetModel& m = deph.model;
  const std::size_t D = m.D;
  u.assign(D, cplx(0.0));
  v.assign(D, cplx(0.0));
  u[em] = 1.0;
  v[en] = 1.0;
  apply_kick(u.data(), m, false);
  apply_kick(v.data(), m, false);
  out.resize(D * D);
  for (std::size_t p = 0; p < D; ++p) {
    const cplx up = u[p] * m.free_phase[p];
    for (std::size_t q = 0; q < D; ++q) {
      out[p * D + q] = up * std::conj(v[q] * m.free_phase[q]) *
                       deph.decay_by_hamming[hamming_distance(p, q)];
    }
  }
}

}  // namespace

DenseSuperoperator build_dense_superoperator(const DephasingModel& deph, std::size_t cap) {
  const std::size_t D = deph.model.D;
  const std::size_t dim = D * D;
  if (dim > cap) throw resource_error("build_dense_superoperator: D^2 exceeds cap");
  DenseSuperoperator s;
  s.dim = dim;
  s.parity = 0;
  s.matrix.resize(dim * dim);
#pragma omp parallel
  {
    CVec u, v, col;
#pragma omp for schedule(static)
    for (std::size_t k = 0; k < dim; ++k) {
      period_map_unit(deph, k / D, k % D, u, v, col);
      for (std::size_t row = 0; row < dim; ++row) s.matrix[row * dim + k] = col[row];
    }
  }
  return s;
}

DenseSuperoperator build_sector_superoperator(const DephasingModel& deph, int parity,
                                             std::size_t cap) {
  const std::size_t D = deph.model.D;
  const OperatorParityBasis basis = build_operator_parity_basis(deph.model.params.L, parity);
  const std::size_t dim = basis.dim();
  if (dim > cap) throw resource_error("build_sector_superoperator: sector block exceeds cap");

  DenseSuperoperator s;
  s.dim = dim;
  s.parity = parity;
  s.matrix.resize(dim * dim);
#pragma omp parallel
  {
    CVec u, v, col, acc;
#pragma omp for schedule(static)
    for (std::size_t k = 0; k < dim; ++k) {
      const ParityVector& e = basis.elements[k];
      period_map_unit(deph, e.a / D, e.a % D, u, v, acc);
      for (cplx& x : acc) x *= e.amp_a;
      if (e.b != e.a) {
        period_map_unit(deph, e.b / D, e.b % D, u, v, col);
        for (std::size_t r = 0; r < acc.size(); ++r) acc[r] += e.amp_b * col[r];
      }
      for (std::size_t row = 0; row < dim; ++row) {
        const ParityVector& f = basis.elements[row];
        cplx val = f.amp_a * acc[f.a];
        if (f.b != f.a) val += f.amp_b * acc[f.b];
        s.matrix[row * dim + k] = val;
      }
    }
  }
  return s;
}

std::vector<ChannelEigenvalue> dense_spectrum(const DenseSuperoperator& s, double tau) {
  if (tau <= 0.0) throw std::invalid_argument("dense_spectrum: tau must be positive");
  EigResult eig = eig_dense(s.matrix, s.dim, false);
  std::vector<ChannelEigenvalue> out(s.dim);
  for (std::size_t j = 0; j < s.dim; ++j) {
    out[j].phi = eig.values[j];
    out[j].lambda = std::log(eig.values[j]) / tau;
  }
  std::sort(out.begin(), out.end(), [](const ChannelEigenvalue& a, const ChannelEigenvalue& b) {
    return std::abs(a.phi) > std::abs(b.phi);
  });
  return out;
}

ParityGaps parity_gaps_dense(const DephasingModel& deph, double steady_tol, std::size_t cap) {
  const double tau = deph.model.params.tau;
  ParityGaps gaps;

  auto spectrum_gap = [&](int parity) {
    DenseSuperoperator s = build_sector_superoperator(deph, parity, cap);
    std::vector<ChannelEigenvalue> spec = dense_spectrum(s, tau);
    for (const ChannelEigenvalue& ev : spec) {
      if (parity == +1 && std::abs(ev.phi - cplx(1.0)) < steady_tol) continue;
      return -std::log(std::abs(ev.phi)) / tau;
    }
    throw numerical_error("parity_gaps_dense: sector spectrum exhausted by steady exclusion");
  };

  gaps.g_even = spectrum_gap(+1);
  gaps.g_odd = spectrum_gap(-1);
  return gaps;
}

}  // namespace kis
