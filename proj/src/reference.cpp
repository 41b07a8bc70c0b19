#include "kis/reference.hpp"

namespace kis::ref {

namespace {

CVec conj_transpose_naive(const CVec& a, std::size_t n) {
  CVec out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * n + i] = std::conj(a[i * n + j]);
  return out;
}

}  // namespace

void conjugate_operator_step(CVec& w, const FloquetModel& m) {
  const std::size_t D = m.D;
  if (w.size() != D * D) throw std::invalid_argument("ref::conjugate_operator_step: size mismatch");
  for (std::size_t i = 0; i < D; ++i) {
    cplx* row = &w[i * D];
    for (std::size_t k = 0; k < D; ++k) row[k] *= m.free_phase[k];
    apply_kick(row, m, false);
  }
  w = conj_transpose_naive(w, D);
  for (std::size_t i = 0; i < D; ++i) {
    cplx* row = &w[i * D];
    for (std::size_t k = 0; k < D; ++k) row[k] *= m.free_phase[k];
    apply_kick(row, m, false);
  }
  w = conj_transpose_naive(w, D);
}

void period_map(CVec& rho, const DephasingModel& deph) {
  const FloquetModel& m = deph.model;
  const std::size_t D = m.D;
  if (rho.size() != D * D) throw std::invalid_argument("ref::period_map: size mismatch");
  for (std::size_t i = 0; i < D; ++i) apply_kick(&rho[i * D], m, true);
  rho = conj_transpose_naive(rho, D);
  for (std::size_t i = 0; i < D; ++i) apply_kick(&rho[i * D], m, true);
  rho = conj_transpose_naive(rho, D);
  for (std::size_t mm = 0; mm < D; ++mm)
    for (std::size_t nn = 0; nn < D; ++nn)
      rho[mm * D + nn] *= m.free_phase[mm] * std::conj(m.free_phase[nn]) *
                          deph.decay_by_hamming[hamming_distance(mm, nn)];
}

cplx otoc_contraction(const CVec& w, std::size_t D, int l) {
  cplx sum = 0.0;
  for (std::size_t m = 0; m < D; ++m)
    for (std::size_t n = 0; n < D; ++n)
      sum += w[m * D + n] * w[n * D + m] * double(spin_at(m, l) * spin_at(n, l));
  return sum / double(D);
}

}  // namespace kis::ref
