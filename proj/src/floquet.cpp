#include "kis/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "kis/eig.hpp"

namespace kis {

FloquetModel::FloquetModel(const ModelParams& p) : params(p), D(std::size_t(1) << p.L) {
  if (p.L < 1 || p.L > 30) throw std::invalid_argument("FloquetModel: L out of range");
  if (p.tau <= 0.0) throw std::invalid_argument("FloquetModel: tau must be positive");
  free_energy.resize(D);
  free_phase.resize(D);
  for (std::size_t m = 0; m < D; ++m) {
    double e = 0.0;
    for (int i = 0; i + 1 < p.L; ++i) e -= p.J * spin_at(m, i) * spin_at(m, i + 1);
    for (int i = 0; i < p.L; ++i) e -= p.h_z * spin_at(m, i);
    free_energy[m] = e;
    free_phase[m] = std::polar(1.0, -e * p.tau);
  }
  kick_cos = std::cos(p.h_x * p.tau);
  kick_sin = std::sin(p.h_x * p.tau);
}

void apply_kick(cplx* state, const FloquetModel& m, bool dagger) {
  const double c = m.kick_cos;
  const cplx is = dagger ? cplx(0.0, -m.kick_sin) : cplx(0.0, m.kick_sin);
  const std::size_t D = m.D;
  for (int site = 0; site < m.params.L; ++site) {
    const std::size_t bit = std::size_t(1) << site;
    for (std::size_t base = 0; base < D; base += 2 * bit) {
      for (std::size_t off = 0; off < bit; ++off) {
        const std::size_t lo = base + off;
        const std::size_t hi = lo + bit;
        const cplx a = state[lo], b = state[hi];
        state[lo] = c * a + is * b;
        state[hi] = c * b + is * a;
      }
    }
  }
}

void apply_floquet(cplx* state, const FloquetModel& m, bool dagger) {
  const std::size_t D = m.D;
  if (!dagger) {
    apply_kick(state, m, false);
    for (std::size_t k = 0; k < D; ++k) state[k] *= m.free_phase[k];
  } else {
    for (std::size_t k = 0; k < D; ++k) state[k] *= std::conj(m.free_phase[k]);
    apply_kick(state, m, true);
  }
}

CVec apply_kick(const CVec& state, const FloquetModel& m, bool dagger) {
  if (state.size() != m.D) throw std::invalid_argument("apply_kick: state length != D");
  CVec out = state;
  apply_kick(out.data(), m, dagger);
  return out;
}

CVec apply_floquet(const CVec& state, const FloquetModel& m, bool dagger) {
  if (state.size() != m.D) throw std::invalid_argument("apply_floquet: state length != D");
  CVec out = state;
  apply_floquet(out.data(), m, dagger);
  return out;
}

void conj_transpose(const cplx* in, cplx* out, std::size_t n) {
  constexpr std::size_t B = 64;
#pragma omp parallel for schedule(static)
  for (std::size_t ib = 0; ib < n; ib += B) {
    for (std::size_t jb = 0; jb < n; jb += B) {
      const std::size_t imax = std::min(ib + B, n);
      const std::size_t jmax = std::min(jb + B, n);
      for (std::size_t i = ib; i < imax; ++i)
        for (std::size_t j = jb; j < jmax; ++j) out[j * n + i] = std::conj(in[i * n + j]);
    }
  }
}

namespace {

// Right-multiplication by U_F acting on a contiguous row: since U_free is
// diagonal and each kick factor is symmetric, U_F^T = U_kick U_free, so
// row_i(W U_F) = U_kick(U_free(row_i W)).
inline void row_times_floquet(cplx* row, const FloquetModel& m) {
  for (std::size_t k = 0; k < m.D; ++k) row[k] *= m.free_phase[k];
  apply_kick(row, m, false);
}

}  // namespace

void conjugate_operator_step(CVec& w, const FloquetModel& m, CVec& scratch) {
  const std::size_t D = m.D;
  if (w.size() != D * D) throw std::invalid_argument("conjugate_operator_step: W must be D x D");
  scratch.resize(D * D);
  // A = W U_F
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < D; ++i) row_times_floquet(&w[i * D], m);
  // result = (A^dag U_F)^dag = U_F^dag W U_F
  conj_transpose(w.data(), scratch.data(), D);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < D; ++i) row_times_floquet(&scratch[i * D], m);
  conj_transpose(scratch.data(), w.data(), D);
}

CVec conjugate_operator_step(const CVec& w, const FloquetModel& m) {
  CVec out = w, scratch;
  conjugate_operator_step(out, m, scratch);
  return out;
}

CVec build_dense_unitary(const FloquetModel& m, std::size_t cap) {
  const std::size_t D = m.D;
  if (D > cap) throw resource_error("build_dense_unitary: dimension exceeds dense cap");
  CVec u(D * D);
#pragma omp parallel
  {
    CVec col(D);
#pragma omp for schedule(static)
    for (std::size_t j = 0; j < D; ++j) {
      std::fill(col.begin(), col.end(), cplx(0.0));
      col[j] = 1.0;
      apply_floquet(col.data(), m, false);
      for (std::size_t i = 0; i < D; ++i) u[i * D + j] = col[i];
    }
  }
  return u;
}

CVec build_dense_unitary(const FloquetModel& m, const ParityBasis& sector, std::size_t cap) {
  if (sector.D != m.D || sector.L != m.params.L)
    throw std::invalid_argument("build_dense_unitary: sector/model mismatch");
  const std::size_t dim = sector.dim();
  if (dim > cap) throw resource_error("build_dense_unitary: sector dimension exceeds dense cap");
  const std::size_t D = m.D;
  CVec u(dim * dim);
#pragma omp parallel
  {
    CVec col(D);
#pragma omp for schedule(static)
    for (std::size_t j = 0; j < dim; ++j) {
      parity_vector_dense(sector, j, col.data());
      apply_floquet(col.data(), m, false);
      for (std::size_t i = 0; i < dim; ++i) {
        const ParityVector& v = sector.vectors[i];
        cplx val = v.amp_a * col[v.a];
        if (v.b != v.a) val += v.amp_b * col[v.b];
        u[i * dim + j] = val;
      }
    }
  }
  return u;
}

QuasienergySpectrum quasienergy_spectrum(const CVec& u, std::size_t n, bool want_vectors) {
  if (u.size() != n * n) throw std::invalid_argument("quasienergy_spectrum: size mismatch");
  if (n < 1) throw std::invalid_argument("quasienergy_spectrum: empty matrix");

  // Probe unitarity: || U^dag (U v) - v || / ||v|| for a few fixed random v.
  {
    std::mt19937_64 rng(0xC0FFEEu);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CVec v(n), uv(n), back(n);
    for (int trial = 0; trial < 3; ++trial) {
      double norm2 = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        v[k] = cplx(gauss(rng), gauss(rng));
        norm2 += std::norm(v[k]);
      }
#pragma omp parallel for schedule(static)
      for (std::size_t i = 0; i < n; ++i) {
        cplx acc = 0.0;
        const cplx* row = &u[i * n];
        for (std::size_t k = 0; k < n; ++k) acc += row[k] * v[k];
        uv[i] = acc;
      }
      std::fill(back.begin(), back.end(), cplx(0.0));
      for (std::size_t i = 0; i < n; ++i) {
        const cplx* row = &u[i * n];
        const cplx c = std::conj(uv[i]);
        for (std::size_t k = 0; k < n; ++k) back[k] += std::conj(row[k] * c);
      }
      double err2 = 0.0;
      for (std::size_t k = 0; k < n; ++k) err2 += std::norm(back[k] - v[k]);
      if (std::sqrt(err2 / norm2) > 1e-8 * std::max(1.0, std::sqrt(double(n))))
        throw numerical_error("quasienergy_spectrum: input not unitary to tolerance");
    }
  }

  EigResult eig = eig_dense(u, n, want_vectors);

  std::vector<double> phases(n);
  for (std::size_t j = 0; j < n; ++j) {
    double ph = std::arg(eig.values[j]);
    if (ph <= -M_PI) ph = M_PI;  // branch (-pi, pi]
    phases[j] = ph;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return phases[a] < phases[b]; });

  QuasienergySpectrum spec;
  spec.dim = n;
  spec.phases.resize(n);
  for (std::size_t j = 0; j < n; ++j) spec.phases[j] = phases[order[j]];
  if (want_vectors) {
    spec.vectors.resize(n * n);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t src = order[j];
      for (std::size_t i = 0; i < n; ++i) spec.vectors[i * n + j] = eig.vectors[i * n + src];
    }
  }
  return spec;
}

}  // namespace kis
