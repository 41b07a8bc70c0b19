#include "kis/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "kis/eig.hpp"

namespace kis {

namespace {

cplx hs_dot(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : re, im)
  for (std::size_t k = 0; k < n; ++k) {
    const cplx t = std::conj(a[k]) * b[k];
    re += t.real();
    im += t.imag();
  }
  return {re, im};
}

double hs_norm(const cplx* a, std::size_t n) {
  double s = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : s)
  for (std::size_t k = 0; k < n; ++k) s += std::norm(a[k]);
  return std::sqrt(s);
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

}  // namespace

KrylovState arnoldi(const MapFn& map, const CVec& start, const ArnoldiOptions& opts,
                    const std::function<bool(const KrylovState&)>& stop_check) {
  const std::size_t N = start.size();
  if (opts.n_max < 2) throw std::invalid_argument("arnoldi: n_max must be >= 2");
  const double start_norm = hs_norm(start.data(), N);
  if (start_norm < 1e-300) throw std::invalid_argument("arnoldi: zero start vector");

  KrylovState state;
  state.ld = opts.n_max;
  state.hess.assign(std::size_t(opts.n_max + 1) * opts.n_max, cplx(0.0));
  state.basis.emplace_back(start);
  for (cplx& x : state.basis.back()) x /= start_norm;

  CVec w(N);
  for (int j = 0; j < opts.n_max; ++j) {
    map(state.basis[j].data(), w.data());
    // Modified Gram-Schmidt plus one full reorthogonalization pass.
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        const cplx h = hs_dot(state.basis[i].data(), w.data(), N);
        axpy(-h, state.basis[i].data(), w.data(), N);
        state.hess[std::size_t(i) * state.ld + j] += h;
      }
    }
    const double hnext = hs_norm(w.data(), N);
    state.hess[std::size_t(j + 1) * state.ld + j] = hnext;
    state.n = j + 1;
    if (hnext < opts.tol) {
      state.breakdown = true;  // invariant subspace found
      break;
    }
    state.basis.emplace_back(w);
    for (cplx& x : state.basis.back()) x /= hnext;
    if (stop_check && state.n % opts.check_interval == 0 && stop_check(state)) break;
  }
  return state;
}

RitzSpectrum ritz_values(const KrylovState& state, double tau, double tol) {
  const int n = state.n;
  if (n < 1) throw std::invalid_argument("ritz_values: empty Krylov state");
  CVec h(std::size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h[std::size_t(i) * n + j] = state.hess_at(i, j);
  EigResult eig = eig_dense(std::move(h), n, true);

  const double subdiag = std::abs(state.hess_at(n, n - 1));
  RitzSpectrum spec;
  spec.pairs.resize(n);
  for (int j = 0; j < n; ++j) {
    RitzPair& p = spec.pairs[j];
    p.phi = eig.values[j];
    p.lambda = std::log(p.phi) / tau;
    p.residual = subdiag * std::abs(eig.vectors[std::size_t(n - 1) * n + j]);
    p.converged = p.residual < tol;
  }
  std::sort(spec.pairs.begin(), spec.pairs.end(),
            [](const RitzPair& a, const RitzPair& b) { return std::abs(a.phi) > std::abs(b.phi); });
  return spec;
}

RitzSpectrum rayleigh_ritz(const MapFn& base_map, const KrylovState& state, double tau,
                           double tol, int k_residuals) {
  const int n = state.n;
  if (n < 1) throw std::invalid_argument("rayleigh_ritz: empty Krylov state");
  const std::size_t N = state.basis[0].size();

  // A = V^dag F V, one map application per basis vector.
  CVec a(std::size_t(n) * n);
  CVec u(N);
  for (int j = 0; j < n; ++j) {
    base_map(state.basis[j].data(), u.data());
    for (int i = 0; i < n; ++i) a[std::size_t(i) * n + j] = hs_dot(state.basis[i].data(), u.data(), N);
  }
  EigResult eig = eig_dense(std::move(a), n, true);

  RitzSpectrum spec;
  spec.pairs.resize(n);
  std::vector<int> order(n);
  for (int j = 0; j < n; ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    return std::abs(eig.values[x]) > std::abs(eig.values[y]);
  });

  CVec z(N), fz(N);
  for (int rank = 0; rank < n; ++rank) {
    const int j = order[rank];
    RitzPair& p = spec.pairs[rank];
    p.phi = eig.values[j];
    p.lambda = std::log(p.phi) / tau;
    p.residual = std::numeric_limits<double>::infinity();
    p.converged = false;
    if (rank >= k_residuals) continue;
    // z = V y, exact residual ||F z - phi z|| (||z|| = 1 by orthonormality).
    std::fill(z.begin(), z.end(), cplx(0.0));
    for (int i = 0; i < n; ++i) axpy(eig.vectors[std::size_t(i) * n + j], state.basis[i].data(), z.data(), N);
    base_map(z.data(), fz.data());
    axpy(-p.phi, z.data(), fz.data(), N);
    p.residual = hs_norm(fz.data(), N);
    p.converged = p.residual < tol;
  }
  return spec;
}

CVec random_traceless_hermitian(std::size_t D, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVec g(D * D);
  for (cplx& x : g) x = cplx(gauss(rng), gauss(rng));
  CVec a(D * D);
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = 0; j < D; ++j)
      a[i * D + j] = 0.5 * (g[i * D + j] + std::conj(g[j * D + i]));
  cplx tr = 0.0;
  for (std::size_t i = 0; i < D; ++i) tr += a[i * D + i];
  for (std::size_t i = 0; i < D; ++i) a[i * D + i] -= tr / double(D);
  const double norm = hs_norm(a.data(), a.size());
  for (cplx& x : a) x /= norm;
  return a;
}

namespace {

void project_traceless(cplx* rho, std::size_t D) {
  cplx tr = 0.0;
  for (std::size_t i = 0; i < D; ++i) tr += rho[i * D + i];
  tr /= double(D);
  for (std::size_t i = 0; i < D; ++i) rho[i * D + i] -= tr;
}

// rho -> (rho + parity * R rho R)/2 in place.
void project_parity(cplx* rho, const std::vector<std::uint32_t>& perm, std::size_t D,
                    int parity) {
  const double sign = double(parity);
#pragma omp parallel for schedule(static)
  for (std::size_t m = 0; m < D; ++m) {
    for (std::size_t n = 0; n < D; ++n) {
      const std::size_t k = m * D + n;
      const std::size_t kr = std::size_t(perm[m]) * D + perm[n];
      if (k < kr) {
        const cplx a = rho[k], b = rho[kr];
        rho[k] = 0.5 * (a + sign * b);
        rho[kr] = 0.5 * (b + sign * a);
      } else if (k == kr && parity == -1) {
        rho[k] = 0.0;
      }
    }
  }
}

struct GapRun {
  RitzSpectrum spec;
  int n_used = 0;
};

// Leading non-steady Ritz value. exclude_steady strips |phi - 1| < steady_tol.
const RitzPair* leading_pair(const RitzSpectrum& spec, bool exclude_steady, double steady_tol) {
  for (const RitzPair& p : spec.pairs) {
    if (exclude_steady && std::abs(p.phi - cplx(1.0)) < steady_tol) continue;
    return &p;
  }
  return nullptr;
}

GapResult run_gap(const DephasingModel& deph, const CVec& start, const MapFn& base_map,
                  const ArnoldiOptions& opts, const std::string& sector, bool exclude_steady) {
  const double tau = deph.model.params.tau;
  const int stride = effective_stride(opts, deph.gamma, tau);
  const std::size_t N = start.size();

  CVec tmp;
  MapFn map = [&base_map, &tmp, stride, N](const cplx* in, cplx* out) {
    base_map(in, out);
    if (stride > 1) {
      tmp.resize(N);
      for (int r = 1; r < stride; ++r) {
        base_map(out, tmp.data());
        std::copy(tmp.begin(), tmp.end(), out);
      }
    }
  };

  // Stability of the leading Ritz values of F^stride is the stopping
  // criterion; the reported eigenvalues come from the Rayleigh-Ritz
  // projection of the single-period map afterwards.
  std::vector<cplx> prev_lead;
  auto stop_check = [&](const KrylovState& st) {
    RitzSpectrum spec = ritz_values(st, tau, opts.tol);
    std::vector<cplx> lead;
    for (std::size_t k = 0; k < spec.pairs.size() && lead.size() < 5; ++k)
      lead.push_back(spec.pairs[k].phi);
    bool stable = prev_lead.size() == lead.size() && !lead.empty();
    if (stable)
      for (std::size_t k = 0; k < lead.size(); ++k)
        if (std::abs(lead[k] - prev_lead[k]) > opts.ritz_stability) stable = false;
    prev_lead = std::move(lead);
    if (!stable) return false;
    const RitzPair* p = leading_pair(spec, exclude_steady, opts.steady_tol);
    return p != nullptr && p->converged;
  };

  KrylovState st = arnoldi(map, start, opts, stop_check);
  RitzSpectrum spec = rayleigh_ritz(base_map, st, tau, opts.tol, 8);
  const RitzPair* p = leading_pair(spec, exclude_steady, opts.steady_tol);
  if (p == nullptr) throw numerical_error("gap: no Ritz value outside the steady mode");

  GapResult res;
  res.gamma = deph.gamma;
  res.L = deph.model.params.L;
  res.h_x = deph.model.params.h_x;
  res.sector = sector;
  res.n_used = st.n;
  res.seed = opts.seed;
  res.phi_lead = p->phi;
  res.converged = p->converged;
  res.g = -std::log(std::abs(p->phi)) / tau;
  return res;
}

}  // namespace

int effective_stride(const ArnoldiOptions& opts, double gamma, double tau) {
  if (opts.stride > 0) return opts.stride;
  const double scale = 1.0 / std::max(gamma * tau, 1e-12);
  return std::clamp(static_cast<int>(std::lround(scale)), 1, 64);
}

GapResult global_gap(const DephasingModel& deph, const ArnoldiOptions& opts) {
  if (deph.gamma <= 0.0)
    throw std::invalid_argument("global_gap: gamma must be > 0 (the gap is undefined at zero)");
  const std::size_t D = deph.model.D;
  CVec start = random_traceless_hermitian(D, opts.seed);
  CVec scratch(D * D);
  MapFn map = [&deph, &scratch, D](const cplx* in, cplx* out) {
    std::copy(in, in + D * D, out);
    period_map(out, deph, scratch.data());
    project_traceless(out, D);  // counter roundoff drift toward the steady mode
  };
  return run_gap(deph, start, map, opts, "global", true);
}

GapResult sector_gap(const DephasingModel& deph, int parity, const ArnoldiOptions& opts) {
  if (deph.gamma <= 0.0)
    throw std::invalid_argument("sector_gap: gamma must be > 0 (the gap is undefined at zero)");
  if (parity != +1 && parity != -1) throw std::invalid_argument("sector_gap: parity must be +-1");
  const std::size_t D = deph.model.D;
  const auto perm = reflection_permutation(deph.model.params.L);
  const bool even = parity == +1;

  CVec start;
  std::uint64_t seed_used = opts.seed;
  for (int attempt = 0; attempt < 5; ++attempt) {
    seed_used = opts.seed + std::uint64_t(attempt);
    start = random_traceless_hermitian(D, seed_used);
    project_parity(start.data(), perm, D, parity);
    if (even) project_traceless(start.data(), D);
    const double norm = hs_norm(start.data(), start.size());
    if (norm > 1e-10) {
      for (cplx& x : start) x /= norm;
      break;
    }
    if (attempt == 4) throw numerical_error("sector_gap: start vector projects to zero");
  }

  CVec scratch(D * D);
  MapFn map = [&deph, &scratch, &perm, D, parity, even](const cplx* in, cplx* out) {
    std::copy(in, in + D * D, out);
    period_map(out, deph, scratch.data());
    project_parity(out, perm, D, parity);
    if (even) project_traceless(out, D);
  };
  ArnoldiOptions o = opts;
  o.seed = seed_used;
  return run_gap(deph, start, map, o, even ? "even" : "odd", even);
}

}  // namespace kis
