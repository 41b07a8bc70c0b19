// Timing comparison of the OpenMP kernels against their serial reference
// implementations: Heisenberg conjugation step, dephasing period map, and
// the OTOC trace contraction.

#include <chrono>
#include <cstdio>
#include <random>

#include "kis/otoc.hpp"
#include "kis/reference.hpp"

using kis::cplx;
using kis::CVec;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CVec random_hermitian(std::size_t D, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVec g(D * D);
  for (cplx& x : g) x = cplx(gauss(rng), gauss(rng));
  CVec a(D * D);
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = 0; j < D; ++j) a[i * D + j] = 0.5 * (g[i * D + j] + std::conj(g[j * D + i]));
  return a;
}

}  // namespace

int main(int argc, char** argv) {
  const int L = argc > 1 ? std::atoi(argv[1]) : 8;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 5;
  const std::size_t D = std::size_t(1) << L;

  kis::ModelParams params;
  params.L = L;
  params.h_x = 0.8168;
  kis::FloquetModel model(params);
  kis::DephasingModel deph(model, 0.05);

  std::printf("L=%d  D=%zu  reps=%d\n", L, D, reps);
  std::printf("%-28s %12s %12s %8s\n", "kernel", "serial [s]", "omp [s]", "speedup");

  CVec w0 = random_hermitian(D, 42);
  {
    CVec a = w0, b = w0, scratch;
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) kis::ref::conjugate_operator_step(a, model);
    const double ts = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) kis::conjugate_operator_step(b, model, scratch);
    const double tp = seconds_since(t0);
    double dev = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) dev = std::max(dev, std::abs(a[k] - b[k]));
    std::printf("%-28s %12.4f %12.4f %7.2fx   (max dev %.2e)\n", "conjugate_operator_step", ts,
                tp, ts / tp, dev);
  }
  {
    CVec a = w0, b = w0, scratch;
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) kis::ref::period_map(a, deph);
    const double ts = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) kis::period_map(b, deph, scratch);
    const double tp = seconds_since(t0);
    double dev = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) dev = std::max(dev, std::abs(a[k] - b[k]));
    std::printf("%-28s %12.4f %12.4f %7.2fx   (max dev %.2e)\n", "period_map", ts, tp, ts / tp,
                dev);
  }
  {
    auto t0 = std::chrono::steady_clock::now();
    cplx s1 = 0.0, s2 = 0.0;
    for (int r = 0; r < reps; ++r) s1 += kis::ref::otoc_contraction(w0, D, 1);
    const double ts = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) s2 += kis::otoc_contraction(w0, D, 1);
    const double tp = seconds_since(t0);
    std::printf("%-28s %12.4f %12.4f %7.2fx   (max dev %.2e)\n", "otoc_contraction", ts, tp,
                ts / tp, std::abs(s1 - s2) / double(reps));
  }
  return 0;
}
