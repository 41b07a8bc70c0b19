#include "kis/diagnostics.hpp"

#include <cmath>

namespace kis {

SpacingRatioStats spacing_ratio_stats(const std::vector<double>& phases) {
  const std::size_t n = phases.size();
  if (n < 3) throw std::invalid_argument("spacing_ratio_stats: need at least 3 phases");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (phases[i] > phases[i + 1])
      throw std::invalid_argument("spacing_ratio_stats: phases must be sorted");
  if (phases.front() <= -M_PI || phases.back() > M_PI)
    throw std::invalid_argument("spacing_ratio_stats: phases must lie in (-pi, pi]");

  std::vector<double> gaps(n);
  for (std::size_t i = 0; i + 1 < n; ++i) gaps[i] = phases[i + 1] - phases[i];
  gaps[n - 1] = phases[0] - phases[n - 1] + 2.0 * M_PI;  // wrap-around

  SpacingRatioStats stats;
  stats.ratios.resize(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = gaps[i];
    const double b = gaps[(i + n - 1) % n];
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    double r = 0.0;
    if (hi <= 0.0) {
      ++stats.degenerate_pairs;
    } else {
      r = lo / hi;
      if (lo <= 0.0) ++stats.degenerate_pairs;
    }
    stats.ratios[i] = r;
    sum += r;
  }
  stats.mean_r = sum / double(n);
  stats.eta = (stats.mean_r - kMeanRPoisson) / (kMeanRCOE - kMeanRPoisson);
  return stats;
}

ParticipationStats participation_stats(const CVec& vectors, std::size_t dim, std::size_t ncols) {
  if (vectors.size() != dim * ncols) throw std::invalid_argument("participation_stats: size mismatch");
  if (ncols == 0) throw std::invalid_argument("participation_stats: no columns");

  ParticipationStats stats;
  stats.dim = dim;
  stats.rmt_benchmark = double(dim) / 3.0;
  stats.xi.resize(ncols);
  std::vector<double> norms(ncols, 0.0), quartics(ncols, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < ncols; ++j) {
      const double p = std::norm(vectors[i * ncols + j]);
      norms[j] += p;
      quartics[j] += p * p;
    }
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < ncols; ++j) {
    if (std::abs(norms[j] - 1.0) > 1e-8)
      throw numerical_error("participation_stats: column not unit-normalized");
    stats.xi[j] = 1.0 / quartics[j];
    sum += stats.xi[j];
  }
  stats.mean_xi = sum / double(ncols);
  return stats;
}

std::vector<DiagnosticsRow> diagnostics_sweep(const std::vector<double>& h_x_grid,
                                              const ModelParams& base, int parity,
                                              std::size_t cap) {
  const ParityBasis sector = build_parity_basis(base.L, parity);
  std::vector<DiagnosticsRow> rows;
  rows.reserve(h_x_grid.size());
  for (double hx : h_x_grid) {
    ModelParams p = base;
    p.h_x = hx;
    FloquetModel model(p);
    CVec u = build_dense_unitary(model, sector, cap);
    QuasienergySpectrum spec = quasienergy_spectrum(u, sector.dim(), true);
    SpacingRatioStats rstats = spacing_ratio_stats(spec.phases);
    ParticipationStats pstats = participation_stats(spec.vectors, sector.dim(), sector.dim());
    rows.push_back({hx, base.L, parity, rstats.mean_r, rstats.eta, pstats.mean_xi, sector.dim()});
  }
  return rows;
}

}  // namespace kis
