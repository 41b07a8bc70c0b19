#pragma once

#include "kis/floquet.hpp"
#include "kis/types.hpp"

namespace kis {

inline constexpr double kMeanRPoisson = 0.3863;
inline constexpr double kMeanRCOE = 0.5307;

struct SpacingRatioStats {
  std::vector<double> ratios;  // one per phase, circle convention
  double mean_r = 0.0;
  double eta = 0.0;
  int degenerate_pairs = 0;  // spacings below machine-zero contribute r = 0
};

// Adjacent-spacing ratios r_n = min(d_n, d_{n-1}) / max(d_n, d_{n-1}) on
// the circle: the wrap-around gap phi_0 - phi_{N-1} + 2*pi participates.
SpacingRatioStats spacing_ratio_stats(const std::vector<double>& phases);

struct ParticipationStats {
  std::vector<double> xi;  // per eigenstate
  double mean_xi = 0.0;
  double rmt_benchmark = 0.0;  // D_sec / 3
  std::size_t dim = 0;
};

// Participation ratios of unit-normalized columns of a row-major
// dim x ncols amplitude matrix.
ParticipationStats participation_stats(const CVec& vectors, std::size_t dim, std::size_t ncols);

struct DiagnosticsRow {
  double h_x = 0.0;
  int L = 0;
  int parity = +1;
  double mean_r = 0.0;
  double eta = 0.0;
  double mean_xi = 0.0;
  std::size_t dim = 0;
};

// One quasienergy diagonalization per grid point; PR in the parity-adapted
// computational basis of the analyzed sector.
std::vector<DiagnosticsRow> diagnostics_sweep(const std::vector<double>& h_x_grid,
                                              const ModelParams& base, int parity,
                                              std::size_t cap = kDenseCap);

}  // namespace kis
