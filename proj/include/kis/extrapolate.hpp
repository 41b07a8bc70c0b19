#pragma once

#include "kis/krylov.hpp"
#include "kis/types.hpp"

namespace kis {

struct GapCurve {
  std::vector<GapResult> points;  // strictly increasing gamma, all > 0
  int L = 0;
  double h_x = 0.0;
  std::string sector = "global";
};

// One Arnoldi gap run per grid point. sector is "global", "even" or "odd".
GapCurve gap_curve(const ModelParams& params, const std::vector<double>& gamma_grid,
                   const std::string& sector, const ArnoldiOptions& opts);

struct ExtrapolationResult {
  double gbar = 0.0;  // fitted polynomial at gamma = 0
  double c1 = 0.0;
  double c2 = 0.0;
  double residual_norm = 0.0;
  int points_used = 0;
  bool suspicious = false;  // gbar < 0
};

// Least-squares quadratic g = c0 + c1 gamma + c2 gamma^2 over converged
// points; gbar = c0.
ExtrapolationResult quadratic_extrapolate(const GapCurve& curve, bool converged_only = true);

struct CorrespondenceReport {
  double alpha = 0.0;
  double gbar = 0.0;
  double ratio = 0.0;        // alpha / (2 gbar)
  double discrepancy = 0.0;  // |alpha - 2 gbar|
  double h_x = 0.0;
  int L_otoc = 0;
  int L_gap = 0;
};

CorrespondenceReport compare_alpha_gap(double alpha, const ExtrapolationResult& extrap,
                                       double h_x, int L_otoc, int L_gap);

}  // namespace kis
