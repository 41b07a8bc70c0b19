#include "kis/extrapolate.hpp"

#include <cmath>

#include "kis/eig.hpp"

namespace kis {

GapCurve gap_curve(const ModelParams& params, const std::vector<double>& gamma_grid,
                   const std::string& sector, const ArnoldiOptions& opts) {
  if (gamma_grid.empty()) throw std::invalid_argument("gap_curve: empty gamma grid");
  for (std::size_t k = 0; k < gamma_grid.size(); ++k) {
    if (gamma_grid[k] <= 0.0) throw std::invalid_argument("gap_curve: gamma must be > 0");
    if (k > 0 && gamma_grid[k] <= gamma_grid[k - 1])
      throw std::invalid_argument("gap_curve: gamma grid must be strictly increasing");
  }
  if (sector != "global" && sector != "even" && sector != "odd")
    throw std::invalid_argument("gap_curve: sector must be global|even|odd");

  FloquetModel model(params);
  GapCurve curve;
  curve.L = params.L;
  curve.h_x = params.h_x;
  curve.sector = sector;
  for (double gamma : gamma_grid) {
    DephasingModel deph(model, gamma);
    if (sector == "global")
      curve.points.push_back(global_gap(deph, opts));
    else
      curve.points.push_back(sector_gap(deph, sector == "even" ? +1 : -1, opts));
  }
  return curve;
}

ExtrapolationResult quadratic_extrapolate(const GapCurve& curve, bool converged_only) {
  std::vector<double> x, y;
  for (const GapResult& p : curve.points) {
    if (converged_only && !p.converged) continue;
    x.push_back(p.gamma);
    y.push_back(p.g);
  }
  if (x.size() < 4)
    throw std::invalid_argument("quadratic_extrapolate: need >= 4 converged points");

  ExtrapolationResult res;
  std::vector<double> coef = polyfit(x, y, 2, &res.residual_norm);
  res.gbar = coef[0];
  res.c1 = coef[1];
  res.c2 = coef[2];
  res.points_used = int(x.size());
  res.suspicious = res.gbar < 0.0;
  return res;
}

CorrespondenceReport compare_alpha_gap(double alpha, const ExtrapolationResult& extrap,
                                       double h_x, int L_otoc, int L_gap) {
  CorrespondenceReport rep;
  rep.alpha = alpha;
  rep.gbar = extrap.gbar;
  rep.ratio = alpha / (2.0 * extrap.gbar);
  rep.discrepancy = std::abs(alpha - 2.0 * extrap.gbar);
  rep.h_x = h_x;
  rep.L_otoc = L_otoc;
  rep.L_gap = L_gap;
  return rep;
}

}  // namespace kis
