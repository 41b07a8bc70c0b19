#pragma once

#include <optional>

#include "kis/floquet.hpp"
#include "kis/types.hpp"

namespace kis {

// Infinite-temperature OTOC series for sigma^z operators at sites 0 and l:
// O1(t) = (1/D) Re Tr[ sigma_0^z(t) sigma_l^z sigma_0^z(t) sigma_l^z ],
// C(t) = 1 - O1(t). Stored signed; imag_max tracks the largest imaginary
// part seen in the trace before Re is taken (numerical health).
struct OtocSeries {
  std::vector<double> o1;  // index = stroboscopic time t
  int l = 1;
  double imag_max = 0.0;
  ModelParams params;
  std::size_t size() const { return o1.size(); }
  double c(std::size_t t) const { return 1.0 - o1[t]; }
};

// (1/D) sum_{m,n} W_{mn} z_l(n) W_{nm} z_l(m), cache-blocked and parallel.
cplx otoc_contraction(const CVec& w, std::size_t D, int l);

// Exact dense Heisenberg evolution: W(t+1) = U_F^dag W(t) U_F with
// W(0) = sigma_0^z, O(D^2 L) per period.
OtocSeries otoc_series(const FloquetModel& model, int l, int t_max,
                       std::size_t cap = kDenseCap);

// Median of |O1| over the final 20% of the series.
double estimate_plateau(const OtocSeries& series);
double estimate_plateau(const std::vector<double>& o1);

struct DecayFit {
  bool has_decay = false;
  std::string verdict;  // "ok" or reason for no exponential regime
  double alpha = 0.0;
  double log_prefactor = 0.0;
  int t1 = 0, t2 = 0;  // fit window, inclusive
  double r_squared = 0.0;
  double plateau = 0.0;
};

// Linear least squares of ln|O1| vs t. The automatic window is the
// length >= 8 stretch after the global max that stays above 3x plateau
// and maximizes r^2; a window override skips the search.
DecayFit fit_decay(const OtocSeries& series,
                   std::optional<std::pair<int, int>> window = std::nullopt);
DecayFit fit_decay(const std::vector<double>& o1,
                   std::optional<std::pair<int, int>> window = std::nullopt);

}  // namespace kis
