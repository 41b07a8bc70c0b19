#include "kis/otoc.hpp"

#include <algorithm>
#include <cmath>

namespace kis {

// (1/D) sum_{m,n} W_{mn} z(n) W_{nm} z(m), blocked for the transposed access.
cplx otoc_contraction(const CVec& w, std::size_t D, int l) {
  constexpr std::size_t B = 64;
  double re = 0.0, im = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : re, im)
  for (std::size_t mb = 0; mb < D; mb += B) {
    const std::size_t mmax = std::min(mb + B, D);
    for (std::size_t nb = 0; nb < D; nb += B) {
      const std::size_t nmax = std::min(nb + B, D);
      for (std::size_t m = mb; m < mmax; ++m) {
        const double zm = spin_at(m, l);
        for (std::size_t n = nb; n < nmax; ++n) {
          const cplx term = w[m * D + n] * w[n * D + m] * (zm * spin_at(n, l));
          re += term.real();
          im += term.imag();
        }
      }
    }
  }
  return cplx(re, im) / double(D);
}

OtocSeries otoc_series(const FloquetModel& model, int l, int t_max, std::size_t cap) {
  const std::size_t D = model.D;
  if (l < 1 || l >= model.params.L) throw std::invalid_argument("otoc_series: l out of range");
  if (t_max < 0) throw std::invalid_argument("otoc_series: negative t_max");
  if (D > cap) throw resource_error("otoc_series: dimension exceeds dense cap");

  CVec w(D * D, cplx(0.0)), scratch;
  for (std::size_t m = 0; m < D; ++m) w[m * D + m] = double(spin_at(m, 0));

  OtocSeries series;
  series.l = l;
  series.params = model.params;
  series.o1.reserve(std::size_t(t_max) + 1);
  for (int t = 0; t <= t_max; ++t) {
    if (t > 0) conjugate_operator_step(w, model, scratch);
    const cplx o1 = otoc_contraction(w, D, l);
    series.imag_max = std::max(series.imag_max, std::abs(o1.imag()));
    series.o1.push_back(o1.real());
  }
  return series;
}

double estimate_plateau(const std::vector<double>& o1) {
  const std::size_t n = o1.size();
  if (n < 20) throw std::invalid_argument("estimate_plateau: series too short (need >= 20)");
  const std::size_t tail = (n + 4) / 5;  // final 20%
  std::vector<double> abs_tail(o1.end() - tail, o1.end());
  for (double& v : abs_tail) v = std::abs(v);
  std::sort(abs_tail.begin(), abs_tail.end());
  const std::size_t mid = tail / 2;
  return (tail % 2 == 1) ? abs_tail[mid] : 0.5 * (abs_tail[mid - 1] + abs_tail[mid]);
}

double estimate_plateau(const OtocSeries& series) { return estimate_plateau(series.o1); }

namespace {

struct LinFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
  bool ok = false;
};

LinFit linfit_window(const std::vector<double>& logy, int a, int b) {
  LinFit f;
  const int n = b - a + 1;
  double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
  for (int t = a; t <= b; ++t) {
    st += t;
    sy += logy[t];
    stt += double(t) * t;
    sty += double(t) * logy[t];
    syy += logy[t] * logy[t];
  }
  const double det = n * stt - st * st;
  if (det <= 0) return f;
  f.slope = (n * sty - st * sy) / det;
  f.intercept = (sy - f.slope * st) / n;
  const double ss_tot = syy - sy * sy / n;
  double ss_res = 0.0;
  for (int t = a; t <= b; ++t) {
    const double d = logy[t] - (f.intercept + f.slope * t);
    ss_res += d * d;
  }
  f.r2 = ss_tot > 0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 0.0;
  f.ok = true;
  return f;
}

// Least squares of logy over the selected times cand[i..j].
LinFit linfit_points(const std::vector<int>& cand, const std::vector<double>& logy, int i,
                     int j) {
  LinFit f;
  const int n = j - i + 1;
  double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
  for (int k = i; k <= j; ++k) {
    const double t = cand[k], v = logy[cand[k]];
    st += t;
    sy += v;
    stt += t * t;
    sty += t * v;
    syy += v * v;
  }
  const double det = n * stt - st * st;
  if (det <= 0) return f;
  f.slope = (n * sty - st * sy) / det;
  f.intercept = (sy - f.slope * st) / n;
  const double ss_tot = syy - sy * sy / n;
  double ss_res = 0.0;
  for (int k = i; k <= j; ++k) {
    const double d = logy[cand[k]] - (f.intercept + f.slope * cand[k]);
    ss_res += d * d;
  }
  f.r2 = ss_tot > 0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 0.0;
  f.ok = true;
  return f;
}

}  // namespace

DecayFit fit_decay(const std::vector<double>& o1, std::optional<std::pair<int, int>> window) {
  const int n = int(o1.size());
  DecayFit fit;

  std::vector<double> y(n), logy(n, 0.0);
  std::vector<char> valid(n, 0);
  for (int t = 0; t < n; ++t) {
    y[t] = std::abs(o1[t]);
    if (y[t] > 0.0) {
      logy[t] = std::log(y[t]);
      valid[t] = 1;
    }
  }
  fit.plateau = (n >= 20) ? estimate_plateau(o1) : 0.0;

  int t1 = -1, t2 = -1;
  if (window) {
    t1 = window->first;
    t2 = window->second;
    if (t1 < 0 || t2 >= n || t1 >= t2 || t2 - t1 + 1 < 6)
      throw std::invalid_argument("fit_decay: window override needs >= 6 points in range");
    for (int t = t1; t <= t2; ++t)
      if (!valid[t]) throw std::invalid_argument("fit_decay: |O1| = 0 inside window");
  } else {
    if (n < 20) throw std::invalid_argument("fit_decay: series too short (need >= 20)");
    const double threshold = 3.0 * fit.plateau;
    // The series alternates in sign in the scrambling regime, so the log of
    // the raw values is dominated by near-zeros. Fit the monotone upper
    // envelope instead: keep t only if |O1(t)| tops everything after it.
    // Points at O(1) belong to the early ballistic regime, not the
    // exponential one, so start past the last global maximum and above it
    // require |O1| < peak/e. Stop at 3x the late-time plateau.
    const double y_max = *std::max_element(y.begin(), y.end());
    int t_peak = 0;
    for (int t = 0; t < n; ++t)
      if (y[t] == y_max) t_peak = t;
    const double ceiling = y_max / std::exp(1.0);
    std::vector<double> suffix_max(n + 1, 0.0);
    for (int t = n - 1; t >= 0; --t) suffix_max[t] = std::max(y[t], suffix_max[t + 1]);
    std::vector<int> cand;
    for (int t = t_peak + 1; t < n; ++t) {
      if (!valid[t] || y[t] < threshold) break;
      if (y[t] > ceiling) continue;
      if (y[t] >= suffix_max[t + 1]) cand.push_back(t);
    }
    constexpr int kMinPts = 6;
    const int nc = int(cand.size());
    double best_r2 = -1.0;
    int best_i = -1, best_j = -1;
    for (int i = 0; i + kMinPts - 1 < nc; ++i) {
      for (int j = i + kMinPts - 1; j < nc; ++j) {
        LinFit f = linfit_points(cand, logy, i, j);
        if (!f.ok || f.slope >= 0.0) continue;
        if (f.r2 > best_r2 + 1e-12 ||
            (std::abs(f.r2 - best_r2) <= 1e-12 && j - i > best_j - best_i)) {
          best_r2 = f.r2;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_i < 0) {
      fit.verdict = "no exponential regime";
      return fit;
    }
    LinFit f = linfit_points(cand, logy, best_i, best_j);
    fit.has_decay = true;
    fit.verdict = "ok";
    fit.alpha = -f.slope;
    fit.log_prefactor = f.intercept;
    fit.t1 = cand[best_i];
    fit.t2 = cand[best_j];
    fit.r_squared = f.r2;
    return fit;
  }

  LinFit f = linfit_window(logy, t1, t2);
  if (!f.ok || f.slope >= 0.0) {
    fit.verdict = "no exponential regime";
    return fit;
  }
  fit.has_decay = true;
  fit.verdict = "ok";
  fit.alpha = -f.slope;
  fit.log_prefactor = f.intercept;
  fit.t1 = t1;
  fit.t2 = t2;
  fit.r_squared = f.r2;
  return fit;
}

DecayFit fit_decay(const OtocSeries& series, std::optional<std::pair<int, int>> window) {
  return fit_decay(series.o1, window);
}

}  // namespace kis
