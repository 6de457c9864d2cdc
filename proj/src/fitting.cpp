#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "trumpet/analysis.hpp"
#include "trumpet/errors.hpp"

namespace trumpet {

bool ljung_box_white(const std::vector<double>& residuals, int max_lag) {
  require_valid(max_lag >= 1 && max_lag <= 10,
                "ljung-box: max_lag must be in [1, 10]");
  const std::size_t n = residuals.size();
  require_valid(n >= 8, "ljung-box: need at least 8 residuals");
  const int m = std::min<int>(max_lag, static_cast<int>(n) / 4);

  double mean = 0.0;
  for (double r : residuals) mean += r;
  mean /= static_cast<double>(n);
  double denom = 0.0;
  for (double r : residuals) denom += (r - mean) * (r - mean);
  if (denom == 0.0) return true;

  double q = 0.0;
  for (int k = 1; k <= m; ++k) {
    double num = 0.0;
    for (std::size_t i = 0; i + k < n; ++i)
      num += (residuals[i] - mean) * (residuals[i + k] - mean);
    const double rho = num / denom;
    q += rho * rho / static_cast<double>(n - k);
  }
  q *= static_cast<double>(n) * (static_cast<double>(n) + 2.0);

  // chi-squared 95th percentiles for 1..10 degrees of freedom.
  static const double k_chi2_95[10] = {3.841,  5.991,  7.815,  9.488, 11.070,
                                       12.592, 14.067, 15.507, 16.919, 18.307};
  return q < k_chi2_95[m - 1];
}

namespace {

double lineshape_model(const double p[4], double delta) {
  LineshapeParams q;
  q.amplitude_per_s = p[0];
  q.center_per_s = p[1];
  q.lorentzian_fwhm_per_s = p[2] * p[2];
  q.gaussian_fwhm_per_s = p[3] * p[3];
  return lineshape_rate(q, delta);
}

double rss_of(const double p[4], const std::vector<RateScanPoint>& pts) {
  double rss = 0.0;
  for (const RateScanPoint& pt : pts) {
    const double r = lineshape_model(p, pt.delta_per_s) - pt.rate_per_s;
    rss += r * r;
  }
  return rss;
}

// Solve the 4x4 system a x = b by Gaussian elimination with partial
// pivoting; returns false when the matrix is numerically singular.
bool solve4(double a[4][4], const double b[4], double x[4]) {
  double m[4][5];
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m[i][j] = a[i][j];
    m[i][4] = b[i];
  }
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (std::abs(m[pivot][col]) < 1e-300) return false;
    for (int j = col; j < 5; ++j) std::swap(m[col][j], m[pivot][j]);
    for (int r = col + 1; r < 4; ++r) {
      const double factor = m[r][col] / m[col][col];
      for (int j = col; j < 5; ++j) m[r][j] -= factor * m[col][j];
    }
  }
  for (int i = 3; i >= 0; --i) {
    double v = m[i][4];
    for (int j = i + 1; j < 4; ++j) v -= m[i][j] * x[j];
    x[i] = v / m[i][i];
  }
  for (int i = 0; i < 4; ++i)
    if (!std::isfinite(x[i])) return false;
  return true;
}

// Invert the symmetric 4x4 matrix by solving against unit vectors, with a
// tiny ridge when a direction is degenerate (e.g. a width stuck at zero).
void invert4(double a[4][4], double inv[4][4]) {
  double ridge = 0.0;
  for (int i = 0; i < 4; ++i) ridge = std::max(ridge, a[i][i]);
  ridge = ridge > 0.0 ? 1e-12 * ridge : 1e-300;
  for (int attempt = 0; attempt < 60; ++attempt) {
    double work[4][4];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        work[i][j] = a[i][j] + (i == j ? ridge * attempt : 0.0);
    bool ok = true;
    for (int col = 0; col < 4 && ok; ++col) {
      double e[4] = {0, 0, 0, 0};
      e[col] = 1.0;
      double x[4];
      double scratch[4][4];
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) scratch[i][j] = work[i][j];
      ok = solve4(scratch, e, x);
      if (ok)
        for (int i = 0; i < 4; ++i) inv[i][col] = x[i];
    }
    if (ok) return;
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) inv[i][j] = 0.0;
}

}  // namespace

FitReport fit_rf_spectrum(const std::vector<RateScanPoint>& scan) {
  require_valid(scan.size() >= 10, "lineshape fit: need at least 10 points");
  std::vector<RateScanPoint> pts = scan;
  std::sort(pts.begin(), pts.end(),
            [](const RateScanPoint& a, const RateScanPoint& b) {
              return a.delta_per_s < b.delta_per_s;
            });
  for (const RateScanPoint& pt : pts)
    require_valid(std::isfinite(pt.delta_per_s) &&
                      std::isfinite(pt.rate_per_s) && pt.rate_per_s >= 0.0,
                  "lineshape fit: rates must be finite and >= 0");

  std::size_t peak_idx = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].rate_per_s > pts[peak_idx].rate_per_s) peak_idx = i;
  const double amp0 = pts[peak_idx].rate_per_s;
  require_valid(amp0 > 0.0, "lineshape fit: all rates are zero");

  // Estimate the total FWHM from the half-maximum crossings; the scan must
  // cover at least three of them.
  const double half = 0.5 * amp0;
  double lo_cross = pts.front().delta_per_s;
  double hi_cross = pts.back().delta_per_s;
  bool lo_found = false, hi_found = false;
  for (std::size_t i = peak_idx; i-- > 0;)
    if (pts[i].rate_per_s < half) {
      lo_cross = pts[i].delta_per_s;
      lo_found = true;
      break;
    }
  for (std::size_t i = peak_idx + 1; i < pts.size(); ++i)
    if (pts[i].rate_per_s < half) {
      hi_cross = pts[i].delta_per_s;
      hi_found = true;
      break;
    }
  require_valid(lo_found && hi_found,
                "lineshape fit: scan does not bracket the half maximum");
  const double fwhm0 = hi_cross - lo_cross;
  const double span = pts.back().delta_per_s - pts.front().delta_per_s;
  require_valid(span > 3.0 * fwhm0,
                "lineshape fit: scan must span more than 3 FWHM");

  // Widths are parameterized by their square roots so they stay >= 0.
  double p[4] = {amp0, pts[peak_idx].delta_per_s, std::sqrt(0.55 * fwhm0),
                 std::sqrt(0.55 * fwhm0)};
  const double scale[4] = {amp0, fwhm0, std::sqrt(fwhm0), std::sqrt(fwhm0)};

  double rss = rss_of(p, pts);
  double mu = 1e-3;
  int iterations = 0;
  bool converged = false;
  double jac_rows = static_cast<double>(pts.size());
  std::vector<double> jac(pts.size() * 4);

  for (; iterations < 200 && !converged; ++iterations) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (int j = 0; j < 4; ++j) {
        const double h = 1e-6 * std::max(std::abs(p[j]), scale[j]);
        double pp[4] = {p[0], p[1], p[2], p[3]};
        pp[j] = p[j] + h;
        const double up = lineshape_model(pp, pts[i].delta_per_s);
        pp[j] = p[j] - h;
        const double dn = lineshape_model(pp, pts[i].delta_per_s);
        jac[i * 4 + j] = (up - dn) / (2.0 * h);
      }
    double a[4][4] = {};
    double g[4] = {};
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double r = lineshape_model(p, pts[i].delta_per_s) - pts[i].rate_per_s;
      for (int j = 0; j < 4; ++j) {
        g[j] += jac[i * 4 + j] * r;
        for (int k = j; k < 4; ++k) a[j][k] += jac[i * 4 + j] * jac[i * 4 + k];
      }
    }
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < j; ++k) a[j][k] = a[k][j];

    bool stepped = false;
    for (int attempt = 0; attempt < 30 && !stepped; ++attempt) {
      double damped[4][4];
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          damped[j][k] =
              a[j][k] + (j == k ? mu * std::max(a[j][j], 1e-300) : 0.0);
      double neg_g[4] = {-g[0], -g[1], -g[2], -g[3]};
      double step[4];
      if (!solve4(damped, neg_g, step)) {
        mu *= 10.0;
        continue;
      }
      double cand[4] = {p[0] + step[0], p[1] + step[1], p[2] + step[2],
                        p[3] + step[3]};
      const double cand_rss = rss_of(cand, pts);
      if (cand_rss <= rss) {
        double rel_step = 0.0;
        for (int j = 0; j < 4; ++j)
          rel_step = std::max(rel_step, std::abs(step[j]) / scale[j]);
        converged = (rss - cand_rss <= 1e-12 * rss + 1e-300) ||
                    rel_step < 1e-10;
        for (int j = 0; j < 4; ++j) p[j] = cand[j];
        rss = cand_rss;
        mu = std::max(mu / 3.0, 1e-14);
        stepped = true;
      } else {
        mu *= 10.0;
      }
    }
    if (!stepped) {
      // No downhill direction within the damping budget: accept as
      // converged only if the gradient is already negligible.
      double gnorm = 0.0;
      for (int j = 0; j < 4; ++j)
        gnorm = std::max(gnorm, std::abs(g[j]) * scale[j]);
      if (gnorm <= 1e-8 * (rss + 1e-300))
        converged = true;
      else
        throw FitFailure("lineshape fit: stalled without convergence (rss=" +
                         std::to_string(rss) + ")");
    }
  }
  if (!converged)
    throw FitFailure(
        "lineshape fit: no convergence after 200 iterations (rss=" +
        std::to_string(rss) + ")");

  FitReport report;
  report.params.amplitude_per_s = p[0];
  report.params.center_per_s = p[1];
  report.params.lorentzian_fwhm_per_s = p[2] * p[2];
  report.params.gaussian_fwhm_per_s = p[3] * p[3];
  report.rss = rss;
  report.iterations = iterations;

  // Covariance from the final Jacobian: C = rss/(n-4) (J^T J)^-1, mapped
  // through the square-root width parameterization.
  double a[4][4] = {};
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int j = 0; j < 4; ++j) {
      const double h = 1e-6 * std::max(std::abs(p[j]), scale[j]);
      double pp[4] = {p[0], p[1], p[2], p[3]};
      pp[j] = p[j] + h;
      const double up = lineshape_model(pp, pts[i].delta_per_s);
      pp[j] = p[j] - h;
      const double dn = lineshape_model(pp, pts[i].delta_per_s);
      jac[i * 4 + j] = (up - dn) / (2.0 * h);
    }
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = j; k < 4; ++k) a[j][k] += jac[i * 4 + j] * jac[i * 4 + k];
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < j; ++k) a[j][k] = a[k][j];
  double inv[4][4];
  invert4(a, inv);
  const double dof = std::max(jac_rows - 4.0, 1.0);
  const double s2 = rss / dof;
  report.sigma_amplitude = std::sqrt(std::max(0.0, s2 * inv[0][0]));
  report.sigma_center = std::sqrt(std::max(0.0, s2 * inv[1][1]));
  report.sigma_lorentzian_fwhm =
      2.0 * std::abs(p[2]) * std::sqrt(std::max(0.0, s2 * inv[2][2]));
  report.sigma_gaussian_fwhm =
      2.0 * std::abs(p[3]) * std::sqrt(std::max(0.0, s2 * inv[3][3]));

  std::vector<double> residuals(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    residuals[i] = pts[i].rate_per_s - lineshape_model(p, pts[i].delta_per_s);
  report.residuals_white = ljung_box_white(residuals, 10);
  return report;
}

}  // namespace trumpet
