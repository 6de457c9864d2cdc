#include "trumpet/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "trumpet/constants.hpp"
#include "trumpet/errors.hpp"

namespace trumpet {

CouplingFit extract_coupling(const std::vector<DetuningArea>& points,
                             const LineshapeParams& line, const MechMode& mode,
                             double temperature_k) {
  line.validate();
  mode.validate();
  require_valid(temperature_k > 0.0, "coupling: temperature must be > 0");
  require_valid(points.size() >= 3, "coupling: need at least 3 detuning points");

  const double u_ratio = thermal_rms_m(mode, temperature_k) / zero_point_m(mode);

  // The model is linear in lambda^2: A_i = lambda^2 * g_i with
  // g_i = (u_ratio * slope_i / rate_i)^2.
  std::vector<double> g(points.size());
  bool weighted = true;
  bool any_signal = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const DetuningArea& pt = points[i];
    require_valid(std::isfinite(pt.area) && pt.area >= 0.0,
                  "coupling: areas must be finite and >= 0");
    require_valid(pt.area_sigma >= 0.0, "coupling: sigma must be >= 0");
    if (pt.area_sigma == 0.0) weighted = false;
    if (pt.area > 0.0) any_signal = true;
    const double rate = lineshape_rate(line, pt.delta_per_s);
    require_valid(rate > 0.0,
                  "coupling: detuning point outside the support of the line");
    const double ratio = u_ratio * lineshape_slope(line, pt.delta_per_s) / rate;
    g[i] = ratio * ratio;
  }
  if (!any_signal) throw FitFailure("coupling: all areas are zero (no signal)");

  double num = 0.0, denom = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double w =
        weighted ? 1.0 / (points[i].area_sigma * points[i].area_sigma) : 1.0;
    num += w * g[i] * points[i].area;
    denom += w * g[i] * g[i];
  }
  if (denom <= 0.0)
    throw FitFailure("coupling: scan has no transduction leverage "
                     "(all points at the line center)");

  const double lambda_sq = num / denom;
  CouplingFit fit;
  fit.lambda_per_s = std::sqrt(lambda_sq);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double w =
        weighted ? 1.0 / (points[i].area_sigma * points[i].area_sigma) : 1.0;
    const double r = points[i].area - lambda_sq * g[i];
    fit.residual += w * r * r;
  }
  double var_lambda_sq;
  if (weighted) {
    var_lambda_sq = 1.0 / denom;
  } else {
    const double dof = static_cast<double>(points.size()) - 1.0;
    var_lambda_sq = fit.residual / dof / denom;
  }
  // Delta method through lambda = sqrt(lambda^2). A coupling consistent
  // with zero falls back to the scale of the lambda^2 uncertainty.
  fit.lambda_variance = lambda_sq > 0.0 ? var_lambda_sq / (4.0 * lambda_sq)
                                        : std::sqrt(var_lambda_sq);
  return fit;
}

std::vector<PeakResult> assign_modes(const std::vector<PeakResult>& peaks,
                                     const Catalog& catalog,
                                     double relative_tolerance) {
  catalog.validate();
  require_valid(relative_tolerance > 0.0, "assign: tolerance must be > 0");

  struct Candidate {
    double rel_err;
    std::size_t peak;
    std::size_t mode;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < peaks.size(); ++i)
    for (std::size_t j = 0; j < catalog.modes.size(); ++j) {
      const double f_mode = angular_to_cycles(catalog.modes[j].omega_m_per_s);
      const double rel = std::abs(peaks[i].frequency_hz - f_mode) / f_mode;
      if (rel <= relative_tolerance) candidates.push_back({rel, i, j});
    }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              return std::tie(a.rel_err, a.peak, a.mode) <
                     std::tie(b.rel_err, b.peak, b.mode);
            });

  std::vector<PeakResult> labeled = peaks;
  for (PeakResult& p : labeled) p.label = "unknown";
  std::vector<bool> peak_used(peaks.size(), false);
  std::vector<bool> mode_used(catalog.modes.size(), false);
  for (const Candidate& c : candidates) {
    if (peak_used[c.peak] || mode_used[c.mode]) continue;
    labeled[c.peak].label = catalog.modes[c.mode].label;
    peak_used[c.peak] = true;
    mode_used[c.mode] = true;
  }
  return labeled;
}

void LocalizeGrid::validate() const {
  require_valid(r_step_m > 0.0 && phi_step_rad > 0.0,
                "localize: coarse steps must be > 0");
  require_valid(fine_r_step_m > 0.0 && fine_phi_step_rad > 0.0,
                "localize: fine steps must be > 0");
  require_valid(fine_r_step_m <= r_step_m &&
                    fine_phi_step_rad <= phi_step_rad,
                "localize: fine steps must not exceed coarse steps");
}

namespace {

// The canonical quadrant is closed at phi = pi/2 for localization (the
// neutral axis of the x-flexural family is a physical answer), while the
// strain evaluator's domain is half-open; evaluate infinitesimally inside.
double eval_phi(double phi_rad) {
  const double half_pi = 0.5 * k_pi;
  return phi_rad >= half_pi ? std::nextafter(half_pi, 0.0) : phi_rad;
}

std::vector<double> grid_axis(double limit, double step) {
  std::vector<double> values;
  for (std::size_t i = 0;; ++i) {
    const double v = static_cast<double>(i) * step;
    if (v > limit * (1.0 + 1e-12)) break;
    values.push_back(std::min(v, limit));
  }
  if (values.back() < limit) values.push_back(limit);
  return values;
}

// The validated localization objective, shared by the grid search and the
// public chi-square evaluator (residual maps).
struct LocalizeProblem {
  std::vector<const MechMode*> modes;
  std::size_t ref = 0;
  std::vector<double> measured;
  std::vector<double> scales;
  std::vector<std::size_t> fit_idx;
  double radius = 0.0;

  double chi(double r_m, double phi_rad) const {
    const QDPosition pos{r_m, eval_phi(phi_rad)};
    const double ref_zz = strain_at(*modes[ref], pos, radius).e_zz;
    if (ref_zz == 0.0) return std::numeric_limits<double>::infinity();
    double chi2 = 0.0;
    for (std::size_t j = 0; j < fit_idx.size(); ++j) {
      const double zz = strain_at(*modes[fit_idx[j]], pos, radius).e_zz;
      const double ratio = zz / ref_zz;
      const double resid = (measured[j] - ratio * ratio) / scales[j];
      chi2 += resid * resid;
    }
    return chi2;
  }
};

LocalizeProblem build_localize_problem(
    const std::vector<LabeledAmplitude>& amplitudes, const Catalog& catalog,
    const std::string& reference_label) {
  catalog.validate();
  require_valid(amplitudes.size() >= 2,
                "localize: need at least two mode amplitudes");

  LocalizeProblem problem;
  problem.modes.resize(amplitudes.size());
  bool weighted = true;
  bool any_flexural = false;
  for (std::size_t k = 0; k < amplitudes.size(); ++k) {
    const LabeledAmplitude& a = amplitudes[k];
    require_valid(catalog.has_mode(a.label),
                  "localize: unknown mode label: " + a.label);
    require_valid(std::isfinite(a.amplitude) && a.amplitude >= 0.0,
                  "localize: amplitudes must be finite and >= 0");
    require_valid(a.sigma >= 0.0, "localize: sigma must be >= 0");
    problem.modes[k] = &catalog.mode(a.label);
    if (a.sigma == 0.0) weighted = false;
    if (problem.modes[k]->family != ModeFamily::breathing)
      any_flexural = true;
  }
  if (!any_flexural)
    throw UnresolvablePosition(
        "localize: breathing strain is uniform over the cross-section; "
        "at least one flexural mode is required");

  // Reference mode: explicit choice, else the first breathing mode
  // (position-independent strain), else the strongest peak.
  std::size_t ref = amplitudes.size();
  if (!reference_label.empty()) {
    for (std::size_t k = 0; k < amplitudes.size(); ++k)
      if (amplitudes[k].label == reference_label) ref = k;
    require_valid(ref < amplitudes.size(),
                  "localize: reference mode not among the amplitudes");
  } else {
    for (std::size_t k = 0; k < amplitudes.size() && ref == amplitudes.size();
         ++k)
      if (problem.modes[k]->family == ModeFamily::breathing) ref = k;
    if (ref == amplitudes.size()) {
      ref = 0;
      for (std::size_t k = 1; k < amplitudes.size(); ++k)
        if (amplitudes[k].amplitude > amplitudes[ref].amplitude) ref = k;
    }
  }
  require_valid(amplitudes[ref].amplitude > 0.0,
                "localize: reference amplitude must be > 0");
  problem.ref = ref;

  problem.radius = catalog.cross_section_radius_m;
  const double a_ref = amplitudes[ref].amplitude;
  for (std::size_t k = 0; k < amplitudes.size(); ++k) {
    if (k == ref) continue;
    const double m = amplitudes[k].amplitude / a_ref;
    problem.measured.push_back(m);
    problem.scales.push_back(weighted ? amplitudes[k].sigma / a_ref
                                      : std::max(m, 1e-6));
    problem.fit_idx.push_back(k);
  }
  return problem;
}

}  // namespace

double localization_chi_square(
    const std::vector<LabeledAmplitude>& amplitudes, const Catalog& catalog,
    const QDPosition& position, const std::string& reference_label) {
  const LocalizeProblem problem =
      build_localize_problem(amplitudes, catalog, reference_label);
  return problem.chi(position.r_m, position.phi_rad);
}

LocalizationResult localize_qd(const std::vector<LabeledAmplitude>& amplitudes,
                               const Catalog& catalog,
                               const LocalizeGrid& grid) {
  grid.validate();
  const LocalizeProblem problem =
      build_localize_problem(amplitudes, catalog, grid.reference_label);
  const std::vector<const MechMode*>& modes = problem.modes;
  const std::size_t ref = problem.ref;
  const double radius = problem.radius;
  const double a_ref = amplitudes[ref].amplitude;

  auto chi_square_at = [&](double r_m, double phi_rad) {
    return problem.chi(r_m, phi_rad);
  };

  // Stage 1: coarse scan of the full quadrant. Ties keep the first hit in
  // scan order (ascending r, then ascending phi).
  const double half_pi = 0.5 * k_pi;
  double best_r = 0.0, best_phi = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (double r : grid_axis(radius, grid.r_step_m))
    for (double phi : grid_axis(half_pi, grid.phi_step_rad)) {
      const double chi2 = chi_square_at(r, phi);
      if (chi2 < best) {
        best = chi2;
        best_r = r;
        best_phi = phi;
      }
    }
  if (!std::isfinite(best))
    throw UnresolvablePosition("localize: no admissible grid position");

  // Stage 2: refine one coarse cell around the minimum; the coarse argmin
  // itself is on the fine grid, so refinement can only improve.
  const auto fine_axis = [](double center, double span, double step,
                            double lo, double hi) {
    std::vector<double> values;
    const int n = static_cast<int>(std::lround(span / step));
    for (int i = -n; i <= n; ++i) {
      const double v = center + static_cast<double>(i) * step;
      if (v >= lo - 1e-15 && v <= hi * (1.0 + 1e-12))
        values.push_back(std::clamp(v, lo, hi));
    }
    return values;
  };
  for (double r :
       fine_axis(best_r, grid.r_step_m, grid.fine_r_step_m, 0.0, radius))
    for (double phi : fine_axis(best_phi, grid.phi_step_rad,
                                grid.fine_phi_step_rad, 0.0, half_pi)) {
      const double chi2 = chi_square_at(r, phi);
      if (chi2 < best) {
        best = chi2;
        best_r = r;
        best_phi = phi;
      }
    }

  LocalizationResult result;
  result.position = QDPosition{best_r, best_phi};
  result.chi_square = best;
  const QDPosition fit_pos{best_r, eval_phi(best_phi)};
  const double ref_zz = strain_at(*modes[ref], fit_pos, radius).e_zz;
  for (std::size_t k = 0; k < amplitudes.size(); ++k) {
    result.labels.push_back(amplitudes[k].label);
    result.measured.push_back(amplitudes[k].amplitude / a_ref);
    if (k == ref) {
      result.predicted.push_back(1.0);
    } else {
      const double zz = strain_at(*modes[k], fit_pos, radius).e_zz;
      const double ratio = zz / ref_zz;
      result.predicted.push_back(ratio * ratio);
    }
  }
  return result;
}

double displacement_sensitivity(const Spectrum& spec, const MechMode& mode,
                                double lambda_per_s,
                                const LineshapeParams& line,
                                double delta_per_s) {
  spec.validate();
  mode.validate();
  line.validate();
  require_valid(lambda_per_s > 0.0, "sensitivity: coupling must be > 0");

  const double f_m = angular_to_cycles(mode.omega_m_per_s);
  require_valid(f_m >= spec.frequency_hz.front() &&
                    f_m <= spec.frequency_hz.back(),
                "sensitivity: mode frequency outside the spectrum");

  const double rate = lineshape_rate(line, delta_per_s);
  require_valid(rate > 0.0,
                "sensitivity: detuning outside the support of the line");
  const double slope = lineshape_slope(line, delta_per_s);
  if (slope == 0.0)
    throw NumericalError(
        "sensitivity: zero transduction slope at this detuning");

  // Noise floor: median density in a band around the mode, with the
  // mechanical peak itself masked out.
  const double mask =
      std::max(5.0 * spec.rbw_hz, 5.0 * angular_to_cycles(mode.gamma_m_per_s));
  std::vector<double> floor_bins;
  for (double band = 0.2; band <= 0.55 && floor_bins.size() < 3; band += 0.3) {
    floor_bins.clear();
    for (std::size_t i = 0; i < spec.frequency_hz.size(); ++i) {
      const double f = spec.frequency_hz[i];
      if (f < (1.0 - band) * f_m || f > (1.0 + band) * f_m) continue;
      if (std::abs(f - f_m) < mask) continue;
      floor_bins.push_back(spec.density_per_hz[i]);
    }
  }
  if (floor_bins.size() < 3) {
    floor_bins.clear();
    for (std::size_t i = 0; i < spec.frequency_hz.size(); ++i)
      if (std::abs(spec.frequency_hz[i] - f_m) >= mask)
        floor_bins.push_back(spec.density_per_hz[i]);
  }
  if (floor_bins.empty())
    throw NumericalError("sensitivity: no bins available for the noise floor");
  std::nth_element(floor_bins.begin(),
                   floor_bins.begin() + floor_bins.size() / 2,
                   floor_bins.end());
  const double floor = floor_bins[floor_bins.size() / 2];
  if (floor <= 0.0)
    throw NumericalError("sensitivity: noise floor indistinguishable from 0");

  return zero_point_m(mode) / lambda_per_s * rate / std::abs(slope) *
         std::sqrt(floor);
}

void OperatingPoint::validate() const {
  line.validate();
  require_valid(lambda_per_s > 0.0, "readout: coupling must be > 0");
  require_valid(std::isfinite(delta_per_s), "readout: detuning must be finite");
}

double zpf_integration_time(const OperatingPoint& cfg, double rbw_hz) {
  cfg.validate();
  require_valid(rbw_hz >= 0.0, "readout: rbw must be >= 0");

  const double rate = lineshape_rate(cfg.line, cfg.delta_per_s);
  if (rate <= 0.0) return std::numeric_limits<double>::infinity();
  const double slope = lineshape_slope(cfg.line, cfg.delta_per_s);
  // Zero-point peak area in relative-NPSD units and the shot-noise floor.
  const double ratio = cfg.lambda_per_s * slope / rate;
  const double area_zpf = ratio * ratio;
  const double floor = 2.0 / rate;
  if (area_zpf == 0.0) return std::numeric_limits<double>::infinity();

  // Transform-limited resolution (rbw = 1/T): SNR 1 at T = floor/area.
  // At fixed analysis bandwidth the averaging is quadratically slower.
  if (rbw_hz == 0.0) return floor / area_zpf;
  const double t = floor / area_zpf;
  return rbw_hz * t * t;
}

}  // namespace trumpet
