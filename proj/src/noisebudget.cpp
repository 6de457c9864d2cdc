#include "trumpet/noisebudget.hpp"

#include <cmath>

#include "trumpet/constants.hpp"
#include "trumpet/errors.hpp"

namespace trumpet {

void ReadoutConfig::validate() const {
  emitter.validate();
  drive.validate();
  mode.validate();
  require_valid(lambda_per_s >= 0.0, "lambda_per_s must be non-negative");
  require_valid(efficiency > 0.0 && efficiency <= 1.0,
                "efficiency must lie in (0, 1]");
  require_valid(temperature_k >= 0.0, "temperature_k must be non-negative");
}

double imprecision_psd(const ReadoutConfig& cfg) {
  cfg.validate();
  require_valid(cfg.lambda_per_s > 0.0,
                "imprecision_psd needs a nonzero coupling");
  if (cfg.drive.delta_per_s == 0.0) {
    throw NumericalError(
        "imprecision diverges at zero detuning: the transduction slope "
        "vanishes at the line center");
  }
  const double rate = rf_rate(cfg.emitter, cfg.drive);
  const double slope = rf_slope(cfg.emitter, cfg.drive);
  const double u_zpf = zero_point_m(cfg.mode);
  const double gain = cfg.lambda_per_s / u_zpf;  // counts-slope per meter
  return rate / (cfg.efficiency * gain * gain * slope * slope);
}

double backaction_force_psd(const ReadoutConfig& cfg) {
  cfg.validate();
  const double rate = rf_rate(cfg.emitter, cfg.drive);
  const double u_zpf = zero_point_m(cfg.mode);
  const double force_per_photon =
      k_hbar * cfg.lambda_per_s / (u_zpf * cfg.emitter.gamma_sp_per_s);
  return force_per_photon * force_per_photon * rate;
}

double backaction_displacement_psd(const ReadoutConfig& cfg,
                                   double omega_per_s) {
  const double chi2 = std::norm(susceptibility(cfg.mode, omega_per_s));
  return chi2 * backaction_force_psd(cfg);
}

double thermal_psd(const MechMode& mode, double temperature_k,
                   double omega_per_s) {
  mode.validate();
  require_valid(temperature_k >= 0.0, "temperature_k must be non-negative");
  const double chi2 = std::norm(susceptibility(mode, omega_per_s));
  const double nbar = thermal_occupancy(mode, temperature_k);
  return chi2 * mode.mass_kg * mode.gamma_m_per_s * k_hbar *
         mode.omega_m_per_s * (2.0 * nbar + 1.0);
}

double heisenberg_product(const ReadoutConfig& cfg) {
  return imprecision_psd(cfg) * backaction_force_psd(cfg);
}

std::optional<double> crossover_rate(const ReadoutConfig& cfg) {
  cfg.validate();
  if (cfg.lambda_per_s == 0.0) return std::nullopt;
  const double gamma_big =
      power_broadened_halfwidth(cfg.emitter, cfg.drive.omega_r_per_s);
  return 0.5 * gamma_big * cfg.emitter.gamma_sp_per_s *
         cfg.mode.gamma_m_per_s /
         (cfg.efficiency * cfg.lambda_per_s * cfg.lambda_per_s);
}

FiguresOfMerit figures_of_merit(const ReadoutConfig& cfg) {
  cfg.validate();
  const double lam2 = cfg.lambda_per_s * cfg.lambda_per_s;
  FiguresOfMerit f;
  f.gamma_opt_per_s = lam2 / cfg.emitter.gamma_sp_per_s;
  f.cooperativity =
      lam2 / (cfg.emitter.gamma_sp_per_s * cfg.mode.gamma_m_per_s);
  f.n_coherent = lam2 / (cfg.mode.gamma_m_per_s * cfg.mode.gamma_m_per_s);
  f.n_thermal = thermal_occupancy(cfg.mode, cfg.temperature_k);
  f.dephasing_per_s = cfg.lambda_per_s *
                      thermal_rms_m(cfg.mode, cfg.temperature_k) /
                      zero_point_m(cfg.mode);
  return f;
}

NoiseBudget evaluate_budget(const ReadoutConfig& cfg) {
  NoiseBudget b;
  b.omega_r_per_s = cfg.drive.omega_r_per_s;
  b.delta_per_s = cfg.drive.delta_per_s;
  b.rate_per_s = rf_rate(cfg.emitter, cfg.drive);
  b.s_xx_imprecision = imprecision_psd(cfg);
  b.s_ff_backaction = backaction_force_psd(cfg);
  b.s_xx_backaction_at_wm =
      backaction_displacement_psd(cfg, cfg.mode.omega_m_per_s);
  b.s_xx_thermal_at_wm =
      thermal_psd(cfg.mode, cfg.temperature_k, cfg.mode.omega_m_per_s);
  b.s_xx_added_at_wm = b.s_xx_imprecision + b.s_xx_backaction_at_wm;
  b.heisenberg_product = b.s_xx_imprecision * b.s_ff_backaction;
  const FiguresOfMerit f = figures_of_merit(cfg);
  b.gamma_opt_per_s = f.gamma_opt_per_s;
  b.cooperativity = f.cooperativity;
  return b;
}

namespace {

ReadoutConfig at_operating_point(const ReadoutConfig& cfg, double omega_r) {
  ReadoutConfig point = cfg;
  point.drive.omega_r_per_s = omega_r;
  point.drive.delta_per_s =
      power_broadened_halfwidth(cfg.emitter, omega_r);
  return point;
}

}  // namespace

std::vector<NoiseBudget> budget_sweep(const ReadoutConfig& cfg,
                                      const SweepRequest& request) {
  cfg.validate();
  require_valid(!request.grid.empty(), "sweep grid must be non-empty");
  std::vector<NoiseBudget> rows;
  rows.reserve(request.grid.size());
  for (double value : request.grid) {
    ReadoutConfig point = cfg;
    switch (request.variable) {
      case SweepVariable::omega_r:
        if (request.pin_delta_to_halfwidth) {
          point = at_operating_point(cfg, value);
        } else {
          point.drive.omega_r_per_s = value;
        }
        break;
      case SweepVariable::delta:
        point.drive.delta_per_s = value;
        break;
      case SweepVariable::efficiency:
        point.efficiency = value;
        break;
      case SweepVariable::lambda:
        point.lambda_per_s = value;
        break;
    }
    rows.push_back(evaluate_budget(point));
  }
  return rows;
}

double find_sql_drive(const ReadoutConfig& cfg, double omega_r_lo,
                      double omega_r_hi) {
  cfg.validate();
  require_valid(omega_r_lo > 0.0 && omega_r_hi > omega_r_lo,
                "SQL bracket must satisfy 0 < lo < hi");
  const auto added_at = [&cfg](double log_omega) {
    const ReadoutConfig point = at_operating_point(cfg, std::exp(log_omega));
    return evaluate_budget(point).s_xx_added_at_wm;
  };
  // Golden-section on the log axis; the added noise is unimodal there (the
  // imprecision falls, then power broadening turns both terms around).
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::log(omega_r_lo);
  double b = std::log(omega_r_hi);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = added_at(c);
  double fd = added_at(d);
  while (b - a > 1e-6) {  // log-axis width; ~1e-6 relative in omega_r
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = added_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = added_at(d);
    }
  }
  return std::exp(0.5 * (a + b));
}

}  // namespace trumpet
