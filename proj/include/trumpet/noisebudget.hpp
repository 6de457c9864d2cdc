#pragma once

// Closed-form read-out noise theory: imprecision and back-action displacement
// densities, thermal density, the imprecision--back-action product and its
// quantum floor, the crossover photon rate, and scalar figures of merit.
//
// Convention notes:
//  - All densities here are double-sided symmetrized PSDs. Measured spectra
//    in the analysis module are one-sided; the factor 2 bridge is applied at
//    the single point where theory meets measurement, never inside here.
//  - These formulas use the homogeneous power-broadened half width; slow
//    spectral diffusion (sigma_inh) is deliberately ignored in this module.
//    Callers who want an effective broader line fold it into gamma_star.

#include <optional>
#include <vector>

#include "trumpet/emitter.hpp"
#include "trumpet/mechanics.hpp"

namespace trumpet {

struct ReadoutConfig {
  Emitter emitter;
  Drive drive;
  MechMode mode;
  double lambda_per_s = 0.0;   // emitter-mode coupling, angular
  double efficiency = 1.0;     // photon detection efficiency, (0,1]
  double temperature_k = 4.0;

  void validate() const;
};

// One evaluated operating point. Densities quoted at the mode frequency.
struct NoiseBudget {
  double omega_r_per_s = 0.0;        // drive actually used
  double delta_per_s = 0.0;          // detuning actually used
  double rate_per_s = 0.0;           // emitted photon rate
  double s_xx_imprecision = 0.0;     // m^2/Hz, white
  double s_ff_backaction = 0.0;      // N^2/Hz, white
  double s_xx_backaction_at_wm = 0.0;  // m^2/Hz
  double s_xx_thermal_at_wm = 0.0;     // m^2/Hz
  double s_xx_added_at_wm = 0.0;       // imprecision + back-action
  double heisenberg_product = 0.0;     // S_xx^I * S_FF, (J s / m * m)^2 scale
  double gamma_opt_per_s = 0.0;
  double cooperativity = 0.0;
};

// Imprecision (shot-noise) displacement density:
//   S_xx^I = (u_zpf/lambda)^2 * rate / (eff * slope^2),
// frequency independent. Throws NumericalError at delta = 0 where the
// transduction slope vanishes.
double imprecision_psd(const ReadoutConfig& cfg);

// Back-action force density S_FF = (hbar lambda/(u_zpf gamma_sp))^2 * rate.
double backaction_force_psd(const ReadoutConfig& cfg);

// S_xx^BA(omega) = |chi(omega)|^2 * S_FF.
double backaction_displacement_psd(const ReadoutConfig& cfg,
                                   double omega_per_s);

// Thermal density S_xx^th(omega) =
//   |chi(omega)|^2 * m gamma_m hbar omega_m (2 nbar + 1);
// equals 2 u_zpf^2/gamma_m at omega = omega_m, T = 0, and integrates over
// omega/2pi to u_zpf^2 (2 nbar + 1).
double thermal_psd(const MechMode& mode, double temperature_k,
                   double omega_per_s);

// S_xx^I * S_FF at the configured operating point; minimized over delta at
// delta = Gamma where it equals (hbar Gamma / gamma_sp)^2 / eff.
double heisenberg_product(const ReadoutConfig& cfg);

// Emitted rate at which imprecision equals back-action at omega_m for the
// delta = Gamma operating point: N+ = Gamma gamma_sp gamma_m / (2 eff
// lambda^2). Empty when lambda = 0 (no coupling, no crossover).
std::optional<double> crossover_rate(const ReadoutConfig& cfg);

struct FiguresOfMerit {
  double gamma_opt_per_s = 0.0;   // lambda^2 / gamma_sp
  double cooperativity = 0.0;     // lambda^2 / (gamma_sp gamma_m)
  double n_coherent = 0.0;        // (lambda/gamma_m)^2 phonon-laser scale
  double n_thermal = 0.0;         // Bose occupancy of the mode at T
  double dephasing_per_s = 0.0;   // thermal emitter shift lambda*u_th/u_zpf
};

FiguresOfMerit figures_of_merit(const ReadoutConfig& cfg);

// Full budget at the configured operating point.
NoiseBudget evaluate_budget(const ReadoutConfig& cfg);

enum class SweepVariable { omega_r, delta, efficiency, lambda };

struct SweepRequest {
  SweepVariable variable = SweepVariable::omega_r;
  std::vector<double> grid;
  // For omega_r sweeps: re-pin delta to the power-broadened half width at
  // each grid point (the standard operating point). Ignored otherwise.
  bool pin_delta_to_halfwidth = true;
};

std::vector<NoiseBudget> budget_sweep(const ReadoutConfig& cfg,
                                      const SweepRequest& request);

// Drive strength minimizing the added noise at omega_m (delta re-pinned to
// the half width at every trial), located by golden-section search on a log
// axis between the given brackets.
double find_sql_drive(const ReadoutConfig& cfg, double omega_r_lo,
                      double omega_r_hi);

}  // namespace trumpet
