#pragma once

// High-level estimators built on the measurement pipeline: coupling
// extraction from peak areas versus detuning, mode assignment against a
// device catalog, emitter-plane localization from relative mode amplitudes,
// and the displacement-sensitivity / zero-point integration-time figures.
//
// Conventions shared with the analysis module: peak areas are integrals of
// the one-sided relative-fluctuation NPSD (dimensionless), detunings and
// couplings are angular (rad/s), and the transduction model is the
// small-modulation linearization
//     A(delta) = (lambda * (u_th/u_zpf) * slope(delta)/rate(delta))^2,
// valid while the thermal frequency excursion stays well inside the line.

#include <string>
#include <vector>

#include "trumpet/analysis.hpp"
#include "trumpet/catalog.hpp"
#include "trumpet/emitter.hpp"
#include "trumpet/mechanics.hpp"

namespace trumpet {

// One point of a coupling scan: the measured peak area at one detuning.
struct DetuningArea {
  double delta_per_s = 0.0;  // laser-emitter detuning, rad/s
  double area = 0.0;         // integrated relative NPSD, dimensionless
  double area_sigma = 0.0;   // 1-sigma uncertainty; any zero => unweighted fit
};

struct CouplingFit {
  double lambda_per_s = 0.0;     // best-fit coupling, rad/s; always >= 0
  double residual = 0.0;         // (weighted) sum of squared area residuals
  double lambda_variance = 0.0;  // variance of lambda, (rad/s)^2
};

// Least-squares fit of the transduction model to areas versus detuning,
// with the coupling the only free parameter. The fitted lineshape supplies
// slope/rate, the mode and bath temperature supply u_th/u_zpf.
CouplingFit extract_coupling(const std::vector<DetuningArea>& points,
                             const LineshapeParams& line, const MechMode& mode,
                             double temperature_k);

// Label peaks by nearest catalog mode frequency, greedily by relative error,
// each catalog mode used at most once; peaks beyond the tolerance (or left
// over) are labeled "unknown".
std::vector<PeakResult> assign_modes(const std::vector<PeakResult>& peaks,
                                     const Catalog& catalog,
                                     double relative_tolerance = 0.075);

// One mode's measured peak amplitude for localization.
struct LabeledAmplitude {
  std::string label;       // catalog mode label
  double amplitude = 0.0;  // peak area, dimensionless
  double sigma = 0.0;      // 1-sigma uncertainty; any zero => scale weights
};

// Two-stage grid search specification. Defaults satisfy a final resolution
// of 0.5 nm and 0.5 degrees.
struct LocalizeGrid {
  double r_step_m = 2.5e-9;           // coarse radial step
  double phi_step_rad = 0.04363323129985824;   // coarse angular step, 2.5 deg
  double fine_r_step_m = 0.5e-9;      // refinement radial step
  double fine_phi_step_rad = 0.008726646259971648;  // 0.5 deg
  std::string reference_label;        // empty => first breathing mode given
  void validate() const;
};

struct LocalizationResult {
  // Best-fit position in the canonical quadrant. phi may equal pi/2 exactly
  // (the neutral axis of the x-flexural family is a valid answer).
  QDPosition position;
  double chi_square = 0.0;
  std::vector<std::string> labels;    // modes used, reference included
  std::vector<double> measured;       // amplitude relative to the reference
  std::vector<double> predicted;      // model ratios at the best fit
};

// Grid search over the emitter plane minimizing chi^2 between measured and
// predicted relative amplitudes; predictions are per-mode e_zz^2 normalized
// to the reference mode. Requires at least one flexural mode: breathing
// strain is uniform over the cross-section and carries no position
// information.
LocalizationResult localize_qd(const std::vector<LabeledAmplitude>& amplitudes,
                               const Catalog& catalog,
                               const LocalizeGrid& grid = {});

// The objective localize_qd minimizes, evaluated at one candidate position
// (phi = pi/2 allowed, as on the search grid); used to draw residual maps.
// reference_label selects the normalizing mode exactly as LocalizeGrid does.
double localization_chi_square(const std::vector<LabeledAmplitude>& amplitudes,
                               const Catalog& catalog,
                               const QDPosition& position,
                               const std::string& reference_label = "");

// Equivalent displacement noise floor near the mode frequency, m/sqrt(Hz),
// one-sided like the spectrum it is read from. The floor is the median
// density in a band around the mode with the peak itself masked out.
double displacement_sensitivity(const Spectrum& spec, const MechMode& mode,
                                double lambda_per_s,
                                const LineshapeParams& line,
                                double delta_per_s);

// Operating point for the zero-point integration-time estimate.
struct OperatingPoint {
  LineshapeParams line;      // fitted detected-rate line (amplitude = counts/s)
  double lambda_per_s = 0.0; // coupling, rad/s
  double delta_per_s = 0.0;  // operating detuning, rad/s
  void validate() const;
};

// Time for the accumulated spectrum to resolve a peak area equal to the
// zero-point contribution against the shot-noise floor at unit SNR.
// With rbw_hz = 0 the resolution bandwidth is transform-limited (1/T);
// a fixed rbw_hz > 0 gives the slower quadratic scaling in floor/area.
double zpf_integration_time(const OperatingPoint& cfg, double rbw_hz = 0.0);

}  // namespace trumpet
