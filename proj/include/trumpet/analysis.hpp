#pragma once

// Measurement pipeline: noise power spectral density (NPSD) estimation from
// binned count traces (Welch) and from intensity correlations (cosine
// transform), peak quantification, and lineshape fitting.
//
// Spectra are one-sided densities of the relative rate fluctuation
// dN/<N> - 1, so a homogeneous Poisson record shows a flat shot-noise floor
// of 2/<rate>. Theory-side densities elsewhere in the library are
// double-sided; the factor-2 bridge is applied exactly once, where a
// measured spectrum meets a predicted one.
//
// Finite sampling imprints a boxcar response on narrowband signal power:
// sinc^2(pi f dt) for binned traces, sinc(pi f dtau) for tau-binned
// correlations. Spectra carry their boxcar width and exponent so that
// find_peaks_and_areas can undo the attenuation at each peak's center; the
// raw densities are reported unmodified (the shot-noise floor of a counting
// record is genuinely white and must not be reshaped).

#include <cstddef>
#include <string>
#include <vector>

#include "trumpet/emitter.hpp"
#include "trumpet/tags.hpp"

namespace trumpet {

struct Spectrum {
  std::vector<double> frequency_hz;    // strictly increasing
  std::vector<double> density_per_hz;  // one-sided relative NPSD, >= 0
  double mean_rate_per_s = 0.0;        // rate used for normalization
  double rbw_hz = 0.0;                 // noise-equivalent resolution bandwidth
  int averages = 0;     // Welch segment count; 0 = not segment-averaged
  double boxcar_s = 0.0;  // sampling boxcar width; 0 = none
  int boxcar_order = 0;   // sinc exponent of the boxcar response (1 or 2)

  void validate() const;
};

struct PeakResult {
  std::string label;           // empty until assigned
  double frequency_hz = 0.0;   // excess-power centroid of the window
  double area = 0.0;           // integrated density above the floor
  double area_sigma = 0.0;     // 1-sigma statistical uncertainty on area
  double floor_per_hz = 0.0;   // sideband-median floor estimate
  bool clipped = false;        // true when the raw excess was negative
};

// Pair correlation histogram, folded to tau >= 0 and normalized to the
// large-delay plateau.
struct CorrelationTable {
  std::vector<double> tau_s;        // bin centers, uniform spacing
  std::vector<double> g2;           // normalized correlation
  std::vector<double> pair_counts;  // raw pairs per bin
  double bin_s = 0.0;
  double duration_s = 0.0;
  double rate0_per_s = 0.0;  // per-channel mean rates
  double rate1_per_s = 0.0;
  bool poor_statistics = false;  // tau range beyond duration/10

  void validate() const;
};

enum class SpectralWindow { hann, rectangular };

// Welch-averaged one-sided NPSD of the relative count fluctuations:
// segments of `segment_length` bins (power of two), 50 % overlap.
Spectrum trace_npsd(const TimeTrace& trace, std::size_t segment_length,
                    SpectralWindow window = SpectralWindow::hann);

// Cross-correlation g2(tau) between the two channels of an HBT record.
CorrelationTable g2_histogram(const PhotonTags& tags, double bin_s,
                              double tau_max_s);

// One-sided cosine transform of g2 - 1 restricted to tau >= tau_min
// (excluding the antibunching/bunching region), on the same normalization
// as trace_npsd. Statistical noise can drive the transform negative;
// values are clipped at zero so the result remains a valid density --
// peaks standing above the floor are unaffected.
Spectrum npsd_from_g2(const CorrelationTable& g2, double mean_rate_per_s,
                      double tau_min_s);

struct PeakWindow {
  double lo_hz = 0.0;
  double hi_hz = 0.0;
};

// Quantify peaks in disjoint windows: the floor is the median of the
// sideband bins flanking each window (one window-width per side, other
// windows excluded), the area is the floor-subtracted integral corrected
// for the spectrum's boxcar attenuation at the peak center.
std::vector<PeakResult> find_peaks_and_areas(
    const Spectrum& spec, const std::vector<PeakWindow>& windows);

struct RateScanPoint {
  double delta_per_s = 0.0;
  double rate_per_s = 0.0;
};

struct FitReport {
  LineshapeParams params;
  double rss = 0.0;                       // residual sum of squares
  int iterations = 0;
  bool residuals_white = true;            // Ljung-Box at the 5 % level
  double sigma_lorentzian_fwhm = 0.0;     // 1-sigma parameter uncertainties
  double sigma_gaussian_fwhm = 0.0;
  double sigma_amplitude = 0.0;
  double sigma_center = 0.0;
};

// Voigt fit of a detected-rate-versus-detuning scan by damped least squares
// (Levenberg-Marquardt, finite-difference Jacobian). Requires >= 10 points
// spanning more than 3 estimated FWHM. Throws FitFailure on
// non-convergence.
FitReport fit_rf_spectrum(const std::vector<RateScanPoint>& scan);

// Ljung-Box whiteness test at the 5 % level (lags up to max_lag).
bool ljung_box_white(const std::vector<double>& residuals, int max_lag = 10);

}  // namespace trumpet
