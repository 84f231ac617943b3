#ifndef PULSEPAIR_CALIB_HPP
#define PULSEPAIR_CALIB_HPP

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

#include "pulsepair/core.hpp"
#include "pulsepair/sigsim.hpp"

namespace pulsepair {

/// Continuum power against time from a fixed-azimuth drift scan.
struct DriftScan {
  std::string source_name = "NRAO 5690";
  double dec_deg = -8.0;
  /// Site longitude used to turn timestamps into sidereal hours.
  double longitude_deg = 0.0;
  std::vector<double> utc_s;
  std::vector<double> power;
};

/// floor + amplitude * exp(-(ra - center)^2 / (2 sigma^2)), RA in hours.
struct GaussFlatFit {
  double amplitude = 0.0;
  double center_ra_hr = 0.0;
  double sigma_ra_hr = 0.0;
  double floor = 0.0;
  double residual_rms = 0.0;
  int iterations = 0;
  bool converged = false;

  double fwhm_hr() const;
  /// FWHM as RA angle in degrees.
  double fwhm_deg() const { return fwhm_hr() * 15.0; }
};

inline constexpr double kFwhmPerSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)

template <typename Scalar>
Scalar gauss_flat(Scalar ra_hr, Scalar floor, Scalar amplitude, Scalar center, Scalar sigma) {
  const Scalar z = (ra_hr - center) / sigma;
  return floor + amplitude * std::exp(-z * z / Scalar(2));
}

/// Sidereal hours of each sample, continuous across 24 h wraps.
Eigen::VectorXd scan_ra_hours(const DriftScan& scan);

/// Damped Gauss-Newton fit with deterministic initialization. Throws
/// ValidationError for too few samples or a flat scan.
GaussFlatFit fit_gauss_flat(const DriftScan& scan);

double continuum_snr_db(const GaussFlatFit& fit);

/// Local mean sidereal time (hours in [0, 24)) for a Unix UTC timestamp and
/// east-positive longitude.
double lst_hours(double utc_s, double longitude_deg);

/// First-order hour-angle offset of the beam centre for an azimuth near 180 deg.
double pointing_offset_hr(double azimuth_deg, double dec_deg, double latitude_deg);

/// Beam-centre RA for a near-meridian pointing; |azimuth - 180| must be < 5 deg.
double pointing_ra_hr(double lst_hr, double azimuth_deg, double dec_deg, double latitude_deg);

struct TauScanResult {
  double tau_int_s = 0.0;
  double uncertainty_s = 0.0;
  Eigen::VectorXd taps_s;
  Eigen::VectorXd response;
};

/// Delay-tap search: for each tap the delay-compensated cross spectrum is
/// summed coherently; the tap with the largest coherent response gives the
/// best-conditioned phase measurement of the calibrator.
TauScanResult tau_int_scan(const CorrelatorData& data, double tap_low_s, double tap_high_s,
                           double tap_step_s);

double sensitivity_factor(double delta_nu_hz, double t_s, double n);

/// Noisy synthetic drift scan of a Gaussian-plus-flat response.
struct DriftScanSynthSpec {
  double floor = 10.0;
  double amplitude = 0.423;
  double center_ra_hr = 5.25;
  double fwhm_deg = 9.0;
  double span_hr = 4.0;
  /// One continuum sample per frame.
  double sample_seconds = 0.27;
  /// Gaussian fluctuation rms as a fraction of the floor.
  double noise_rel = 0.01;
  double longitude_deg = -79.8397;
  double dec_deg = -8.0;
  double start_utc_s = 1717200000.0;
  std::uint64_t seed = 1;
};

DriftScan synthesize_drift_scan(const DriftScanSynthSpec& spec);

DriftScan read_drift_scan_csv(std::istream& in);
void write_drift_scan_csv(std::ostream& out, const DriftScan& scan);
void write_fit_report(std::ostream& out, const DriftScan& scan, const GaussFlatFit& fit);

}  // namespace pulsepair

#endif  // PULSEPAIR_CALIB_HPP
