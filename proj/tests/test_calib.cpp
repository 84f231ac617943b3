#include "doctest.h"

#include <cmath>
#include <sstream>

#include "pulsepair/calib.hpp"

using namespace pulsepair;

namespace {

DriftScanSynthSpec noiseless(double amplitude, double fwhm_deg) {
  DriftScanSynthSpec s;
  s.amplitude = amplitude;
  s.fwhm_deg = fwhm_deg;
  s.noise_rel = 0.0;
  s.sample_seconds = 2.0;
  return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("lst_hours: sidereal periodicity and rate") {
  for (double t : {1717200000.0, 946728000.0, 1800000000.0}) {
    const double a = lst_hours(t, -79.8397);
    const double b = lst_hours(t + kSiderealDaySeconds, -79.8397);
    CHECK(std::abs(std::remainder(b - a, 24.0)) < 1e-4);
    const double c = lst_hours(t + 86400.0, -79.8397);
    CHECK(wrap_hours(c - a) == doctest::Approx(0.0657).epsilon(0.01));
    const double d = lst_hours(t + 60 * 86400.0, -79.8397);
    CHECK(std::abs(std::remainder(d - a - 60 * 0.065711, 24.0)) < 2e-3);
  }
  // GMST at the J2000.0 epoch is 18.697374558 h.
  CHECK(lst_hours(946728000.0, 0.0) == doctest::Approx(18.697374558).epsilon(1e-7));
  // Longitude shifts LST by longitude / 15 hours.
  CHECK(wrap_hours(lst_hours(1717200000.0, 15.0) - lst_hours(1717200000.0, 0.0)) ==
        doctest::Approx(1.0));
  const double v = lst_hours(1717200000.0, -79.8397);
  CHECK(v >= 0.0);
  CHECK(v < 24.0);
}

TEST_CASE("pointing RA") {
  CHECK(pointing_ra_hr(5.0, 180.0, -8.0, 38.4331) == doctest::Approx(5.0));
  const double off1 = pointing_ra_hr(5.0, 181.5, -8.0, 38.4331) - 5.0;
  const double off2 = pointing_ra_hr(17.0, 181.5, -8.0, 38.4331) - 17.0;
  CHECK(off1 == doctest::Approx(off2));
  // Same sign and order of magnitude as the measured 0.065 hr shift.
  CHECK(off1 > 0.01);
  CHECK(off1 < 0.2);
  // First order: linear in the azimuth offset.
  const double half = pointing_ra_hr(5.0, 180.75, -8.0, 38.4331) - 5.0;
  CHECK(half == doctest::Approx(off1 / 2));
  CHECK(pointing_ra_hr(5.0, 178.5, -8.0, 38.4331) - 5.0 == doctest::Approx(-off1));
  CHECK_THROWS_AS(pointing_ra_hr(5.0, 185.0, -8.0, 38.4331), ValidationError);
  CHECK_THROWS_AS(pointing_ra_hr(5.0, 180.0, 95.0, 38.4331), ValidationError);
  CHECK(pointing_ra_hr(23.99, 181.5, -8.0, 38.4331) < 24.0);
}

TEST_CASE("continuum SNR conversions") {
  GaussFlatFit f;
  f.converged = true;
  f.floor = 10.0;
  f.amplitude = 0.0;
  CHECK(continuum_snr_db(f) == 0.0);
  f.amplitude = 0.423;
  CHECK(continuum_snr_db(f) == doctest::Approx(0.18).epsilon(0.01));
  f.amplitude = 0.593;
  CHECK(continuum_snr_db(f) == doctest::Approx(0.25).epsilon(0.01));
  f.floor = 0.0;
  CHECK_THROWS_AS(continuum_snr_db(f), ValidationError);
  f.floor = 10.0;
  f.converged = false;
  CHECK_THROWS_AS(continuum_snr_db(f), ValidationError);
}

TEST_CASE("sensitivity factor") {
  CHECK(sensitivity_factor(3.7, 0.27, 1) == doctest::Approx(1.0006).epsilon(1e-3));
  CHECK(sensitivity_factor(1, 1, 1) == 1.0);
  CHECK(sensitivity_factor(100, 1, 4) == doctest::Approx(0.05));
  CHECK_THROWS_AS(sensitivity_factor(0, 1, 1), ValidationError);
}

TEST_CASE("noiseless fit recovers parameters to 1e-6") {
  const auto scan = synthesize_drift_scan(noiseless(1.0, 9.0));
  const auto fit = fit_gauss_flat(scan);
  CHECK(fit.converged);
  CHECK(rel(fit.amplitude, 1.0) < 1e-6);
  CHECK(rel(fit.floor, 10.0) < 1e-6);
  CHECK(rel(fit.center_ra_hr, 5.25) < 1e-6);
  CHECK(rel(fit.fwhm_deg(), 9.0) < 1e-6);
  CHECK(fit.fwhm_hr() == doctest::Approx(kFwhmPerSigma * fit.sigma_ra_hr));
  CHECK(fit.residual_rms < 1e-8);
}

TEST_CASE("fit recovery tightens with lower noise") {
  for (double fwhm : {9.0, 8.2}) {
    double previous = 1e9;
    for (double noise : {0.02, 0.005, 0.00125}) {
      double worst = 0.0;
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        DriftScanSynthSpec s;
        s.fwhm_deg = fwhm;
        s.noise_rel = noise;
        s.seed = seed;
        const auto fit = fit_gauss_flat(synthesize_drift_scan(s));
        REQUIRE(fit.converged);
        worst = std::max({worst, rel(fit.fwhm_deg(), fwhm), rel(fit.amplitude, s.amplitude)});
      }
      // Errors scale with the noise level.
      CHECK(worst < 0.6 * noise / 0.01 * 0.02 + 1e-4);
      CHECK(worst < previous);
      previous = worst;
    }
  }
}

TEST_CASE("fit input validation and degenerate scans") {
  DriftScan tiny;
  for (int i = 0; i < 5; ++i) {
    tiny.utc_s.push_back(1717200000.0 + i);
    tiny.power.push_back(1.0 + i);
  }
  CHECK_THROWS_AS(fit_gauss_flat(tiny), ValidationError);
  DriftScan flat;
  for (int i = 0; i < 100; ++i) {
    flat.utc_s.push_back(1717200000.0 + i);
    flat.power.push_back(10.0);
  }
  CHECK_THROWS_AS(fit_gauss_flat(flat), ValidationError);
  DriftScan back = flat;
  std::swap(back.utc_s[3], back.utc_s[4]);
  back.power[3] = 11.0;
  CHECK_THROWS_AS(fit_gauss_flat(back), ValidationError);

  // A flat scan with tiny noise: either an amplitude near zero or a
  // non-converged result; never an exception.
  DriftScanSynthSpec s = noiseless(0.0, 9.0);
  s.noise_rel = 1e-6;
  const auto fit = fit_gauss_flat(synthesize_drift_scan(s));
  if (fit.converged) CHECK(std::abs(fit.amplitude) < 1e-3);
  MESSAGE("flat-scan fit: converged=" << fit.converged << " amplitude=" << fit.amplitude);
}

TEST_CASE("fitted amplitude is monotone in the injected amplitude") {
  double previous = -1.0;
  for (double amp : {0.1, 0.2, 0.423, 0.6, 1.0}) {
    DriftScanSynthSpec s;
    s.amplitude = amp;
    s.noise_rel = 0.001;
    const auto fit = fit_gauss_flat(synthesize_drift_scan(s));
    CHECK(fit.amplitude > previous);
    previous = fit.amplitude;
  }
}

TEST_CASE("drift scan CSV round trip and errors") {
  const auto scan = synthesize_drift_scan(noiseless(0.423, 9.0));
  std::stringstream s;
  write_drift_scan_csv(s, scan);
  const auto back = read_drift_scan_csv(s);
  REQUIRE(back.utc_s.size() == scan.utc_s.size());
  CHECK(back.power[100] == doctest::Approx(scan.power[100]).epsilon(1e-11));
  std::istringstream bad("utc_s,power\n1,2\n1,3\n");
  try {
    read_drift_scan_csv(bad);
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 3);
  }
  std::ostringstream report;
  GaussFlatFit f = fit_gauss_flat(scan);
  write_fit_report(report, scan, f);
  CHECK(report.str().find("continuum_snr_db = 0.1799") != std::string::npos);
}

TEST_CASE("delay-tap scan") {
  CorrelatorSimSpec spec;
  const auto data = simulate_correlator_frames(spec);
  const auto coarse = tau_int_scan(data, -200e-9, 0.0, 10e-9);
  CHECK(coarse.taps_s.size() == 21);
  CHECK((std::abs(coarse.tau_int_s + 140e-9) < 1e-12 || std::abs(coarse.tau_int_s + 150e-9) < 1e-12));
  CHECK(coarse.uncertainty_s == 10e-9);
  const auto fine = tau_int_scan(data, -200e-9, 0.0, 1e-9);
  CHECK(std::abs(fine.tau_int_s + 144e-9) <= 1e-9 + 1e-15);
  CHECK(std::abs(fine.tau_int_s + 144e-9) <= std::abs(coarse.tau_int_s + 144e-9));

  spec.tau_true_s = 0.0;
  const auto zero = tau_int_scan(simulate_correlator_frames(spec), -50e-9, 50e-9, 10e-9);
  CHECK(std::abs(zero.tau_int_s) <= 10e-9);

  spec.calibrator_snr_db = -60.0;
  CHECK_THROWS_AS(tau_int_scan(simulate_correlator_frames(spec), -200e-9, 0.0, 10e-9),
                  ValidationError);
  CHECK_THROWS_AS(tau_int_scan(data, 0.0, -1.0, 1e-9), ValidationError);
}
