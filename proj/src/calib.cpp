#include "pulsepair/calib.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "pulsepair/format.hpp"

namespace pulsepair {

double GaussFlatFit::fwhm_hr() const { return kFwhmPerSigma * sigma_ra_hr; }

double lst_hours(double utc_s, double longitude_deg) {
  const double jd = utc_s / 86400.0 + 2440587.5;
  const double d = jd - 2451545.0;
  const double t = d / 36525.0;
  // Split the day count to keep the large linear term exact enough.
  const double whole = std::floor(d);
  const double frac = d - whole;
  double gmst = 280.46061837 + std::fmod(360.98564736629 * whole, 360.0) +
                360.98564736629 * frac + 0.000387933 * t * t - t * t * t / 38710000.0;
  return wrap_hours((gmst + longitude_deg) / 15.0);
}

double pointing_offset_hr(double azimuth_deg, double dec_deg, double latitude_deg) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double alt_deg = 90.0 - std::abs(latitude_deg - dec_deg);
  return (azimuth_deg - 180.0) * std::cos(alt_deg * kDeg) / (15.0 * std::cos(dec_deg * kDeg));
}

double pointing_ra_hr(double lst_hr, double azimuth_deg, double dec_deg, double latitude_deg) {
  if (!(std::abs(azimuth_deg - 180.0) < 5.0))
    throw ValidationError("pointing correction needs |azimuth - 180| < 5 deg");
  if (!(std::abs(dec_deg) < 90.0)) throw ValidationError("|dec_deg| must be below 90");
  return wrap_hours(lst_hr + pointing_offset_hr(azimuth_deg, dec_deg, latitude_deg));
}

Eigen::VectorXd scan_ra_hours(const DriftScan& scan) {
  const auto n = static_cast<Eigen::Index>(scan.utc_s.size());
  Eigen::VectorXd ra(n);
  double offset = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lst = lst_hours(scan.utc_s[static_cast<std::size_t>(i)], scan.longitude_deg);
    if (i > 0) {
      const double prev = ra[i - 1] - offset;
      if (lst - prev < -12.0) offset += 24.0;
      if (lst - prev > 12.0) offset -= 24.0;
    }
    ra[i] = lst + offset;
  }
  return ra;
}

namespace {

double median(std::vector<double> v) {
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + lower);
  }
  return m;
}

using Params = Eigen::Vector4d;  // floor, amplitude, center, sigma

double sse(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Params& p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double r = y[i] - gauss_flat(x[i], p[0], p[1], p[2], p[3]);
    s += r * r;
  }
  return s;
}

}  // namespace

GaussFlatFit fit_gauss_flat(const DriftScan& scan) {
  const std::size_t n = scan.power.size();
  if (n != scan.utc_s.size()) throw ValidationError("drift scan columns differ in length");
  if (n < 8) throw ValidationError("drift scan needs at least 8 samples");
  for (std::size_t i = 1; i < n; ++i)
    if (!(scan.utc_s[i] > scan.utc_s[i - 1]))
      throw ValidationError("drift scan timestamps must be strictly increasing");
  const Eigen::VectorXd x = scan_ra_hours(scan);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(scan.power.data(),
                                                               static_cast<Eigen::Index>(n));
  if (y.maxCoeff() == y.minCoeff()) throw ValidationError("drift scan is flat; nothing to fit");

  // Initial estimates are read off a lightly smoothed copy so that a single
  // noise spike does not become the peak.
  const auto ni = static_cast<Eigen::Index>(n);
  const Eigen::Index half = std::max<Eigen::Index>(0, ni / 200);
  Eigen::VectorXd smooth(ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - half);
    const Eigen::Index hi = std::min<Eigen::Index>(ni - 1, i + half);
    smooth[i] = y.segment(lo, hi - lo + 1).mean();
  }
  Params p;
  p[0] = median(std::vector<double>(scan.power.begin(), scan.power.end()));
  Eigen::Index peak = 0;
  smooth.maxCoeff(&peak);
  p[1] = smooth[peak] - p[0];
  p[2] = x[peak];
  {
    const double half_level = p[0] + 0.5 * p[1];
    Eigen::Index l = peak, r = peak;
    while (l > 0 && smooth[l] > half_level) --l;
    while (r < ni - 1 && smooth[r] > half_level) ++r;
    const bool left_ok = smooth[l] <= half_level;
    const bool right_ok = smooth[r] <= half_level;
    double width = 0.0;
    if (left_ok && right_ok) width = x[r] - x[l];
    else if (left_ok) width = 2.0 * (x[peak] - x[l]);
    else if (right_ok) width = 2.0 * (x[r] - x[peak]);
    if (!(width > 0.0)) width = 0.5 * (x[ni - 1] - x[0]);
    p[3] = width / kFwhmPerSigma;
  }

  GaussFlatFit fit;
  double cost = sse(x, y, p);
  double lambda = 1e-3;
  constexpr int kMaxIterations = 200;
  int it = 0;
  for (; it < kMaxIterations; ++it) {
    Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
    Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
    for (Eigen::Index i = 0; i < ni; ++i) {
      const double dx = x[i] - p[2];
      const double s2 = p[3] * p[3];
      const double g = std::exp(-dx * dx / (2.0 * s2));
      Eigen::Vector4d j(1.0, g, p[1] * g * dx / s2, p[1] * g * dx * dx / (s2 * p[3]));
      const double r = y[i] - (p[0] + p[1] * g);
      jtj.selfadjointView<Eigen::Lower>().rankUpdate(j);
      jtr += j * r;
    }
    jtj = jtj.selfadjointView<Eigen::Lower>();
    bool accepted = false;
    Params step = Params::Zero();
    while (lambda < 1e16) {
      Eigen::Matrix4d a = jtj;
      a.diagonal() += lambda * jtj.diagonal();
      step = a.ldlt().solve(jtr);
      Params trial = p + step;
      trial[3] = std::abs(trial[3]);
      const double c = sse(x, y, trial);
      if (std::isfinite(c) && c <= cost) {
        p = trial;
        cost = c;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // No step lowers the cost: the current point is a minimum.
      fit.converged = true;
      break;
    }
    const double rel = (step.array().abs() / p.array().abs().max(1e-300)).maxCoeff();
    if (rel < 1e-9) {
      fit.converged = true;
      ++it;
      break;
    }
  }
  fit.floor = p[0];
  fit.amplitude = p[1];
  fit.center_ra_hr = p[2];
  fit.sigma_ra_hr = p[3];
  fit.iterations = it;
  fit.residual_rms = std::sqrt(cost / static_cast<double>(n));
  if (fit.amplitude < 0.0) fit.converged = false;
  return fit;
}

double continuum_snr_db(const GaussFlatFit& fit) {
  if (!fit.converged) throw ValidationError("continuum SNR needs a converged fit");
  if (!(fit.floor > 0.0)) throw ValidationError("continuum SNR needs a positive floor");
  return 10.0 * std::log10((fit.floor + fit.amplitude) / fit.floor);
}

TauScanResult tau_int_scan(const CorrelatorData& data, double tap_low_s, double tap_high_s,
                           double tap_step_s) {
  if (!(tap_step_s > 0.0) || !(tap_low_s <= tap_high_s))
    throw ValidationError("tap range must satisfy low <= high and step > 0");
  if (data.east.rows() != data.west.rows() || data.east.cols() != data.west.cols() ||
      data.east.cols() != data.channel_freq_hz.size() || data.east.size() == 0)
    throw ValidationError("correlator data shapes are inconsistent");

  // Frame-summed cross spectrum per channel.
  const Eigen::VectorXcd cross =
      (data.west.array() * data.east.array().conjugate()).colwise().sum().transpose();
  const double incoherent =
      std::sqrt((data.west.array() * data.east.array().conjugate()).abs2().sum());

  const auto taps = static_cast<Eigen::Index>(
                        std::floor((tap_high_s - tap_low_s) / tap_step_s + 1e-9)) + 1;
  TauScanResult r;
  r.taps_s.resize(taps);
  r.response.resize(taps);
  for (Eigen::Index k = 0; k < taps; ++k) {
    const double tau = tap_low_s + static_cast<double>(k) * tap_step_s;
    std::complex<double> acc = 0.0;
    for (Eigen::Index c = 0; c < cross.size(); ++c)
      acc += cross[c] * std::polar(1.0, kTwoPi * data.channel_freq_hz[c] * tau);
    r.taps_s[k] = tau;
    r.response[k] = std::abs(acc);
  }
  Eigen::Index best = 0;
  const double peak = r.response.maxCoeff(&best);
  // A noise-only scan peaks at a few times the random-walk level.
  constexpr double kDetection = 6.0;
  if (!(peak > kDetection * incoherent))
    throw ValidationError("no calibrator tone detected in the correlator data");
  r.tau_int_s = r.taps_s[best];
  r.uncertainty_s = tap_step_s;
  return r;
}

double sensitivity_factor(double delta_nu_hz, double t_s, double n) {
  if (!(delta_nu_hz > 0.0 && t_s > 0.0 && n > 0.0))
    throw ValidationError("sensitivity factor needs positive bandwidth, time and count");
  return 1.0 / std::sqrt(delta_nu_hz * t_s * n);
}

DriftScan synthesize_drift_scan(const DriftScanSynthSpec& spec) {
  if (!(spec.sample_seconds > 0.0 && spec.span_hr > 0.0 && spec.fwhm_deg > 0.0))
    throw ValidationError("drift scan synthesis needs positive cadence, span and FWHM");
  DriftScan scan;
  scan.dec_deg = spec.dec_deg;
  scan.longitude_deg = spec.longitude_deg;
  const double lst0 = lst_hours(spec.start_utc_s, spec.longitude_deg);
  const double start =
      spec.start_utc_s +
      wrap_hours(spec.center_ra_hr - 0.5 * spec.span_hr - lst0) * kSecondsPerSiderealHour;
  const auto count = static_cast<std::size_t>(
      std::floor(spec.span_hr * kSecondsPerSiderealHour / spec.sample_seconds));
  scan.utc_s.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    scan.utc_s[i] = start + static_cast<double>(i) * spec.sample_seconds;
  const Eigen::VectorXd ra = scan_ra_hours(scan);
  // The scan may begin just before a 24 h wrap; shift so the centre is near.
  const double shift = std::round((ra.mean() - spec.center_ra_hr) / 24.0) * 24.0;
  const double sigma_hr = spec.fwhm_deg / 15.0 / kFwhmPerSigma;
  Rng rng = make_stream(spec.seed, 0x61);
  std::normal_distribution<double> noise(0.0, spec.noise_rel * spec.floor);
  scan.power.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double v = gauss_flat(ra[static_cast<Eigen::Index>(i)] - shift, spec.floor,
                                spec.amplitude, spec.center_ra_hr, sigma_hr);
    scan.power[i] = v + (spec.noise_rel > 0.0 ? noise(rng) : 0.0);
  }
  return scan;
}

DriftScan read_drift_scan_csv(std::istream& in) {
  DriftScan scan;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto cols = split(text, ',');
    if (!header) {
      header = true;
      if (cols.size() == 2 && !parse_double(cols[0])) continue;  // column names
    }
    if (cols.size() != 2) throw FormatError("expected 2 columns (utc_s, power)", line_no);
    const auto t = parse_double(cols[0]);
    const auto p = parse_double(cols[1]);
    if (!t || !p) throw FormatError("malformed drift-scan row", line_no);
    if (!scan.utc_s.empty() && !(*t > scan.utc_s.back()))
      throw FormatError("timestamps must be strictly increasing", line_no);
    scan.utc_s.push_back(*t);
    scan.power.push_back(*p);
  }
  return scan;
}

void write_drift_scan_csv(std::ostream& out, const DriftScan& scan) {
  out << "utc_s,power\n";
  for (std::size_t i = 0; i < scan.utc_s.size(); ++i)
    out << fixed(scan.utc_s[i], 3) << ',' << sig(scan.power[i], 12) << '\n';
}

void write_fit_report(std::ostream& out, const DriftScan& scan, const GaussFlatFit& fit) {
  out << "source = " << scan.source_name << '\n'
      << "dec_deg = " << sig(scan.dec_deg, 6) << '\n'
      << "samples = " << scan.utc_s.size() << '\n'
      << "converged = " << (fit.converged ? "true" : "false") << '\n'
      << "iterations = " << fit.iterations << '\n'
      << "floor = " << sig(fit.floor, 9) << '\n'
      << "amplitude = " << sig(fit.amplitude, 9) << '\n'
      << "center_ra_hr = " << sig(fit.center_ra_hr, 9) << '\n'
      << "sigma_ra_hr = " << sig(fit.sigma_ra_hr, 9) << '\n'
      << "fwhm_hr = " << sig(fit.fwhm_hr(), 9) << '\n'
      << "fwhm_deg = " << sig(fit.fwhm_deg(), 9) << '\n'
      << "residual_rms = " << sig(fit.residual_rms, 6) << '\n';
  if (fit.converged && fit.floor > 0.0)
    out << "continuum_snr_db = " << sig(continuum_snr_db(fit), 6) << '\n';
}

}  // namespace pulsepair
