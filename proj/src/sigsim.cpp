#include "pulsepair/sigsim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <set>

#include "pulsepair/calib.hpp"
#include "pulsepair/channelizer.hpp"
#include "pulsepair/exceedance.hpp"
#include "pulsepair/parallel.hpp"

namespace pulsepair {

namespace {

// Stream purpose tags; stable values keep seeds stable across releases.
enum StreamTag : std::uint64_t {
  kTagInject = 0x11,
  kTagRfi = 0x12,
  kTagBroadband = 0x13,
  kTagNoiseEast = 0x21,
  kTagNoiseWest = 0x22,
  kTagTimeEast = 0x31,
  kTagTimeWest = 0x32,
  kTagSparse = 0x41,
  kTagCorrelator = 0x51,
};

constexpr std::array<std::string_view, 3> kModeNames = {"time", "dense", "sparse"};
constexpr std::array<std::string_view, 2> kRfiKindNames = {"broadband_flat", "narrowband_carrier"};
constexpr std::array<std::string_view, 2> kRfiDirectionNames = {"common_mode", "sidelobe_delay"};

template <typename Enum, std::size_t N>
Enum parse_name(const std::array<std::string_view, N>& names, std::string_view text,
                const char* what) {
  for (std::size_t i = 0; i < N; ++i)
    if (names[i] == text) return static_cast<Enum>(i);
  throw ValidationError(std::string("unknown ") + what + " '" + std::string(text) + "'");
}

bool is_power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

double hour_angle_hr(double lst_hr, double ra_hr) {
  double ha = std::fmod(lst_hr - ra_hr, 24.0);
  if (ha < -12.0) ha += 24.0;
  if (ha >= 12.0) ha -= 24.0;
  return ha;
}

}  // namespace

std::string_view to_string(GenerationMode m) { return kModeNames[static_cast<std::size_t>(m)]; }
GenerationMode parse_generation_mode(std::string_view text) {
  return parse_name<GenerationMode>(kModeNames, text, "generation mode");
}
std::string_view to_string(RfiKind k) { return kRfiKindNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(RfiDirection d) {
  return kRfiDirectionNames[static_cast<std::size_t>(d)];
}
RfiKind parse_rfi_kind(std::string_view text) {
  return parse_name<RfiKind>(kRfiKindNames, text, "RFI kind");
}
RfiDirection parse_rfi_direction(std::string_view text) {
  return parse_name<RfiDirection>(kRfiDirectionNames, text, "RFI direction");
}

// ---------------------------------------------------------------------------
// ObservationConfig

std::int64_t ObservationConfig::bin_count() const {
  const double exact = (band_high_hz - band_low_hz) * frame_seconds;
  return std::llround(exact);
}

std::int64_t ObservationConfig::segment_count() const {
  const std::int64_t bins = bin_count();
  return (bins + bins_per_segment - 1) / bins_per_segment;
}

int ObservationConfig::segment_size(std::int64_t s) const {
  const std::int64_t remaining = bin_count() - s * bins_per_segment;
  return static_cast<int>(std::min<std::int64_t>(bins_per_segment, remaining));
}

std::int64_t ObservationConfig::bin_of_frequency(double rf_hz) const {
  const std::int64_t k = std::llround((rf_hz - band_low_hz) * frame_seconds);
  return (k < 0 || k >= bin_count()) ? -1 : k;
}

void ObservationConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };
  if (!(band_high_hz > band_low_hz)) fail("band_high_hz must exceed band_low_hz");
  if (!(frame_seconds > 0.0)) fail("frame_seconds must be positive");
  if (!(frame_hop_seconds > 0.0)) fail("frame_hop_seconds must be positive");
  if (!(excision_low_hz <= excision_high_hz)) fail("excision band is inverted");
  if (excision_low_hz < band_low_hz || excision_high_hz > band_high_hz)
    fail("excision band must lie within the RF band");
  const double exact = (band_high_hz - band_low_hz) * frame_seconds;
  if (std::abs(exact - std::llround(exact)) > 1e-6 * std::max(1.0, exact))
    fail("(band_high_hz - band_low_hz) * frame_seconds must be an integer bin count");
  if (bin_count() < 1) fail("band holds no bins");
  if (bins_per_segment < 2) fail("bins_per_segment must be at least 2");
  if (!(std::abs(dec_deg) < 90.0)) fail("|dec_deg| must be below 90");
  if (!(std::abs(latitude_deg) <= 90.0)) fail("latitude_deg out of range");
  if (!(std::abs(azimuth_deg - 180.0) < 5.0)) fail("azimuth_deg must be within 5 deg of 180");
  if (!(fwhm_deg > 0.0)) fail("fwhm_deg must be positive");
  if (!(noise_power > 0.0)) fail("noise_power must be positive");
  if (!(baseline_meters >= 0.0)) fail("baseline_meters must be non-negative");
  if (!(duration_days > 0.0)) fail("duration_days must be positive");
  if (!(ra_window_low_hr >= 0.0 && ra_window_high_hr <= 24.0 &&
        ra_window_low_hr < ra_window_high_hr))
    fail("RA window must satisfy 0 <= low < high <= 24");
  if (!std::isfinite(tau_int_true_s)) fail("tau_int_true_s must be finite");
}

// ---------------------------------------------------------------------------
// FrameSchedule

FrameSchedule::FrameSchedule(const ObservationConfig& config)
    : hop_(config.frame_hop_seconds),
      pointing_offset_hr_(
          pointing_offset_hr(config.azimuth_deg, config.dec_deg, config.latitude_deg)),
      longitude_deg_(config.longitude_deg) {
  config.validate();
  const double target_lst = config.ra_window_low_hr - pointing_offset_hr_;
  const double lst0 = lst_hours(config.start_utc_s, config.longitude_deg);
  first_start_utc_ = config.start_utc_s + wrap_hours(target_lst - lst0) * kSecondsPerSiderealHour;
  const double window_s =
      (config.ra_window_high_hr - config.ra_window_low_hr) * kSecondsPerSiderealHour;
  frames_per_transit_ = static_cast<std::int64_t>(std::floor(window_s / hop_));
  if (frames_per_transit_ < 1) throw ValidationError("RA window shorter than one frame hop");
  const double end_utc = config.start_utc_s + config.duration_days * 86400.0;
  transits_ = 0;
  while (first_start_utc_ + transits_ * kSiderealDaySeconds < end_utc) ++transits_;
  if (transits_ == 0) throw ValidationError("observation ends before the first transit");
}

double FrameSchedule::transit_start_utc(int transit) const {
  return first_start_utc_ + transit * kSiderealDaySeconds;
}

FrameTiming FrameSchedule::timing(std::int64_t frame_index) const {
  FrameTiming t;
  t.frame_index = frame_index;
  t.transit = static_cast<int>(frame_index / frames_per_transit_);
  const std::int64_t local = frame_index % frames_per_transit_;
  t.utc_s = transit_start_utc(t.transit) + (static_cast<double>(local) + 0.5) * hop_;
  t.lst_hr = lst_hours(t.utc_s, longitude_deg_);
  t.ra_pointing_hr = wrap_hours(t.lst_hr + pointing_offset_hr_);
  return t;
}

// ---------------------------------------------------------------------------
// Simulator

struct Simulator::Plan {
  FrameTiming timing;
  std::vector<InjectedTone> tones;
  struct Broadband {
    std::int64_t segment;
    double power;
    double delay_s;
    std::uint64_t stream;
  };
  std::vector<Broadband> broadband;
};

namespace {

struct SamplerPair {
  std::unique_ptr<ExceedanceSampler> full;
  std::unique_ptr<ExceedanceSampler> partial;
};

// Samplers are costly to build and immutable afterwards.
const SamplerPair& cached_samplers(int full_size, int partial_size, double threshold_db,
                                   bool exclude) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, double, bool>, SamplerPair> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_tuple(full_size, partial_size, threshold_db, exclude);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  SamplerPair pair;
  pair.full = std::make_unique<ExceedanceSampler>(full_size, threshold_db, exclude);
  if (partial_size >= 2)
    pair.partial = std::make_unique<ExceedanceSampler>(partial_size, threshold_db, exclude);
  return cache.emplace(key, std::move(pair)).first->second;
}

}  // namespace

Simulator::Simulator(ObservationConfig config, std::vector<SourceSpec> sources,
                     std::vector<RfiSpec> rfi)
    : config_(std::move(config)),
      sources_(std::move(sources)),
      rfi_(std::move(rfi)),
      schedule_(config_),
      pointing_offset_hr_(
          pointing_offset_hr(config_.azimuth_deg, config_.dec_deg, config_.latitude_deg)) {
  const double band = config_.band_high_hz - config_.band_low_hz;
  for (const auto& s : sources_) {
    if (!(s.ra_hr >= config_.ra_window_low_hr && s.ra_hr <= config_.ra_window_high_hr))
      throw ValidationError("source direction outside simulated transit window");
    if (!(std::abs(s.dec_deg) < 90.0)) throw ValidationError("source |dec_deg| must be below 90");
    if (!(s.pulse_rate_per_frame >= 0.0)) throw ValidationError("pulse rate must be >= 0");
    if (!(s.delta_f_min_hz > 0.0 && s.delta_f_min_hz <= s.delta_f_max_hz))
      throw ValidationError("pair spacing range must satisfy 0 < min <= max");
    if (s.delta_f_max_hz >= band) throw ValidationError("pair spacing lands outside the RF band");
    if (s.delta_t_frames < 0) throw ValidationError("delta_t_frames must be >= 0");
    if (!std::isfinite(s.snr_target_db)) throw ValidationError("snr_target_db must be finite");
  }
  for (const auto& r : rfi_) {
    if (!(r.duty_cycle >= 0.0 && r.duty_cycle <= 1.0))
      throw ValidationError("RFI duty_cycle must be in [0, 1]");
    if (config_.bin_of_frequency(r.rf_freq_hz) < 0)
      throw ValidationError("RFI frequency outside the RF band");
    if (!(r.power_rel_noise >= 0.0)) throw ValidationError("RFI power must be >= 0");
  }
}

double Simulator::source_delay(const SourceSpec& source, double lst_hr) const {
  const double ha_rad = hour_angle_hr(lst_hr, source.ra_hr) * 15.0 * std::numbers::pi / 180.0;
  return geometric_delay(config_.baseline_meters, source.dec_deg, ha_rad) +
         config_.tau_int_true_s;
}

Simulator::Plan Simulator::plan(std::int64_t frame_index) const {
  Plan p;
  p.timing = schedule_.timing(frame_index);
  const std::int64_t bins = config_.bin_count();
  const double amplitude_scale = std::sqrt(config_.noise_power);

  for (std::size_t si = 0; si < sources_.size(); ++si) {
    const SourceSpec& src = sources_[si];
    if (src.polarization != config_.polarization || src.pulse_rate_per_frame <= 0.0) continue;
    const double amp = amplitude_scale * std::pow(10.0, src.snr_target_db / 20.0);

    // Pairs started at frame m; pure in (seed, m, source).
    auto pairs_started_at = [&](std::int64_t m) {
      struct Pair {
        std::int64_t bin_a, bin_b;
        double phase_a, phase_b;
      };
      std::vector<Pair> out;
      const FrameTiming tm = schedule_.timing(m);
      const double dra_deg = hour_angle_hr(tm.ra_pointing_hr, src.ra_hr) * 15.0;
      const double ddec_deg = config_.dec_deg - src.dec_deg;
      const double gain = beam_gain(std::hypot(dra_deg, ddec_deg), config_.fwhm_deg);
      Rng rng = make_stream(config_.seed, static_cast<std::uint64_t>(m), si, kTagInject);
      std::poisson_distribution<int> count(src.pulse_rate_per_frame * gain);
      const int n = count(rng);
      std::uniform_real_distribution<double> log_df(std::log(src.delta_f_min_hz),
                                                    std::log(src.delta_f_max_hz));
      for (int k = 0; k < n; ++k) {
        const double df = std::exp(log_df(rng));
        const std::int64_t dbins =
            std::clamp<std::int64_t>(std::llround(df * config_.frame_seconds), 1, bins - 1);
        std::uniform_int_distribution<std::int64_t> base(0, bins - 1 - dbins);
        const std::int64_t a = base(rng);
        const double pa = uniform_phase(rng);
        const double pb = uniform_phase(rng);
        out.push_back({a, a + dbins, pa, pb});
      }
      return out;
    };

    auto add_tone = [&](std::int64_t bin, double phase) {
      const double f = config_.bin_frequency_hz(bin);
      const double delay = source_delay(src, p.timing.lst_hr);
      // A West-path delay tau rotates the West voltage by -2 pi f tau.
      p.tones.push_back({bin, std::polar(amp, phase), std::polar(amp, phase - kTwoPi * f * delay)});
    };

    const std::int64_t transit_first = p.timing.transit * schedule_.frames_per_transit();
    for (const auto& pr : pairs_started_at(frame_index)) {
      add_tone(pr.bin_a, pr.phase_a);
      if (src.delta_t_frames == 0) add_tone(pr.bin_b, pr.phase_b);
    }
    if (src.delta_t_frames > 0 && frame_index - src.delta_t_frames >= transit_first) {
      for (const auto& pr : pairs_started_at(frame_index - src.delta_t_frames))
        add_tone(pr.bin_b, pr.phase_b);
    }
  }

  for (std::size_t ri = 0; ri < rfi_.size(); ++ri) {
    const RfiSpec& r = rfi_[ri];
    Rng rng = make_stream(config_.seed, static_cast<std::uint64_t>(frame_index), ri, kTagRfi);
    if (std::generate_canonical<double, 53>(rng) >= r.duty_cycle) continue;
    const double delay = r.direction == RfiDirection::kCommonMode
                             ? 0.0
                             : r.sidelobe_delay_s + config_.tau_int_true_s;
    const std::int64_t bin = config_.bin_of_frequency(r.rf_freq_hz);
    if (r.kind == RfiKind::kNarrowbandCarrier) {
      const double amp = std::sqrt(r.power_rel_noise * config_.noise_power);
      const double phase = uniform_phase(rng);
      const double f = config_.bin_frequency_hz(bin);
      p.tones.push_back({bin, std::polar(amp, phase), std::polar(amp, phase - kTwoPi * f * delay)});
    } else {
      p.broadband.push_back({bin / config_.bins_per_segment,
                             r.power_rel_noise * config_.noise_power, delay,
                             stream_seed(config_.seed, static_cast<std::uint64_t>(frame_index), ri,
                                         kTagBroadband)});
    }
  }
  return p;
}

std::vector<InjectedTone> Simulator::tones(std::int64_t frame_index) const {
  return plan(frame_index).tones;
}

void Simulator::fill_segment(std::int64_t frame_index, std::int64_t segment, const Plan& p,
                             Eigen::Ref<Eigen::VectorXcd> east,
                             Eigen::Ref<Eigen::VectorXcd> west) const {
  const std::int64_t first = segment * config_.bins_per_segment;
  const Eigen::Index n = east.size();
  std::normal_distribution<double> gauss(0.0, std::sqrt(config_.noise_power / 2.0));
  Rng re = make_stream(config_.seed, static_cast<std::uint64_t>(frame_index),
                       static_cast<std::uint64_t>(segment), kTagNoiseEast);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double a = gauss(re);
    east[k] = {a, gauss(re)};
  }
  Rng rw = make_stream(config_.seed, static_cast<std::uint64_t>(frame_index),
                       static_cast<std::uint64_t>(segment), kTagNoiseWest);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double a = gauss(rw);
    west[k] = {a, gauss(rw)};
  }
  for (const auto& bb : p.broadband) {
    if (bb.segment != segment) continue;
    Rng rb(bb.stream);
    std::normal_distribution<double> g(0.0, std::sqrt(bb.power / 2.0));
    for (Eigen::Index k = 0; k < n; ++k) {
      const double a = g(rb);
      const std::complex<double> c(a, g(rb));
      const double f = config_.bin_frequency_hz(first + k);
      east[k] += c;
      west[k] += c * std::polar(1.0, -kTwoPi * f * bb.delay_s);
    }
  }
  for (const auto& t : p.tones) {
    if (t.bin < first || t.bin >= first + n) continue;
    east[t.bin - first] += t.east;
    west[t.bin - first] += t.west;
  }
}

FramePair Simulator::frame(std::int64_t frame_index) const {
  return frame(frame_index, config_.generation);
}

FramePair Simulator::frame(std::int64_t frame_index, GenerationMode mode) const {
  if (frame_index < 0 || frame_index >= schedule_.frame_count())
    throw ValidationError("frame index out of range");
  const Plan p = plan(frame_index);
  const std::int64_t bins = config_.bin_count();
  FramePair out;
  for (FrameSpectrum* fs : {&out.east, &out.west}) {
    fs->frame_index = frame_index;
    fs->utc_s = p.timing.utc_s;
    fs->ra_pointing_hr = p.timing.ra_pointing_hr;
    fs->polarization = config_.polarization;
  }
  out.east.element = Element::kEast;
  out.west.element = Element::kWest;

  if (mode != GenerationMode::kTimeDomain) {
    out.east.bins.resize(bins);
    out.west.bins.resize(bins);
    for (std::int64_t s = 0; s < config_.segment_count(); ++s) {
      const std::int64_t first = s * config_.bins_per_segment;
      const int size = config_.segment_size(s);
      fill_segment(frame_index, s, p, out.east.bins.segment(first, size),
                   out.west.bins.segment(first, size));
    }
    return out;
  }

  // Time domain: complex baseband at fs = bins / frame_seconds. Noise per
  // sample has variance bins * noise_power so that each unit-gain bin carries
  // noise_power on average.
  if (!is_power_of_two(bins))
    throw ValidationError("time-domain generation needs a power-of-two bin count");
  const auto n = static_cast<Eigen::Index>(bins);
  std::normal_distribution<double> gauss(0.0, std::sqrt(static_cast<double>(bins) *
                                                        config_.noise_power / 2.0));
  auto synth = [&](Element e) {
    Eigen::VectorXcd x(n);
    Rng rng = make_stream(config_.seed, static_cast<std::uint64_t>(frame_index),
                          e == Element::kEast ? kTagTimeEast : kTagTimeWest);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = gauss(rng);
      x[i] = {a, gauss(rng)};
    }
    for (const auto& t : p.tones) {
      const std::complex<double> a = e == Element::kEast ? t.east : t.west;
      for (Eigen::Index i = 0; i < n; ++i)
        x[i] += a * std::polar(1.0, kTwoPi * static_cast<double>(t.bin) * static_cast<double>(i) /
                                        static_cast<double>(n));
    }
    if (!p.broadband.empty()) {
      // Broadband contaminants are built per bin and brought to the time
      // domain with the inverse of the unit-gain transform.
      Eigen::VectorXcd spec = Eigen::VectorXcd::Zero(n);
      for (const auto& bb : p.broadband) {
        Rng rb(bb.stream);
        std::normal_distribution<double> g(0.0, std::sqrt(bb.power / 2.0));
        const std::int64_t first = bb.segment * config_.bins_per_segment;
        const int size = config_.segment_size(bb.segment);
        for (int k = 0; k < size; ++k) {
          const double a = g(rb);
          std::complex<double> c(a, g(rb));
          if (e == Element::kWest)
            c *= std::polar(1.0, -kTwoPi * config_.bin_frequency_hz(first + k) * bb.delay_s);
          spec[first + k] += c;
        }
      }
      x += inverse_fft_frame(spec);
    }
    return x;
  };
  out.east.bins = fft_frame(synth(Element::kEast), config_.frame_seconds);
  out.west.bins = fft_frame(synth(Element::kWest), config_.frame_seconds);
  return out;
}

std::vector<FramePair> Simulator::frames(std::int64_t first, std::int64_t count,
                                         int threads) const {
  return ordered_map<FramePair>(count, threads,
                                [&](std::int64_t i) { return frame(first + i); });
}

SparseFrame Simulator::sparse_frame(std::int64_t frame_index, double snr_threshold_db,
                                    bool exclude_test_bin) const {
  if (frame_index < 0 || frame_index >= schedule_.frame_count())
    throw ValidationError("frame index out of range");
  const Plan p = plan(frame_index);
  SparseFrame out;
  out.timing = p.timing;
  out.polarization = config_.polarization;

  std::set<std::int64_t> dense;
  for (const auto& t : p.tones) dense.insert(t.bin / config_.bins_per_segment);
  for (const auto& b : p.broadband) dense.insert(b.segment);
  for (std::int64_t s : dense) {
    SegmentSpectra seg;
    seg.segment = s;
    seg.first_bin = s * config_.bins_per_segment;
    const int size = config_.segment_size(s);
    seg.east.resize(size);
    seg.west.resize(size);
    fill_segment(frame_index, s, p, seg.east, seg.west);
    out.dense_segments.push_back(std::move(seg));
  }

  const std::int64_t segments = config_.segment_count();
  const int last_size = config_.segment_size(segments - 1);
  const bool has_partial = last_size != config_.bins_per_segment;
  const std::int64_t full_segments = has_partial ? segments - 1 : segments;
  const SamplerPair& samplers = cached_samplers(
      config_.bins_per_segment, has_partial ? last_size : 0, snr_threshold_db, exclude_test_bin);

  Rng rng = make_stream(config_.seed, static_cast<std::uint64_t>(frame_index), kTagSparse);
  auto sample_segment = [&](const ExceedanceSampler& sampler, std::int64_t s) {
    const auto east_set = sampler.sample_subset(rng, sampler.sample_count_given_any(rng));
    const auto west_set = sampler.sample_subset(rng, sampler.sample_count_given_any(rng));
    std::vector<int> both;
    std::set_intersection(east_set.begin(), east_set.end(), west_set.begin(), west_set.end(),
                          std::back_inserter(both));
    if (both.empty()) return;
    const auto snr_e = sampler.sample_snr_db(rng, east_set);
    const auto snr_w = sampler.sample_snr_db(rng, west_set);
    for (int idx : both) {
      const auto ie = std::lower_bound(east_set.begin(), east_set.end(), idx) - east_set.begin();
      const auto iw = std::lower_bound(west_set.begin(), west_set.end(), idx) - west_set.begin();
      DualExceedance ex;
      ex.bin = s * config_.bins_per_segment + idx;
      ex.snr_east_db = snr_e[static_cast<std::size_t>(ie)];
      ex.snr_west_db = snr_w[static_cast<std::size_t>(iw)];
      ex.phase_east_rad = uniform_phase(rng);
      ex.phase_west_rad = uniform_phase(rng);
      out.exceedances.push_back(ex);
    }
  };

  // Gap to the next segment where both elements exceed, by inversion;
  // log1p keeps tiny probabilities from collapsing to log(1) = 0.
  const double q_full = samplers.full->prob_any();
  const double log_miss = std::log1p(-q_full * q_full);
  auto skip = [&](Rng& g) -> std::int64_t {
    if (!(log_miss < 0.0)) return full_segments;
    const double u = 1.0 - std::generate_canonical<double, 53>(g);
    const double k = std::floor(std::log(u) / log_miss);
    return k >= static_cast<double>(full_segments) ? full_segments : static_cast<std::int64_t>(k);
  };
  for (std::int64_t s = skip(rng); s < full_segments; s += 1 + skip(rng)) {
    if (dense.count(s)) continue;
    sample_segment(*samplers.full, s);
  }
  if (has_partial && samplers.partial && !dense.count(segments - 1)) {
    const double q = samplers.partial->prob_any();
    if (std::generate_canonical<double, 53>(rng) < q * q)
      sample_segment(*samplers.partial, segments - 1);
  }
  return out;
}

// ---------------------------------------------------------------------------

CorrelatorData simulate_correlator_frames(const CorrelatorSimSpec& spec) {
  if (spec.channels < 2 || spec.frames < 1 || !(spec.bandwidth_hz > 0.0))
    throw ValidationError("correlator simulation needs >= 2 channels, >= 1 frame, bandwidth > 0");
  CorrelatorData d;
  d.channel_freq_hz = Eigen::VectorXd::LinSpaced(spec.channels, 0.0, spec.channels - 1.0) *
                          (spec.bandwidth_hz / spec.channels) +
                      Eigen::VectorXd::Constant(spec.channels, spec.band_low_hz);
  d.east.resize(spec.frames, spec.channels);
  d.west.resize(spec.frames, spec.channels);
  const double cal_sd = std::sqrt(std::pow(10.0, spec.calibrator_snr_db / 10.0) / 2.0);
  std::normal_distribution<double> noise(0.0, std::sqrt(0.5));
  std::normal_distribution<double> cal(0.0, cal_sd);
  for (int f = 0; f < spec.frames; ++f) {
    Rng rng = make_stream(spec.seed, static_cast<std::uint64_t>(f), kTagCorrelator);
    for (int c = 0; c < spec.channels; ++c) {
      const double ca = cal(rng);
      const std::complex<double> s(ca, cal(rng));
      const double ea = noise(rng);
      const std::complex<double> ne(ea, noise(rng));
      const double wa = noise(rng);
      const std::complex<double> nw(wa, noise(rng));
      d.east(f, c) = s + ne;
      d.west(f, c) = s * std::polar(1.0, -kTwoPi * d.channel_freq_hz[c] * spec.tau_true_s) + nw;
    }
  }
  return d;
}

}  // namespace pulsepair
