#include "pulsepair/pairdetect.hpp"

#include <algorithm>
#include <cmath>

#include "pulsepair/parallel.hpp"

namespace pulsepair {

FirstLevelParams FirstLevelParams::from(const ObservationConfig& config, double snr_threshold_db,
                                        bool exclude_test_bin) {
  FirstLevelParams p;
  p.snr_threshold_db = snr_threshold_db;
  p.band_low_hz = config.band_low_hz;
  p.band_high_hz = config.band_high_hz;
  p.excision_low_hz = config.excision_low_hz;
  p.excision_high_hz = config.excision_high_hz;
  p.exclude_test_bin = exclude_test_bin;
  return p;
}

bool FirstLevelParams::frequency_passes(double rf_hz) const {
  if (rf_hz < band_low_hz || rf_hz > band_high_hz) return false;
  return !(rf_hz >= excision_low_hz && rf_hz <= excision_high_hz);
}

bool FirstLevelParams::passes(double rf_hz, double snr_east_db, double snr_west_db) const {
  return snr_east_db > snr_threshold_db && snr_west_db > snr_threshold_db &&
         frequency_passes(rf_hz);
}

std::vector<PulseEvent> first_level_filter(std::span<const BinMeasurement> east,
                                           std::span<const BinMeasurement> west,
                                           const FirstLevelParams& params) {
  if (east.size() != west.size()) throw ValidationError("east/west streams differ in length");
  std::vector<PulseEvent> out;
  for (std::size_t i = 0; i < east.size(); ++i) {
    const BinMeasurement& e = east[i];
    const BinMeasurement& w = west[i];
    if (e.frame_index != w.frame_index || e.bin_index != w.bin_index)
      throw ValidationError("east/west streams are not frame- and bin-aligned at row " +
                            std::to_string(i));
    if (!params.passes(e.rf_freq_hz, e.snr_db, w.snr_db)) continue;
    PulseEvent ev;
    ev.utc_s = e.utc_s;
    ev.frame_index = e.frame_index;
    ev.bin_index = e.bin_index;
    ev.rf_freq_hz = e.rf_freq_hz;
    ev.snr_east_db = e.snr_db;
    ev.snr_west_db = w.snr_db;
    ev.phase_east_rad = e.phase_rad;
    ev.phase_west_rad = w.phase_rad;
    ev.polarization = e.polarization;
    ev.ra_pointing_hr = e.ra_pointing_hr;
    out.push_back(ev);
  }
  return out;
}

std::vector<PulseEvent> detect_frame(const Simulator& sim, std::int64_t frame_index,
                                     const FirstLevelParams& params) {
  const ObservationConfig& cfg = sim.config();
  if (cfg.generation != GenerationMode::kSparse) {
    const FramePair fp = sim.frame(frame_index);
    const ChannelizerOptions opts{cfg.bins_per_segment, params.exclude_test_bin};
    const auto east = channelize(fp.east, cfg, opts);
    const auto west = channelize(fp.west, cfg, opts);
    return first_level_filter(east, west, params);
  }

  const SparseFrame sf =
      sim.sparse_frame(frame_index, params.snr_threshold_db, params.exclude_test_bin);
  std::vector<PulseEvent> out;
  auto emit = [&](std::int64_t bin, double snr_e, double snr_w, double ph_e, double ph_w) {
    const double rf = cfg.bin_frequency_hz(bin);
    if (!params.passes(rf, snr_e, snr_w)) return;
    PulseEvent ev;
    ev.utc_s = sf.timing.utc_s;
    ev.frame_index = frame_index;
    ev.bin_index = bin;
    ev.rf_freq_hz = rf;
    ev.snr_east_db = snr_e;
    ev.snr_west_db = snr_w;
    ev.phase_east_rad = ph_e;
    ev.phase_west_rad = ph_w;
    ev.polarization = sf.polarization;
    ev.ra_pointing_hr = sf.timing.ra_pointing_hr;
    out.push_back(ev);
  };
  for (const auto& seg : sf.dense_segments) {
    Eigen::VectorXd snr_e(seg.east.size()), snr_w(seg.west.size());
    segment_snr_db(seg.east, cfg.bins_per_segment, params.exclude_test_bin, snr_e);
    segment_snr_db(seg.west, cfg.bins_per_segment, params.exclude_test_bin, snr_w);
    for (Eigen::Index k = 0; k < seg.east.size(); ++k) {
      if (!(snr_e[k] > params.snr_threshold_db && snr_w[k] > params.snr_threshold_db)) continue;
      emit(seg.first_bin + k, snr_e[k], snr_w[k], phase_rad(seg.east[k]), phase_rad(seg.west[k]));
    }
  }
  for (const auto& ex : sf.exceedances)
    emit(ex.bin, ex.snr_east_db, ex.snr_west_db, ex.phase_east_rad, ex.phase_west_rad);
  std::sort(out.begin(), out.end(),
            [](const PulseEvent& x, const PulseEvent& y) { return x.bin_index < y.bin_index; });
  return out;
}

std::vector<PulseEvent> detect_frames(const Simulator& sim, std::int64_t first, std::int64_t count,
                                      const FirstLevelParams& params, int threads) {
  // Chunks of frames keep per-task overhead low; chunking is fixed so output
  // is independent of the worker count.
  constexpr std::int64_t kChunk = 256;
  const std::int64_t chunks = (count + kChunk - 1) / kChunk;
  auto parts = ordered_map<std::vector<PulseEvent>>(chunks, threads, [&](std::int64_t c) {
    std::vector<PulseEvent> events;
    const std::int64_t begin = first + c * kChunk;
    const std::int64_t end = std::min(first + count, begin + kChunk);
    for (std::int64_t f = begin; f < end; ++f) {
      auto e = detect_frame(sim, f, params);
      events.insert(events.end(), e.begin(), e.end());
    }
    return events;
  });
  std::vector<PulseEvent> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<PairCandidate> form_pairs(std::span<const PulseEvent> events,
                                      const PairingParams& params, PairingStats* stats) {
  if (params.pairing_window_frames < 0) throw ValidationError("pairing window must be >= 0");
  const std::int64_t block_len = 2 * static_cast<std::int64_t>(params.pairing_window_frames) + 1;
  auto block_of = [&](const PulseEvent& e) {
    return e.frame_index >= 0 ? e.frame_index / block_len : -((-e.frame_index - 1) / block_len) - 1;
  };
  std::vector<const PulseEvent*> sorted;
  sorted.reserve(events.size());
  for (const auto& e : events) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(), [&](const PulseEvent* x, const PulseEvent* y) {
    const auto bx = block_of(*x), by = block_of(*y);
    if (bx != by) return bx < by;
    if (x->bin_index != y->bin_index) return x->bin_index < y->bin_index;
    if (x->frame_index != y->frame_index) return x->frame_index < y->frame_index;
    return x->utc_s < y->utc_s;
  });

  PairingStats local;
  std::vector<PairCandidate> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i == 0 || block_of(*sorted[i]) != block_of(*sorted[i - 1])) {
      ++local.blocks;
      continue;
    }
    const PulseEvent& a = *sorted[i - 1];
    const PulseEvent& b = *sorted[i];
    if (a.bin_index == b.bin_index) {
      ++local.same_bin_skipped;
      continue;
    }
    if (params.require_same_polarization && a.polarization != b.polarization) {
      ++local.polarization_skipped;
      continue;
    }
    PairCandidate c;
    c.a = a;
    c.b = b;
    c.delta_t_s = std::abs(b.utc_s - a.utc_s);
    c.delta_f_hz = b.rf_freq_hz - a.rf_freq_hz;
    c.log10_delta_f_mhz = std::log10(std::abs(c.delta_f_hz) / 1e6);
    c.ra_pointing_hr = b.ra_pointing_hr;
    out.push_back(c);
  }
  if (stats) *stats = local;
  return out;
}

bool delta_f_filter(const PairCandidate& candidate, const DeltaFRange& range) {
  if (candidate.delta_f_hz == 0.0) return false;
  const double lg = std::log10(std::abs(candidate.delta_f_hz) / 1e6);
  return lg >= range.log_low - range.log_tolerance && lg <= range.log_high + range.log_tolerance;
}

}  // namespace pulsepair
