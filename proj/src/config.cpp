#include "pulsepair/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "pulsepair/format.hpp"

namespace pulsepair {

namespace {

std::string to_text(double v) { return exact(v); }
std::string to_text(int v) { return std::to_string(v); }
std::string to_text(std::uint64_t v) { return std::to_string(v); }
std::string to_text(bool v) { return v ? "true" : "false"; }
std::string to_text(Polarization v) { return std::string(to_string(v)); }
std::string to_text(GenerationMode v) { return std::string(to_string(v)); }
std::string to_text(ProbabilityMode v) { return std::string(to_string(v)); }
std::string to_text(RfiKind v) { return std::string(to_string(v)); }
std::string to_text(RfiDirection v) { return std::string(to_string(v)); }
std::string to_text(const std::string& v) { return v; }

void from_text(const std::string& s, double& v) {
  const auto d = parse_double(s);
  if (!d || !std::isfinite(*d)) throw ValidationError("expected a finite number, got '" + s + "'");
  v = *d;
}
void from_text(const std::string& s, int& v) {
  const auto i = parse_int(s);
  if (!i || *i < std::numeric_limits<int>::min() || *i > std::numeric_limits<int>::max())
    throw ValidationError("expected an integer, got '" + s + "'");
  v = static_cast<int>(*i);
}
void from_text(const std::string& s, std::uint64_t& v) {
  const auto u = parse_uint(s);
  if (!u) throw ValidationError("expected an unsigned integer, got '" + s + "'");
  v = *u;
}
void from_text(const std::string& s, bool& v) {
  if (s == "true" || s == "1") v = true;
  else if (s == "false" || s == "0") v = false;
  else throw ValidationError("expected true or false, got '" + s + "'");
}
void from_text(const std::string& s, Polarization& v) { v = parse_polarization(s); }
void from_text(const std::string& s, GenerationMode& v) { v = parse_generation_mode(s); }
void from_text(const std::string& s, ProbabilityMode& v) { v = parse_probability_mode(s); }
void from_text(const std::string& s, RfiKind& v) { v = parse_rfi_kind(s); }
void from_text(const std::string& s, RfiDirection& v) { v = parse_rfi_direction(s); }
void from_text(const std::string& s, std::string& v) {
  if (s.empty()) throw ValidationError("empty value");
  v = s;
}

template <typename Target>
struct Field {
  std::string name;
  std::function<std::string(const Target&)> get;
  std::function<void(Target&, const std::string&)> set;
};

template <typename Target, typename Access>
Field<Target> field(std::string name, Access access) {
  return {std::move(name),
          [access](const Target& t) { return to_text(access(t)); },
          [access](Target& t, const std::string& s) { from_text(s, access(t)); }};
}

#define PP_FIELD(Target, key, expr) \
  field<Target>(key, [](auto& c) -> decltype(auto) { return (expr); })

const std::vector<Field<ExperimentConfig>>& top_fields() {
  using C = ExperimentConfig;
  static const std::vector<Field<C>> fields = {
      PP_FIELD(C, "experiment_id", c.experiment_id),
      PP_FIELD(C, "band_low_hz", c.observation.band_low_hz),
      PP_FIELD(C, "band_high_hz", c.observation.band_high_hz),
      PP_FIELD(C, "excision_low_hz", c.observation.excision_low_hz),
      PP_FIELD(C, "excision_high_hz", c.observation.excision_high_hz),
      PP_FIELD(C, "frame_seconds", c.observation.frame_seconds),
      PP_FIELD(C, "frame_hop_seconds", c.observation.frame_hop_seconds),
      PP_FIELD(C, "bins_per_segment", c.observation.bins_per_segment),
      PP_FIELD(C, "baseline_meters", c.observation.baseline_meters),
      PP_FIELD(C, "latitude_deg", c.observation.latitude_deg),
      PP_FIELD(C, "longitude_deg", c.observation.longitude_deg),
      PP_FIELD(C, "azimuth_deg", c.observation.azimuth_deg),
      PP_FIELD(C, "dec_deg", c.observation.dec_deg),
      PP_FIELD(C, "fwhm_deg", c.observation.fwhm_deg),
      PP_FIELD(C, "tau_int_true_s", c.observation.tau_int_true_s),
      PP_FIELD(C, "noise_power", c.observation.noise_power),
      PP_FIELD(C, "seed", c.observation.seed),
      PP_FIELD(C, "start_utc_s", c.observation.start_utc_s),
      PP_FIELD(C, "duration_days", c.observation.duration_days),
      PP_FIELD(C, "ra_window_low_hr", c.observation.ra_window_low_hr),
      PP_FIELD(C, "ra_window_high_hr", c.observation.ra_window_high_hr),
      PP_FIELD(C, "polarization", c.observation.polarization),
      PP_FIELD(C, "generation", c.observation.generation),
      PP_FIELD(C, "detect.snr_threshold_db", c.snr_threshold_db),
      PP_FIELD(C, "detect.exclude_test_bin", c.exclude_test_bin),
      PP_FIELD(C, "pairing.window_frames", c.pairing.pairing_window_frames),
      PP_FIELD(C, "pairing.require_same_polarization", c.pairing.require_same_polarization),
      PP_FIELD(C, "phase.tau_int_s", c.phase.tau_int_s),
      PP_FIELD(C, "phase.filter_halfwidth_rad", c.phase.filter_halfwidth_rad),
      PP_FIELD(C, "phase.tau_search_low_s", c.phase.tau_search_low_s),
      PP_FIELD(C, "phase.tau_search_high_s", c.phase.tau_search_high_s),
      PP_FIELD(C, "phase.tau_search_step_s", c.phase.tau_search_step_s),
      PP_FIELD(C, "phase.correction_sign", c.phase.correction_sign),
      PP_FIELD(C, "phase.log_df_low", c.phase.delta_f.log_low),
      PP_FIELD(C, "phase.log_df_high", c.phase.delta_f.log_high),
      PP_FIELD(C, "phase.log_df_tolerance", c.phase.delta_f.log_tolerance),
      PP_FIELD(C, "analysis.ra_low_hr", c.analysis.binning.low_hr),
      PP_FIELD(C, "analysis.ra_high_hr", c.analysis.binning.high_hr),
      PP_FIELD(C, "analysis.bin_width_hr", c.analysis.binning.width_hr),
      PP_FIELD(C, "analysis.probability_mode", c.analysis.mode),
      PP_FIELD(C, "analysis.fwhm_center_hr", c.analysis.fwhm_center_hr),
      PP_FIELD(C, "analysis.fwhm_width_hr", c.analysis.fwhm_width_hr),
      PP_FIELD(C, "analysis.per_day", c.analysis.per_day),
      PP_FIELD(C, "analysis.significance_d", c.analysis.significance_d),
  };
  return fields;
}

const std::vector<Field<SourceSpec>>& source_fields() {
  using S = SourceSpec;
  static const std::vector<Field<S>> fields = {
      PP_FIELD(S, "ra_hr", c.ra_hr),
      PP_FIELD(S, "dec_deg", c.dec_deg),
      PP_FIELD(S, "pulse_rate_per_frame", c.pulse_rate_per_frame),
      PP_FIELD(S, "delta_f_min_hz", c.delta_f_min_hz),
      PP_FIELD(S, "delta_f_max_hz", c.delta_f_max_hz),
      PP_FIELD(S, "delta_t_frames", c.delta_t_frames),
      PP_FIELD(S, "snr_target_db", c.snr_target_db),
      PP_FIELD(S, "polarization", c.polarization),
  };
  return fields;
}

const std::vector<Field<RfiSpec>>& rfi_fields() {
  using R = RfiSpec;
  static const std::vector<Field<R>> fields = {
      PP_FIELD(R, "kind", c.kind),
      PP_FIELD(R, "rf_freq_hz", c.rf_freq_hz),
      PP_FIELD(R, "power_rel_noise", c.power_rel_noise),
      PP_FIELD(R, "direction", c.direction),
      PP_FIELD(R, "sidelobe_delay_s", c.sidelobe_delay_s),
      PP_FIELD(R, "duty_cycle", c.duty_cycle),
  };
  return fields;
}

#undef PP_FIELD

template <typename Target>
const Field<Target>* find_field(const std::vector<Field<Target>>& fields, std::string_view name) {
  for (const auto& f : fields)
    if (f.name == name) return &f;
  return nullptr;
}

constexpr std::size_t kMaxListIndex = 1024;

// "source.3.ra_hr" -> (3, "ra_hr")
std::pair<std::size_t, std::string> split_indexed(const std::string& key, std::size_t prefix_len) {
  const auto dot = key.find('.', prefix_len);
  if (dot == std::string::npos) throw ValidationError("unknown key '" + key + "'");
  const auto idx = parse_uint(std::string_view(key).substr(prefix_len, dot - prefix_len));
  if (!idx || *idx >= kMaxListIndex) throw ValidationError("bad list index in key '" + key + "'");
  return {static_cast<std::size_t>(*idx), key.substr(dot + 1)};
}

}  // namespace

void ExperimentConfig::validate() const {
  observation.validate();
  phase.validate();
  analysis.binning.validate();
  if (pairing.pairing_window_frames < 0) throw ValidationError("pairing.window_frames must be >= 0");
  if (!std::isfinite(snr_threshold_db)) throw ValidationError("detect.snr_threshold_db must be finite");
  if (!(analysis.fwhm_width_hr >= 0.0)) throw ValidationError("analysis.fwhm_width_hr must be >= 0");
  if (experiment_id.find_first_of(" \t\n/\\") != std::string::npos)
    throw ValidationError("experiment_id may not contain whitespace or path separators");
}

void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  try {
    if (key.rfind("source.", 0) == 0) {
      const auto [idx, name] = split_indexed(key, 7);
      const auto* f = find_field(source_fields(), name);
      if (!f) throw ValidationError("unknown key '" + key + "'");
      if (config.sources.size() <= idx) config.sources.resize(idx + 1);
      f->set(config.sources[idx], value);
      return;
    }
    if (key.rfind("rfi.", 0) == 0) {
      const auto [idx, name] = split_indexed(key, 4);
      const auto* f = find_field(rfi_fields(), name);
      if (!f) throw ValidationError("unknown key '" + key + "'");
      if (config.rfi.size() <= idx) config.rfi.resize(idx + 1);
      f->set(config.rfi[idx], value);
      return;
    }
    const auto* f = find_field(top_fields(), key);
    if (!f) throw ValidationError("unknown key '" + key + "'");
    f->set(config, value);
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    if (msg.rfind("unknown key", 0) == 0 || msg.rfind("bad list index", 0) == 0) throw;
    throw ValidationError(key + ": " + msg);
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::set<std::size_t> source_idx, rfi_idx;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string_view text = trim(std::string_view(line).substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw FormatError("expected 'key = value'", line_no);
    const std::string key(trim(text.substr(0, eq)));
    const std::string value(trim(text.substr(eq + 1)));
    if (key.empty()) throw FormatError("missing key", line_no);
    if (!seen.insert(key).second) throw FormatError("key '" + key + "' given twice", line_no);
    try {
      set_config_value(config, key, value);
    } catch (const ValidationError& e) {
      throw FormatError(e.what(), line_no);
    }
    if (key.rfind("source.", 0) == 0) source_idx.insert(split_indexed(key, 7).first);
    if (key.rfind("rfi.", 0) == 0) rfi_idx.insert(split_indexed(key, 4).first);
  }
  if (source_idx.size() != config.sources.size())
    throw FormatError("source indices must be contiguous from 0", 0);
  if (rfi_idx.size() != config.rfi.size())
    throw FormatError("rfi indices must be contiguous from 0", 0);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  try {
    return parse_config(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), 0);
  }
}

std::string canonical_config(const ExperimentConfig& config) {
  std::ostringstream out;
  for (const auto& f : top_fields()) out << f.name << " = " << f.get(config) << '\n';
  for (std::size_t i = 0; i < config.sources.size(); ++i)
    for (const auto& f : source_fields())
      out << "source." << i << '.' << f.name << " = " << f.get(config.sources[i]) << '\n';
  for (std::size_t i = 0; i < config.rfi.size(); ++i)
    for (const auto& f : rfi_fields())
      out << "rfi." << i << '.' << f.name << " = " << f.get(config.rfi[i]) << '\n';
  return out.str();
}

std::vector<std::string> config_keys(const ExperimentConfig& config) {
  std::vector<std::string> keys;
  for (const auto& f : top_fields()) keys.push_back(f.name);
  for (std::size_t i = 0; i < config.sources.size(); ++i)
    for (const auto& f : source_fields())
      keys.push_back("source." + std::to_string(i) + "." + f.name);
  for (std::size_t i = 0; i < config.rfi.size(); ++i)
    for (const auto& f : rfi_fields()) keys.push_back("rfi." + std::to_string(i) + "." + f.name);
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace pulsepair
