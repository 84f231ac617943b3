#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "pulsepair/format.hpp"
#include "pulsepair/pairdetect.hpp"

namespace pulsepair {

namespace {

constexpr std::string_view kHeader =
    "schema_version,utc_s,frame_index,bin_index,rf_freq_hz,snr_east_db,snr_west_db,"
    "phase_east_rad,phase_west_rad,polarization_tag,ra_pointing_hr";
constexpr std::size_t kColumns = 11;

double field_double(std::string_view text, const char* name, std::size_t line) {
  const auto v = parse_double(text);
  if (!v) throw FormatError(std::string("bad ") + name + " '" + std::string(text) + "'", line);
  return *v;
}

std::int64_t field_int(std::string_view text, const char* name, std::size_t line) {
  const auto v = parse_int(text);
  if (!v) throw FormatError(std::string("bad ") + name + " '" + std::string(text) + "'", line);
  return *v;
}

}  // namespace

void write_level1_header(std::ostream& out) { out << kHeader << '\n'; }

void write_level1_rows(std::ostream& out, std::span<const PulseEvent> events) {
  for (const auto& e : events) {
    out << kLevel1SchemaVersion << ',' << fixed(e.utc_s, 3) << ',' << e.frame_index << ','
        << e.bin_index << ',' << fixed(e.rf_freq_hz, 1) << ',' << sig(e.snr_east_db, 6) << ','
        << sig(e.snr_west_db, 6) << ',' << sig(e.phase_east_rad, 6) << ','
        << sig(e.phase_west_rad, 6) << ',' << to_string(e.polarization) << ','
        << sig(e.ra_pointing_hr, 6) << '\n';
  }
}

std::vector<PulseEvent> read_level1(std::istream& in) {
  std::vector<PulseEvent> out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    if (!header_seen) {
      if (text != kHeader) throw FormatError("level-1 archive header does not match schema", line_no);
      header_seen = true;
      continue;
    }
    const auto cols = split(text, ',');
    if (cols.size() != kColumns)
      throw FormatError("expected " + std::to_string(kColumns) + " columns, found " +
                            std::to_string(cols.size()),
                        line_no);
    const auto version = field_int(cols[0], "schema_version", line_no);
    if (version != kLevel1SchemaVersion)
      throw FormatError("schema version " + std::to_string(version) + " is not supported (expected " +
                            std::to_string(kLevel1SchemaVersion) + ")",
                        line_no);
    PulseEvent e;
    e.utc_s = field_double(cols[1], "utc_s", line_no);
    e.frame_index = field_int(cols[2], "frame_index", line_no);
    e.bin_index = field_int(cols[3], "bin_index", line_no);
    e.rf_freq_hz = field_double(cols[4], "rf_freq_hz", line_no);
    e.snr_east_db = field_double(cols[5], "snr_east_db", line_no);
    e.snr_west_db = field_double(cols[6], "snr_west_db", line_no);
    e.phase_east_rad = field_double(cols[7], "phase_east_rad", line_no);
    e.phase_west_rad = field_double(cols[8], "phase_west_rad", line_no);
    try {
      e.polarization = parse_polarization(trim(cols[9]));
    } catch (const ValidationError& err) {
      throw FormatError(err.what(), line_no);
    }
    e.ra_pointing_hr = field_double(cols[10], "ra_pointing_hr", line_no);
    out.push_back(e);
  }
  return out;
}

void write_level1_archive(const std::filesystem::path& path, std::span<const PulseEvent> events,
                          bool append) {
  const bool need_header = !append || !std::filesystem::exists(path) ||
                           std::filesystem::file_size(path) == 0;
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  if (need_header) write_level1_header(out);
  write_level1_rows(out, events);
  if (!out) throw Error("write failed: " + path.string());
}

std::vector<PulseEvent> read_level1_archive(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_level1(in);
}

}  // namespace pulsepair
