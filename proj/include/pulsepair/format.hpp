#ifndef PULSEPAIR_FORMAT_HPP
#define PULSEPAIR_FORMAT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pulsepair {

/// printf "%.{digits}f"
std::string fixed(double value, int digits);
/// printf "%.{digits}g"
std::string sig(double value, int digits);
/// Shortest text that parses back to the same double.
std::string exact(double value);
/// Scientific notation without exponent padding, e.g. 2.8e-4.
std::string compact_sci(double value, int mantissa_digits);

std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);
std::optional<std::uint64_t> parse_uint(std::string_view text);

std::string_view trim(std::string_view text);
/// Splits on a single-character delimiter; no quoting.
std::vector<std::string_view> split(std::string_view text, char delim);

}  // namespace pulsepair

#endif  // PULSEPAIR_FORMAT_HPP
