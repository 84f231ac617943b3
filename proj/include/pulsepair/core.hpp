#ifndef PULSEPAIR_CORE_HPP
#define PULSEPAIR_CORE_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pulsepair {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kSiderealDaySeconds = 86164.0905;
inline constexpr double kSecondsPerSiderealHour = kSiderealDaySeconds / 24.0;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Element : std::uint8_t { kEast, kWest };

/// Channel label carried through the pipeline. No polarization physics is
/// modelled; the tag only identifies which receiver channel a frame came from.
enum class Polarization : std::uint8_t { kNone, kX, kY, kL, kR };

std::string_view to_string(Element e);
std::string_view to_string(Polarization p);
Polarization parse_polarization(std::string_view text);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters or inputs that violate a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed file content. `line()` is 1-based, 0 when not tied to a line.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Principal value in (-pi, pi].
template <typename Scalar>
Scalar wrap_phase(Scalar radians) {
  constexpr Scalar kPi = std::numbers::pi_v<Scalar>;
  Scalar r = std::remainder(radians, Scalar(2) * kPi);
  if (r <= -kPi) r += Scalar(2) * kPi;
  return r;
}

/// Wraps hours into [0, 24).
inline double wrap_hours(double hours) {
  double h = std::fmod(hours, 24.0);
  if (h < 0.0) h += 24.0;
  return h;
}

/// Closed right-ascension interval in hours, low <= high (no 24 h wrap).
struct RaInterval {
  double low_hr = 0.0;
  double high_hr = 24.0;
  bool contains(double ra_hr) const { return ra_hr >= low_hr && ra_hr <= high_hr; }
  double width_hr() const { return high_hr - low_hr; }
  double center_hr() const { return 0.5 * (low_hr + high_hr); }
};

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a base seed and up to three keys
/// (frame index, segment, purpose tag ...) by chained splitmix64 finalizers.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

inline Rng make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0) {
  return Rng(stream_seed(seed, a, b, c));
}

/// Uniform draw in (-pi, pi].
double uniform_phase(Rng& rng);

}  // namespace pulsepair

#endif  // PULSEPAIR_CORE_HPP
