#include "pulsepair/core.hpp"

#include <array>

namespace pulsepair {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::array<std::string_view, 5> kPolarizationNames = {"none", "X", "Y", "L", "R"};

}  // namespace

std::string_view to_string(Element e) { return e == Element::kEast ? "EAST" : "WEST"; }

std::string_view to_string(Polarization p) {
  return kPolarizationNames[static_cast<std::size_t>(p)];
}

Polarization parse_polarization(std::string_view text) {
  for (std::size_t i = 0; i < kPolarizationNames.size(); ++i)
    if (kPolarizationNames[i] == text) return static_cast<Polarization>(i);
  throw ValidationError("unknown polarization tag '" + std::string(text) + "'");
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (c + 0x85157af5ULL));
  return h;
}

double uniform_phase(Rng& rng) {
  // (-pi, pi]: flip the half-open [0,1) draw.
  const double u = std::generate_canonical<double, 53>(rng);
  const double phase = std::numbers::pi - kTwoPi * u;
  return phase <= -std::numbers::pi ? std::numbers::pi : phase;
}

}  // namespace pulsepair
