#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fbl/spectral.hpp"

namespace fbl {

/// Named initial-data family.
///
///   sine           A sin(2 pi x / L)
///   two-mode       A (sin(k x) + 0.5 sin(2 k x + phase)), k = 2 pi / L, phase from the seed
///   gaussian-bump  A exp(-(d / width)^2), d the periodic distance to a centre drawn from the seed
///   steep-tanh     A tanh(steepness sin(k x))
///   random-smooth  A-normalized sum of c_j j^-2 sin(j k x + phi_j), j = 1..modes, seeded
struct ProfileSpec {
  std::string name = "sine";
  double amplitude = 1.0;
  std::uint64_t seed = 0;
  double width = 0.3;
  double steepness = 20.0;
  int modes = 8;

  /// ParameterError naming the offending field.
  void validate() const;
};

const std::vector<std::string>& profile_names();

GridFunction make_profile(const ProfileSpec& spec, const DomainSpec& domain);

/// Uniform doubles in [0, 1) from std::mt19937_64.  The engine sequence is
/// fixed by the standard; the top 53 bits are used directly because the
/// standard distributions differ between library implementations.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fbl
