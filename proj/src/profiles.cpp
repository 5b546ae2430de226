#include "fbl/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fbl/error.hpp"

namespace fbl {

const std::vector<std::string>& profile_names() {
  static const std::vector<std::string> names = {"sine", "two-mode", "gaussian-bump", "steep-tanh",
                                                 "random-smooth"};
  return names;
}

void ProfileSpec::validate() const {
  const auto& names = profile_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw ParameterError("initial.profile: unknown profile '" + name + "'");
  if (!std::isfinite(amplitude)) throw ParameterError("initial.amplitude: must be finite");
  if (!(width > 0.0)) throw ParameterError("initial.width: must be positive");
  if (!(steepness > 0.0)) throw ParameterError("initial.steepness: must be positive");
  if (modes < 1) throw ParameterError("initial.modes: must be at least 1");
}

GridFunction make_profile(const ProfileSpec& spec, const DomainSpec& domain) {
  spec.validate();
  const double length = domain.length();
  const double k = 2.0 * std::numbers::pi / length;
  const double a = spec.amplitude;
  UniformStream stream(spec.seed);

  if (spec.name == "sine") return GridFunction::sample(domain, [&](double x) { return a * std::sin(k * x); });
  if (spec.name == "two-mode") {
    const double phase = 2.0 * std::numbers::pi * stream.next();
    return GridFunction::sample(domain, [&](double x) {
      return a * (std::sin(k * x) + 0.5 * std::sin(2.0 * k * x + phase));
    });
  }
  if (spec.name == "gaussian-bump") {
    const double centre = length * stream.next();
    return GridFunction::sample(domain, [&](double x) {
      double d = std::fabs(x - centre);
      d = std::min(d, length - d);
      return a * std::exp(-(d / spec.width) * (d / spec.width));
    });
  }
  if (spec.name == "steep-tanh")
    return GridFunction::sample(domain, [&](double x) { return a * std::tanh(spec.steepness * std::sin(k * x)); });

  // random-smooth
  std::vector<double> coefficient(static_cast<std::size_t>(spec.modes));
  std::vector<double> phase(coefficient.size());
  for (std::size_t j = 0; j < coefficient.size(); ++j) {
    const double n = static_cast<double>(j + 1);
    coefficient[j] = (2.0 * stream.next() - 1.0) / (n * n);
    phase[j] = 2.0 * std::numbers::pi * stream.next();
  }
  GridFunction u = GridFunction::sample(domain, [&](double x) {
    double sum = 0.0;
    for (std::size_t j = 0; j < coefficient.size(); ++j)
      sum += coefficient[j] * std::sin(static_cast<double>(j + 1) * k * x + phase[j]);
    return sum;
  });
  const double peak = sup_norm(u);
  return peak > 0.0 ? u * (a / peak) : u;
}

}  // namespace fbl
