#include "smcf/profiles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "smcf/projection.hpp"

namespace smcf {

double InitialProfile::operator()(double x) const {
  switch (kind) {
    case Kind::Sine:
      return std::sin(std::numbers::pi * x);
    case Kind::ZigZag:
      if (x <= 0.25) return 10.0 * x;
      if (x <= 0.5) return 5.0 - 10.0 * x;
      if (x <= 0.75) return 10.0 * x - 5.0;
      return 10.0 - 10.0 * x;
    case Kind::FracPower:
      return std::pow(std::abs(0.5 - x), kappa);
  }
  return 0.0;
}

void InitialProfile::validate() const {
  if (kind == Kind::FracPower && !(kappa > 0.0 && kappa <= 1.0))
    throw std::invalid_argument("InitialProfile: kappa must lie in (0, 1]");
}

std::string to_string(InitialProfile::Kind kind) {
  switch (kind) {
    case InitialProfile::Kind::Sine: return "sine";
    case InitialProfile::Kind::ZigZag: return "zigzag";
    case InitialProfile::Kind::FracPower: return "fracpower";
  }
  return "unknown";
}

InitialProfile::Kind parse_profile_kind(const std::string& name) {
  if (name == "sine") return InitialProfile::Kind::Sine;
  if (name == "zigzag") return InitialProfile::Kind::ZigZag;
  if (name == "fracpower") return InitialProfile::Kind::FracPower;
  throw std::invalid_argument("unknown profile '" + name + "' (expected sine, zigzag or fracpower)");
}

FeFunction initial_state(const SpacePtr& space, const InitialProfile& profile) {
  profile.validate();
  return l2_project(space, [&](double x) { return profile(x); });
}

}  // namespace smcf
