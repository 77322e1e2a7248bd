#pragma once

#include <string>

#include "smcf/space.hpp"

namespace smcf {

/// Initial graphs used by the experiments.
///   Sine:      sin(pi x)
///   ZigZag:    piecewise linear, 0 at {0, 1/2, 1} and 2.5 at {1/4, 3/4}
///   FracPower: |1/2 - x|^kappa, kappa in (0, 1]
struct InitialProfile {
  enum class Kind { Sine, ZigZag, FracPower };

  Kind kind = Kind::Sine;
  double kappa = 0.1;

  static InitialProfile sine() { return {Kind::Sine, 0.1}; }
  static InitialProfile zigzag() { return {Kind::ZigZag, 0.1}; }
  static InitialProfile frac_power(double kappa) { return {Kind::FracPower, kappa}; }

  double operator()(double x) const;
  void validate() const;

  friend bool operator==(const InitialProfile&, const InitialProfile&) = default;
};

std::string to_string(InitialProfile::Kind kind);
InitialProfile::Kind parse_profile_kind(const std::string& name);

/// u_h^0 = L2 projection of the profile.
FeFunction initial_state(const SpacePtr& space, const InitialProfile& profile);

}  // namespace smcf
