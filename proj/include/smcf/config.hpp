#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "smcf/profiles.hpp"
#include "smcf/stepper.hpp"

namespace smcf {

enum class ExperimentKind { Trajectory, Ensemble, RateTable, DeltaScaling, Threshold, Energy, Stability };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

/// A fully specified experiment. Which study fields are meaningful depends
/// on the kind; the rest keep their defaults.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Trajectory;
  /// Carries the noise model and the master seed. For rate-table runs
  /// solver.tau holds tau_ref; for delta-scaling solver.delta holds the floor.
  SolverConfig solver;
  InitialProfile profile;
  std::size_t samples = 1;
  std::string output = "out";

  std::vector<double> tau_values;      // rate-table
  std::vector<double> delta_values;    // delta-scaling
  std::vector<double> epsilon_values;  // threshold

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

/// Parse or validation failure; line is 0 when it refers to the whole
/// document.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// INI-style document:
///
///   # comment
///   [section]
///   key = value
///
/// Sections: experiment, solver, noise, profile, study. Reals accept
/// sqrt(x); lists are comma separated. Unknown sections or keys, keys the
/// chosen kind does not use, and duplicates are errors.
ExperimentSpec parse_config(const std::string& text);

/// Canonical document; parse_config(serialize(s)) == s.
std::string serialize(const ExperimentSpec& spec);

std::vector<std::string> preset_names();
/// Config text of a named preset; throws ConfigError for unknown names.
std::string preset_text(const std::string& name);

}  // namespace smcf
