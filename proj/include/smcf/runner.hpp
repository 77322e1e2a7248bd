#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "smcf/config.hpp"

namespace smcf {

std::string version_string();

struct RunOutcome {
  std::vector<std::filesystem::path> files;
  double wall_seconds = 0.0;
};

/// Runs the experiment and writes its CSVs, config.ini (the canonical spec)
/// and manifest.json into out_dir. threads only affects speed.
RunOutcome run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir, unsigned threads,
                          std::ostream& log);

/// A config document, or a manifest.json written by run_experiment.
ExperimentSpec load_spec_file(const std::filesystem::path& path);

}  // namespace smcf
