#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "smcf/config.hpp"
#include "smcf/format.hpp"
#include "smcf/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stochastic mean curvature flow of periodic graphs: finite element experiments"};
  app.set_version_flag("--version", smcf::version_string());

  std::string config_path, preset, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  unsigned threads = 0;
  bool list = false, dry_run = false;

  auto* config_opt = app.add_option("--config", config_path, "Config document or manifest.json to run")
                         ->envname("SMCF_CONFIG");
  auto* preset_opt = app.add_option("--preset", preset, "Named preset (see --list-presets)")->envname("SMCF_PRESET");
  config_opt->excludes(preset_opt);
  app.add_option("--out", out_dir, "Output directory (default: the config's experiment.output)")
      ->envname("SMCF_OUT");
  app.add_option("--seed", seed, "Master seed override")->envname("SMCF_SEED");
  app.add_option("--threads", threads, "Worker threads; 0 uses all cores")->envname("SMCF_THREADS");
  app.add_option("--samples", samples, "Sample count override")->envname("SMCF_SAMPLES")->check(CLI::PositiveNumber);
  app.add_flag("--list-presets", list, "Print the preset names and exit");
  app.add_flag("--print-config", dry_run, "Print the resolved config and exit without running");

  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& name : smcf::preset_names()) std::cout << name << '\n';
    return 0;
  }
  if (config_path.empty() == preset.empty()) {
    std::cerr << "error: exactly one of --config or --preset is required\n";
    return 2;
  }

  smcf::ExperimentSpec spec;
  try {
    spec = preset.empty() ? smcf::load_spec_file(config_path) : smcf::parse_config(smcf::preset_text(preset));
    if (seed) spec.solver.seed = *seed;
    if (samples) {
      if (spec.kind == smcf::ExperimentKind::Trajectory) throw smcf::ConfigError(0, "--samples: a trajectory run has one sample");
      spec.samples = *samples;
    }
    if (!out_dir.empty()) spec.output = out_dir;
    spec.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  if (dry_run) {
    std::cout << smcf::serialize(spec);
    return 0;
  }

  try {
    const auto outcome = smcf::run_experiment(spec, spec.output, threads, std::cerr);
    for (const auto& f : outcome.files) std::cout << f.string() << '\n';
    std::cerr << "done in " << smcf::format_real(outcome.wall_seconds) << " s\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
