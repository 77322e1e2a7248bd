#include "smcf/runner.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "smcf/experiments.hpp"
#include "smcf/format.hpp"
#include "smcf/parallel.hpp"

#ifndef SMCF_VERSION
#define SMCF_VERSION "unknown"
#endif

namespace smcf {

namespace fs = std::filesystem;

namespace {

class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  template <typename Writer>
  void write(const std::string& name, Writer&& writer) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    writer(out);
    if (!out) throw std::runtime_error("failed writing " + path.string());
    files_.push_back(path);
  }

  const std::vector<fs::path>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
};

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json spec_json(const ExperimentSpec& spec) {
  const auto& s = spec.solver;
  nlohmann::json j;
  j["kind"] = to_string(spec.kind);
  j["samples"] = spec.samples;
  j["seed"] = s.seed;
  j["solver"] = {{"epsilon", s.epsilon},       {"delta", s.delta},
                 {"tau", s.tau},               {"final_time", s.final_time},
                 {"num_intervals", s.num_intervals}, {"degree", s.degree},
                 {"newton_tol", s.newton_tol}, {"newton_max_iter", s.newton_max_iter},
                 {"blowup_threshold", s.blowup_threshold}, {"snapshot_stride", s.snapshot_stride}};
  j["noise"] = {{"kind", to_string(s.noise.kind)},
                {"num_modes", s.noise.num_modes},
                {"decay", s.noise.decay},
                {"amplitudes", s.noise.amplitudes}};
  j["profile"] = {{"kind", to_string(spec.profile.kind)}, {"kappa", spec.profile.kappa}};
  if (!spec.tau_values.empty()) j["tau_values"] = spec.tau_values;
  if (!spec.delta_values.empty()) j["delta_values"] = spec.delta_values;
  if (!spec.epsilon_values.empty()) j["epsilon_values"] = spec.epsilon_values;
  return j;
}

}  // namespace

std::string version_string() { return SMCF_VERSION; }

RunOutcome run_experiment(const ExperimentSpec& spec, const fs::path& out_dir, unsigned threads, std::ostream& log) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::string started_at = utc_timestamp();
  OutputSet out(out_dir);
  const auto& cfg = spec.solver;
  const std::size_t M = spec.samples;
  nlohmann::json summary = nlohmann::json::object();

  if (spec.kind == ExperimentKind::Threshold) {
    for (double e : spec.epsilon_values) {
      SolverConfig c = cfg;
      c.epsilon = e;
      if (c.beyond_wellposed_range())
        log << "warning: epsilon = " << format_real(e) << " exceeds sqrt(2 (1 + delta)); no stability guarantee\n";
    }
  } else if (cfg.beyond_wellposed_range()) {
    log << "warning: epsilon = " << format_real(cfg.epsilon)
        << " exceeds sqrt(2 (1 + delta)); no stability guarantee\n";
  }

  switch (spec.kind) {
    case ExperimentKind::Trajectory: {
      const Scheme scheme(cfg);
      const auto u0 = initial_state(scheme.space(), spec.profile);
      const auto traj = run_trajectory(scheme, u0, sample_noise(scheme, 0));
      out.write("trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(o, traj); });
      out.write("snapshots.csv", [&](std::ostream& o) { write_snapshot_csv(o, *scheme.space(), traj); });
      summary["blowup_step"] = traj.blowup_step ? nlohmann::json(*traj.blowup_step) : nlohmann::json(nullptr);
      break;
    }
    case ExperimentKind::Ensemble: {
      const auto stats = run_ensemble(cfg, spec.profile, M, {}, threads);
      out.write("ensemble.csv", [&](std::ostream& o) { write_ensemble_csv(o, stats); });
      summary["blowups"] = stats.blowup_count;
      break;
    }
    case ExperimentKind::RateTable: {
      const auto table = convergence_study(cfg, spec.profile, cfg.tau, spec.tau_values, M, threads);
      out.write("rate_table.csv", [&](std::ostream& o) { write_rate_table_csv(o, table); });
      summary["blowups"] = table.blowup_count;
      break;
    }
    case ExperimentKind::DeltaScaling: {
      const auto table = delta_scaling_study(cfg, spec.profile, spec.delta_values, cfg.delta, M, threads);
      out.write("delta_scaling.csv", [&](std::ostream& o) { write_delta_scaling_csv(o, table); });
      summary["blowups"] = table.blowup_count;
      break;
    }
    case ExperimentKind::Threshold: {
      const auto report =
          threshold_study(cfg, {spec.profile}, {cfg.noise}, spec.epsilon_values, M, threads);
      out.write("threshold_summary.csv", [&](std::ostream& o) { write_threshold_summary_csv(o, report); });
      out.write("threshold_series.csv", [&](std::ostream& o) { write_threshold_series_csv(o, report); });
      for (const auto& c : report.cases) summary["classification"].push_back(to_string(c.growth));
      break;
    }
    case ExperimentKind::Energy: {
      const auto series = energy_study(cfg, spec.profile, M, threads);
      out.write("energy.csv", [&](std::ostream& o) { write_energy_csv(o, series); });
      summary["blowups"] = series.blowup_count;
      break;
    }
    case ExperimentKind::Stability: {
      const auto check = stability_study(cfg, spec.profile, M, threads);
      out.write("stability.csv", [&](std::ostream& o) { write_stability_csv(o, check); });
      summary["blowups"] = check.blowup_count;
      break;
    }
  }

  const std::string config = serialize(spec);
  out.write("config.ini", [&](std::ostream& o) { o << config; });

  RunOutcome outcome;
  outcome.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::json manifest;
  manifest["version"] = version_string();
  manifest["started_at"] = started_at;
  manifest["wall_time_seconds"] = outcome.wall_seconds;
  manifest["threads"] = resolve_threads(threads);
  manifest["seed"] = cfg.seed;
  manifest["config"] = config;
  manifest["spec"] = spec_json(spec);
  manifest["summary"] = summary;
  for (const auto& f : out.files()) manifest["outputs"].push_back(f.filename().string());
  out.write("manifest.json", [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });

  outcome.files = out.files();
  return outcome;
}

ExperimentSpec load_spec_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.extension() == ".json") {
    nlohmann::json manifest;
    try {
      manifest = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(0, path.string() + ": " + e.what());
    }
    if (!manifest.contains("config") || !manifest["config"].is_string())
      throw ConfigError(0, path.string() + ": manifest has no 'config' document");
    return parse_config(manifest["config"].get<std::string>());
  }
  return parse_config(buf.str());
}

}  // namespace smcf
