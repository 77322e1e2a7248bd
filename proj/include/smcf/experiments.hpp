#pragma once

#include <cstddef>
#include <ostream>
#include <vector>

#include "smcf/profiles.hpp"
#include "smcf/stats.hpp"
#include "smcf/stepper.hpp"

namespace smcf {

struct FunctionalSet {
  bool l2_squared = true;   // ||u^n||^2
  bool h1_squared = true;   // ||u^n_x||^2
};

/// Per-time ensemble means over the samples still alive at that time.
struct EnsembleStats {
  std::size_t num_samples = 0;
  std::vector<double> times;
  std::vector<MeanEstimate> l2_squared;
  std::vector<MeanEstimate> h1_squared;
  std::size_t blowup_count = 0;
};

/// M independent trajectories, sample s driven by stream (cfg.seed, s).
EnsembleStats run_ensemble(const SolverConfig& cfg, const InitialProfile& profile,
                           std::size_t num_samples, FunctionalSet functionals = {},
                           unsigned threads = 1);

/// tau_values ascending; orders[i] is the observed order between
/// tau_values[i] and tau_values[i + 1].
struct RateTable {
  double tau_ref = 0.0;
  std::vector<double> tau_values;
  std::vector<double> errors;
  std::vector<double> standard_errors;
  std::vector<double> orders;
  std::size_t num_samples = 0;
  std::size_t blowup_count = 0;
};

/// Strong error E[max_n ||u_ref(t_n) - u_tau(t_n)||] against a tau_ref
/// solution driven by the same Brownian path. Requires scalar noise.
RateTable convergence_study(const SolverConfig& base, const InitialProfile& profile, double tau_ref,
                            std::vector<double> tau_values, std::size_t num_samples,
                            unsigned threads = 1);

struct DeltaScalingTable {
  double delta_floor = 0.0;
  std::vector<double> deltas;
  /// E[sup_n ||u^delta(t_n) - u^floor(t_n)||^2]
  std::vector<MeanEstimate> gaps;
  /// log-log slope over the deltas strictly above the floor.
  double slope = 0.0;
  std::size_t num_samples = 0;
  std::size_t blowup_count = 0;
};

DeltaScalingTable delta_scaling_study(const SolverConfig& base, const InitialProfile& profile,
                                      std::vector<double> deltas, double delta_floor,
                                      std::size_t num_samples, unsigned threads = 1);

/// max_n E||u^n||^2 + 2 delta tau sum_n E||u^n_x||^2  versus  ||u^0||^2 + eps^2 T.
struct StabilityCheck {
  double lhs = 0.0;
  double lhs_se = 0.0;
  double rhs = 0.0;
  double initial_l2_squared = 0.0;
  std::size_t argmax_step = 0;
  std::size_t num_samples = 0;
  std::size_t blowup_count = 0;
};

StabilityCheck stability_study(const SolverConfig& cfg, const InitialProfile& profile,
                               std::size_t num_samples, unsigned threads = 1);

/// J(t_n) = E||u^n_x||^2 / 2.
struct EnergySeries {
  std::vector<double> times;
  std::vector<MeanEstimate> energy;
  std::size_t num_samples = 0;
  std::size_t blowup_count = 0;
};

EnergySeries energy_study(const SolverConfig& cfg, const InitialProfile& profile,
                          std::size_t num_samples, unsigned threads = 1);

enum class GrowthClass { Decay, Bounded, RapidGrowth };

inline constexpr double kDecayRatio = 0.5;
inline constexpr double kRapidGrowthRatio = 1e2;

/// Final-to-initial energy ratio < 0.5 is decay, > 1e2 or any blow-up is
/// rapid growth, anything else bounded.
GrowthClass classify_growth(double ratio, std::size_t blowup_count);
std::string to_string(GrowthClass growth);

struct ThresholdCase {
  InitialProfile profile;
  NoiseModel noise;
  double epsilon = 0.0;
  std::vector<double> times;
  /// ||u^n_x||^2 of sample 0, truncated at its blow-up.
  std::vector<double> single_sample;
  std::vector<MeanEstimate> mean_energy;
  double initial_energy = 0.0;
  MeanEstimate final_energy;
  double final_ratio = 0.0;
  std::size_t num_samples = 0;
  std::size_t blowup_count = 0;
  GrowthClass growth = GrowthClass::Bounded;
};

struct ThresholdReport {
  std::vector<ThresholdCase> cases;
};

/// One case per (profile, noise model, epsilon), in that nesting order.
ThresholdReport threshold_study(const SolverConfig& base, const std::vector<InitialProfile>& profiles,
                                const std::vector<NoiseModel>& noises,
                                const std::vector<double>& epsilons, std::size_t num_samples,
                                unsigned threads = 1);

// CSV writers. All reals use format_real.
void write_ensemble_csv(std::ostream& out, const EnsembleStats& stats);
void write_rate_table_csv(std::ostream& out, const RateTable& table);
void write_delta_scaling_csv(std::ostream& out, const DeltaScalingTable& table);
void write_stability_csv(std::ostream& out, const StabilityCheck& check);
void write_energy_csv(std::ostream& out, const EnergySeries& series);
void write_threshold_summary_csv(std::ostream& out, const ThresholdReport& report);
void write_threshold_series_csv(std::ostream& out, const ThresholdReport& report);
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
/// (t, x, u) rows at the DOF coordinates plus the periodic image x = 1.
void write_snapshot_csv(std::ostream& out, const FemSpace& space, const Trajectory& traj);

}  // namespace smcf
