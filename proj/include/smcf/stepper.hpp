#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "smcf/assembly.hpp"
#include "smcf/noise.hpp"

namespace smcf {

struct SolverConfig {
  double delta = 0.0;
  double epsilon = 0.0;
  double tau = 0.0;
  double final_time = 0.0;
  std::size_t num_intervals = 50;
  int degree = 1;
  NoiseModel noise = NoiseModel::scalar();
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  double blowup_threshold = 1e12;
  std::uint64_t seed = 0;
  /// Steps between stored snapshots; 0 selects max(1, N / 256).
  std::size_t snapshot_stride = 0;

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
  std::size_t num_steps() const;
  std::size_t resolved_snapshot_stride() const;
  /// epsilon > sqrt(2 (1 + delta)): outside the range covered by the
  /// existence and stability theory.
  bool beyond_wellposed_range() const;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct StepReport {
  int newton_iterations = 0;
  double final_residual = 0.0;
  bool blowup = false;
};

class NewtonFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Backward Euler in the drift, explicit Euler-Maruyama in the noise:
///
///   (u^{n+1}, v) + tau (delta + eps^2/2) (u^{n+1}_x, v_x)
///     + tau (1 - eps^2/2) (arctan(u^{n+1}_x), v_x)
///   = (u^n, v) + eps (sqrt(1 + |u^n_x|^2) dW, v)
///
/// for all v in the periodic space. The nonlinear system is solved by
/// Newton's method with a backtracking safeguard on the residual norm.
class Scheme {
 public:
  explicit Scheme(SolverConfig config);
  Scheme(SolverConfig config, SpacePtr space);

  const SolverConfig& config() const { return config_; }
  const SpacePtr& space() const { return space_; }
  const PeriodicBandedMatrix& mass() const { return mass_; }
  const PeriodicBandedMatrix& stiffness() const { return stiffness_; }
  /// Noise model with the White mode count resolved.
  const NoiseModel& noise() const { return noise_; }

  double linear_coefficient() const { return config_.delta + 0.5 * config_.epsilon * config_.epsilon; }
  double arctan_coefficient() const { return 1.0 - 0.5 * config_.epsilon * config_.epsilon; }

  /// M u + tau c_lin K u + tau c_atan b(u) - rhs.
  std::vector<double> residual(std::span<const double> u, std::span<const double> rhs) const;
  /// M + tau c_lin K + tau c_atan K_w(u).
  PeriodicBandedMatrix jacobian(std::span<const double> u) const;

  /// M u^n + eps g(u^n) dW.
  std::vector<double> step_rhs(std::span<const double> u_n, double dW) const;
  /// M u^n + eps (sqrt(1 + |u^n_x|^2) dW(x), phi_i).
  std::vector<double> step_rhs(std::span<const double> u_n, const FieldIncrement& dW) const;

  /// Newton iteration for residual(u, rhs) = 0 starting from u (overwritten).
  StepReport solve(std::vector<double>& u, std::span<const double> rhs) const;

  std::pair<FeFunction, StepReport> step(const FeFunction& u_n, double dW) const;
  std::pair<FeFunction, StepReport> step(const FeFunction& u_n, const FieldIncrement& dW) const;

  double l2_norm_squared(std::span<const double> u) const { return quadratic_form(mass_, u); }
  double h1_seminorm_squared(std::span<const double> u) const { return quadratic_form(stiffness_, u); }

 private:
  SolverConfig config_;
  SpacePtr space_;
  NoiseModel noise_;
  PeriodicBandedMatrix mass_;
  PeriodicBandedMatrix stiffness_;
  PeriodicBandedMatrix linear_part_;   // M + tau c_lin K
  std::vector<double> mode_table_;     // sqrt(2) sin(j pi x_q), [j * points + q]
};

/// Per-step draws of a Q-Wiener or white field from one stream.
struct FieldStream {
  NoiseModel model;
  StreamKey key;
};

struct NoNoise {};

using NoiseInput = std::variant<NoNoise, ScalarPath, FieldStream>;

struct Trajectory {
  std::vector<double> times;
  std::vector<double> l2_norms;
  std::vector<double> h1_seminorms;
  /// reports[n] describes the solve that produced state n; reports[0] is empty.
  std::vector<StepReport> reports;
  std::vector<double> snapshot_times;
  std::vector<std::vector<double>> snapshots;
  std::optional<std::size_t> blowup_step;
  FeFunction final_state;
};

/// Called with (n, u^n, report) for n = 0 .. N (or up to the blow-up step).
using StepObserver = std::function<void(std::size_t, const FeFunction&, const StepReport&)>;

struct IntegrationResult {
  FeFunction final_state;
  std::size_t steps_taken = 0;
  std::optional<std::size_t> blowup_step;
};

/// Runs N = T / tau steps; stops at the first blow-up.
IntegrationResult integrate(const Scheme& scheme, const FeFunction& u0, const NoiseInput& noise,
                            const StepObserver& observer = {});

/// integrate() recording norms every step and snapshots every stride steps.
Trajectory run_trajectory(const Scheme& scheme, const FeFunction& u0, const NoiseInput& noise);

/// Default noise for one sample of `scheme`'s configuration: a scalar path on
/// the scheme's own grid or a field stream, keyed by (config.seed, sample).
NoiseInput sample_noise(const Scheme& scheme, std::uint64_t sample_index);

}  // namespace smcf
