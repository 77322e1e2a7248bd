#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "smcf/rng.hpp"

namespace smcf {

/// Realization of a scalar Wiener process on a uniform time grid, stored as
/// the cumulative values W(t_0) = 0, W(t_1), ..., W(t_N). Increments are
/// differences of consecutive cumulative values, so coarsening (subsampling
/// the cumulative values) keeps W bit-identical at shared grid points.
class ScalarPath {
 public:
  ScalarPath(double tau, std::vector<double> cumulative, StreamKey key);

  double tau() const { return tau_; }
  std::size_t num_steps() const { return cumulative_.size() - 1; }
  double final_time() const { return tau_ * static_cast<double>(num_steps()); }
  const StreamKey& key() const { return key_; }

  /// W(t_k).
  double cumulative(std::size_t k) const { return cumulative_[k]; }
  std::span<const double> cumulative_values() const { return cumulative_; }
  /// W(t_{k+1}) - W(t_k).
  double increment(std::size_t k) const { return cumulative_[k + 1] - cumulative_[k]; }
  std::vector<double> increments() const;

 private:
  double tau_;
  std::vector<double> cumulative_;
  StreamKey key_;
};

/// Increments are sqrt(tau) * standard_normal(key, n, 0).
ScalarPath generate_scalar_path(const StreamKey& key, std::size_t num_fine_steps, double tau_fine);
ScalarPath generate_scalar_path(std::uint64_t seed, std::size_t num_fine_steps, double tau_fine);

/// Path on the grid of step factor * tau; throws std::invalid_argument unless
/// factor >= 1 divides num_steps().
ScalarPath coarsen(const ScalarPath& path, std::size_t factor);

/// CSV dump: a `# seed=..,sample=..,tau=..,count=..` header, then
/// `step,increment,cumulative` rows.
void write_path_csv(std::ostream& out, const ScalarPath& path);
ScalarPath read_path_csv(std::istream& in);

/// Driving noise. Scalar is a single real Wiener process; QWiener and White
/// are W = sum_j q_j^{1/2} beta_j e_j with e_j = sqrt(2) sin(j pi x).
/// White has q_j = 1; num_modes == 0 there means "one mode per DOF".
struct NoiseModel {
  enum class Kind { Scalar, QWiener, White };

  Kind kind = Kind::Scalar;
  std::size_t num_modes = 0;
  std::vector<double> amplitudes;  // q_j^{1/2}, j = 1..num_modes
  double decay = 0.0;              // amplitudes = j^{-decay} when built by power_law

  static NoiseModel scalar();
  static NoiseModel power_law(std::size_t num_modes, double decay);
  static NoiseModel q_wiener(std::vector<double> amplitudes);
  static NoiseModel white(std::size_t num_modes = 0);

  bool is_field() const { return kind != Kind::Scalar; }
  /// Copy with White's mode count resolved against dof_count.
  NoiseModel resolved(std::size_t dof_count) const;
  void validate() const;

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

std::string to_string(NoiseModel::Kind kind);
NoiseModel::Kind parse_noise_kind(const std::string& name);

/// sin(pi t), exactly zero at integer t.
double sin_pi(double t);

/// One time step of a Q-Wiener field: mode increments d(beta_j) ~ N(0, tau).
struct FieldIncrement {
  std::vector<double> mode_increments;
  std::vector<double> amplitudes;

  /// sum_j q_j^{1/2} d(beta_j) sqrt(2) sin(j pi x)
  double evaluate(double x) const;
};

/// Mode j of step `step` uses standard_normal(key, step, j).
FieldIncrement generate_field_increment(const NoiseModel& model, const StreamKey& key,
                                        std::uint64_t step, double tau);

}  // namespace smcf
