#include "smcf/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <string>

namespace smcf {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

bool exceeds(std::span<const double> v, double threshold) {
  for (double x : v)
    if (!std::isfinite(x) || std::abs(x) > threshold) return true;
  return false;
}

}  // namespace

void SolverConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("SolverConfig: " + what); };
  if (!(delta >= 0.0) || !std::isfinite(delta)) fail("delta must be finite and >= 0");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) fail("epsilon must be finite and >= 0");
  if (!(tau > 0.0) || !std::isfinite(tau)) fail("tau must be > 0");
  if (!(final_time > 0.0) || !std::isfinite(final_time)) fail("final_time must be > 0");
  const double steps = final_time / tau;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
    fail("final_time / tau must be an integer");
  if (num_intervals < 2) fail("num_intervals must be >= 2");
  if (degree < 1 || degree > FemSpace::kMaxDegree) fail("degree must be in [1, 4]");
  if (!(newton_tol > 0.0)) fail("newton_tol must be > 0");
  if (newton_max_iter < 1) fail("newton_max_iter must be >= 1");
  if (!(blowup_threshold > 0.0)) fail("blowup_threshold must be > 0");
  noise.validate();
}

std::size_t SolverConfig::num_steps() const {
  return static_cast<std::size_t>(std::llround(final_time / tau));
}

std::size_t SolverConfig::resolved_snapshot_stride() const {
  if (snapshot_stride > 0) return snapshot_stride;
  return std::max<std::size_t>(1, num_steps() / 256);
}

bool SolverConfig::beyond_wellposed_range() const {
  return epsilon > std::sqrt(2.0 * (1.0 + delta));
}

Scheme::Scheme(SolverConfig config) : Scheme(config, build_space(config.num_intervals, config.degree)) {}

Scheme::Scheme(SolverConfig config, SpacePtr space)
    : config_(std::move(config)), space_(std::move(space)) {
  config_.validate();
  if (space_->num_elements() != config_.num_intervals || space_->degree() != config_.degree)
    throw std::invalid_argument("Scheme: space does not match num_intervals/degree");
  noise_ = config_.noise.resolved(space_->dof_count());
  mass_ = assemble_mass(*space_);
  stiffness_ = assemble_stiffness(*space_);
  linear_part_ = mass_;
  linear_part_.add_scaled(config_.tau * linear_coefficient(), stiffness_);

  if (noise_.is_field()) {
    const auto points = nonlinear_quadrature_points(*space_);
    mode_table_.resize(noise_.num_modes * points.size());
    for (std::size_t j = 0; j < noise_.num_modes; ++j)
      for (std::size_t q = 0; q < points.size(); ++q)
        mode_table_[j * points.size() + q] =
            std::numbers::sqrt2 * sin_pi(static_cast<double>(j + 1) * points[q]);
  }
}

std::vector<double> Scheme::residual(std::span<const double> u, std::span<const double> rhs) const {
  auto r = linear_part_.multiply(u);
  const double c = config_.tau * arctan_coefficient();
  if (c != 0.0) {
    const auto b = assemble_arctan_vector(*space_, u);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += c * b[i];
  }
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= rhs[i];
  return r;
}

PeriodicBandedMatrix Scheme::jacobian(std::span<const double> u) const {
  PeriodicBandedMatrix j = linear_part_;
  const double c = config_.tau * arctan_coefficient();
  if (c != 0.0) j.add_scaled(c, assemble_arctan_jacobian(*space_, u));
  return j;
}

std::vector<double> Scheme::step_rhs(std::span<const double> u_n, double dW) const {
  auto rhs = mass_.multiply(u_n);
  const double c = config_.epsilon * dW;
  if (c != 0.0) {
    const auto g = assemble_noise_vector(*space_, u_n);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += c * g[i];
  }
  return rhs;
}

std::vector<double> Scheme::step_rhs(std::span<const double> u_n, const FieldIncrement& dW) const {
  auto rhs = mass_.multiply(u_n);
  if (config_.epsilon == 0.0) return rhs;
  std::vector<double> field;
  if (!mode_table_.empty() && dW.mode_increments.size() == noise_.num_modes) {
    const std::size_t np = mode_table_.size() / noise_.num_modes;
    field.assign(np, 0.0);
    for (std::size_t j = 0; j < noise_.num_modes; ++j) {
      const double a = dW.amplitudes[j] * dW.mode_increments[j];
      if (a == 0.0) continue;
      const double* row = &mode_table_[j * np];
      for (std::size_t q = 0; q < np; ++q) field[q] += a * row[q];
    }
  } else {
    field = nonlinear_quadrature_points(*space_);
    for (double& x : field) x = dW.evaluate(x);
  }
  const auto g = assemble_noise_vector_sampled(*space_, u_n, field);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += config_.epsilon * g[i];
  return rhs;
}

StepReport Scheme::solve(std::vector<double>& u, std::span<const double> rhs) const {
  StepReport report;
  const double tol = config_.newton_tol * std::max(1.0, norm2(rhs));
  auto r = residual(u, rhs);
  double rnorm = norm2(r);
  std::vector<double> trial(u.size());
  for (int it = 0;; ++it) {
    report.newton_iterations = it;
    report.final_residual = rnorm;
    if (!std::isfinite(rnorm) || exceeds(u, config_.blowup_threshold)) {
      report.blowup = true;
      return report;
    }
    if (rnorm <= tol) return report;
    if (it == config_.newton_max_iter)
      throw NewtonFailure("Newton did not converge in " + std::to_string(it) +
                          " iterations (residual " + std::to_string(rnorm) + ")");
    auto factor = PeriodicCholesky::factor(jacobian(u));
    if (!factor) throw NewtonFailure("Newton: Jacobian is not positive definite");
    const auto d = factor->solve(r);
    // Newton directions always descend on |F|^2; halve until it decreases.
    double lambda = 1.0;
    std::vector<double> r_trial;
    double trial_norm = 0.0;
    for (int k = 0; k < 40; ++k) {
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] - lambda * d[i];
      r_trial = residual(trial, rhs);
      trial_norm = norm2(r_trial);
      if (trial_norm <= (1.0 - 1e-4 * lambda) * rnorm || !std::isfinite(trial_norm)) break;
      lambda *= 0.5;
    }
    u.swap(trial);
    r.swap(r_trial);
    rnorm = trial_norm;
  }
}

std::pair<FeFunction, StepReport> Scheme::step(const FeFunction& u_n, double dW) const {
  const auto rhs = step_rhs(u_n.coeffs, dW);
  FeFunction next = u_n;
  const auto report = solve(next.coeffs, rhs);
  return {std::move(next), report};
}

std::pair<FeFunction, StepReport> Scheme::step(const FeFunction& u_n, const FieldIncrement& dW) const {
  const auto rhs = step_rhs(u_n.coeffs, dW);
  FeFunction next = u_n;
  const auto report = solve(next.coeffs, rhs);
  return {std::move(next), report};
}

IntegrationResult integrate(const Scheme& scheme, const FeFunction& u0, const NoiseInput& noise,
                            const StepObserver& observer) {
  const auto& cfg = scheme.config();
  const std::size_t steps = cfg.num_steps();
  if (u0.space.get() != scheme.space().get() && u0.coeffs.size() != scheme.space()->dof_count())
    throw std::invalid_argument("integrate: initial state does not belong to the scheme's space");
  if (const auto* path = std::get_if<ScalarPath>(&noise)) {
    if (path->num_steps() != steps)
      throw std::invalid_argument("integrate: path has " + std::to_string(path->num_steps()) +
                                  " increments, expected " + std::to_string(steps));
    if (std::abs(path->tau() - cfg.tau) > 1e-9 * cfg.tau)
      throw std::invalid_argument("integrate: path time step does not match tau");
  }

  IntegrationResult result;
  result.final_state = u0;
  FeFunction& u = result.final_state;
  if (observer) observer(0, u, StepReport{});
  for (std::size_t n = 0; n < steps; ++n) {
    std::vector<double> rhs;
    if (const auto* path = std::get_if<ScalarPath>(&noise)) {
      rhs = scheme.step_rhs(u.coeffs, path->increment(n));
    } else if (const auto* stream = std::get_if<FieldStream>(&noise)) {
      rhs = scheme.step_rhs(u.coeffs, generate_field_increment(stream->model, stream->key, n, cfg.tau));
    } else {
      rhs = scheme.step_rhs(u.coeffs, 0.0);
    }
    const auto report = scheme.solve(u.coeffs, rhs);
    result.steps_taken = n + 1;
    if (report.blowup) {
      result.blowup_step = n + 1;
      if (observer) observer(n + 1, u, report);
      break;
    }
    if (observer) observer(n + 1, u, report);
  }
  return result;
}

Trajectory run_trajectory(const Scheme& scheme, const FeFunction& u0, const NoiseInput& noise) {
  Trajectory traj;
  const std::size_t stride = scheme.config().resolved_snapshot_stride();
  const double tau = scheme.config().tau;
  auto result = integrate(scheme, u0, noise, [&](std::size_t n, const FeFunction& u, const StepReport& rep) {
    if (rep.blowup) return;
    traj.times.push_back(static_cast<double>(n) * tau);
    traj.l2_norms.push_back(std::sqrt(std::max(0.0, scheme.l2_norm_squared(u.coeffs))));
    traj.h1_seminorms.push_back(std::sqrt(std::max(0.0, scheme.h1_seminorm_squared(u.coeffs))));
    traj.reports.push_back(rep);
    if (n % stride == 0 || n == scheme.config().num_steps()) {
      traj.snapshot_times.push_back(static_cast<double>(n) * tau);
      traj.snapshots.push_back(u.coeffs);
    }
  });
  traj.blowup_step = result.blowup_step;
  traj.final_state = std::move(result.final_state);
  return traj;
}

NoiseInput sample_noise(const Scheme& scheme, std::uint64_t sample_index) {
  const auto& cfg = scheme.config();
  const StreamKey key{cfg.seed, sample_index};
  if (scheme.noise().is_field()) return FieldStream{scheme.noise(), key};
  return generate_scalar_path(key, cfg.num_steps(), cfg.tau);
}

}  // namespace smcf
