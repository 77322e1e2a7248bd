#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "smcf/projection.hpp"
#include "smcf/stepper.hpp"

using namespace smcf;
using std::numbers::pi;

namespace {

SolverConfig base_config(double epsilon, double delta = 1e-5, double tau = 1e-3, double T = 0.1) {
  SolverConfig cfg;
  cfg.epsilon = epsilon;
  cfg.delta = delta;
  cfg.tau = tau;
  cfg.final_time = T;
  cfg.num_intervals = 50;
  return cfg;
}

std::vector<double> random_state(std::size_t n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double total(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("SolverConfig validation") {
  auto cfg = base_config(1.0);
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.num_steps() == 100);
  CHECK(cfg.resolved_snapshot_stride() == 1);
  cfg.tau = 0.003;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = base_config(-1.0);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = base_config(1.0);
  cfg.newton_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = base_config(1.0);
  cfg.blowup_threshold = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK_FALSE(base_config(std::sqrt(2.0)).beyond_wellposed_range());
  CHECK(base_config(5.0).beyond_wellposed_range());
  CHECK(base_config(1.0, 1e-5, 1e-5, 0.1).resolved_snapshot_stride() == 39);
}

TEST_CASE("drift residual") {
  std::mt19937_64 rng(21);
  SUBCASE("definition") {
    const Scheme scheme(base_config(0.7));
    const auto u = random_state(50, rng, 0.3);
    auto rhs = scheme.mass().multiply(u);
    const auto ku = scheme.stiffness().multiply(u);
    const auto b = assemble_arctan_vector(*scheme.space(), u);
    const double tau = scheme.config().tau;
    for (std::size_t i = 0; i < 50; ++i)
      rhs[i] += tau * scheme.linear_coefficient() * ku[i] + tau * scheme.arctan_coefficient() * b[i];
    for (double r : scheme.residual(u, rhs)) CHECK(std::abs(r) < 1e-15);
  }
  SUBCASE("linear at epsilon = sqrt(2)") {
    const Scheme scheme(base_config(std::sqrt(2.0)));
    CHECK(scheme.arctan_coefficient() == doctest::Approx(0.0).scale(1.0));
    const auto rhs = random_state(50, rng, 0.05);
    auto a = scheme.mass();
    a.add_scaled(scheme.config().tau * (1e-5 + 1.0), scheme.stiffness());
    const auto u = PeriodicCholesky::factor(a)->solve(rhs);
    CHECK(norm(scheme.residual(u, rhs)) <= scheme.config().newton_tol);
  }
}

TEST_CASE("drift jacobian") {
  std::mt19937_64 rng(5);
  SUBCASE("zero state") {
    const Scheme scheme(base_config(0.4, 1e-3));
    auto expected = scheme.mass();
    expected.add_scaled(scheme.config().tau * (1.0 + 1e-3), scheme.stiffness());
    const auto j = scheme.jacobian(std::vector<double>(50, 0.0));
    for (std::size_t i = 0; i < 50; ++i)
      for (std::size_t k = 0; k < 50; ++k) CHECK(j.entry(i, k) == doctest::Approx(expected.entry(i, k)).epsilon(1e-13));
  }
  SUBCASE("matches central finite differences") {
    for (int r = 1; r <= 2; ++r)
      for (double eps : {0.0, 1.0, 5.0}) {
        auto cfg = base_config(eps, 1e-5, 1e-2);
        cfg.num_intervals = 20;
        cfg.degree = r;
        const Scheme scheme(cfg);
        const std::size_t n = scheme.space()->dof_count();
        const std::vector<double> zero(n, 0.0);
        for (int t = 0; t < 5; ++t) {
          const auto u = random_state(n, rng, 0.1);
          const auto d = random_state(n, rng, 1.0);
          const double hstep = 1e-6;
          std::vector<double> up(u), um(u);
          for (std::size_t i = 0; i < n; ++i) {
            up[i] += hstep * d[i];
            um[i] -= hstep * d[i];
          }
          const auto fp = scheme.residual(up, zero), fm = scheme.residual(um, zero);
          const auto jd = scheme.jacobian(u).multiply(d);
          std::vector<double> diff(n);
          for (std::size_t i = 0; i < n; ++i) diff[i] = (fp[i] - fm[i]) / (2 * hstep) - jd[i];
          CHECK(norm(diff) <= 1e-6 * norm(jd));
        }
      }
  }
  SUBCASE("symmetric positive definite for any epsilon") {
    for (double eps : {0.0, 1.0, std::sqrt(2.0), 5.0}) {
      const Scheme scheme(base_config(eps, 0.0, 0.1, 0.1));
      for (int t = 0; t < 10; ++t) {
        const auto j = scheme.jacobian(random_state(50, rng, 2.0));
        CHECK(j.is_symmetric(1e-12));
        CHECK(PeriodicCholesky::factor(j).has_value());
      }
    }
  }
}

TEST_CASE("step") {
  std::mt19937_64 rng(99);
  SUBCASE("constants are steady states without noise") {
    const Scheme scheme(base_config(0.0));
    const FeFunction c(scheme.space(), std::vector<double>(50, 0.75));
    const auto [next, report] = scheme.step(c, 0.0);
    for (double v : next.coeffs) CHECK(v == 0.75);
    CHECK_FALSE(report.blowup);
  }
  SUBCASE("L2 norm nonincreasing and mean conserved without noise") {
    const Scheme scheme(base_config(0.0, 0.0, 1e-3));
    auto u = l2_project(scheme.space(), [](double x) { return std::sin(pi * x); });
    for (int n = 0; n < 50; ++n) {
      const auto [next, report] = scheme.step(u, 0.0);
      CHECK(report.final_residual <= 1e-10);
      CHECK(scheme.l2_norm_squared(next.coeffs) <= scheme.l2_norm_squared(u.coeffs) + 1e-12);
      CHECK(std::abs(total(scheme.mass().multiply(next.coeffs)) - total(scheme.mass().multiply(u.coeffs))) <= 1e-10);
      u = next;
    }
  }
  SUBCASE("one Newton iteration at epsilon = sqrt(2)") {
    const Scheme scheme(base_config(std::sqrt(2.0)));
    const FeFunction u(scheme.space(), random_state(50, rng, 0.5));
    const auto [next, report] = scheme.step(u, 0.01);
    CHECK(report.newton_iterations == 1);
    auto a = scheme.mass();
    a.add_scaled(scheme.config().tau * scheme.linear_coefficient(), scheme.stiffness());
    const auto direct = PeriodicCholesky::factor(a)->solve(scheme.step_rhs(u.coeffs, 0.01));
    for (std::size_t i = 0; i < 50; ++i) CHECK(next.coeffs[i] == doctest::Approx(direct[i]).epsilon(1e-12));
  }
  SUBCASE("Newton converges on steep states for all epsilon") {
    for (double eps : {0.0, 0.1, 1.0, std::sqrt(2.0), 5.0})
      for (double tau : {1e-5, 1e-2}) {
        const Scheme scheme(base_config(eps, 1e-5, tau, 10 * tau));
        for (int t = 0; t < 5; ++t) {
          const FeFunction u(scheme.space(), random_state(50, rng, 3.0));
          const auto [next, report] = scheme.step(u, 0.3 * std::sqrt(tau));
          CHECK_FALSE(report.blowup);
          CHECK(report.final_residual <= 1e-10 * std::max(1.0, norm(scheme.step_rhs(u.coeffs, 0.3 * std::sqrt(tau)))));
        }
      }
  }
  SUBCASE("blow-up is flagged, not thrown") {
    auto cfg = base_config(1.0);
    cfg.blowup_threshold = 1.0;
    const Scheme scheme(cfg);
    const FeFunction u(scheme.space(), std::vector<double>(50, 5.0));
    const auto [next, report] = scheme.step(u, 0.0);
    CHECK(report.blowup);
  }
  SUBCASE("field increment with all-zero modes equals the noiseless step") {
    auto cfg = base_config(1.0);
    cfg.noise = NoiseModel::power_law(20, 0.6);
    const Scheme scheme(cfg);
    const FeFunction u(scheme.space(), random_state(50, rng, 0.2));
    FieldIncrement zero{std::vector<double>(20, 0.0), cfg.noise.amplitudes};
    const auto a = scheme.step(u, zero).first;
    const auto b = scheme.step(u, 0.0).first;
    for (std::size_t i = 0; i < 50; ++i) CHECK(a.coeffs[i] == b.coeffs[i]);
  }
  SUBCASE("tabulated and pointwise field loads agree") {
    auto cfg = base_config(1.0);
    cfg.noise = NoiseModel::power_law(20, 0.6);
    const Scheme scheme(cfg);
    const auto u = random_state(50, rng, 0.2);
    const auto inc = generate_field_increment(cfg.noise, {1, 2}, 3, cfg.tau);
    const auto tabulated = scheme.step_rhs(u, inc);
    auto pointwise = assemble_noise_vector(*scheme.space(), u, [&](double x) { return inc.evaluate(x); });
    const auto mu = scheme.mass().multiply(u);
    for (std::size_t i = 0; i < 50; ++i) CHECK(tabulated[i] == doctest::Approx(mu[i] + pointwise[i]).epsilon(1e-12));
  }
}

TEST_CASE("run_trajectory") {
  SUBCASE("small noise relaxes the sine profile toward a flat state") {
    const Scheme scheme(base_config(0.1, 1e-5, 1e-4, 0.1));
    const auto u0 = l2_project(scheme.space(), [](double x) { return std::sin(pi * x); });
    const auto traj = run_trajectory(scheme, u0, sample_noise(scheme, 0));
    REQUIRE(traj.times.size() == 1001);
    CHECK_FALSE(traj.blowup_step.has_value());
    const double e0 = traj.h1_seminorms.front() * traj.h1_seminorms.front();
    const double eN = traj.h1_seminorms.back() * traj.h1_seminorms.back();
    CHECK(eN < 1e-2 * e0);
    CHECK(traj.snapshots.size() == traj.snapshot_times.size());
    CHECK(traj.snapshot_times.back() == doctest::Approx(0.1));
  }
  SUBCASE("shared lengths and stride") {
    auto cfg = base_config(1.0, 1e-5, 1e-3, 0.02);
    cfg.snapshot_stride = 5;
    const Scheme scheme(cfg);
    const auto u0 = l2_project(scheme.space(), [](double x) { return std::sin(pi * x); });
    const auto traj = run_trajectory(scheme, u0, sample_noise(scheme, 4));
    CHECK(traj.times.size() == 21);
    CHECK(traj.l2_norms.size() == 21);
    CHECK(traj.h1_seminorms.size() == 21);
    CHECK(traj.reports.size() == 21);
    CHECK(traj.snapshots.size() == 5);
  }
  SUBCASE("mismatched path is rejected") {
    const Scheme scheme(base_config(1.0));
    const auto u0 = FeFunction(scheme.space());
    CHECK_THROWS_AS(integrate(scheme, u0, generate_scalar_path(1, 7, 1e-3)), std::invalid_argument);
  }
  SUBCASE("blow-up halts the run") {
    auto cfg = base_config(1.0, 0.0, 1e-2, 0.5);
    cfg.noise = NoiseModel::white();
    cfg.blowup_threshold = 1e3;
    const Scheme scheme(cfg);
    const auto u0 = l2_project(scheme.space(), [](double x) { return std::sin(pi * x); });
    const auto traj = run_trajectory(scheme, u0, sample_noise(scheme, 0));
    REQUIRE(traj.blowup_step.has_value());
    CHECK(traj.times.size() == *traj.blowup_step);
  }
}
