#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "smcf/assembly.hpp"
#include "smcf/projection.hpp"
#include "smcf/stats.hpp"

using namespace smcf;
using std::numbers::pi;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Dense Gaussian elimination with partial pivoting; independent of the
// banded factorization it checks.
std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[p * n + k])) p = i;
    for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
    std::swap(b[k], b[p]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / a[k * n + k];
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
    x[i] = s / a[i * n + i];
  }
  return x;
}

}  // namespace

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  for (int n = 1; n <= 8; ++n) {
    const auto rule = gauss_legendre(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * std::pow(rule.points[q], p);
      CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-14));
    }
  }
}

TEST_CASE("build_space") {
  SUBCASE("50 elements, linear") {
    const auto s = build_space(50, 1);
    CHECK(s->h() == doctest::Approx(0.02));
    CHECK(s->dof_count() == 50);
  }
  SUBCASE("smallest legal mesh") {
    const auto s = build_space(2, 1);
    CHECK(s->h() == 0.5);
    CHECK(s->dof_count() == 2);
  }
  SUBCASE("quadratic") { CHECK(build_space(10, 2)->dof_count() == 20); }
  SUBCASE("rejects bad input") {
    CHECK_THROWS_AS(build_space(1, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_space(10, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_space(10, 9), std::invalid_argument);
  }
  SUBCASE("mesh invariants and dof coverage") {
    for (int r = 1; r <= 2; ++r) {
      const auto s = build_space(7, r);
      const auto& nodes = s->mesh().nodes;
      CHECK(nodes.front() == 0.0);
      CHECK(nodes.back() == 1.0);
      for (std::size_t j = 1; j < nodes.size(); ++j) {
        CHECK(nodes[j] > nodes[j - 1]);
        CHECK(std::abs((nodes[j] - nodes[j - 1]) - s->h()) <= 1e-14 * s->h() * 10);
      }
      std::vector<int> seen(s->dof_count(), 0);
      for (std::size_t e = 0; e < s->num_elements(); ++e)
        for (std::size_t a = 0; a < s->local_dofs(); ++a) ++seen[s->dof(e, a)];
      for (int c : seen) CHECK(c >= 1);
      CHECK(s->dof(s->num_elements() - 1, s->local_dofs() - 1) == 0);
    }
  }
}

TEST_CASE("mass and stiffness for linear elements match closed form") {
  const std::size_t n = 50;
  const auto s = build_space(n, 1);
  const double h = s->h();
  const auto m = assemble_mass(*s);
  const auto k = assemble_stiffness(*s);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t left = (i + n - 1) % n, right = (i + 1) % n;
    CHECK(m.entry(i, i) == doctest::Approx(2.0 * h / 3.0).epsilon(1e-13));
    CHECK(m.entry(i, left) == doctest::Approx(h / 6.0).epsilon(1e-13));
    CHECK(m.entry(i, right) == doctest::Approx(h / 6.0).epsilon(1e-13));
    CHECK(k.entry(i, i) == doctest::Approx(2.0 / h).epsilon(1e-13));
    CHECK(k.entry(i, left) == doctest::Approx(-1.0 / h).epsilon(1e-13));
    CHECK(k.entry(i, right) == doctest::Approx(-1.0 / h).epsilon(1e-13));
  }
  CHECK(m.is_symmetric(1e-15));
  CHECK(k.is_symmetric(1e-12));
}

TEST_CASE("mass and stiffness structural properties") {
  std::mt19937_64 rng(7);
  for (int r = 1; r <= 2; ++r)
    for (std::size_t n : {2u, 3u, 16u}) {
      CAPTURE(r);
      CAPTURE(n);
      const auto s = build_space(n, r);
      const auto m = assemble_mass(*s);
      const auto k = assemble_stiffness(*s);
      const auto dense = m.to_dense();
      double total = 0.0;
      for (double v : dense) total += v;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-13));

      const std::vector<double> ones(s->dof_count(), 1.0);
      for (double v : k.multiply(ones)) CHECK(std::abs(v) < 1e-10);
      CHECK(PeriodicCholesky::factor(m).has_value());
      for (int t = 0; t < 20; ++t) {
        const auto x = random_vector(s->dof_count(), rng);
        CHECK(quadratic_form(k, x) >= -1e-12);
        CHECK(quadratic_form(m, x) > 0.0);
      }
    }
}

TEST_CASE("periodic Cholesky agrees with dense elimination") {
  std::mt19937_64 rng(11);
  for (int r = 1; r <= 3; ++r)
    for (std::size_t n : {2u, 3u, 5u, 12u}) {
      CAPTURE(r);
      CAPTURE(n);
      const auto s = build_space(n, r);
      auto a = assemble_mass(*s);
      a.add_scaled(0.37, assemble_stiffness(*s));
      a.add_scaled(0.11, assemble_arctan_jacobian(*s, random_vector(s->dof_count(), rng)));
      const auto f = PeriodicCholesky::factor(a);
      REQUIRE(f.has_value());
      const auto b = random_vector(s->dof_count(), rng);
      const auto x = f->solve(b);
      const auto ref = dense_solve(a.to_dense(), b);
      for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-10));
      const auto ax = a.multiply(x);
      for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(ax[i] - b[i]) < 1e-12);
    }
}

TEST_CASE("Cholesky rejects indefinite and singular matrices") {
  const auto s = build_space(8, 1);
  CHECK_FALSE(PeriodicCholesky::factor(assemble_stiffness(*s)).has_value());
  auto a = assemble_mass(*s);
  a.add_scaled(-1.0, assemble_stiffness(*s));
  CHECK_FALSE(PeriodicCholesky::factor(a).has_value());
}

TEST_CASE("l2_project") {
  SUBCASE("constants") {
    for (int r = 1; r <= 2; ++r) {
      const auto u = l2_project(build_space(10, r), [](double) { return 3.25; });
      for (double c : u.coeffs) CHECK(c == doctest::Approx(3.25).epsilon(1e-12));
    }
  }
  SUBCASE("basis function maps to unit vector") {
    const auto s = build_space(12, 1);
    const std::size_t k = 5;
    const auto phi = [&](double x) {
      FeFunction e(s);
      e.coeffs[k] = 1.0;
      return e.evaluate(x);
    };
    const auto u = l2_project(s, phi);
    for (std::size_t i = 0; i < u.coeffs.size(); ++i) CHECK(std::abs(u.coeffs[i] - (i == k ? 1.0 : 0.0)) < 1e-12);
  }
  SUBCASE("order 2 in L2 for sin(pi x)") {
    std::vector<double> hs, errs;
    for (std::size_t n : {25u, 50u, 100u, 200u}) {
      const auto s = build_space(n, 1);
      const auto u = l2_project(s, [](double x) { return std::sin(pi * x); });
      hs.push_back(s->h());
      errs.push_back(l2_error(u, [](double x) { return std::sin(pi * x); }));
    }
    CHECK(loglog_slope(hs, errs) == doctest::Approx(2.0).epsilon(0.075));
  }
  SUBCASE("idempotent on the space") {
    std::mt19937_64 rng(3);
    for (int r = 1; r <= 2; ++r) {
      const auto s = build_space(9, r);
      const FeFunction w(s, random_vector(s->dof_count(), rng));
      const auto p = l2_project(s, [&](double x) { return w.evaluate(x); });
      for (std::size_t i = 0; i < w.coeffs.size(); ++i) CHECK(std::abs(p.coeffs[i] - w.coeffs[i]) < 1e-12);
    }
  }
}

TEST_CASE("elliptic_project") {
  SUBCASE("fixes the space") {
    std::mt19937_64 rng(5);
    for (int r = 1; r <= 2; ++r) {
      const auto s = build_space(9, r);
      const FeFunction w(s, random_vector(s->dof_count(), rng));
      const auto p = elliptic_project(
          s, [&](double x) { return w.evaluate(x); }, [&](double x) { return w.derivative(x); });
      for (std::size_t i = 0; i < w.coeffs.size(); ++i) CHECK(std::abs(p.coeffs[i] - w.coeffs[i]) < 1e-12);
    }
  }
  SUBCASE("constants") {
    const auto p = elliptic_project(build_space(10, 1), [](double) { return -2.0; }, [](double) { return 0.0; });
    for (double c : p.coeffs) CHECK(c == doctest::Approx(-2.0).epsilon(1e-12));
  }
  SUBCASE("H1 orthogonality of the error") {
    const auto s = build_space(20, 2);
    auto w = [](double x) { return std::exp(std::sin(2 * pi * x)); };
    auto dw = [](double x) { return 2 * pi * std::cos(2 * pi * x) * std::exp(std::sin(2 * pi * x)); };
    const auto p = elliptic_project(s, w, dw);
    auto system = assemble_stiffness(*s);
    system.add_scaled(1.0, assemble_mass(*s));
    // (K + M) p - [(w', phi') + (w, phi)] = 0 for every basis function.
    const auto lhs = system.multiply(p.coeffs);
    auto rhs = assemble_load(*s, w);
    const auto& t = s->projection_table();
    for (std::size_t e = 0; e < s->num_elements(); ++e)
      for (std::size_t q = 0; q < t.rule.size(); ++q) {
        const double x = s->element_origin(e) + t.rule.points[q] * s->h();
        for (std::size_t a = 0; a < s->local_dofs(); ++a)
          rhs[s->dof(e, a)] += t.rule.weights[q] * dw(x) * t.grads[q * s->local_dofs() + a];
      }
    for (std::size_t i = 0; i < lhs.size(); ++i) CHECK(std::abs(lhs[i] - rhs[i]) < 1e-12);
  }
  SUBCASE("orders for sin(2 pi x)") {
    auto w = [](double x) { return std::sin(2 * pi * x); };
    auto dw = [](double x) { return 2 * pi * std::cos(2 * pi * x); };
    std::vector<double> hs, l2, h1;
    for (std::size_t n : {25u, 50u, 100u, 200u}) {
      const auto s = build_space(n, 1);
      const auto p = elliptic_project(s, w, dw);
      hs.push_back(s->h());
      l2.push_back(l2_error(p, w));
      h1.push_back(h1_seminorm_error(p, dw));
    }
    CHECK(std::abs(loglog_slope(hs, l2) - 2.0) <= 0.15);
    CHECK(std::abs(loglog_slope(hs, h1) - 1.0) <= 0.15);
  }
}

TEST_CASE("discrete_laplacian_apply") {
  SUBCASE("constant maps to zero") {
    const auto s = build_space(16, 2);
    const FeFunction c(s, std::vector<double>(s->dof_count(), 4.0));
    for (double v : discrete_laplacian_apply(c).coeffs) CHECK(std::abs(v) < 1e-9);
  }
  SUBCASE("linearity") {
    std::mt19937_64 rng(9);
    const auto s = build_space(16, 1);
    const FeFunction u(s, random_vector(16, rng)), v(s, random_vector(16, rng));
    FeFunction combo(s);
    for (std::size_t i = 0; i < 16; ++i) combo.coeffs[i] = 2.5 * u.coeffs[i] - 0.5 * v.coeffs[i];
    const auto lu = discrete_laplacian_apply(u), lv = discrete_laplacian_apply(v);
    const auto lc = discrete_laplacian_apply(combo);
    for (std::size_t i = 0; i < 16; ++i)
      CHECK(std::abs(lc.coeffs[i] - (2.5 * lu.coeffs[i] - 0.5 * lv.coeffs[i])) < 1e-12 * 1e4);
  }
  SUBCASE("eigenfunction consistency is second order") {
    std::vector<double> hs, errs;
    for (std::size_t n : {25u, 50u, 100u, 200u}) {
      const auto s = build_space(n, 1);
      const auto w = l2_project(s, [](double x) { return std::sin(2 * pi * x); });
      auto lw = discrete_laplacian_apply(w);
      for (std::size_t i = 0; i < n; ++i) lw.coeffs[i] += 4 * pi * pi * w.coeffs[i];
      hs.push_back(s->h());
      errs.push_back(std::sqrt(quadratic_form(assemble_mass(*s), lw.coeffs)));
    }
    CHECK(loglog_slope(hs, errs) == doctest::Approx(2.0).epsilon(0.075));
  }
}

TEST_CASE("assemble_arctan_vector") {
  std::mt19937_64 rng(13);
  SUBCASE("constant state gives zero") {
    const auto s = build_space(10, 2);
    for (double v : assemble_arctan_vector(*s, std::vector<double>(20, 1.5))) CHECK(std::abs(v) < 1e-12);
  }
  SUBCASE("closed form for linear elements") {
    const std::size_t n = 17;
    const auto s = build_space(n, 1);
    const auto u = random_vector(n, rng, 3.0);
    const auto b = assemble_arctan_vector(*s, u);
    // Element e joins DOFs e and e+1; phi_e' = -1/h, phi_{e+1}' = 1/h on it.
    std::vector<double> slope(n);
    for (std::size_t e = 0; e < n; ++e) slope[e] = (u[(e + 1) % n] - u[e]) / s->h();
    for (std::size_t i = 0; i < n; ++i) {
      const double expected = std::atan(slope[(i + n - 1) % n]) - std::atan(slope[i]);
      CHECK(b[i] == doctest::Approx(expected).epsilon(1e-13));
    }
  }
  SUBCASE("coercive pairing") {
    for (int r = 1; r <= 2; ++r)
      for (int t = 0; t < 50; ++t) {
        const auto s = build_space(11, r);
        const auto u = random_vector(s->dof_count(), rng, 10.0);
        CHECK(dot(assemble_arctan_vector(*s, u), u) >= 0.0);
      }
  }
}

TEST_CASE("assemble_noise_vector") {
  SUBCASE("zero state: basis integrals") {
    const auto s = build_space(25, 1);
    const auto g = assemble_noise_vector(*s, std::vector<double>(25, 0.0));
    double sum = 0.0;
    for (double v : g) {
      CHECK(v == doctest::Approx(s->h()).epsilon(1e-14));
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("constant slope scales by sqrt(1 + s^2)") {
    // A periodic function cannot have one global slope, but on each element
    // the integrand only sees the local slope; a zig-zag with |slope| = 3
    // everywhere gives sqrt(10) times the basis integrals.
    const auto s = build_space(20, 1);
    std::vector<double> u(20);
    for (std::size_t i = 0; i < 20; ++i) u[i] = (i % 2 == 0 ? 0.0 : 3.0 * s->h());
    const auto g = assemble_noise_vector(*s, u);
    for (double v : g) CHECK(v == doctest::Approx(std::sqrt(10.0) * s->h()).epsilon(1e-13));
  }
  SUBCASE("field multiplies the integrand") {
    const auto s = build_space(20, 2);
    const std::vector<double> u(40, 0.0);
    const auto g = assemble_noise_vector(*s, u, [](double) { return 2.0; });
    double sum = 0.0;
    for (double v : g) sum += v;
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-13));
  }
}
