#include "smcf/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <stdexcept>

namespace smcf {

namespace {

void check_size(const FemSpace& space, std::span<const double> u, const char* who) {
  if (u.size() != space.dof_count())
    throw std::invalid_argument(std::string(who) + ": coefficient vector has wrong length");
}

// Gathers the slope u_x at every point of `table` on element e.
template <typename F>
void for_each_point(const FemSpace& space, const ShapeTable& table, std::span<const double> u,
                    std::size_t e, F&& f) {
  const std::size_t nl = space.local_dofs();
  const double inv_h = 1.0 / space.h();
  for (std::size_t q = 0; q < table.rule.size(); ++q) {
    double slope = 0.0;
    for (std::size_t a = 0; a < nl; ++a) slope += u[space.dof(e, a)] * table.grads[q * nl + a];
    f(q, slope * inv_h);
  }
}

PeriodicBandedMatrix assemble_bilinear(const FemSpace& space, bool gradients) {
  const std::size_t nl = space.local_dofs();
  const auto& t = space.projection_table();
  std::vector<double> local(nl * nl, 0.0);
  const double h = space.h();
  for (std::size_t q = 0; q < t.rule.size(); ++q)
    for (std::size_t a = 0; a < nl; ++a)
      for (std::size_t b = 0; b < nl; ++b) {
        const double v = gradients ? t.grads[q * nl + a] * t.grads[q * nl + b] / h
                                   : t.values[q * nl + a] * t.values[q * nl + b] * h;
        local[a * nl + b] += t.rule.weights[q] * v;
      }
  PeriodicBandedMatrix m(space.dof_count(), static_cast<std::size_t>(space.degree()));
  for (std::size_t e = 0; e < space.num_elements(); ++e)
    for (std::size_t a = 0; a < nl; ++a)
      for (std::size_t b = 0; b < nl; ++b)
        m.add(space.dof(e, a), static_cast<std::ptrdiff_t>(b) - static_cast<std::ptrdiff_t>(a),
              local[a * nl + b]);
  return m;
}

}  // namespace

PeriodicBandedMatrix assemble_mass(const FemSpace& space) { return assemble_bilinear(space, false); }

PeriodicBandedMatrix assemble_stiffness(const FemSpace& space) { return assemble_bilinear(space, true); }

PeriodicBandedMatrix assemble_arctan_jacobian(const FemSpace& space, std::span<const double> u) {
  check_size(space, u, "assemble_arctan_jacobian");
  const std::size_t nl = space.local_dofs();
  const auto& t = space.nonlinear_table();
  const double inv_h = 1.0 / space.h();
  PeriodicBandedMatrix m(space.dof_count(), static_cast<std::size_t>(space.degree()));
  if (space.degree() == 1) {
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
      const auto dofs = space.element_dofs(e);
      const double s = (u[dofs[1]] - u[dofs[0]]) * inv_h;
      const double w = inv_h / (1.0 + s * s);
      m.add(dofs[0], 0, w);
      m.add(dofs[1], 0, w);
      m.add(dofs[0], 1, -w);
      m.add(dofs[1], -1, -w);
    }
    return m;
  }
  std::vector<double> local(nl * nl);
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    std::fill(local.begin(), local.end(), 0.0);
    for_each_point(space, t, u, e, [&](std::size_t q, double s) {
      const double wq = t.rule.weights[q] * inv_h / (1.0 + s * s);
      for (std::size_t a = 0; a < nl; ++a)
        for (std::size_t b = 0; b < nl; ++b)
          local[a * nl + b] += wq * t.grads[q * nl + a] * t.grads[q * nl + b];
    });
    for (std::size_t a = 0; a < nl; ++a)
      for (std::size_t b = 0; b < nl; ++b)
        m.add(space.dof(e, a), static_cast<std::ptrdiff_t>(b) - static_cast<std::ptrdiff_t>(a),
              local[a * nl + b]);
  }
  return m;
}

std::vector<double> assemble_arctan_vector(const FemSpace& space, std::span<const double> u) {
  check_size(space, u, "assemble_arctan_vector");
  const std::size_t nl = space.local_dofs();
  const auto& t = space.nonlinear_table();
  std::vector<double> b(space.dof_count(), 0.0);
  if (space.degree() == 1) {
    // Piecewise linear: the slope is constant on each element and
    // (arctan(s), phi') = -+arctan(s) for the left/right node.
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
      const auto dofs = space.element_dofs(e);
      const double a = std::atan((u[dofs[1]] - u[dofs[0]]) / space.h());
      b[dofs[0]] -= a;
      b[dofs[1]] += a;
    }
    return b;
  }
  for (std::size_t e = 0; e < space.num_elements(); ++e)
    for_each_point(space, t, u, e, [&](std::size_t q, double s) {
      // h * (1/h) from the Jacobian of the map cancels.
      const double wq = t.rule.weights[q] * std::atan(s);
      for (std::size_t a = 0; a < nl; ++a) b[space.dof(e, a)] += wq * t.grads[q * nl + a];
    });
  return b;
}

std::vector<double> assemble_noise_vector_sampled(const FemSpace& space, std::span<const double> u,
                                                  std::span<const double> field_at_points) {
  check_size(space, u, "assemble_noise_vector");
  const std::size_t nl = space.local_dofs();
  const auto& t = space.nonlinear_table();
  const std::size_t nq = t.rule.size();
  if (!field_at_points.empty() && field_at_points.size() != space.num_elements() * nq)
    throw std::invalid_argument("assemble_noise_vector: sampled field has wrong length");
  const double h = space.h();
  std::vector<double> g(space.dof_count(), 0.0);
  for (std::size_t e = 0; e < space.num_elements(); ++e)
    for_each_point(space, t, u, e, [&](std::size_t q, double s) {
      double wq = t.rule.weights[q] * h * std::sqrt(1.0 + s * s);
      if (!field_at_points.empty()) wq *= field_at_points[e * nq + q];
      for (std::size_t a = 0; a < nl; ++a) g[space.dof(e, a)] += wq * t.values[q * nl + a];
    });
  return g;
}

std::vector<double> assemble_noise_vector(const FemSpace& space, std::span<const double> u) {
  return assemble_noise_vector_sampled(space, u, {});
}

std::vector<double> nonlinear_quadrature_points(const FemSpace& space) {
  const auto& t = space.nonlinear_table();
  std::vector<double> x;
  x.reserve(space.num_elements() * t.rule.size());
  for (std::size_t e = 0; e < space.num_elements(); ++e)
    for (double xi : t.rule.points) x.push_back(space.element_origin(e) + xi * space.h());
  return x;
}

std::vector<double> assemble_noise_vector(const FemSpace& space, std::span<const double> u,
                                          const ScalarFunction& field) {
  std::vector<double> sampled = nonlinear_quadrature_points(space);
  for (double& x : sampled) x = field(x);
  return assemble_noise_vector_sampled(space, u, sampled);
}

std::vector<double> assemble_load(const FemSpace& space, const ScalarFunction& f) {
  const std::size_t nl = space.local_dofs();
  const auto& t = space.projection_table();
  const double h = space.h();
  std::vector<double> load(space.dof_count(), 0.0);
  for (std::size_t e = 0; e < space.num_elements(); ++e)
    for (std::size_t q = 0; q < t.rule.size(); ++q) {
      const double x = space.element_origin(e) + t.rule.points[q] * h;
      const double wq = t.rule.weights[q] * h * f(x);
      for (std::size_t a = 0; a < nl; ++a) load[space.dof(e, a)] += wq * t.values[q * nl + a];
    }
  return load;
}

double quadratic_form(const PeriodicBandedMatrix& a, std::span<const double> x) {
  const auto ax = a.multiply(x);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * ax[i];
  return s;
}

namespace {

template <typename Pointwise>
double quadrature_error(const FeFunction& u, bool derivative, Pointwise&& exact) {
  const FemSpace& space = *u.space;
  const std::size_t nl = space.local_dofs();
  const auto& t = space.projection_table();
  const double h = space.h();
  double sum = 0.0;
  for (std::size_t e = 0; e < space.num_elements(); ++e)
    for (std::size_t q = 0; q < t.rule.size(); ++q) {
      const double x = space.element_origin(e) + t.rule.points[q] * h;
      double uh = 0.0;
      for (std::size_t a = 0; a < nl; ++a)
        uh += u.coeffs[space.dof(e, a)] * (derivative ? t.grads[q * nl + a] / h : t.values[q * nl + a]);
      const double d = uh - exact(x);
      sum += t.rule.weights[q] * h * d * d;
    }
  return std::sqrt(sum);
}

}  // namespace

double l2_error(const FeFunction& u, const ScalarFunction& f) { return quadrature_error(u, false, f); }

double h1_seminorm_error(const FeFunction& u, const ScalarFunction& df) {
  return quadrature_error(u, true, df);
}

}  // namespace smcf
