#include "smcf/space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace smcf {

Mesh uniform_mesh(std::size_t num_intervals) {
  if (num_intervals < 2)
    throw std::invalid_argument("uniform_mesh: need at least 2 intervals, got " +
                                std::to_string(num_intervals));
  Mesh mesh;
  mesh.num_intervals = num_intervals;
  mesh.h = 1.0 / static_cast<double>(num_intervals);
  mesh.nodes.resize(num_intervals + 1);
  for (std::size_t j = 0; j <= num_intervals; ++j)
    mesh.nodes[j] = static_cast<double>(j) / static_cast<double>(num_intervals);
  return mesh;
}

FemSpace::FemSpace(std::size_t num_intervals, int degree)
    : mesh_(uniform_mesh(num_intervals)),
      degree_(degree),
      dof_count_(static_cast<std::size_t>(degree) * num_intervals) {
  if (degree < 1 || degree > kMaxDegree)
    throw std::invalid_argument("FemSpace: degree must be in [1, " + std::to_string(kMaxDegree) +
                                "], got " + std::to_string(degree));
  element_dofs_.resize(num_intervals * local_dofs());
  for (std::size_t e = 0; e < num_intervals; ++e)
    for (std::size_t a = 0; a < local_dofs(); ++a)
      element_dofs_[e * local_dofs() + a] = (e * static_cast<std::size_t>(degree_) + a) % dof_count_;
  nonlinear_ = tabulate(kNonlinearPoints);
  projection_ = tabulate(kProjectionPoints);
}

// Lagrange basis on equispaced nodes xi_a = a / r.
double FemSpace::shape(std::size_t a, double xi) const {
  const double r = degree_;
  const double xa = static_cast<double>(a) / r;
  double v = 1.0;
  for (int b = 0; b <= degree_; ++b) {
    if (static_cast<std::size_t>(b) == a) continue;
    const double xb = b / r;
    v *= (xi - xb) / (xa - xb);
  }
  return v;
}

double FemSpace::shape_grad(std::size_t a, double xi) const {
  const double r = degree_;
  const double xa = static_cast<double>(a) / r;
  double sum = 0.0;
  for (int k = 0; k <= degree_; ++k) {
    if (static_cast<std::size_t>(k) == a) continue;
    double term = 1.0 / (xa - k / r);
    for (int b = 0; b <= degree_; ++b) {
      if (static_cast<std::size_t>(b) == a || b == k) continue;
      const double xb = b / r;
      term *= (xi - xb) / (xa - xb);
    }
    sum += term;
  }
  return sum;
}

ShapeTable FemSpace::tabulate(int points) const {
  ShapeTable t;
  t.rule = gauss_legendre(points);
  const std::size_t nl = local_dofs();
  t.values.resize(t.rule.size() * nl);
  t.grads.resize(t.rule.size() * nl);
  for (std::size_t q = 0; q < t.rule.size(); ++q)
    for (std::size_t a = 0; a < nl; ++a) {
      t.values[q * nl + a] = shape(a, t.rule.points[q]);
      t.grads[q * nl + a] = shape_grad(a, t.rule.points[q]);
    }
  return t;
}

SpacePtr build_space(std::size_t num_intervals, int degree) {
  if (num_intervals < 2)
    throw std::invalid_argument("build_space: num_intervals must be >= 2, got " +
                                std::to_string(num_intervals));
  if (degree < 1)
    throw std::invalid_argument("build_space: degree must be >= 1, got " + std::to_string(degree));
  return std::make_shared<const FemSpace>(num_intervals, degree);
}

FeFunction::FeFunction(SpacePtr s, std::vector<double> c) : space(std::move(s)), coeffs(std::move(c)) {
  if (coeffs.size() != space->dof_count())
    throw std::invalid_argument("FeFunction: coefficient count " + std::to_string(coeffs.size()) +
                                " does not match dof_count " + std::to_string(space->dof_count()));
}

bool FeFunction::all_finite() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](double v) { return std::isfinite(v); });
}

double FeFunction::max_abs() const {
  double m = 0.0;
  for (double v : coeffs) m = std::max(m, std::abs(v));
  return m;
}

namespace {

std::pair<std::size_t, double> locate(const FemSpace& space, double x) {
  x -= std::floor(x);
  const auto n = space.num_elements();
  auto e = static_cast<std::size_t>(x * static_cast<double>(n));
  if (e >= n) e = n - 1;
  const double xi = (x - space.element_origin(e)) / space.h();
  return {e, xi};
}

}  // namespace

double FeFunction::evaluate(double x) const {
  const auto [e, xi] = locate(*space, x);
  double v = 0.0;
  for (std::size_t a = 0; a < space->local_dofs(); ++a) v += coeffs[space->dof(e, a)] * space->shape(a, xi);
  return v;
}

double FeFunction::derivative(double x) const {
  const auto [e, xi] = locate(*space, x);
  double v = 0.0;
  for (std::size_t a = 0; a < space->local_dofs(); ++a)
    v += coeffs[space->dof(e, a)] * space->shape_grad(a, xi);
  return v / space->h();
}

}  // namespace smcf
