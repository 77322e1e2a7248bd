#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "smcf/quadrature.hpp"

namespace smcf {

/// Uniform partition 0 = x_0 < x_1 < ... < x_N = 1 of the unit interval.
struct Mesh {
  std::size_t num_intervals = 0;
  double h = 0.0;
  std::vector<double> nodes;
};

Mesh uniform_mesh(std::size_t num_intervals);

/// Shape functions of the reference element tabulated at the points of a
/// quadrature rule. values/grads are indexed [q * (degree + 1) + a];
/// grads are derivatives with respect to the reference coordinate.
struct ShapeTable {
  QuadratureRule rule;
  std::vector<double> values;
  std::vector<double> grads;
};

/// Continuous piecewise polynomials of degree r on a uniform periodic mesh.
/// Local node a of element e (equispaced Lagrange nodes) maps to global DOF
/// (e * r + a) mod (r * N), which identifies x = 0 with x = 1.
class FemSpace {
 public:
  static constexpr int kMaxDegree = 4;
  /// Points per element for nonlinear integrands.
  static constexpr int kNonlinearPoints = 4;
  /// Points per element for load vectors of given functions and error norms.
  static constexpr int kProjectionPoints = 8;

  FemSpace(std::size_t num_intervals, int degree);

  const Mesh& mesh() const { return mesh_; }
  std::size_t num_elements() const { return mesh_.num_intervals; }
  double h() const { return mesh_.h; }
  int degree() const { return degree_; }
  std::size_t dof_count() const { return dof_count_; }
  std::size_t local_dofs() const { return static_cast<std::size_t>(degree_) + 1; }

  std::size_t dof(std::size_t element, std::size_t local) const {
    return element_dofs_[element * local_dofs() + local];
  }
  /// Global DOFs of one element, in local order.
  std::span<const std::size_t> element_dofs(std::size_t element) const {
    return {element_dofs_.data() + element * local_dofs(), local_dofs()};
  }
  double dof_coordinate(std::size_t g) const {
    return static_cast<double>(g) * mesh_.h / degree_;
  }
  double element_origin(std::size_t element) const { return mesh_.nodes[element]; }

  double shape(std::size_t a, double xi) const;
  double shape_grad(std::size_t a, double xi) const;

  const ShapeTable& nonlinear_table() const { return nonlinear_; }
  const ShapeTable& projection_table() const { return projection_; }

 private:
  ShapeTable tabulate(int points) const;

  Mesh mesh_;
  int degree_;
  std::size_t dof_count_;
  std::vector<std::size_t> element_dofs_;
  ShapeTable nonlinear_;
  ShapeTable projection_;
};

using SpacePtr = std::shared_ptr<const FemSpace>;

/// Uniform periodic space. Throws std::invalid_argument for
/// num_intervals < 2 or a degree outside [1, FemSpace::kMaxDegree].
SpacePtr build_space(std::size_t num_intervals, int degree = 1);

/// Coefficient vector of a finite element function.
struct FeFunction {
  SpacePtr space;
  std::vector<double> coeffs;

  FeFunction() = default;
  explicit FeFunction(SpacePtr s) : space(std::move(s)), coeffs(space->dof_count(), 0.0) {}
  FeFunction(SpacePtr s, std::vector<double> c);

  bool all_finite() const;
  double max_abs() const;
  /// Point evaluation; x is taken modulo 1.
  double evaluate(double x) const;
  /// Derivative from the element containing x (right-continuous at nodes).
  double derivative(double x) const;
};

}  // namespace smcf
