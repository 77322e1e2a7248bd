#include "smcf/projection.hpp"

#include <stdexcept>

namespace smcf {

namespace {

PeriodicCholesky factor_or_throw(const PeriodicBandedMatrix& a, const char* who) {
  auto f = PeriodicCholesky::factor(a);
  if (!f) throw std::runtime_error(std::string(who) + ": system matrix is not positive definite");
  return *std::move(f);
}

}  // namespace

FeFunction l2_project(const SpacePtr& space, const ScalarFunction& f) {
  const auto mass = factor_or_throw(assemble_mass(*space), "l2_project");
  auto load = assemble_load(*space, f);
  mass.solve_in_place(load);
  return FeFunction(space, std::move(load));
}

FeFunction elliptic_project(const SpacePtr& space, const ScalarFunction& w, const ScalarFunction& dw) {
  auto system = assemble_stiffness(*space);
  system.add_scaled(1.0, assemble_mass(*space));
  const auto factor = factor_or_throw(system, "elliptic_project");

  // (w', phi_i') by the projection rule.
  const std::size_t nl = space->local_dofs();
  const auto& t = space->projection_table();
  const double h = space->h();
  auto rhs = assemble_load(*space, w);
  for (std::size_t e = 0; e < space->num_elements(); ++e)
    for (std::size_t q = 0; q < t.rule.size(); ++q) {
      const double x = space->element_origin(e) + t.rule.points[q] * h;
      const double wq = t.rule.weights[q] * dw(x);
      for (std::size_t a = 0; a < nl; ++a) rhs[space->dof(e, a)] += wq * t.grads[q * nl + a];
    }
  factor.solve_in_place(rhs);
  return FeFunction(space, std::move(rhs));
}

FeFunction discrete_laplacian_apply(const FeFunction& w) {
  const FemSpace& space = *w.space;
  const auto mass = factor_or_throw(assemble_mass(space), "discrete_laplacian_apply");
  auto z = assemble_stiffness(space).multiply(w.coeffs);
  for (double& v : z) v = -v;
  mass.solve_in_place(z);
  return FeFunction(w.space, std::move(z));
}

}  // namespace smcf
