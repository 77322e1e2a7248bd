#pragma once

#include <functional>
#include <span>
#include <vector>

#include "smcf/banded.hpp"
#include "smcf/space.hpp"

namespace smcf {

using ScalarFunction = std::function<double(double)>;

/// M_ij = (phi_i, phi_j).
PeriodicBandedMatrix assemble_mass(const FemSpace& space);

/// K_ij = (phi_i', phi_j'). Annihilates constants.
PeriodicBandedMatrix assemble_stiffness(const FemSpace& space);

/// (w(u_x) phi_i', phi_j') with w = 1 / (1 + u_x^2): the derivative of the
/// arctan pairing with respect to the coefficients of u.
PeriodicBandedMatrix assemble_arctan_jacobian(const FemSpace& space, std::span<const double> u);

/// b_i = (arctan(u_x), phi_i').
std::vector<double> assemble_arctan_vector(const FemSpace& space, std::span<const double> u);

/// g_i = (sqrt(1 + u_x^2), phi_i).
std::vector<double> assemble_noise_vector(const FemSpace& space, std::span<const double> u);

/// g_i = (sqrt(1 + u_x^2) * field, phi_i).
std::vector<double> assemble_noise_vector(const FemSpace& space, std::span<const double> u,
                                          const ScalarFunction& field);

/// Same as above with the field already sampled at the nonlinear quadrature
/// points, laid out [element * points + q].
std::vector<double> assemble_noise_vector_sampled(const FemSpace& space, std::span<const double> u,
                                                  std::span<const double> field_at_points);

/// Physical coordinates of the nonlinear quadrature points, [element * points + q].
std::vector<double> nonlinear_quadrature_points(const FemSpace& space);

/// (f, phi_i) with the projection rule.
std::vector<double> assemble_load(const FemSpace& space, const ScalarFunction& f);

/// x^T A x.
double quadratic_form(const PeriodicBandedMatrix& a, std::span<const double> x);

/// ||u_h - f||_{L2} by quadrature.
double l2_error(const FeFunction& u, const ScalarFunction& f);

/// ||u_h' - df||_{L2} by quadrature.
double h1_seminorm_error(const FeFunction& u, const ScalarFunction& df);

}  // namespace smcf
