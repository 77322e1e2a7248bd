#pragma once

#include "smcf/assembly.hpp"

namespace smcf {

/// L2 projection: M c = (f, phi_i).
FeFunction l2_project(const SpacePtr& space, const ScalarFunction& f);

/// Elliptic (Ritz) projection for the H1 inner product:
/// (K + M) c = (w', phi_i') + (w, phi_i).
FeFunction elliptic_project(const SpacePtr& space, const ScalarFunction& w,
                            const ScalarFunction& dw);

/// Discrete Laplacian: z with M z = -K w.
FeFunction discrete_laplacian_apply(const FeFunction& w);

}  // namespace smcf
