#pragma once

#include "episcale/geometry.hpp"
#include "episcale/strain_fields.hpp"

namespace episcale {

struct ConvResult {
    Mat2 value;
    double error = 0.0;
    bool converged = true;
};

/// Mollified strain H(z) = (base * J_{r0})(z), by polar quadrature over
/// B_{r0}(0) with angular panels split at the base field's interface-line
/// crossings and radial segments split at the exact line intersections;
/// both levels refine adaptively. Exact shortcuts: constant and affine
/// neighbourhoods return the base value, and the periodic construction
/// returns exact zero for y >= 4 b/e0.
ConvResult mollified_value(const MollifiedField& field, Vec2 z);

/// Same with an explicit absolute tolerance override (used by energy
/// quadrature, which needs many cheaper evaluations).
ConvResult mollified_value(const MollifiedField& field, Vec2 z, double abs_tol);

}  // namespace episcale
