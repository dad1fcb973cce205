#pragma once

#include <span>

#include "episcale/dislocations.hpp"
#include "episcale/geometry.hpp"
#include "episcale/quadrature.hpp"
#include "episcale/strain_fields.hpp"

namespace episcale {

/// Surface + elastic + nucleation split; total is the exact sum of the parts.
struct EnergyBreakdown {
    double surface = 0.0;
    double elastic = 0.0;
    double nucleation = 0.0;
    double total = 0.0;
    double elastic_quadrature_error = 0.0;
};

struct ElasticResult {
    double value = 0.0;            // integral of |H_sym|^2 over Omega_h
    double error = 0.0;            // a posteriori quadrature estimate
    double lower_general = 0.0;    // c1 * value   (quadratic growth, below)
    double upper_general = 0.0;    // value / c1   (quadratic growth, above)
    bool converged = true;
};

/// Elastic energy of a strain field over Omega_h. For the mollified periodic
/// construction over a Step-1 trapezoid the integral is assembled from one
/// periodic slab, one core patch, the strip around the left edge, the
/// tail-switch patch and the dislocation-free tail; all other cases run the
/// generic adaptive engine. Throws a numerical error with the worst-cell
/// report when the budget is exhausted and spec.throw_on_nonconvergence is
/// set.
ElasticResult elastic_energy(const StrainField& field, const Profile& profile,
                             double c1, const QuadratureSpec& spec);

/// Full energy of a configuration. Admissibility (profile invariants, volume,
/// core containment, distinct cores, field/measure consistency) is checked
/// and violations raise std::domain_error naming the violated clause.
EnergyBreakdown total_energy(const Profile& profile, const StrainField& field,
                             const DislocationMeasure& sigma,
                             const ModelParams& params,
                             const QuadratureSpec& spec);

/// Line integral of the first row of H against the unit tangent around the
/// circle of given center/radius (counterclockwise). For the unmollified
/// periodic field a circle crossing a jump ray raises std::domain_error.
double circulation(const StrainField& field, Vec2 center, double radius,
                   const QuadratureSpec& spec);

/// Max over samples of |curl H1 (central differences, step h) minus
/// b sum_i J_{r0}(. - p_i)|.
double curl_residual(const StrainField& field, const DislocationMeasure& sigma,
                     double r0, std::span<const Vec2> samples, double step);

}  // namespace episcale
