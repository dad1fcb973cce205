#pragma once

#include "episcale/geometry.hpp"

namespace episcale {

/// Rescaled standard bump J_{r0}(x) = r0^-2 J1(x/r0), where J1 is the radial
/// bump c exp(-1/(1-|x|^2)) on |x| < 1 normalized to unit mass. The
/// normalization constant is computed once and cached.
struct MollifierSpec {
    double r0 = 1.0;

    /// J_{r0} at a point of the plane; zero outside B_{r0}(0).
    double value(Vec2 x) const;
    /// J_{r0} as a function of the radius |x|.
    double radial_value(double rho) const;

    /// Reference bump J1 at radius rho (already normalized).
    static double j1(double rho);
    /// Unnormalized profile exp(-1/(1-rho^2)).
    static double j1_raw(double rho);
    /// c with integral of c * j1_raw over the plane equal to 1.
    static double normalization();
    /// Radial mass m(t) = integral of J1 over B_t(0); m(1) = 1.
    static double mass_within(double t);
};

/// Core energy constant C(J1) = integral over (0,1) of m(t)^2 / (2 pi t) dt.
/// Throws episcale numerical error (std::runtime_error) if the quadrature
/// fails to reach `tol`.
struct CoreConstantResult {
    double value;
    double error;
};
CoreConstantResult core_energy_constant(double tol = 1e-10);

/// Integrand of C(J1) at t; vanishes like t^3 at 0 and equals 1/(2 pi) at 1.
double core_energy_integrand(double t);

}  // namespace episcale
