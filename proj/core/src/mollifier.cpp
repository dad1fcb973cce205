#include "episcale/mollifier.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "episcale/quadrature.hpp"

namespace episcale {

double MollifierSpec::j1_raw(double rho) {
    if (!(std::abs(rho) < 1.0)) return 0.0;
    return std::exp(-1.0 / (1.0 - rho * rho));
}

double MollifierSpec::normalization() {
    static double cached = 0.0;
    static std::once_flag flag;
    std::call_once(flag, [] {
        // plane integral of the raw bump: 2 pi int_0^1 s exp(-1/(1-s^2)) ds
        auto res = integrate_1d([](double s) { return s * j1_raw(s); }, 0.0,
                                1.0, 0.0, 1e-14);
        cached = 1.0 / (2.0 * M_PI * res.value);
    });
    return cached;
}

double MollifierSpec::j1(double rho) { return normalization() * j1_raw(rho); }

double MollifierSpec::value(Vec2 x) const { return radial_value(norm(x)); }

double MollifierSpec::radial_value(double rho) const {
    return j1(rho / r0) / (r0 * r0);
}

double MollifierSpec::mass_within(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    auto res = integrate_1d([](double s) { return s * j1_raw(s); }, 0.0, t,
                            0.0, 1e-13);
    return normalization() * 2.0 * M_PI * res.value;
}

double core_energy_integrand(double t) {
    if (t <= 0.0) return 0.0;
    const double m = MollifierSpec::mass_within(t);
    return m * m / (2.0 * M_PI * t);
}

CoreConstantResult core_energy_constant(double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("core constant: tol must be > 0");
    auto res = integrate_1d([](double t) { return core_energy_integrand(t); },
                            0.0, 1.0, 0.0, tol);
    if (!res.converged)
        throw std::runtime_error(
            "core constant quadrature failed, residual estimate " +
            std::to_string(res.error));
    return {res.value, res.error};
}

}  // namespace episcale
