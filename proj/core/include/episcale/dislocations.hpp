#pragma once

#include <vector>

#include "episcale/geometry.hpp"
#include "episcale/mollifier.hpp"

namespace episcale {

/// Finite dislocation measure: Burgers vector (b, 0) carried by a list of
/// core centers. Cores are kept sorted by x (ties by y) for deterministic
/// serialization.
struct DislocationMeasure {
    double b = 0.0;
    std::vector<Vec2> cores;

    std::size_t count() const { return cores.size(); }
    bool empty() const { return cores.empty(); }

    void sort_canonical();
    /// Throws std::invalid_argument on duplicate cores.
    void require_distinct_cores() const;
    /// True if B_{r0}(p) lies inside Omega_h for every core p.
    bool admissible_for(const Profile& profile, double r0) const;
};

/// k = floor(L e0 / b), with a one-ulp forgiveness so that exactly integral
/// products are not rounded down.
long long dislocation_count_k(double L, const ModelParams& params);

/// Step-2 placement: max(k-1, 0) equidistant cores at (i b/e0, r0),
/// i = 1..k-1. Pre: construction-valid params and Step-1 range for L.
DislocationMeasure place_equidistant(double L, const ModelParams& params);

/// c0 * (#cores) * b^2.
double nucleation_energy(const DislocationMeasure& sigma, double c0);

}  // namespace episcale
