#include "episcale/dislocations.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace episcale {

void DislocationMeasure::sort_canonical() {
    std::sort(cores.begin(), cores.end(), [](Vec2 p, Vec2 q) {
        if (p.x != q.x) return p.x < q.x;
        return p.y < q.y;
    });
}

void DislocationMeasure::require_distinct_cores() const {
    for (std::size_t i = 0; i < cores.size(); ++i)
        for (std::size_t j = i + 1; j < cores.size(); ++j)
            if (cores[i].x == cores[j].x && cores[i].y == cores[j].y)
                throw std::invalid_argument("dislocation cores must be pairwise distinct");
}

bool DislocationMeasure::admissible_for(const Profile& profile, double r0) const {
    for (const Vec2& p : cores)
        if (!profile.contains_ball(p, r0)) return false;
    return true;
}

long long dislocation_count_k(double L, const ModelParams& params) {
    const double x = L * params.e0 / params.b;
    return static_cast<long long>(std::floor(x + 1e-12 * std::max(1.0, x)));
}

DislocationMeasure place_equidistant(double L, const ModelParams& params) {
    params.require_construction_valid();
    const double Lmax = std::min(1.0, params.d / (4.0 * params.r0));
    if (!(L > 0.0 && L <= Lmax)) {
        std::ostringstream os;
        os << "L must satisfy 0 < L <= min(1, d/(4 r0)) = " << Lmax
           << "; got L = " << L;
        throw std::domain_error(os.str());
    }
    DislocationMeasure sigma;
    sigma.b = params.b;
    const long long k = dislocation_count_k(L, params);
    const double spacing = params.period();
    for (long long i = 1; i <= k - 1; ++i)
        sigma.cores.push_back({i * spacing, params.r0});
    return sigma;
}

double nucleation_energy(const DislocationMeasure& sigma, double c0) {
    return c0 * static_cast<double>(sigma.count()) * sigma.b * sigma.b;
}

}  // namespace episcale
