#include "episcale/strain_fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "episcale/convolution.hpp"

namespace episcale {

double reduce_to_cell(double x, double period) {
    double t = std::fmod(x, period);
    if (t <= 0.0) t += period;
    return t;
}

Region classify_region(double x, double y, const ModelParams& params) {
    const double P = params.period();
    if (!(x > 0.0 && x <= P)) {
        std::ostringstream os;
        os << "classify_region: x = " << x << " outside the cell (0, " << P << "]";
        throw std::domain_error(os.str());
    }
    const double low = params.r0 * x / P;                  // A/B interface
    const double high = (params.r0 / P - 1.0) * x + P;     // B/C interface
    if (y <= low) return Region::A;
    if (y < high) return Region::B;
    return Region::C;
}

Mat2 lattice_cell_value(double x, double y, const ModelParams& params) {
    const double P = params.period();
    const double e0 = params.e0;
    switch (classify_region(x, y, params)) {
        case Region::A:
            return {e0, 0.0, 0.0, 0.0};
        case Region::C:
            return Mat2::zero();
        case Region::B: {
            const double a = params.r0 / P - 1.0;
            const double pmx = P - x;
            const double m11 =
                e0 * ((2.0 * a * x + P - y) * pmx + a * x * x + P * x - x * y) /
                (pmx * pmx);
            const double m12 = -e0 * x / pmx;
            return {m11, m12, 0.0, 0.0};
        }
    }
    return Mat2::zero();
}

Mat2 tail_value(double xi, double y, double e0) {
    if (y <= 0.0) return {e0, 0.0, 0.0, 0.0};
    if (y < xi) return {e0, -e0, 0.0, 0.0};
    return Mat2::zero();
}

Mat2 sharp_value(const PeriodicDislocationField& field, Vec2 z) {
    const double x_switch = field.switch_x();
    if (z.x <= x_switch) {
        const double xc = reduce_to_cell(z.x, field.period());
        return lattice_cell_value(xc, z.y, field.params);
    }
    return tail_value(z.x - x_switch, z.y, field.params.e0);
}

std::vector<Vec2> PeriodicDislocationField::cores() const {
    std::vector<Vec2> out;
    const double P = period();
    for (long long i = 1; i <= k - 1; ++i) out.push_back({i * P, params.r0});
    return out;
}

Mat2 DislocationFreeField::value(Vec2 z) const {
    if (z.y < 0.0) return {e0, 0.0, 0.0, 0.0};
    if (z.y <= L) return {e0 * (1.0 - z.y / L), -e0 * z.x / L, 0.0, 0.0};
    return Mat2::zero();
}

double MollifiedField::tolerance() const {
    if (abs_tol > 0.0) return abs_tol;
    double scale = 1.0;
    if (const auto* p = std::get_if<PeriodicDislocationField>(base.get()))
        scale = std::max(p->params.e0, p->params.b / spec.r0);
    else if (const auto* g = std::get_if<DislocationFreeField>(base.get()))
        scale = g->e0;
    else if (const auto* c = std::get_if<ConstantMisfitField>(base.get()))
        scale = c->e0;
    return 1e-8 * scale;
}

StrainField make_mollified(PeriodicDislocationField base, double r0_scale) {
    MollifiedField m;
    const double r0 = r0_scale > 0.0 ? r0_scale : base.params.r0;
    m.base = std::make_shared<StrainField>(std::move(base));
    m.spec.r0 = r0;
    return StrainField(std::move(m));
}

Mat2 evaluate(const StrainField& field, Vec2 z) {
    return std::visit(
        [&](const auto& f) -> Mat2 {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ZeroField>) {
                return Mat2::zero();
            } else if constexpr (std::is_same_v<T, ConstantMisfitField>) {
                return {f.e0, 0.0, 0.0, 0.0};
            } else if constexpr (std::is_same_v<T, DislocationFreeField>) {
                return f.value(z);
            } else if constexpr (std::is_same_v<T, PeriodicDislocationField>) {
                return sharp_value(f, z);
            } else {
                return mollified_value(f, z).value;
            }
        },
        field.as_variant());
}

double field_ceiling(const StrainField& field) {
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ZeroField>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, ConstantMisfitField>) {
                return std::numeric_limits<double>::infinity();
            } else if constexpr (std::is_same_v<T, DislocationFreeField>) {
                return f.L;
            } else if constexpr (std::is_same_v<T, PeriodicDislocationField>) {
                // cell strain vanishes above y = P; the tail wedge reaches
                // up to y = x - switch_x which is bounded by 2P on [0, L].
                return 2.0 * f.period();
            } else {
                if (const auto* p = std::get_if<PeriodicDislocationField>(f.base.get()))
                    return 4.0 * p->period();
                return field_ceiling(*f.base) + f.spec.r0;
            }
        },
        field.as_variant());
}

namespace {

void append_cell_lines(std::vector<InterfaceLine>& lines,
                       const PeriodicDislocationField& field, Vec2 z,
                       double radius) {
    const double P = field.period();
    const double r0 = field.params.r0;
    const double x_switch = field.switch_x();
    const long long i_lo =
        static_cast<long long>(std::floor((z.x - radius) / P)) - 1;
    const long long i_hi =
        static_cast<long long>(std::floor((z.x + radius) / P)) + 1;
    const double ab_len = std::hypot(P, r0);
    const double bc_len = std::hypot(P, r0 - P);
    for (long long i = i_lo; i <= i_hi; ++i) {
        const double x_i = i * P;
        if (x_i > x_switch + radius) continue;
        // jump vertical, shallow A/B interface, steep B/C interface
        lines.push_back({{x_i, 0.0}, {0.0, 1.0}});
        lines.push_back({{x_i, 0.0}, {P / ab_len, r0 / ab_len}});
        lines.push_back({{x_i, P}, {P / bc_len, (r0 - P) / bc_len}});
    }
    if (z.x + radius > x_switch - radius) {
        const double s = M_SQRT1_2;
        lines.push_back({{x_switch, 0.0}, {0.0, 1.0}});
        lines.push_back({{x_switch, 0.0}, {1.0, 0.0}});   // y = 0 in the tail
        lines.push_back({{x_switch, 0.0}, {s, s}});       // tail wedge diagonal
    }
}

double line_distance(const InterfaceLine& line, Vec2 z) {
    const Vec2 d = z - line.point;
    return std::abs(d.x * line.dir.y - d.y * line.dir.x);
}

}  // namespace

std::vector<InterfaceLine> interface_lines_near(const StrainField& base, Vec2 z,
                                                double radius) {
    std::vector<InterfaceLine> lines;
    if (const auto* p = std::get_if<PeriodicDislocationField>(&base.as_variant())) {
        std::vector<InterfaceLine> cand;
        append_cell_lines(cand, *p, z, radius);
        for (const auto& l : cand)
            if (line_distance(l, z) <= radius) lines.push_back(l);
    } else if (const auto* g =
                   std::get_if<DislocationFreeField>(&base.as_variant())) {
        if (std::abs(z.y) <= radius) lines.push_back({{0.0, 0.0}, {1.0, 0.0}});
        if (std::abs(z.y - g->L) <= radius)
            lines.push_back({{0.0, g->L}, {1.0, 0.0}});
    }
    return lines;
}

std::vector<Vec2> singular_points_near(const StrainField& base, Vec2 z,
                                       double radius) {
    std::vector<Vec2> pts;
    if (const auto* p = std::get_if<PeriodicDislocationField>(&base.as_variant())) {
        const double P = p->period();
        const long long i_lo =
            static_cast<long long>(std::floor((z.x - radius) / P));
        const long long i_hi =
            static_cast<long long>(std::ceil((z.x + radius) / P));
        for (long long i = i_lo; i <= i_hi; ++i) {
            if (i > p->k - 1) continue;
            const Vec2 s{i * P, p->params.r0};
            if (dist(s, z) <= radius) pts.push_back(s);
        }
    }
    return pts;
}

LocalStructure local_structure(const StrainField& base, Vec2 z, double radius) {
    return std::visit(
        [&](const auto& f) -> LocalStructure {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ZeroField> ||
                          std::is_same_v<T, ConstantMisfitField>) {
                return LocalStructure::Constant;
            } else if constexpr (std::is_same_v<T, DislocationFreeField>) {
                if (!interface_lines_near(base, z, radius).empty())
                    return LocalStructure::Mixed;
                return LocalStructure::Affine;
            } else if constexpr (std::is_same_v<T, PeriodicDislocationField>) {
                if (!interface_lines_near(base, z, radius).empty())
                    return LocalStructure::Mixed;
                if (z.x > f.switch_x()) return LocalStructure::Constant;
                const Region r =
                    classify_region(reduce_to_cell(z.x, f.period()), z.y, f.params);
                return r == Region::B ? LocalStructure::Smooth
                                      : LocalStructure::Constant;
            } else {
                return LocalStructure::Mixed;  // nested mollification unsupported
            }
        },
        base.as_variant());
}

double lattice_distance(const PeriodicDislocationField& field, Vec2 z) {
    const double P = field.period();
    const double r0 = field.params.r0;
    const double kmax = static_cast<double>(field.k - 1);
    double i0 = std::round(z.x / P);
    double best = std::numeric_limits<double>::infinity();
    for (double i : {i0 - 1.0, i0, i0 + 1.0}) {
        const double ic = std::min(i, kmax);
        best = std::min(best, dist(z, Vec2{ic * P, r0}));
    }
    return best;
}

PointwiseBoundReport verify_pointwise_bound(Vec2 z, const MollifiedField& field,
                                            double fitted_C) {
    const auto* base = std::get_if<PeriodicDislocationField>(field.base.get());
    if (!base)
        throw std::invalid_argument("pointwise bound requires a periodic base field");
    const double P = base->period();
    const double r0 = field.spec.r0;
    const double b = base->params.b;
    const double e0 = base->params.e0;
    PointwiseBoundReport rep{};
    if (z.y >= 4.0 * P) {
        rep.value = frobenius(mollified_value(field, z).value);
        rep.bound = 0.0;
        rep.ratio = 0.0;
        return rep;
    }
    const double d_lat = lattice_distance(*base, z);
    double bound = e0;
    if (d_lat < 2.0 * r0)
        bound += b / r0;
    else
        bound += b / d_lat;
    rep.value = frobenius(mollified_value(field, z).value);
    rep.bound = fitted_C * bound;
    rep.ratio = rep.bound > 0.0 ? rep.value / rep.bound : 0.0;
    return rep;
}

}  // namespace episcale
