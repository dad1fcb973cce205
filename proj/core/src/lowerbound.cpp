#include "episcale/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "episcale/convolution.hpp"

namespace episcale {

namespace {

// Vector integrand (|H|^2, H12 - H21) for the closed-form skew reduction.
std::function<void(Vec2, double*)> skew_integrand(
    const std::function<Mat2(Vec2)>& H) {
    return [H](Vec2 p, double* out) {
        const Mat2 m = H(p);
        out[0] = norm2(m);
        out[1] = m.a12 - m.a21;
    };
}

SkewFitResult finish_skew(const std::vector<double>& vals, double area,
                          double error, bool converged) {
    SkewFitResult res;
    res.w_star = vals[1] / (2.0 * area);
    res.value = vals[0] - vals[1] * vals[1] / (2.0 * area);
    res.error = error;
    res.converged = converged;
    return res;
}

std::function<Mat2(Vec2)> field_callable(const StrainField& field) {
    if (const auto* moll = std::get_if<MollifiedField>(&field.as_variant())) {
        const MollifiedField* m = moll;
        const double tol = m->tolerance() * 100.0;
        return [m, tol](Vec2 p) { return mollified_value(*m, p, tol).value; };
    }
    const StrainField* f = &field;
    return [f](Vec2 p) { return evaluate(*f, p); };
}

}  // namespace

SkewFitResult min_over_skew_fn(const std::function<Mat2(Vec2)>& H,
                               const Region2D& domain,
                               const QuadratureSpec& spec) {
    if (domain.clip)
        throw std::invalid_argument("min_over_skew expects an unclipped rectangle");
    auto res = integrate_2d(skew_integrand(H), 2, domain, spec);
    const double area = (domain.x1 - domain.x0) * (domain.y1 - domain.y0);
    return finish_skew(res.value, area, res.error, res.converged);
}

SkewFitResult min_over_skew_annulus_fn(const std::function<Mat2(Vec2)>& H,
                                       Vec2 center, double r, double R,
                                       const QuadratureSpec& spec) {
    if (!(R > r && r > 0.0))
        throw std::domain_error("annulus requires 0 < r < R");
    auto res = integrate_annulus(skew_integrand(H), 2, center, r, R, spec);
    const double area = M_PI * (R * R - r * r);
    return finish_skew(res.value, area, res.error, res.converged);
}

SkewFitResult min_over_skew(const StrainField& field, const Region2D& domain,
                            const QuadratureSpec& spec) {
    return min_over_skew_fn(field_callable(field), domain, spec);
}

SkewFitResult min_over_skew_annulus(const StrainField& field, Vec2 center,
                                    double r, double R,
                                    const QuadratureSpec& spec) {
    return min_over_skew_annulus_fn(field_callable(field), center, r, R, spec);
}

double curl_mass_in_rect(const StrainField& field, double x0, double x1,
                         double y0, double y1) {
    const auto* moll = std::get_if<MollifiedField>(&field.as_variant());
    if (!moll) return 0.0;  // every other variant is curl-free off jump sets
    const auto* base = std::get_if<PeriodicDislocationField>(moll->base.get());
    if (!base) return 0.0;
    const double r0 = moll->spec.r0;
    const double P = base->period();
    const double b = base->params.b;
    MollifierSpec spec{r0};
    // Lattice images i <= k-1 (the jump at x = 0 included; it is part of the
    // periodic field's curl).
    const long long i_lo = static_cast<long long>(std::floor((x0 - r0) / P));
    const long long i_hi = std::min<long long>(
        base->k - 1, static_cast<long long>(std::ceil((x1 + r0) / P)));
    double mass = 0.0;
    QuadratureSpec qs;
    qs.rel_tol = 1e-9;
    qs.base_divisions = 6;
    for (long long i = i_lo; i <= i_hi; ++i) {
        const Vec2 p{i * P, base->params.r0};
        const double ax = std::max(x0, p.x - r0), bx = std::min(x1, p.x + r0);
        const double ay = std::max(y0, p.y - r0), by = std::min(y1, p.y + r0);
        if (!(bx > ax) || !(by > ay)) continue;
        if (ax <= p.x - r0 && bx >= p.x + r0 && ay <= p.y - r0 && by >= p.y + r0) {
            mass += 1.0;  // full kernel mass
            continue;
        }
        Region2D rect{ax, bx, ay, by, nullptr};
        auto res = integrate_2d_scalar(
            [&](Vec2 q) { return spec.value(q - p); }, rect, qs);
        mass += res.value;
    }
    return b * mass;
}

AnnulusBoundResult annulus_circulation_bound(const StrainField& field,
                                             Vec2 center, double r, double R,
                                             const DislocationMeasure& sigma,
                                             double r0,
                                             const QuadratureSpec& spec,
                                             double tol) {
    if (!(R > r && r > 0.0))
        throw std::domain_error("annulus requires 0 < r < R");
    int enclosed = 0;
    for (const Vec2& p : sigma.cores) {
        const double d = dist(p, center);
        if (d + r0 <= r) {
            ++enclosed;
        } else if (d - r0 >= R) {
            // fully outside, fine
        } else {
            std::ostringstream os;
            os << "core at (" << p.x << ", " << p.y
               << ") has mollifier mass straddling the annulus";
            throw std::domain_error(os.str());
        }
    }
    AnnulusBoundResult out;
    out.enclosed = enclosed;
    auto fit = min_over_skew_annulus(field, center, r, R, spec);
    out.lhs = fit.value;
    out.w_star = fit.w_star;
    const double curl_inner = sigma.b * enclosed;
    out.rhs = std::log(R / r) / (2.0 * M_PI) * curl_inner * curl_inner;
    out.holds = out.lhs >= out.rhs * (1.0 - tol) - 1e-300;
    return out;
}

StripBoundResult strip_lower_bound_check(const StrainField& field, double x_i,
                                         double l_i, double x_bar, double e0,
                                         const QuadratureSpec& spec,
                                         double tol) {
    if (!(l_i > 0.0)) throw std::domain_error("strip: l_i must be > 0");
    if (!(x_bar > x_i && x_bar < x_i + l_i / 8.0))
        throw std::domain_error("strip: x_bar must lie in (x_i, x_i + l_i/8)");
    StripBoundResult out;
    const double x_lo = x_bar;
    const double x_hi = 2.0 * x_i + l_i - x_bar;
    const double y_hi = l_i / 2.0;
    out.curl_mass = curl_mass_in_rect(field, x_lo, x_hi, 0.0, y_hi);
    if (!(out.curl_mass < e0 * l_i / 4.0)) {
        out.applicable = false;
        return out;
    }
    Region2D strip{x_lo, x_hi, 0.0, y_hi, nullptr};
    auto fit = min_over_skew(field, strip, spec);
    out.lhs = fit.value;
    out.w_star = fit.w_star;
    out.rhs = e0 * e0 * l_i * l_i / 768.0;
    out.holds = out.lhs >= out.rhs * (1.0 - tol);
    return out;
}

SegmentDecomposition decompose_local_scales(const Profile& profile,
                                            const DislocationMeasure& sigma,
                                            const ModelParams& params) {
    params.validate();
    SegmentDecomposition out;
    const double log_ratio = std::log(params.b / (params.e0 * params.r0));
    const double cap_count = log_ratio * log_ratio;
    std::vector<double> xs;
    for (const Vec2& p : sigma.cores) xs.push_back(p.x);
    std::sort(xs.begin(), xs.end());

    // Largest window [x, x+l) holding at most cap_count cores, capped at 1-x.
    auto disl_scale = [&](double x) {
        const double cap = 1.0 - x;
        auto first = std::lower_bound(xs.begin(), xs.end(), x);
        const auto limit = static_cast<std::size_t>(std::floor(cap_count));
        if (static_cast<std::size_t>(xs.end() - first) <= limit) return cap;
        const double x_blocking = *(first + limit);  // (limit+1)-th core
        return std::min(cap, x_blocking - x);
    };

    const double eps = 1e-9;
    for (const auto& comp : profile.support_components()) {
        double x = comp.left + eps;
        while (x < comp.right - eps) {
            const double lh = inscribed_square_size(profile, x);
            if (!(lh > 0.0)) break;  // degenerate pinch, stop this component
            const double ld = disl_scale(x);
            Segment seg;
            seg.kind = lh <= ld ? ScaleKind::HeightLimited
                                : ScaleKind::DislocationLimited;
            seg.x = x;
            seg.l = std::min(lh, ld);
            if (x + seg.l > comp.right) seg.l = comp.right - x;  // tile the support
            if (!(seg.l > 0.0)) break;
            seg.local_volume = profile.integral(x, x + seg.l);
            seg.core_count = 0;
            for (double cx : xs)
                if (cx >= x && cx < x + seg.l) ++seg.core_count;
            out.segments.push_back(seg);
            out.covered_volume += seg.local_volume;
            x += seg.l;
            if (out.segments.size() > 500000)
                throw std::runtime_error("decomposition segment budget exceeded");
        }
    }
    return out;
}

}  // namespace episcale
