#include "episcale/energy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "episcale/convolution.hpp"

namespace episcale {

namespace {

// Absolute field tolerance used for convolution evaluations inside energy
// quadrature. Pointwise verification ops keep the field's own (much tighter)
// tolerance; for integrals a looser one suffices because the error enters
// linearly against sqrt(area * energy).
double energy_eval_tol(const MollifiedField& f, double factor) {
    return f.tolerance() * 1e4 * std::max(1.0, factor);
}

struct SymIntegrand {
    const StrainField* field;
    const MollifiedField* moll = nullptr;  // set when field is mollified
    double eval_tol = -1.0;

    double operator()(Vec2 p) const {
        if (moll) return sym_norm2(mollified_value(*moll, p, eval_tol).value);
        return sym_norm2(evaluate(*field, p));
    }
};

struct PieceResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

PieceResult integrate_piece(const SymIntegrand& f, const Region2D& region,
                            const QuadratureSpec& spec) {
    if (!(region.x1 > region.x0) || !(region.y1 > region.y0)) return {};
    auto res = integrate_2d_scalar([&f](Vec2 p) { return f(p); }, region, spec);
    return {res.value, res.error, res.converged};
}

// ---- cached reference-cell integrals for the periodic construction --------

struct PieceKey {
    int kind;
    double e0, b, r0, cap, aux, tol;
    bool operator<(const PieceKey& o) const {
        return std::tie(kind, e0, b, r0, cap, aux, tol) <
               std::tie(o.kind, o.e0, o.b, o.r0, o.cap, o.aux, o.tol);
    }
};

std::map<PieceKey, PieceResult>& piece_cache() {
    static std::map<PieceKey, PieceResult> cache;
    return cache;
}
std::mutex piece_mutex;

enum PieceKind {
    kInteriorPatch = 0,
    kInteriorSliver,
    kSwitchPatch,
    kSwitchSliver,
    kPhantomMain,
    kPhantomSliver,
    kSlab
};

PieceResult cached_reference_piece(int kind, const ModelParams& params,
                                   double cap, double aux, double eval_tol,
                                   const QuadratureSpec& spec) {
    PieceKey key{kind, params.e0, params.b, params.r0, cap, aux, eval_tol};
    {
        std::lock_guard<std::mutex> lock(piece_mutex);
        auto it = piece_cache().find(key);
        if (it != piece_cache().end()) return it->second;
    }
    // Reference field: 5 cells, switch far to the right of every cached
    // piece except the switch patch itself (which sits at 4P).
    PeriodicDislocationField ref{params, 5, 1.0};
    MollifiedField mf;
    mf.base = std::make_shared<StrainField>(ref);
    mf.spec.r0 = params.r0;
    StrainField field(mf);
    SymIntegrand integrand{&field, std::get_if<MollifiedField>(&field.as_variant()),
                           eval_tol};
    const double P = params.period();
    const double r0 = params.r0;
    const double pr = 8.0 * r0;  // patch radius
    Region2D region;
    switch (kind) {
        case kInteriorPatch:
            region = {2.0 * P - pr, 2.0 * P + pr, 0.0, std::min(9.0 * r0, cap)};
            break;
        case kInteriorSliver:
            region = {2.0 * P - pr, 2.0 * P + pr, 9.0 * r0, cap};
            break;
        case kSwitchPatch:
            region = {4.0 * P - pr, 4.0 * P + pr, 0.0, std::min(9.0 * r0, cap)};
            break;
        case kSwitchSliver:
            region = {4.0 * P - pr, 4.0 * P + pr, 9.0 * r0, cap};
            break;
        case kPhantomMain:  // aux = delta (ramp width); plateau right of it
            region = {aux, pr, 0.0, std::min(9.0 * r0, cap)};
            break;
        case kSlab:
            region = {pr, P - pr, 0.0, cap};
            break;
        default:
            throw std::logic_error("unknown piece kind");
    }
    PieceResult out = integrate_piece(integrand, region, spec);
    std::lock_guard<std::mutex> lock(piece_mutex);
    piece_cache().emplace(key, out);
    return out;
}

// Matches the Step-1 trapezoid built for island length L: breakpoints
// {(0,0),(delta,hbar),(L-delta,hbar),(L,0)[,(1,0)]}.
bool is_step1_trapezoid(const Profile& profile, double L, double delta,
                        double hbar) {
    const auto& pts = profile.breakpoints();
    if (pts.size() != 4 && pts.size() != 5) return false;
    auto close_to = [](double u, double v) {
        return std::abs(u - v) <= 1e-12 * std::max({1.0, std::abs(u), std::abs(v)});
    };
    if (!close_to(pts[1].x, delta) || !close_to(pts[1].h, hbar)) return false;
    if (!close_to(pts[2].x, L - delta) || !close_to(pts[2].h, hbar)) return false;
    if (!close_to(pts[3].x, L) || pts[3].h != 0.0) return false;
    if (pts.size() == 5 && pts[4].h != 0.0) return false;
    return true;
}

// Assembled elastic energy of the mollified periodic construction over the
// Step-1 trapezoid: periodicity collapses the x-extent to O(1) distinct
// integrals regardless of the core count.
bool assemble_periodic_elastic(const MollifiedField& moll,
                               const PeriodicDislocationField& base,
                               const Profile& profile,
                               const QuadratureSpec& spec, ElasticResult* out) {
    const ModelParams& params = base.params;
    const double P = base.period();
    const double r0 = params.r0;
    if (moll.spec.r0 != r0) return false;
    if (!(P >= 18.0 * r0)) return false;
    if (base.k < 2) return false;
    const double L = base.L;
    const auto [delta, hbar] = trapezoid_shape(L, params);
    if (!is_step1_trapezoid(profile, L, delta, hbar)) return false;
    if (!(hbar >= 4.0 * r0)) return false;

    const double cap = std::min(hbar, 4.0 * P);
    const double cap_patch = std::min(hbar, 9.0 * r0);
    const double pr = 8.0 * r0;
    const double x_sw = base.switch_x();
    const double eval_tol = energy_eval_tol(moll, spec.field_tol_factor);
    const long long n_interior = base.k - 2;  // cores 1..k-2
    const long long n_slabs = base.k - 1;     // gaps between cores 0..k-1

    QuadratureSpec piece_spec = spec;
    piece_spec.rel_tol = std::max(spec.rel_tol, 1e-4);
    piece_spec.abs_tol = 0.0;

    StrainField self(moll);
    SymIntegrand integrand{&self, &moll, eval_tol};

    double value = 0.0, error = 0.0;
    bool ok = true;
    auto add = [&](const PieceResult& r, double count) {
        value += count * r.value;
        error += count * r.error;
        ok = ok && r.converged;
    };

    add(cached_reference_piece(kSlab, params, cap, 0.0, eval_tol, piece_spec),
        static_cast<double>(n_slabs));
    if (n_interior > 0) {
        add(cached_reference_piece(kInteriorPatch, params, cap_patch, 0.0,
                                   eval_tol, piece_spec),
            static_cast<double>(n_interior));
        if (cap > 9.0 * r0)
            add(cached_reference_piece(kInteriorSliver, params, cap, 0.0,
                                       eval_tol, piece_spec),
                static_cast<double>(n_interior));
    }
    add(cached_reference_piece(kSwitchPatch, params, cap_patch, 0.0, eval_tol,
                               piece_spec),
        1.0);
    if (cap > 9.0 * r0)
        add(cached_reference_piece(kSwitchSliver, params, cap, 0.0, eval_tol,
                                   piece_spec),
            1.0);
    add(cached_reference_piece(kPhantomMain, params, cap_patch, delta, eval_tol,
                               piece_spec),
        1.0);

    // Row-specific pieces: the ramp strip at the left edge, the sliver above
    // the phantom patch, and the dislocation-free tail with the fall ramp.
    {
        Region2D ramp{0.0, delta, 0.0, cap_patch, &profile};
        add(integrate_piece(integrand, ramp, piece_spec), 1.0);
    }
    if (cap > 9.0 * r0) {
        Region2D ph_sliver{0.0, pr, 9.0 * r0, cap, &profile};
        add(integrate_piece(integrand, ph_sliver, piece_spec), 1.0);
    }
    {
        const double cap_tail = std::min(hbar, (L - x_sw) + 2.0 * r0);
        Region2D tail{x_sw + pr, L, 0.0, cap_tail, &profile};
        add(integrate_piece(integrand, tail, piece_spec), 1.0);
    }

    out->value = value;
    out->error = error;
    out->converged = ok;
    return true;
}

}  // namespace

ElasticResult elastic_energy(const StrainField& field, const Profile& profile,
                             double c1, const QuadratureSpec& spec) {
    if (!(c1 > 0.0 && c1 <= 1.0))
        throw std::domain_error("c1 must lie in (0, 1]");
    ElasticResult res;
    const auto* moll = std::get_if<MollifiedField>(&field.as_variant());
    const PeriodicDislocationField* base =
        moll ? std::get_if<PeriodicDislocationField>(moll->base.get()) : nullptr;

    bool assembled = false;
    if (spec.allow_construction_assembly && moll && base)
        assembled = assemble_periodic_elastic(*moll, *base, profile, spec, &res);

    if (!assembled) {
        const double top =
            std::min(profile.max_height(), field_ceiling(field) + 1e-30);
        if (top > 0.0) {
            SymIntegrand integrand{&field, moll,
                                   moll ? energy_eval_tol(*moll, spec.field_tol_factor)
                                        : -1.0};
            const auto sup = profile.support();
            Region2D region{sup.empty ? 0.0 : sup.left,
                            sup.empty ? 1.0 : sup.right, 0.0, top, &profile};
            auto r = integrate_piece(integrand, region, spec);
            res.value = r.value;
            res.error = r.error;
            res.converged = r.converged;
        }
    }
    if (!res.converged && spec.throw_on_nonconvergence) {
        std::ostringstream os;
        os << "elastic energy quadrature did not converge; estimate "
           << res.error << " on value " << res.value;
        throw std::runtime_error(os.str());
    }
    res.lower_general = c1 * res.value;
    res.upper_general = res.value / c1;
    return res;
}

EnergyBreakdown total_energy(const Profile& profile, const StrainField& field,
                             const DislocationMeasure& sigma,
                             const ModelParams& params,
                             const QuadratureSpec& spec) {
    params.validate();
    const auto adm = check_admissible_profile(profile, params.d);
    if (!adm.endpoints_zero)
        throw std::domain_error("inadmissible configuration: h(0) = h(1) = 0 violated");
    if (!adm.nonnegative)
        throw std::domain_error("inadmissible configuration: h >= 0 violated");
    if (!adm.volume_ok) {
        std::ostringstream os;
        os << "inadmissible configuration: volume constraint violated, got "
           << adm.volume << " expected " << params.d;
        throw std::domain_error(os.str());
    }
    sigma.require_distinct_cores();
    if (!sigma.empty() && sigma.b != params.b)
        throw std::domain_error(
            "inadmissible configuration: Burgers magnitude differs from params");
    if (!sigma.admissible_for(profile, params.r0))
        throw std::domain_error(
            "inadmissible configuration: some core ball B_r0(p) leaves Omega_h");
    if (const auto* moll = std::get_if<MollifiedField>(&field.as_variant())) {
        if (const auto* base = std::get_if<PeriodicDislocationField>(moll->base.get())) {
            if (static_cast<long long>(sigma.count()) !=
                std::max<long long>(base->k - 1, 0))
                throw std::domain_error(
                    "inadmissible configuration: field core count differs from sigma");
        }
    }

    EnergyBreakdown out;
    out.surface = surface_energy(profile, params.gamma);
    auto elastic = elastic_energy(field, profile, params.c1, spec);
    out.elastic = elastic.value;
    out.elastic_quadrature_error = elastic.error;
    out.nucleation = nucleation_energy(sigma, params.c0);
    out.total = out.surface + out.elastic + out.nucleation;
    return out;
}

double circulation(const StrainField& field, Vec2 center, double radius,
                   const QuadratureSpec& spec) {
    if (!(radius > 0.0)) throw std::domain_error("circulation: radius must be > 0");
    if (const auto* sharp =
            std::get_if<PeriodicDislocationField>(&field.as_variant())) {
        // The unmollified field jumps across the rays {i b/e0} x (-inf, r0);
        // a circle meeting one has no well-defined line integral.
        const double P = sharp->period();
        const long long i_lo =
            static_cast<long long>(std::ceil((center.x - radius) / P));
        const long long i_hi =
            static_cast<long long>(std::floor((center.x + radius) / P));
        for (long long i = i_lo; i <= i_hi; ++i) {
            if (i > sharp->k - 1) break;
            const double dx = std::abs(i * P - center.x);
            const double reach =
                center.y - std::sqrt(std::max(0.0, radius * radius - dx * dx));
            if (dx <= radius && reach < sharp->params.r0)
                throw std::domain_error(
                    "circulation: circle crosses a defect jump ray of the "
                    "unmollified field");
        }
    }
    auto f = [&](double theta) {
        const Vec2 p{center.x + radius * std::cos(theta),
                     center.y + radius * std::sin(theta)};
        const Vec2 tau{-std::sin(theta), std::cos(theta)};
        const Mat2 H = evaluate(field, p);
        return (H.a11 * tau.x + H.a12 * tau.y) * radius;
    };
    const double tol = std::max(spec.abs_tol, 0.0);
    auto res = integrate_periodic(f, 2.0 * M_PI, tol,
                                  std::max(spec.rel_tol, 1e-9), 64, 14);
    return res.value;
}

double curl_residual(const StrainField& field, const DislocationMeasure& sigma,
                     double r0, std::span<const Vec2> samples, double step) {
    if (!(step > 0.0) || step > r0 / 100.0)
        throw std::domain_error("curl_residual: step must satisfy 0 < step <= r0/100");
    MollifierSpec spec{r0};
    double worst = 0.0;
    for (const Vec2 z : samples) {
        const Mat2 xp = evaluate(field, {z.x + step, z.y});
        const Mat2 xm = evaluate(field, {z.x - step, z.y});
        const Mat2 yp = evaluate(field, {z.x, z.y + step});
        const Mat2 ym = evaluate(field, {z.x, z.y - step});
        const double curl =
            (xp.a12 - xm.a12) / (2.0 * step) - (yp.a11 - ym.a11) / (2.0 * step);
        double reference = 0.0;
        for (const Vec2& p : sigma.cores) reference += spec.value(z - p);
        reference *= sigma.b;
        worst = std::max(worst, std::abs(curl - reference));
    }
    return worst;
}

}  // namespace episcale
