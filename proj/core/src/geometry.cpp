#include "episcale/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace episcale {

double norm(Vec2 a) { return std::hypot(a.x, a.y); }
double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double norm2(const Mat2& m) {
    return m.a11 * m.a11 + m.a12 * m.a12 + m.a21 * m.a21 + m.a22 * m.a22;
}

double sym_norm2(const Mat2& m) {
    const double off = 0.5 * (m.a12 + m.a21);
    return m.a11 * m.a11 + m.a22 * m.a22 + 2.0 * off * off;
}

double frobenius(const Mat2& m) { return std::sqrt(norm2(m)); }

bool ModelParams::construction_valid() const { return b >= 4.0 * r0 * e0; }
bool ModelParams::theorem_valid() const { return b >= kTheoremRatio * r0 * e0; }

namespace {

[[noreturn]] void fail_domain(const std::string& msg) {
    throw std::domain_error(msg);
}

}  // namespace

void ModelParams::validate() const {
    std::ostringstream os;
    if (!(gamma > 0.0)) fail_domain("gamma must be > 0");
    if (!(e0 > 0.0)) fail_domain("e0 must be > 0");
    if (!(b > 0.0)) fail_domain("b must be > 0");
    if (!(d > 0.0)) fail_domain("d must be > 0");
    if (!(r0 > 0.0 && r0 <= 1.0)) fail_domain("r0 must lie in (0, 1]");
    if (!(c0 > 0.0)) fail_domain("c0 must be > 0");
    if (!(c1 > 0.0 && c1 <= 1.0)) fail_domain("c1 must lie in (0, 1]");
}

void ModelParams::require_construction_valid() const {
    validate();
    if (!construction_valid()) {
        std::ostringstream os;
        os << "construction hypothesis b/e0 >= 4 r0 violated: b/e0 = "
           << b / e0 << ", 4 r0 = " << 4.0 * r0;
        fail_domain(os.str());
    }
}

void ModelParams::require_theorem_valid() const {
    validate();
    if (!theorem_valid()) {
        std::ostringstream os;
        os << "scaling-law hypothesis b/e0 >= 64^4 r0 violated: b/e0 = "
           << b / e0 << ", 64^4 r0 = " << kTheoremRatio * r0;
        fail_domain(os.str());
    }
}

Profile::Profile(std::vector<Breakpoint> breakpoints) : pts_(std::move(breakpoints)) {
    if (pts_.size() < 2) throw std::invalid_argument("profile needs at least two breakpoints");
    if (pts_.front().x != 0.0 || pts_.back().x != 1.0)
        throw std::invalid_argument("profile must span [0,1]");
    if (pts_.front().h != 0.0 || pts_.back().h != 0.0)
        throw std::invalid_argument("profile must satisfy h(0) = h(1) = 0");
    for (std::size_t i = 0; i < pts_.size(); ++i) {
        if (!(pts_[i].h >= 0.0)) throw std::invalid_argument("profile heights must be >= 0");
        if (i > 0 && !(pts_[i].x > pts_[i - 1].x))
            throw std::invalid_argument("profile abscissae must be strictly increasing");
    }
}

double Profile::value(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 0.0;
    auto it = std::upper_bound(pts_.begin(), pts_.end(), x,
                               [](double v, const Breakpoint& p) { return v < p.x; });
    const Breakpoint& hi = *it;
    const Breakpoint& lo = *(it - 1);
    const double t = (x - lo.x) / (hi.x - lo.x);
    return lo.h + t * (hi.h - lo.h);
}

double Profile::lipschitz_constant() const {
    double lip = 0.0;
    for (std::size_t i = 1; i < pts_.size(); ++i) {
        const double s = (pts_[i].h - pts_[i - 1].h) / (pts_[i].x - pts_[i - 1].x);
        lip = std::max(lip, std::abs(s));
    }
    return lip;
}

double Profile::integral() const { return integral(0.0, 1.0); }

double Profile::integral(double a, double b) const {
    a = std::max(a, 0.0);
    b = std::min(b, 1.0);
    if (!(b > a)) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 1; i < pts_.size(); ++i) {
        const double xl = pts_[i - 1].x, xr = pts_[i].x;
        const double lo = std::max(a, xl), hi = std::min(b, xr);
        if (!(hi > lo)) continue;
        const double slope = (pts_[i].h - pts_[i - 1].h) / (xr - xl);
        const double hlo = pts_[i - 1].h + slope * (lo - xl);
        const double hhi = pts_[i - 1].h + slope * (hi - xl);
        sum += 0.5 * (hlo + hhi) * (hi - lo);
    }
    return sum;
}

double Profile::min_on(double a, double b) const {
    a = std::max(a, 0.0);
    b = std::min(b, 1.0);
    if (!(b >= a)) return 0.0;
    double m = std::numeric_limits<double>::infinity();
    m = std::min(m, value(a));
    m = std::min(m, value(b));
    for (const auto& p : pts_)
        if (p.x > a && p.x < b) m = std::min(m, p.h);
    return m;
}

double Profile::max_height() const {
    double m = 0.0;
    for (const auto& p : pts_) m = std::max(m, p.h);
    return m;
}

Profile::Support Profile::support() const {
    const auto comps = support_components();
    if (comps.empty()) return {};
    return {comps.front().left, comps.back().right, false};
}

std::vector<Profile::Support> Profile::support_components() const {
    // Zero crossings of a piecewise-linear function; components of {h > 0}.
    std::vector<Support> out;
    bool open = false;
    double left = 0.0;
    for (std::size_t i = 1; i < pts_.size(); ++i) {
        const auto& p0 = pts_[i - 1];
        const auto& p1 = pts_[i];
        if (!open) {
            if (p0.h > 0.0) {  // can only happen at i==1 via p0, handled below
                open = true;
                left = p0.x;
            } else if (p1.h > 0.0) {
                open = true;
                left = p0.x;  // h vanishes at p0 and rises on this segment
            } else {
                continue;
            }
        }
        // Look for a return to zero at or inside this segment's right part.
        if (open && p1.h == 0.0) {
            out.push_back({left, p1.x, false});
            open = false;
        }
    }
    if (open) out.push_back({left, pts_.back().x, false});
    return out;
}

namespace {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    if (len2 == 0.0) return dist(p, a);
    double t = ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return dist(p, a + t * ab);
}

}  // namespace

bool Profile::contains_ball(Vec2 p, double r) const {
    if (p.x - r < 0.0 || p.x + r > 1.0) return false;
    if (p.y - r < 0.0) return false;
    if (!(p.y < value(p.x))) return false;
    // Distance from the center to the graph of h must be at least r.
    for (std::size_t i = 1; i < pts_.size(); ++i) {
        const Vec2 a{pts_[i - 1].x, pts_[i - 1].h};
        const Vec2 b{pts_[i].x, pts_[i].h};
        if (b.x < p.x - r || a.x > p.x + r) continue;
        if (point_segment_distance(p, a, b) < r) return false;
    }
    return true;
}

TrapezoidShape trapezoid_shape(double L, const ModelParams& params) {
    const double delta = std::min(params.r0, L) / 16.0;
    return {delta, params.d / (L - delta)};
}

Profile build_trapezoid_profile(double L, const ModelParams& params) {
    params.validate();
    // The profile itself is admissible for any island length up to the unit
    // base; the stronger Step-1 bound L <= d/(4 r0) is enforced where
    // dislocations are placed (it guarantees hbar >= 4 r0 for containment).
    if (!(L > 0.0 && L <= 1.0)) {
        std::ostringstream os;
        os << "island length L must satisfy 0 < L <= 1; got L = " << L;
        throw std::domain_error(os.str());
    }
    const auto [delta, hbar] = trapezoid_shape(L, params);
    std::vector<Profile::Breakpoint> pts;
    pts.push_back({0.0, 0.0});
    pts.push_back({delta, hbar});
    pts.push_back({L - delta, hbar});
    if (L < 1.0) {
        pts.push_back({L, 0.0});
        pts.push_back({1.0, 0.0});
    } else {
        pts.push_back({1.0, 0.0});
    }
    return Profile(std::move(pts));
}

double surface_energy(const Profile& profile, double gamma) {
    const auto& pts = profile.breakpoints();
    double sum = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double dx = pts[i].x - pts[i - 1].x;
        const double dh = pts[i].h - pts[i - 1].h;
        sum += std::hypot(dx, dh);
    }
    return gamma * sum;
}

AdmissibilityReport check_admissible_profile(const Profile& profile, double d,
                                             double rel_tol) {
    AdmissibilityReport rep;
    const auto& pts = profile.breakpoints();
    rep.endpoints_zero = pts.front().h == 0.0 && pts.back().h == 0.0;
    rep.nonnegative = std::all_of(pts.begin(), pts.end(),
                                  [](const auto& p) { return p.h >= 0.0; });
    rep.volume = profile.integral();
    rep.volume_error = std::abs(rep.volume - d);
    rep.volume_ok = rep.volume_error <= rel_tol * std::abs(d);
    return rep;
}

void BoxFamily::validate(const Profile& profile) const {
    double prev_right = -std::numeric_limits<double>::infinity();
    for (const auto& box : boxes) {
        if (!(box.l > 0.0)) throw std::domain_error("box side must be > 0");
        if (box.x < prev_right - 1e-14)
            throw std::domain_error("boxes must be ordered and disjoint");
        prev_right = box.x + box.l;
        if (box.x < 0.0 || box.x + box.l > 1.0 + 1e-14)
            throw std::domain_error("box exceeds the unit interval");
        // Open square containment: h >= l on the closed interval suffices.
        if (profile.min_on(box.x, box.x + box.l) < box.l - 1e-14)
            throw std::domain_error("box square not contained in Omega_h");
    }
}

IsoperimetricResult isoperimetric_bound(const Profile& profile,
                                        const BoxFamily& boxes, double gamma,
                                        double tol) {
    boxes.validate(profile);
    const double lhs = surface_energy(profile, 1.0);
    double dJ = 0.0, LJ = 0.0;
    for (const auto& box : boxes.boxes) {
        dJ += profile.integral(box.x, box.x + box.l);
        LJ += box.l;
    }
    const double rhs = LJ > 0.0 ? 2.0 * dJ / LJ : 0.0;
    (void)gamma;  // both sides scale by gamma; compare the geometric quantities
    return {lhs, rhs, lhs >= rhs - tol};
}

double inscribed_square_size(const Profile& profile, double x) {
    const double h0 = profile.value(x);
    if (!(h0 > 0.0)) return 0.0;
    const double cap = 1.0 - x;
    // phi(l) = h(x+l) sampled at its breakpoints; affine in between. The
    // running minimum m(l) = min_{[0,l]} phi is piecewise linear and
    // non-increasing, so m(l) = l has a unique root (or the cap binds).
    std::vector<std::pair<double, double>> samples;
    samples.emplace_back(0.0, h0);
    for (const auto& p : profile.breakpoints())
        if (p.x > x && p.x < x + cap) samples.emplace_back(p.x - x, p.h);
    samples.emplace_back(cap, profile.value(x + cap));

    double m = h0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const auto [l0, f0] = samples[i - 1];
        const auto [l1, f1] = samples[i];
        if (!(l1 > l0)) continue;
        const double slope = (f1 - f0) / (l1 - l0);
        // m stays constant until the (descending) edge drops below it.
        double l_c = l1;
        if (slope < 0.0) l_c = f0 > m ? std::min(l1, l0 + (m - f0) / slope) : l0;
        if (m >= l0 && m <= l_c) return m;  // root on the flat piece
        if (slope < 0.0 && l_c < l1) {
            // m(l) = f0 + slope (l - l0) on [l_c, l1]; solve m(l) = l.
            const double root = (f0 - slope * l0) / (1.0 - slope);
            if (root >= l_c - 1e-15 && root <= l1 + 1e-15)
                return std::clamp(root, 0.0, cap);
            m = f0 + slope * (l1 - l0);
        }
    }
    return cap;
}

}  // namespace episcale
