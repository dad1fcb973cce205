#include "episcale/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

#include "episcale/quadrature.hpp"

namespace episcale {

namespace {

// Evaluation of the first row of the base field without variant dispatch in
// the hot loop.
struct BaseEval {
    const PeriodicDislocationField* periodic = nullptr;
    const StrainField* generic = nullptr;

    void operator()(Vec2 p, double out[2]) const {
        if (periodic) {
            const double x_switch = periodic->switch_x();
            if (p.x <= x_switch) {
                const double P = periodic->period();
                double x = std::fmod(p.x, P);
                if (x <= 0.0) x += P;
                const ModelParams& mp = periodic->params;
                const double low = mp.r0 * x / P;
                const double high = (mp.r0 / P - 1.0) * x + P;
                if (p.y <= low) {
                    out[0] = mp.e0;
                    out[1] = 0.0;
                } else if (p.y < high) {
                    const double a = mp.r0 / P - 1.0;
                    const double pmx = P - x;
                    out[0] = mp.e0 *
                             ((2.0 * a * x + P - p.y) * pmx + a * x * x +
                              P * x - x * p.y) /
                             (pmx * pmx);
                    out[1] = -mp.e0 * x / pmx;
                } else {
                    out[0] = 0.0;
                    out[1] = 0.0;
                }
            } else {
                const double xi = p.x - x_switch;
                const double e0 = periodic->params.e0;
                if (p.y <= 0.0) {
                    out[0] = e0;
                    out[1] = 0.0;
                } else if (p.y < xi) {
                    out[0] = e0;
                    out[1] = -e0;
                } else {
                    out[0] = 0.0;
                    out[1] = 0.0;
                }
            }
        } else {
            const Mat2 m = evaluate(*generic, p);
            out[0] = m.a11;
            out[1] = m.a12;
        }
    }
};

struct VecInterval {
    double a, b;
    double v0, v1;
    double error;
    std::size_t id;
};

struct VecWorse {
    bool operator()(const VecInterval& p, const VecInterval& q) const {
        if (p.error != q.error) return p.error < q.error;
        return p.id > q.id;
    }
};

// Worst-first adaptive 1D quadrature of a 2-component integrand, paired
// Gauss 7/15 error estimates, seeded with the given breakpoints.
template <class F>
void adapt_vec2(F&& f, double a, double b, const std::vector<double>& cuts,
                double abs_tol, std::size_t max_intervals, double out[2],
                double* err_out) {
    const GaussRule& g7 = gauss_rule(7);
    const GaussRule& g15 = gauss_rule(15);
    auto eval_interval = [&](double lo, double hi, std::size_t id) {
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        double s7[2] = {0, 0}, s15[2] = {0, 0}, v[2];
        for (int i = 0; i < 7; ++i) {
            f(mid + half * g7.nodes[i], v);
            s7[0] += g7.weights[i] * v[0];
            s7[1] += g7.weights[i] * v[1];
        }
        for (int i = 0; i < 15; ++i) {
            f(mid + half * g15.nodes[i], v);
            s15[0] += g15.weights[i] * v[0];
            s15[1] += g15.weights[i] * v[1];
        }
        VecInterval iv;
        iv.a = lo;
        iv.b = hi;
        iv.v0 = half * s15[0];
        iv.v1 = half * s15[1];
        iv.error = half * (std::abs(s15[0] - s7[0]) + std::abs(s15[1] - s7[1]));
        iv.id = id;
        return iv;
    };

    std::vector<double> xs{a, b};
    for (double c : cuts)
        if (c > a && c < b) xs.push_back(c);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::priority_queue<VecInterval, std::vector<VecInterval>, VecWorse> heap;
    std::size_t next_id = 0;
    double err = 0.0;
    double frozen_err = 0.0;
    const double min_width = (b - a) * 1e-12;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        auto iv = eval_interval(xs[i - 1], xs[i], next_id++);
        err += iv.error;
        heap.push(iv);
    }
    while (err > abs_tol && heap.size() < max_intervals) {
        VecInterval worst = heap.top();
        if (worst.error <= 0.0) break;
        heap.pop();
        err -= worst.error;
        if (worst.b - worst.a < min_width) {
            frozen_err += worst.error;
            worst.error = 0.0;
            heap.push(worst);
            continue;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        auto l = eval_interval(worst.a, mid, next_id++);
        auto r = eval_interval(mid, worst.b, next_id++);
        err += l.error + r.error;
        heap.push(l);
        heap.push(r);
    }
    std::vector<VecInterval> leaves;
    leaves.reserve(heap.size());
    while (!heap.empty()) {
        leaves.push_back(heap.top());
        heap.pop();
    }
    std::sort(leaves.begin(), leaves.end(),
              [](const VecInterval& p, const VecInterval& q) { return p.a < q.a; });
    KahanSum s0, s1, se;
    for (const auto& iv : leaves) {
        s0.add(iv.v0);
        s1.add(iv.v1);
        se.add(iv.error);
    }
    out[0] = s0.value();
    out[1] = s1.value();
    *err_out = se.value() + frozen_err;
}

double cross2(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

}  // namespace

ConvResult mollified_value(const MollifiedField& field, Vec2 z, double abs_tol) {
    const StrainField& base = *field.base;
    const double r0 = field.spec.r0;

    BaseEval eval_base;
    eval_base.generic = &base;
    if (const auto* p = std::get_if<PeriodicDislocationField>(&base.as_variant()))
        eval_base.periodic = p;
    if (std::get_if<MollifiedField>(&base.as_variant()))
        throw std::invalid_argument("nested mollification is not supported");

    ConvResult res;
    // The periodic construction vanishes above the cell, so the convolution
    // is exactly zero for y >= 4 b/e0 (and already above y = 2P + r0).
    if (eval_base.periodic && z.y >= 4.0 * eval_base.periodic->period()) {
        res.value = Mat2::zero();
        return res;
    }

    const LocalStructure structure = local_structure(base, z, r0 * (1.0 + 1e-12));
    if (structure == LocalStructure::Constant ||
        structure == LocalStructure::Affine) {
        // Radially symmetric unit-mass kernel: affine fields convolve to
        // their centre value.
        res.value = evaluate(base, z);
        return res;
    }

    const auto lines = interface_lines_near(base, z, r0 * (1.0 + 1e-9));
    const auto singular = singular_points_near(base, z, 1.25 * r0);

    // -- angular panels -----------------------------------------------------
    std::vector<double> angles;
    for (const auto& line : lines) {
        // Line in w-space passes through q0 with direction line.dir.
        const Vec2 q0 = z - line.point;
        const double d_perp = std::abs(cross2(q0, line.dir));
        if (d_perp <= 1e-9 * r0) {
            const double th = std::atan2(line.dir.y, line.dir.x);
            angles.push_back(th);
            angles.push_back(th + M_PI);
        } else if (d_perp < r0) {
            // circle-crossing angles of the line |w| = r0
            const double t0 = -(q0.x * line.dir.x + q0.y * line.dir.y);
            const double span = std::sqrt(std::max(0.0, r0 * r0 - d_perp * d_perp));
            for (double t : {t0 - span, t0 + span}) {
                const Vec2 w = q0 + t * line.dir;
                angles.push_back(std::atan2(w.y, w.x));
            }
        }
    }
    for (const Vec2& s : singular) {
        const Vec2 w = z - s;
        if (norm(w) > 1e-14 * r0) angles.push_back(std::atan2(w.y, w.x));
    }
    for (double& th : angles) {
        th = std::fmod(th, 2.0 * M_PI);
        if (th < 0.0) th += 2.0 * M_PI;
    }
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end(),
                             [](double u, double v) { return std::abs(u - v) < 1e-13; }),
                 angles.end());

    double theta_lo = 0.0, theta_hi = 2.0 * M_PI;
    std::vector<double> theta_cuts;
    if (!angles.empty()) {
        theta_lo = angles.front();
        theta_hi = angles.front() + 2.0 * M_PI;
        for (std::size_t i = 1; i < angles.size(); ++i) theta_cuts.push_back(angles[i]);
    }

    const double tol = abs_tol > 0.0 ? abs_tol : field.tolerance();
    const double tol_ray = tol / 24.0;
    const double j_norm = 1.0 / (r0 * r0);

    // -- radial integral along one ray --------------------------------------
    auto ray_integral = [&](double theta, double out[2]) {
        const Vec2 e{std::cos(theta), std::sin(theta)};
        std::vector<double> rho_cuts;
        for (const auto& line : lines) {
            const Vec2 q0 = z - line.point;
            const double denom = cross2(e, line.dir);
            if (std::abs(denom) < 1e-14) continue;
            const double rho = cross2(q0, line.dir) / denom;
            if (rho > 0.0 && rho < r0) rho_cuts.push_back(rho);
        }
        for (const Vec2& s : singular) {
            const Vec2 w = z - s;
            const double proj = w.x * e.x + w.y * e.y;
            if (proj <= 0.0 || proj >= r0) continue;
            const double impact = std::abs(cross2(w, e));
            rho_cuts.push_back(proj);
            if (impact > 0.0 && impact < r0) {
                if (proj - impact > 0.0) rho_cuts.push_back(proj - impact);
                if (proj + impact < r0) rho_cuts.push_back(proj + impact);
            }
        }
        auto integrand = [&](double rho, double v[2]) {
            const Vec2 p{z.x - rho * e.x, z.y - rho * e.y};
            eval_base(p, v);
            const double wgt = MollifierSpec::j1(rho / r0) * j_norm * rho;
            v[0] *= wgt;
            v[1] *= wgt;
        };
        double err = 0.0;
        adapt_vec2(integrand, 0.0, r0, rho_cuts, tol_ray, 400, out, &err);
    };

    double value[2];
    double theta_err = 0.0;
    adapt_vec2(ray_integral, theta_lo, theta_hi, theta_cuts, tol, 4000, value,
               &theta_err);

    res.value = Mat2{value[0], value[1], 0.0, 0.0};
    res.error = theta_err + 2.0 * M_PI * tol_ray;
    res.converged = res.error <= 4.0 * tol;
    return res;
}

ConvResult mollified_value(const MollifiedField& field, Vec2 z) {
    return mollified_value(field, z, -1.0);
}

}  // namespace episcale
