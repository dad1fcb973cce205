#include "episcale/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace episcale {

namespace {

GaussRule compute_gauss_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p1 = 0.0;
        for (int it = 0; it < 100; ++it) {
            p1 = 1.0;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
            }
            const double dp = n * (x * p1 - p2) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                // one more sweep to polish p1 at the final node
                p1 = 1.0;
                p2 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
                }
                break;
            }
        }
        double p2 = 0.0;
        {
            double a = 1.0, b = 0.0;
            for (int j = 0; j < n; ++j) {
                const double c = b;
                b = a;
                a = ((2.0 * j + 1.0) * x * b - j * c) / (j + 1.0);
            }
            p1 = a;
            p2 = b;
        }
        const double dp = n * (x * p1 - p2) / (x * x - 1.0);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

std::map<int, GaussRule>& rule_cache() {
    static std::map<int, GaussRule> cache;
    return cache;
}
std::mutex rule_mutex;

}  // namespace

const GaussRule& gauss_rule(int order) {
    if (order < 1) throw std::invalid_argument("gauss order must be >= 1");
    std::lock_guard<std::mutex> lock(rule_mutex);
    auto& cache = rule_cache();
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gauss_rule(order)).first;
    return it->second;
}

double gauss_1d(const std::function<double(double)>& f, double a, double b,
                int order) {
    const GaussRule& rule = gauss_rule(order);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    KahanSum sum;
    for (int i = 0; i < order; ++i)
        sum.add(rule.weights[i] * f(mid + half * rule.nodes[i]));
    return half * sum.value();
}

namespace {

struct Interval1D {
    double a, b;
    double value;    // 15-point estimate
    double error;    // |G15 - G7|
    std::size_t id;  // creation order for deterministic tie-breaks
};

struct IntervalWorse {
    bool operator()(const Interval1D& p, const Interval1D& q) const {
        if (p.error != q.error) return p.error < q.error;
        return p.id > q.id;
    }
};

Interval1D make_interval(const std::function<double(double)>& f, double a,
                         double b, std::size_t id, std::size_t& evals) {
    const double g7 = gauss_1d(f, a, b, 7);
    const double g15 = gauss_1d(f, a, b, 15);
    evals += 22;
    return {a, b, g15, std::abs(g15 - g7), id};
}

}  // namespace

QuadResult integrate_1d(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, double rel_tol,
                        std::span<const double> breakpoints,
                        std::size_t max_intervals) {
    QuadResult res;
    if (!(b > a)) return res;
    std::vector<double> cuts{a, b};
    for (double c : breakpoints)
        if (c > a && c < b) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::size_t next_id = 0;
    std::priority_queue<Interval1D, std::vector<Interval1D>, IntervalWorse> heap;
    double total = 0.0, err = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        auto iv = make_interval(f, cuts[i - 1], cuts[i], next_id++, res.evaluations);
        total += iv.value;
        err += iv.error;
        heap.push(iv);
    }
    auto tol = [&] { return std::max(abs_tol, rel_tol * std::abs(total)); };
    double frozen_err = 0.0;
    const double min_width = (b - a) * 1e-14;
    while (err > tol() && heap.size() < max_intervals) {
        Interval1D worst = heap.top();
        if (worst.error <= 0.0) break;
        heap.pop();
        if (worst.b - worst.a < min_width) {  // do not split further
            err -= worst.error;
            frozen_err += worst.error;
            worst.error = 0.0;
            heap.push(worst);
            continue;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        auto left = make_interval(f, worst.a, mid, next_id++, res.evaluations);
        auto right = make_interval(f, mid, worst.b, next_id++, res.evaluations);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Recompute sums in deterministic (position) order for a stable total.
    std::vector<Interval1D> leaves;
    leaves.reserve(heap.size());
    while (!heap.empty()) {
        leaves.push_back(heap.top());
        heap.pop();
    }
    std::sort(leaves.begin(), leaves.end(),
              [](const Interval1D& p, const Interval1D& q) { return p.a < q.a; });
    KahanSum vsum, esum;
    for (const auto& iv : leaves) {
        vsum.add(iv.value);
        esum.add(iv.error);
    }
    res.value = vsum.value();
    res.error = esum.value() + frozen_err;
    res.converged = res.error <= std::max(abs_tol, rel_tol * std::abs(res.value)) * 1.0000001 ||
                    res.error <= abs_tol;
    return res;
}

QuadResult integrate_periodic(const std::function<double(double)>& f,
                              double period, double abs_tol, double rel_tol,
                              int initial_n, int max_doublings) {
    QuadResult res;
    int n = initial_n;
    auto trap = [&](int m) {
        KahanSum s;
        const double h = period / m;
        for (int i = 0; i < m; ++i) s.add(f(i * h));
        res.evaluations += m;
        return h * s.value();
    };
    double prev = trap(n);
    for (int k = 0; k < max_doublings; ++k) {
        n *= 2;
        const double cur = trap(n);
        const double diff = std::abs(cur - prev);
        if (diff <= std::max(abs_tol, rel_tol * std::abs(cur))) {
            res.value = cur;
            res.error = diff;
            return res;
        }
        prev = cur;
    }
    res.value = prev;
    res.error = std::abs(prev);
    res.converged = false;
    return res;
}

// ---------------------------------------------------------------------------
// 2D adaptive engine
// ---------------------------------------------------------------------------

namespace {

constexpr int kMaxOut = 8;

struct CellIntegrator {
    const std::function<void(Vec2, double*)>* f;
    int n_out;
    const Profile* clip;
    int order;
    std::size_t evals = 0;

    // Tensor Gauss over [a,b] x [c, t(x)] where t is affine (t_a at x=a,
    // t_b at x=b). Exact map of the reference square; Jacobian (t(x)-c)/(d-c).
    void trapezoid_patch(double a, double b, double c, double ta, double tb,
                         int ord, double* out) {
        const GaussRule& rule = gauss_rule(ord);
        const double xm = 0.5 * (a + b), xh = 0.5 * (b - a);
        for (int k = 0; k < n_out; ++k) out[k] = 0.0;
        double vals[kMaxOut];
        for (int i = 0; i < ord; ++i) {
            const double x = xm + xh * rule.nodes[i];
            const double s = (x - a) / (b - a);
            const double top = ta + s * (tb - ta);
            const double height = top - c;
            if (!(height > 0.0)) continue;
            const double ym = 0.5 * (top + c), yh = 0.5 * height;
            for (int j = 0; j < ord; ++j) {
                const double y = ym + yh * rule.nodes[j];
                (*f)({x, y}, vals);
                ++evals;
                const double w = rule.weights[i] * rule.weights[j] * xh * yh;
                for (int k = 0; k < n_out; ++k) out[k] += w * vals[k];
            }
        }
    }

    // Integral over cell [a,b] x [c,d] intersected with {y < h(x)}.
    void cell(double a, double b, double c, double d, int ord, double* out) {
        for (int k = 0; k < n_out; ++k) out[k] = 0.0;
        if (!clip) {
            trapezoid_patch(a, b, c, d, d, ord, out);
            return;
        }
        // x-partition at profile breakpoints and crossings of h with c and d.
        std::vector<double> xs{a, b};
        const auto& pts = clip->breakpoints();
        for (std::size_t i = 1; i < pts.size(); ++i) {
            const double xl = pts[i - 1].x, xr = pts[i].x;
            if (xr <= a || xl >= b) continue;
            if (xl > a && xl < b) xs.push_back(xl);
            const double hl = pts[i - 1].h, hr = pts[i].h;
            if (hl != hr) {
                for (double level : {c, d}) {
                    const double t = (level - hl) / (hr - hl);
                    if (t > 0.0 && t < 1.0) {
                        const double xc = xl + t * (xr - xl);
                        if (xc > a && xc < b) xs.push_back(xc);
                    }
                }
            }
        }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        double piece[kMaxOut];
        for (std::size_t i = 1; i < xs.size(); ++i) {
            const double u = xs[i - 1], v = xs[i];
            if (!(v > u)) continue;
            const double hu = clip->value(u), hv = clip->value(v);
            const double hmid = clip->value(0.5 * (u + v));
            if (hmid <= c && hu <= c + 1e-300 && hv <= c + 1e-300) continue;
            double ta = std::min(hu, d), tb = std::min(hv, d);
            if (hmid >= d && hu >= d - 1e-300 && hv >= d - 1e-300) {
                ta = d;
                tb = d;
            }
            ta = std::max(ta, c);
            tb = std::max(tb, c);
            if (ta <= c && tb <= c) continue;
            trapezoid_patch(u, v, c, ta, tb, ord, piece);
            for (int k = 0; k < n_out; ++k) out[k] += piece[k];
        }
    }
};

struct Cell2D {
    double a, b, c, d;
    int depth;
    std::array<double, kMaxOut> value;
    double error;
    std::size_t id;
};

struct Cell2DWorse {
    bool operator()(const Cell2D& p, const Cell2D& q) const {
        if (p.error != q.error) return p.error < q.error;
        return p.id > q.id;
    }
};

}  // namespace

QuadResultN integrate_2d(const std::function<void(Vec2, double*)>& f,
                         int n_out, const Region2D& region,
                         const QuadratureSpec& spec) {
    if (n_out < 1 || n_out > kMaxOut)
        throw std::invalid_argument("integrate_2d: unsupported output arity");
    QuadResultN res;
    res.value.assign(n_out, 0.0);
    if (!(region.x1 > region.x0) || !(region.y1 > region.y0)) return res;

    CellIntegrator integ{&f, n_out, region.clip, spec.cell_order};
    const int half_order = std::max(2, spec.cell_order / 2);

    auto make_cell = [&](double a, double b, double c, double d, int depth,
                         std::size_t id) {
        Cell2D cell{a, b, c, d, depth, {}, 0.0, id};
        double coarse[kMaxOut];
        integ.cell(a, b, c, d, spec.cell_order, cell.value.data());
        integ.cell(a, b, c, d, half_order, coarse);
        double err = 0.0;
        for (int k = 0; k < n_out; ++k) err += std::abs(cell.value[k] - coarse[k]);
        cell.error = err;
        return cell;
    };

    const double w = region.x1 - region.x0, h = region.y1 - region.y0;
    const double target = std::max(w, h) / std::max(1, spec.base_divisions);
    const int nx = std::max<int>(1, static_cast<int>(std::ceil(w / target - 1e-12)));
    const int ny = std::max<int>(1, static_cast<int>(std::ceil(h / target - 1e-12)));

    std::size_t next_id = 0;
    std::priority_queue<Cell2D, std::vector<Cell2D>, Cell2DWorse> heap;
    std::vector<double> total(n_out, 0.0);
    double err_sum = 0.0;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const double a = region.x0 + w * i / nx;
            const double b = region.x0 + w * (i + 1) / nx;
            const double c = region.y0 + h * j / ny;
            const double d = region.y0 + h * (j + 1) / ny;
            auto cell = make_cell(a, b, c, d, 0, next_id++);
            for (int k = 0; k < n_out; ++k) total[k] += cell.value[k];
            err_sum += cell.error;
            heap.push(cell);
        }
    }

    auto tol = [&] {
        return std::max(spec.abs_tol, spec.rel_tol * std::abs(total[0]));
    };
    while (err_sum > tol() && heap.size() + 3 <= spec.max_cells) {
        Cell2D worst = heap.top();
        if (worst.error <= 0.0) break;
        heap.pop();
        if (worst.depth >= spec.max_depth) {
            Cell2D frozen = worst;
            frozen.error = 0.0;  // excluded from the refinement loop
            err_sum -= worst.error;
            heap.push(frozen);
            res.error += worst.error;  // still counted in the final estimate
            continue;
        }
        const double xm = 0.5 * (worst.a + worst.b);
        const double ym = 0.5 * (worst.c + worst.d);
        for (int k = 0; k < n_out; ++k) total[k] -= worst.value[k];
        err_sum -= worst.error;
        const Cell2D children[4] = {
            make_cell(worst.a, xm, worst.c, ym, worst.depth + 1, next_id++),
            make_cell(xm, worst.b, worst.c, ym, worst.depth + 1, next_id++),
            make_cell(worst.a, xm, ym, worst.d, worst.depth + 1, next_id++),
            make_cell(xm, worst.b, ym, worst.d, worst.depth + 1, next_id++)};
        for (const auto& ch : children) {
            for (int k = 0; k < n_out; ++k) total[k] += ch.value[k];
            err_sum += ch.error;
            heap.push(ch);
        }
    }

    std::vector<Cell2D> leaves;
    leaves.reserve(heap.size());
    while (!heap.empty()) {
        leaves.push_back(heap.top());
        heap.pop();
    }
    std::sort(leaves.begin(), leaves.end(), [](const Cell2D& p, const Cell2D& q) {
        if (p.a != q.a) return p.a < q.a;
        if (p.c != q.c) return p.c < q.c;
        return p.id < q.id;
    });
    std::vector<KahanSum> sums(n_out);
    KahanSum esum;
    for (const auto& cell : leaves) {
        for (int k = 0; k < n_out; ++k) sums[k].add(cell.value[k]);
        esum.add(cell.error);
    }
    for (int k = 0; k < n_out; ++k) res.value[k] = sums[k].value();
    res.error += esum.value();
    res.cells = leaves.size();
    res.evaluations = integ.evals;
    res.converged =
        res.error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(res.value[0])) * 1.01 + 1e-300;
    if (!res.converged) {
        const auto& worst = *std::max_element(
            leaves.begin(), leaves.end(),
            [](const Cell2D& p, const Cell2D& q) { return p.error < q.error; });
        std::ostringstream os;
        os << "cell [" << worst.a << "," << worst.b << "]x[" << worst.c << ","
           << worst.d << "] depth " << worst.depth << " err " << worst.error;
        res.worst_cell = os.str();
        if (spec.throw_on_nonconvergence)
            throw std::runtime_error("2d quadrature did not converge: " + res.worst_cell);
    }
    return res;
}

QuadResult integrate_2d_scalar(const std::function<double(Vec2)>& f,
                               const Region2D& region,
                               const QuadratureSpec& spec) {
    auto wrapped = [&f](Vec2 p, double* out) { out[0] = f(p); };
    QuadResultN rn = integrate_2d(wrapped, 1, region, spec);
    return {rn.value[0], rn.error, rn.converged, rn.evaluations};
}

QuadResultN integrate_annulus(const std::function<void(Vec2, double*)>& f,
                              int n_out, Vec2 center, double r_inner,
                              double r_outer, const QuadratureSpec& spec) {
    auto polar = [&](Vec2 rt, double* out) {
        const double rho = rt.x, theta = rt.y;
        const Vec2 p{center.x + rho * std::cos(theta), center.y + rho * std::sin(theta)};
        f(p, out);
        for (int k = 0; k < n_out; ++k) out[k] *= rho;
    };
    Region2D param{r_inner, r_outer, 0.0, 2.0 * M_PI, nullptr};
    return integrate_2d(polar, n_out, param, spec);
}

}  // namespace episcale
