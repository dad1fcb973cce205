#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "episcale/geometry.hpp"

namespace episcale {

/// Compensated (Kahan) accumulator; keeps reduction error near one ulp.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

/// Gauss-Legendre rule on [-1,1]; nodes/weights computed by Newton iteration
/// and cached per order. Thread-safe.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_rule(int order);

/// Fixed-order Gauss quadrature of f on [a,b].
double gauss_1d(const std::function<double(double)>& f, double a, double b,
                int order);

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
    std::size_t evaluations = 0;
};

/// Globally adaptive 1D quadrature (paired Gauss 7/15 estimates, interval
/// subdivision by worst-first priority). `breakpoints` seeds the initial
/// partition; endpoints a,b are always included.
QuadResult integrate_1d(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, double rel_tol,
                        std::span<const double> breakpoints = {},
                        std::size_t max_intervals = 20000);

/// Trapezoid rule with doubling for smooth periodic integrands on one period.
QuadResult integrate_periodic(const std::function<double(double)>& f,
                              double period, double abs_tol, double rel_tol,
                              int initial_n = 32, int max_doublings = 16);

/// Controls for the 2D adaptive cell-subdivision engine.
/// base_divisions sets the initial grid (cells of roughly
/// max_extent/base_divisions); refinement is driven by the embedded
/// order-vs-half-order difference per cell.
struct QuadratureSpec {
    int base_divisions = 8;
    int max_depth = 40;
    int cell_order = 8;
    double abs_tol = 0.0;  // 0 = purely relative control
    double rel_tol = 1e-6;
    std::size_t max_cells = 400000;
    bool allow_construction_assembly = true;  // periodic-cell reuse in elastic_energy
    bool throw_on_nonconvergence = false;
    double field_tol_factor = 1.0;  // loosens per-point field tolerances inside integrals
};

/// Axis-aligned rectangle, optionally clipped from above by {y < h(x)}.
struct Region2D {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    const Profile* clip = nullptr;
};

struct QuadResultN {
    std::vector<double> value;
    double error = 0.0;
    bool converged = true;
    std::size_t cells = 0;
    std::size_t evaluations = 0;
    std::string worst_cell;  // set when the budget ran out
};

/// Adaptive quadtree integration of n_out simultaneous integrands over a
/// rectangle (optionally profile-clipped). Cells cut by the graph of h are
/// split at breakpoints and y-level crossings and integrated with a trapezoid
/// map, exact for affine tops. Deterministic refinement order.
QuadResultN integrate_2d(const std::function<void(Vec2, double*)>& f,
                         int n_out, const Region2D& region,
                         const QuadratureSpec& spec);

/// Scalar convenience wrapper.
QuadResult integrate_2d_scalar(const std::function<double(Vec2)>& f,
                               const Region2D& region,
                               const QuadratureSpec& spec);

/// Same engine in polar coordinates around `center`: integrates
/// f(center + rho e(theta)) rho over [r_inner, r_outer] x [0, 2pi).
QuadResultN integrate_annulus(const std::function<void(Vec2, double*)>& f,
                              int n_out, Vec2 center, double r_inner,
                              double r_outer, const QuadratureSpec& spec);

}  // namespace episcale
