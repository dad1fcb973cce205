#include <doctest.h>

#include <cmath>

#include "episcale/geometry.hpp"
#include "episcale/quadrature.hpp"

using namespace episcale;

TEST_CASE("gauss rule integrates polynomials of degree 2n-1 exactly") {
    for (int n : {4, 7, 8, 15, 24}) {
        for (int k = 0; k <= 2 * n - 1; ++k) {
            const double got =
                gauss_1d([k](double x) { return std::pow(x, k); }, -1.0, 1.0, n);
            const double expected = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
            CHECK(got == doctest::Approx(expected).epsilon(1e-13));
        }
    }
}

TEST_CASE("adaptive 1d: smooth, singular, and breakpointed integrands") {
    auto r1 = integrate_1d([](double x) { return x * x * x; }, 0.0, 1.0, 0.0, 1e-12);
    CHECK(r1.value == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(r1.converged);

    // integrable endpoint singularity
    auto r2 = integrate_1d([](double x) { return 1.0 / std::sqrt(x); }, 0.0,
                           1.0, 1e-10, 1e-10);
    CHECK(r2.value == doctest::Approx(2.0).epsilon(1e-8));

    // interior kink seeded by a breakpoint
    const double cuts[] = {0.3};
    auto r3 = integrate_1d([](double x) { return std::abs(x - 0.3); }, 0.0,
                           1.0, 0.0, 1e-12, cuts);
    const double expected = 0.5 * (0.3 * 0.3 + 0.7 * 0.7);
    CHECK(r3.value == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("periodic trapezoid rule") {
    auto r = integrate_periodic(
        [](double t) { return std::sin(t) * std::sin(t); }, 2.0 * M_PI, 0.0,
        1e-12);
    CHECK(r.value == doctest::Approx(M_PI).epsilon(1e-12));
}

TEST_CASE("2d engine: polynomials on rectangles") {
    QuadratureSpec spec;
    spec.rel_tol = 1e-10;
    Region2D rect{0.0, 2.0, -1.0, 1.0, nullptr};
    auto r = integrate_2d_scalar(
        [](Vec2 p) { return p.x * p.x * p.y * p.y + 1.0; }, rect, spec);
    // int x^2 over [0,2] = 8/3; int y^2 over [-1,1] = 2/3; area 4
    CHECK(r.value == doctest::Approx(8.0 / 3 * 2.0 / 3 + 4.0).epsilon(1e-12));
}

TEST_CASE("2d engine: profile clipping reproduces exact areas and moments") {
    ModelParams params;
    params.d = 1.3;
    params.r0 = 0.4;
    Profile prof = build_trapezoid_profile(0.6, params);
    QuadratureSpec spec;
    spec.rel_tol = 1e-11;
    Region2D region{0.0, 1.0, 0.0, prof.max_height() * 1.1, &prof};
    auto area = integrate_2d_scalar([](Vec2) { return 1.0; }, region, spec);
    CHECK(area.value == doctest::Approx(1.3).epsilon(1e-12));

    // second moment against the closed form int h(x)^2/2 dx
    const auto [delta, hbar] = trapezoid_shape(0.6, params);
    const double expected =
        hbar * hbar * (0.6 - 2 * delta) / 2.0 + hbar * hbar * delta / 3.0;
    auto moment = integrate_2d_scalar([](Vec2 p) { return p.y; }, region, spec);
    CHECK(moment.value == doctest::Approx(expected).epsilon(1e-11));
}

TEST_CASE("2d engine: clip level inside a cell is handled") {
    // flat profile piece at height 0.5 with the region extending above it
    Profile prof({{0.0, 0.0}, {0.2, 0.5}, {0.8, 0.5}, {1.0, 0.0}});
    QuadratureSpec spec;
    spec.rel_tol = 1e-11;
    Region2D region{0.0, 1.0, 0.0, 2.0, &prof};
    auto area = integrate_2d_scalar([](Vec2) { return 1.0; }, region, spec);
    CHECK(area.value == doctest::Approx(prof.integral()).epsilon(1e-12));
}

TEST_CASE("annulus engine: areas and the 1/rho^2 log integral") {
    QuadratureSpec spec;
    spec.rel_tol = 1e-10;
    const Vec2 c{0.3, -0.2};
    auto area = integrate_annulus(
        [](Vec2, double* out) { out[0] = 1.0; }, 1, c, 0.5, 2.0, spec);
    CHECK(area.value[0] == doctest::Approx(M_PI * (4.0 - 0.25)).epsilon(1e-11));

    auto logint = integrate_annulus(
        [&](Vec2 p, double* out) {
            const double dx = p.x - c.x, dy = p.y - c.y;
            out[0] = 1.0 / (dx * dx + dy * dy);
        },
        1, c, 0.5, 2.0, spec);
    CHECK(logint.value[0] ==
          doctest::Approx(2.0 * M_PI * std::log(4.0)).epsilon(1e-10));
}

TEST_CASE("2d engine: adaptive refinement localizes a sharp peak") {
    QuadratureSpec spec;
    spec.rel_tol = 1e-8;
    Region2D rect{0.0, 1.0, 0.0, 1.0, nullptr};
    const double s = 1e-3;
    auto r = integrate_2d_scalar(
        [s](Vec2 p) {
            const double dx = p.x - 0.37, dy = p.y - 0.41;
            return std::exp(-(dx * dx + dy * dy) / (2 * s * s));
        },
        rect, spec);
    CHECK(r.value == doctest::Approx(2.0 * M_PI * s * s).epsilon(1e-6));
}
