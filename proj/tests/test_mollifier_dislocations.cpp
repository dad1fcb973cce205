#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "episcale/dislocations.hpp"
#include "episcale/mollifier.hpp"
#include "episcale/quadrature.hpp"
#include "episcale/rng.hpp"

using namespace episcale;

TEST_CASE("mollifier: support and unit mass") {
    MollifierSpec spec{0.1};
    CHECK(spec.value({0.1, 0.0}) == 0.0);
    CHECK(spec.value({0.09, 0.05}) == 0.0);  // |x| > r0
    CHECK(spec.value({0.05, 0.0}) > 0.0);

    // independent 2D quadrature of the mass over the bounding square
    for (double r0 : {1e-3, 1e-2, 0.1, 1.0}) {
        MollifierSpec m{r0};
        QuadratureSpec qs;
        qs.rel_tol = 1e-11;
        Region2D sq{-r0, r0, -r0, r0, nullptr};
        auto mass = integrate_2d_scalar([&](Vec2 p) { return m.value(p); }, sq, qs);
        CHECK(mass.value == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("mollifier: scaling identity against the reference bump") {
    Rng rng(99);
    for (int i = 0; i < 100; ++i) {
        const double r0 = rng.log_uniform(1e-3, 1.0);
        MollifierSpec spec{r0};
        const double ang = rng.uniform(0.0, 2 * M_PI);
        const double rho = rng.uniform(0.0, 1.3) * r0;
        const Vec2 x{rho * std::cos(ang), rho * std::sin(ang)};
        const double direct = spec.value(x);
        const double scaled = MollifierSpec::j1(rho / r0) / (r0 * r0);
        CHECK(direct == doctest::Approx(scaled).epsilon(1e-12));
    }
}

TEST_CASE("core constant: cumulative trapezoid oracle and endpoint values") {
    // integrand(1) = m(1)^2/(2 pi) = 1/(2 pi)
    CHECK(core_energy_integrand(1.0) ==
          doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-10));

    // integrand <= pi J1(0)^2 t^3 / 2 (quadratic mass growth near 0)
    const double c_bound = M_PI * MollifierSpec::j1(0.0) * MollifierSpec::j1(0.0) / 2.0;
    for (double t : {1e-3, 1e-2, 0.1, 0.3, 0.7, 1.0})
        CHECK(core_energy_integrand(t) <= c_bound * t * t * t * (1.0 + 1e-9));

    // 10^6-point cumulative trapezoid as an independent oracle
    const int n = 1000000;
    const double h = 1.0 / n;
    const double norm = MollifierSpec::normalization();
    double mass = 0.0;
    double integral = 0.0;
    double prev_rad = 0.0;  // s * j1_raw(s) at s = 0
    double prev_f = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double t = i * h;
        const double rad = t * MollifierSpec::j1_raw(t);
        mass += 0.5 * (prev_rad + rad) * h;
        prev_rad = rad;
        const double m_t = norm * 2.0 * M_PI * mass;
        const double f = m_t * m_t / (2.0 * M_PI * t);
        integral += 0.5 * (prev_f + f) * h;
        prev_f = f;
    }
    auto res = core_energy_constant(1e-11);
    CHECK(res.value == doctest::Approx(integral).epsilon(1e-7));
    CHECK(res.value > 0.0);
    CHECK(res.value < 1.0 / (2.0 * M_PI));  // integrand below its t=1 value
}

TEST_CASE("place_equidistant: explicit arithmetic") {
    ModelParams p;
    p.e0 = 1.0;
    p.b = 1.0 / 8;
    p.r0 = 1.0 / 64;
    p.d = 1.0;
    auto sigma = place_equidistant(0.5, p);
    REQUIRE(sigma.count() == 3);
    CHECK(sigma.cores[0].x == doctest::Approx(1.0 / 8).epsilon(1e-16));
    CHECK(sigma.cores[1].x == doctest::Approx(2.0 / 8).epsilon(1e-16));
    CHECK(sigma.cores[2].x == doctest::Approx(3.0 / 8).epsilon(1e-16));
    for (const auto& c : sigma.cores) CHECK(c.y == p.r0);
    CHECK(dislocation_count_k(0.5, p) == 4);
}

TEST_CASE("place_equidistant: L e0 < b yields the empty measure") {
    ModelParams p;
    p.e0 = 1.0;
    p.b = 0.25;
    p.r0 = 1e-3;
    p.d = 1.0;
    auto sigma = place_equidistant(0.2, p);
    CHECK(sigma.empty());
    CHECK(dislocation_count_k(0.2, p) == 0);
}

TEST_CASE("place_equidistant: containment in the Step-1 trapezoid") {
    ModelParams p;
    p.e0 = 1.0;
    p.b = 1.0 / 8;
    p.r0 = 1.0 / 64;
    p.d = 1.0;
    Profile prof = build_trapezoid_profile(0.5, p);
    auto sigma = place_equidistant(0.5, p);
    CHECK(sigma.admissible_for(prof, p.r0));
    for (const auto& c : sigma.cores) CHECK(prof.contains_ball(c, p.r0));
}

TEST_CASE("place_equidistant: invalid params raise the named bound") {
    ModelParams p;
    p.e0 = 1.0;
    p.b = 0.01;
    p.r0 = 0.01;  // b/e0 < 4 r0
    p.d = 1.0;
    CHECK_THROWS_WITH_AS(place_equidistant(0.5, p),
                         doctest::Contains("b/e0 >= 4 r0"), std::domain_error);
}

TEST_CASE("place_equidistant: randomized spacing and containment") {
    Rng rng(31337);
    for (int i = 0; i < 50; ++i) {
        ModelParams p;
        p.e0 = rng.log_uniform(0.2, 5.0);
        p.b = p.e0 * rng.log_uniform(4.0, 500.0) * 1e-3;
        p.r0 = (p.b / p.e0) / rng.log_uniform(4.0, 1000.0);
        p.d = rng.log_uniform(0.5, 5.0);
        const double Lmax = std::min(1.0, p.d / (4.0 * p.r0));
        const double L = Lmax * rng.uniform(0.2, 1.0);
        if (!p.construction_valid()) continue;
        auto sigma = place_equidistant(L, p);
        Profile prof = build_trapezoid_profile(L, p);
        CHECK(sigma.admissible_for(prof, p.r0));
        const double spacing = p.b / p.e0;
        for (std::size_t j = 1; j < sigma.cores.size(); ++j) {
            const double gap = sigma.cores[j].x - sigma.cores[j - 1].x;
            CHECK(gap == doctest::Approx(spacing).epsilon(1e-12));
        }
    }
}

TEST_CASE("nucleation energy") {
    DislocationMeasure sigma;
    sigma.b = 1.0 / 8;
    sigma.cores = {{0.1, 0.01}, {0.2, 0.01}, {0.3, 0.01}};
    CHECK(nucleation_energy(sigma, 1.0) == doctest::Approx(3.0 / 64).epsilon(1e-16));
    CHECK(nucleation_energy(DislocationMeasure{}, 1.0) == 0.0);
}

TEST_CASE("nucleation energy: Step-2 bound c0 (k-1) b^2 <= c0 e0 b L") {
    ModelParams p;
    p.e0 = 1.0;
    p.b = 1.0 / 8;
    p.r0 = 1.0 / 64;
    p.d = 1.0;
    const double L = 0.5;
    auto sigma = place_equidistant(L, p);
    CHECK(nucleation_energy(sigma, p.c0) <= p.c0 * p.e0 * p.b * L + 1e-16);
}

TEST_CASE("nucleation energy: additive under disjoint union") {
    Rng rng(5);
    DislocationMeasure a, b;
    a.b = b.b = 0.25;
    for (int i = 0; i < 5; ++i) a.cores.push_back(rng.point(0, 1, 0, 1));
    for (int i = 0; i < 7; ++i) b.cores.push_back(rng.point(2, 3, 0, 1));
    DislocationMeasure both = a;
    both.cores.insert(both.cores.end(), b.cores.begin(), b.cores.end());
    CHECK(nucleation_energy(both, 1.7) ==
          doctest::Approx(nucleation_energy(a, 1.7) + nucleation_energy(b, 1.7))
              .epsilon(1e-15));
}
