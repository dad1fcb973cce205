#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "episcale/rng.hpp"
#include "episcale/scaling.hpp"

using namespace episcale;

namespace {

ModelParams theorem_params() {
    ModelParams p;
    p.gamma = 1.0;
    p.e0 = 1.0;
    p.b = 1.0;
    p.d = 1.0;
    p.r0 = 1.0 / kTheoremRatio;  // 64^-4
    return p;
}

}  // namespace

TEST_CASE("scaling function: unit parameters give s = 3, elastic branch") {
    auto p = theorem_params();
    auto s = scaling_function_s(p);
    // min{1, sqrt(1 + log 64^4)} = 1
    CHECK(s.elastic_term == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.dislocation_term ==
          doctest::Approx(std::sqrt(1.0 + 4.0 * std::log(64.0))).epsilon(1e-14));
    CHECK(s.value == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(s.branch == Branch::Elastic);
}

TEST_CASE("scaling function: vanishing volume limit collapses to gamma") {
    auto p = theorem_params();
    p.d = 1e-30;
    auto s = scaling_function_s(p);
    CHECK(s.value - p.gamma * (1.0 + p.d) <= 1e-10);
}

TEST_CASE("scaling function: theorem-invalid parameters are rejected") {
    auto p = theorem_params();
    p.r0 = 10.0 / kTheoremRatio;
    CHECK_THROWS_WITH_AS(scaling_function_s(p), doctest::Contains("64^4"),
                         std::domain_error);
}

TEST_CASE("scaling function: monotone in each parameter, branch is an argmin") {
    Rng rng(321);
    SUBCASE("monotone along a d-ray") {
        auto p = theorem_params();
        double prev = 0.0;
        for (int i = 0; i < 20; ++i) {
            p.d = 0.01 * std::pow(10.0, i / 6.0);
            auto s = scaling_function_s(p);
            CHECK(s.value >= prev);
            prev = s.value;
        }
    }
    SUBCASE("randomized monotone pairs and argmin consistency") {
        for (int i = 0; i < 1000; ++i) {
            ModelParams p;
            p.gamma = rng.log_uniform(0.1, 10.0);
            p.e0 = rng.log_uniform(0.1, 10.0);
            p.b = rng.log_uniform(0.1, 10.0);
            p.d = rng.log_uniform(0.01, 100.0);
            p.r0 = p.b / (p.e0 * kTheoremRatio) / rng.log_uniform(1.0, 100.0);
            if (p.r0 > 1.0) continue;
            auto s = scaling_function_s(p);
            CHECK((s.branch == Branch::Elastic) ==
                  (s.elastic_term <= s.dislocation_term));

            // bump one parameter upward; s must not decrease
            ModelParams q = p;
            const int which = static_cast<int>(rng.integer(4));
            const double factor = 1.0 + rng.uniform(0.0, 1.0);
            if (which == 0) q.gamma *= factor;
            if (which == 1) q.d *= factor;
            if (which == 2) q.e0 *= factor;
            if (which == 3) q.b *= factor;
            if (q.theorem_valid()) {
                auto sq = scaling_function_s(q);
                CHECK(sq.value >= s.value * (1.0 - 1e-12));
            }
            // and s is nonincreasing in r0 inside the dislocation branch
            if (s.branch == Branch::Dislocation) {
                ModelParams r = p;
                r.r0 *= 0.5;
                auto sr = scaling_function_s(r);
                CHECK(sr.value >= s.value * (1.0 - 1e-12));
            }
        }
    }
}

TEST_CASE("optimal island length, dislocation construction") {
    SUBCASE("balanced term larger than one selects the unit island") {
        ModelParams p;
        p.gamma = 1.0;
        p.d = 1.0;
        p.e0 = 0.1;
        p.b = 0.01;
        p.r0 = 1e-6;
        const double log_term = 1.0 + 1.0 + std::log(p.b / (p.e0 * p.r0));
        const double balanced = 1.0 / std::sqrt(p.e0 * p.b * log_term);
        CHECK(balanced == doctest::Approx(8.6).epsilon(0.01));
        CHECK(optimal_L_dislocation(p) == 1.0);
    }
    SUBCASE("local optimality of the balanced choice") {
        ModelParams p;
        p.gamma = 1.0;
        p.d = 1e-4;
        p.e0 = 1.0;
        p.b = 1e-3;
        p.r0 = 1e-9;
        const double L = optimal_L_dislocation(p);
        REQUIRE(L < 1.0);
        const double log_term = 1.0 + p.c0 + std::log(p.b / (p.e0 * p.r0));
        auto bound = [&](double l) {
            return p.gamma + p.d * p.gamma / l + l * p.e0 * p.b * log_term;
        };
        CHECK(bound(L) <= bound(0.9 * L) + 1e-12);
        CHECK(bound(L) <= bound(1.1 * L) + 1e-12);
    }
    SUBCASE("tiny volume forces the d/(4 r0) branch") {
        ModelParams p;
        p.gamma = 1.0;
        p.d = 1e-4;
        p.e0 = 1.0;
        p.b = 4.0;
        p.r0 = 0.9;
        CHECK(optimal_L_dislocation(p) ==
              doctest::Approx(p.d / (4.0 * p.r0)).epsilon(1e-15));
    }
}

TEST_CASE("optimal island length, dislocation-free construction") {
    ModelParams p;
    p.gamma = 1.0;
    p.d = 1.0;
    SUBCASE("continuity at e0^2 = d gamma") {
        p.e0 = 1.0;
        CHECK(optimal_L_elastic(p) == 1.0);
    }
    SUBCASE("strong misfit shortens the island") {
        p.e0 = 10.0;
        CHECK(optimal_L_elastic(p) ==
              doctest::Approx(std::pow(10.0, -2.0 / 3.0)).epsilon(1e-14));
    }
    SUBCASE("weak misfit keeps the full base") {
        p.e0 = 0.1;
        CHECK(optimal_L_elastic(p) == 1.0);
    }
}

TEST_CASE("best construction: deep elastic regime picks the dislocation-free island") {
    ModelParams p;
    p.gamma = 1.0;
    p.e0 = 1.0;
    p.b = 0.25;
    p.r0 = 1e-9;
    p.d = 1e-6;
    QuadratureSpec spec;
    spec.rel_tol = 1e-4;
    auto rep = best_construction(p, spec);
    CHECK(rep.s_branch == Branch::Elastic);
    CHECK(!rep.dislocation_won);
    CHECK(rep.ratio > 0.0);
    CHECK(rep.energy.total >= p.gamma * (0.5 + p.d));
}

TEST_CASE("best construction: branch crossover keeps both totals comparable") {
    // bisection on log d for the crossover of the two s-terms
    ModelParams p;
    p.gamma = 1.0;
    p.e0 = 1.0;
    p.b = 1e-3;
    p.r0 = 2e-11;
    auto diff = [&](double logd) {
        ModelParams q = p;
        q.d = std::exp(logd);
        auto s = scaling_function_s(q);
        return s.elastic_term - s.dislocation_term;
    };
    double lo = std::log(1e-8), hi = std::log(1e2);
    REQUIRE(diff(lo) < 0.0);
    REQUIRE(diff(hi) > 0.0);
    while (hi - lo > 1e-10 * std::abs(hi)) {
        const double mid = 0.5 * (lo + hi);
        (diff(mid) < 0.0 ? lo : hi) = mid;
    }
    p.d = std::exp(0.5 * (lo + hi));
    QuadratureSpec spec;
    spec.rel_tol = 1e-3;
    auto rep = best_construction(p, spec);
    const double ratio =
        rep.energy_dislocation.total / rep.energy_free.total;
    CHECK(ratio <= 4.0);
    CHECK(ratio >= 0.25);
}

TEST_CASE("sweep: empty grid, flagged rows, formula self-fit") {
    QuadratureSpec spec;
    spec.rel_tol = 1e-4;
    SUBCASE("empty grid") {
        GridSpec grid;
        grid.d = {};
        CHECK(sweep(grid, spec).empty());
    }
    SUBCASE("invalid point is flagged, others computed") {
        GridSpec grid;
        grid.construction = ConstructionChoice::Elastic;
        grid.gamma = {1.0};
        grid.e0 = {1.0};
        grid.b = {0.25};
        grid.r0 = {1e-9, 0.5};  // second value violates the theorem hypothesis
        grid.d = {0.01};
        auto rows = sweep(grid, spec);
        REQUIRE(rows.size() == 2);
        CHECK(!rows[0].flagged);
        CHECK(rows[1].flagged);
        CHECK(!rows[1].error.empty());
    }
    SUBCASE("fitting the scaling formula to itself gives the exact exponent") {
        GridSpec grid;
        grid.construction = ConstructionChoice::Elastic;
        grid.gamma = {1.0};
        grid.e0 = {20.0};
        grid.b = {0.05};
        grid.r0 = {1e-11};
        grid.d = log_spaced(1e-5, 1e-2, 10);
        auto rows = sweep(grid, spec);
        for (const auto& row : rows) {
            REQUIRE(!row.flagged);
            CHECK(row.branch == Branch::Elastic);
        }
        auto fit = fit_exponent(rows, FitX::D, FitY::SMinTerm, FitModel::PurePower);
        CHECK(fit.slope == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
        CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("sweep: threaded run equals the serial run") {
    QuadratureSpec spec;
    spec.rel_tol = 1e-4;
    GridSpec grid;
    grid.construction = ConstructionChoice::Elastic;
    grid.gamma = {1.0};
    grid.e0 = {20.0};
    grid.b = {0.05};
    grid.r0 = {1e-11};
    grid.d = log_spaced(1e-4, 1e-2, 8);
    auto serial = sweep(grid, spec, 1);
    auto threaded = sweep(grid, spec, 2);
    REQUIRE(serial.size() == threaded.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].energy.total == threaded[i].energy.total);
        CHECK(serial[i].s == threaded[i].s);
    }
}

TEST_CASE("fit_exponent: input validation") {
    std::vector<SweepRow> rows(4);
    CHECK_THROWS_AS(
        fit_exponent(rows, FitX::D, FitY::Total, FitModel::PurePower),
        std::domain_error);
}

TEST_CASE("flat film favorability") {
    ModelParams p;
    p.e0 = 1.0;
    p.b = 0.1;
    p.r0 = 1e-4;
    const double rhs = (p.b / p.e0) * std::log(p.b / (p.e0 * p.r0));
    SUBCASE("comfortably favorable") {
        p.d = 100.0 * rhs * rhs;  // keeps d/L >= L at L = 10 rhs
        auto r = flat_film_favorability(10.0 * rhs, p);
        CHECK(r.favorable);
        CHECK(r.lhs == doctest::Approx(10.0 * rhs).epsilon(1e-12));
    }
    SUBCASE("thin islands are not favorable") {
        p.d = 1.0;
        auto r = flat_film_favorability(0.01 * rhs, p);
        CHECK(!r.favorable);
    }
    SUBCASE("at the boundary the two heuristic energies are comparable") {
        p.d = 1.0;
        auto r = flat_film_favorability(rhs, p);
        CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-12));
        const double ratio = r.elastic_energy_free / r.elastic_energy_disloc;
        CHECK(ratio <= 8.0);
        CHECK(ratio >= 1.0 / 8.0);
    }
}
