#include "episcale/scaling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace episcale {

const char* branch_name(Branch b) {
    return b == Branch::Elastic ? "elastic" : "dislocation";
}

ScalingValue scaling_function_s(const ModelParams& p) {
    p.require_theorem_valid();
    const double log_term = 1.0 + std::log(p.b / (p.e0 * p.r0));
    const double elastic = std::cbrt(p.gamma * p.e0 * p.d) *
                           std::cbrt(p.gamma * p.e0 * p.d);  // (gamma e0 d)^{2/3}
    const double disloc = std::sqrt(p.gamma * p.e0 * p.b * p.d * log_term);
    ScalingValue out;
    out.elastic_term = elastic;
    out.dislocation_term = disloc;
    out.branch = elastic <= disloc ? Branch::Elastic : Branch::Dislocation;
    out.value = p.gamma * (1.0 + p.d) + std::min(elastic, disloc);
    return out;
}

double optimal_L_dislocation(const ModelParams& p) {
    p.require_construction_valid();
    const double log_term = 1.0 + p.c0 + std::log(p.b / (p.e0 * p.r0));
    const double balanced = std::sqrt(p.gamma * p.d) / std::sqrt(p.e0 * p.b * log_term);
    return std::min({balanced, 1.0, p.d / (4.0 * p.r0)});
}

double optimal_L_elastic(const ModelParams& p) {
    p.validate();
    if (p.e0 * p.e0 <= p.d * p.gamma) return 1.0;
    return std::cbrt(p.d * p.gamma) / std::cbrt(p.e0 * p.e0);
}

Construction build_dislocation_construction(const ModelParams& params,
                                            double L) {
    params.require_construction_valid();
    if (L <= 0.0) L = optimal_L_dislocation(params);
    L = std::min(L, std::min(1.0, params.d / (4.0 * params.r0)));
    Construction c{build_trapezoid_profile(L, params), StrainField(ZeroField{}),
                   place_equidistant(L, params), L};
    PeriodicDislocationField sharp{params, dislocation_count_k(L, params), L};
    c.field = make_mollified(sharp);
    return c;
}

Construction build_elastic_construction(const ModelParams& params, double L) {
    params.validate();
    if (L <= 0.0) L = optimal_L_elastic(params);
    L = std::min(L, 1.0);
    Construction c{build_trapezoid_profile(L, params), StrainField(ZeroField{}),
                   DislocationMeasure{params.b, {}}, L};
    c.field = StrainField(DislocationFreeField{L, params.e0});
    return c;
}

ScalingReport best_construction(const ModelParams& params,
                                const QuadratureSpec& spec) {
    const ScalingValue s = scaling_function_s(params);
    auto disloc = build_dislocation_construction(params);
    auto free_c = build_elastic_construction(params);
    ScalingReport rep;
    rep.s_value = s.value;
    rep.s_branch = s.branch;
    rep.energy_dislocation =
        total_energy(disloc.profile, disloc.field, disloc.sigma, params, spec);
    rep.energy_free =
        total_energy(free_c.profile, free_c.field, free_c.sigma, params, spec);
    rep.dislocation_won =
        rep.energy_dislocation.total < rep.energy_free.total;
    rep.energy = rep.dislocation_won ? rep.energy_dislocation : rep.energy_free;
    rep.L_chosen = rep.dislocation_won ? disloc.L : free_c.L;
    rep.ratio = rep.energy.total / rep.s_value;
    return rep;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    if (!(lo > 0.0 && hi > lo) || n < 1)
        throw std::invalid_argument("log_spaced needs 0 < lo < hi and n >= 1");
    std::vector<double> out;
    if (n == 1) {
        out.push_back(lo);
        return out;
    }
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i)
        out.push_back(std::exp(llo + (lhi - llo) * i / (n - 1)));
    return out;
}

std::vector<ModelParams> GridSpec::points() const {
    std::vector<ModelParams> out;
    for (double g : gamma)
        for (double e : e0)
            for (double bb : b)
                for (double dd : d)
                    for (double r : r0)
                        for (double c : c0)
                            out.push_back(ModelParams{g, e, bb, dd, r, c, 1.0});
    return out;
}

namespace {

SweepRow sweep_row(const ModelParams& params, ConstructionChoice choice,
                   const QuadratureSpec& spec) {
    SweepRow row;
    row.params = params;
    try {
        const ScalingValue s = scaling_function_s(params);
        row.s = s.value;
        row.branch = s.branch;
        EnergyBreakdown energy;
        double L = 0.0;
        switch (choice) {
            case ConstructionChoice::Best: {
                auto rep = best_construction(params, spec);
                energy = rep.energy;
                L = rep.L_chosen;
                break;
            }
            case ConstructionChoice::Dislocation: {
                auto c = build_dislocation_construction(params);
                energy = total_energy(c.profile, c.field, c.sigma, params, spec);
                L = c.L;
                break;
            }
            case ConstructionChoice::Elastic: {
                auto c = build_elastic_construction(params);
                energy = total_energy(c.profile, c.field, c.sigma, params, spec);
                L = c.L;
                break;
            }
        }
        row.energy = energy;
        row.L = L;
        row.ratio = energy.total / row.s;
    } catch (const std::exception& e) {
        row.flagged = true;
        row.error = e.what();
    }
    return row;
}

}  // namespace

std::vector<SweepRow> sweep(const GridSpec& grid, const QuadratureSpec& spec,
                            int threads) {
    const auto points = grid.points();
    std::vector<SweepRow> rows(points.size());
    if (threads <= 1 || points.size() < 2) {
        for (std::size_t i = 0; i < points.size(); ++i)
            rows[i] = sweep_row(points[i], grid.construction, spec);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) return;
            rows[i] = sweep_row(points[i], grid.construction, spec);
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(threads, static_cast<int>(points.size()));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return rows;
}

FitResult fit_exponent(std::span<const SweepRow> rows, FitX x_var, FitY y_var,
                       FitModel model) {
    std::vector<double> lx, ly;
    for (const auto& row : rows) {
        if (row.flagged) continue;
        const ModelParams& p = row.params;
        double x = 0.0;
        switch (x_var) {
            case FitX::D: x = p.d; break;
            case FitX::E0: x = p.e0; break;
            case FitX::B: x = p.b; break;
            case FitX::Gamma: x = p.gamma; break;
            case FitX::R0: x = p.r0; break;
        }
        double y = 0.0;
        switch (y_var) {
            case FitY::Total: y = row.energy.total; break;
            case FitY::MinTerm:
                y = row.energy.total - p.gamma * (1.0 + p.d);
                break;
            case FitY::SValue: y = row.s; break;
            case FitY::SMinTerm: y = row.s - p.gamma * (1.0 + p.d); break;
            case FitY::Elastic: y = row.energy.elastic; break;
        }
        if (model == FitModel::PowerWithLog)
            y /= std::sqrt(1.0 + std::log(p.b / (p.e0 * p.r0)));
        if (!(x > 0.0) || !(y > 0.0)) continue;
        lx.push_back(std::log(x));
        ly.push_back(std::log(y));
    }
    if (lx.size() < 8)
        throw std::domain_error("fit_exponent needs at least 8 positive rows");
    const std::size_t n = lx.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = lx[i] - mx, dy = ly[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 1e-12 * n))
        throw std::domain_error("fit_exponent: degenerate x spread");
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.points = n;
    return fit;
}

FlatFilmResult flat_film_favorability(double L, const ModelParams& p) {
    p.validate();
    if (!(L > 0.0)) throw std::domain_error("flat film: L must be > 0");
    FlatFilmResult out;
    out.lhs = std::min(L, p.d / L);
    out.rhs = (p.b / p.e0) * std::log(p.b / (p.e0 * p.r0));
    out.favorable = out.lhs >= out.rhs;
    out.elastic_energy_free = std::min(p.e0 * p.e0 * L * L, p.e0 * p.e0 * p.d);
    out.elastic_energy_disloc =
        L * (p.e0 / p.b) * p.b * p.b *
        std::min(std::log(p.d / (L * p.r0)), std::log(p.b / (p.e0 * p.r0)));
    return out;
}

}  // namespace episcale
