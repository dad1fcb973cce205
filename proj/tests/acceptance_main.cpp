// Acceptance suite: one run per criterion, one pass/fail line each.
// Exit code = number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "episcale/ball_construction.hpp"
#include "episcale/cli.hpp"
#include "episcale/csv.hpp"
#include "episcale/energy.hpp"
#include "episcale/lowerbound.hpp"
#include "episcale/scaling.hpp"
#include "episcale/verification.hpp"

using namespace episcale;

namespace {

int failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// C1: elastic-branch exponent 2/3
// ---------------------------------------------------------------------------
void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    GridSpec grid;
    grid.construction = ConstructionChoice::Elastic;
    grid.gamma = {1.0};
    grid.e0 = {30.0};
    grid.b = {0.05};
    grid.r0 = {1e-11};
    grid.d = log_spaced(1e-5, 1e-2, 30);
    QuadratureSpec spec;
    spec.rel_tol = 1e-6;
    auto rows = sweep(grid, spec, 2);
    bool branch_ok = true;
    for (const auto& row : rows)
        branch_ok = branch_ok && !row.flagged && row.branch == Branch::Elastic;
    auto fit = fit_exponent(rows, FitX::D, FitY::MinTerm, FitModel::PurePower);
    const double elapsed = seconds_since(t0);
    std::ostringstream os;
    os << "slope " << fit.slope << " (target 0.667 +- 0.05), r2 " << fit.r2
       << ", " << rows.size() << " rows, " << elapsed << " s";
    const bool pass = branch_ok && std::abs(fit.slope - 2.0 / 3.0) <= 0.05 &&
                      fit.r2 >= 0.99 && elapsed <= 120.0;
    report("C1 elastic exponent 2/3", pass, os.str());
}

// ---------------------------------------------------------------------------
// C2: dislocation-branch exponent 1/2 with log correction
// ---------------------------------------------------------------------------
void criterion2() {
    const auto t0 = std::chrono::steady_clock::now();
    GridSpec grid;
    grid.construction = ConstructionChoice::Dislocation;
    grid.gamma = {1.0};
    grid.e0 = {1.0};
    grid.b = {4e-4};
    grid.r0 = {2e-11};
    grid.d = log_spaced(7e-7, 7e-4, 30);
    QuadratureSpec spec;
    spec.rel_tol = 3e-4;
    auto rows = sweep(grid, spec, 2);
    bool branch_ok = true;
    for (const auto& row : rows)
        branch_ok = branch_ok && !row.flagged && row.branch == Branch::Dislocation;
    auto fit = fit_exponent(rows, FitX::D, FitY::MinTerm, FitModel::PowerWithLog);
    const double elapsed = seconds_since(t0);
    std::ostringstream os;
    os << "slope " << fit.slope << " (target 0.5 +- 0.05), r2 " << fit.r2
       << ", " << rows.size() << " rows, " << elapsed << " s";
    const bool pass = branch_ok && std::abs(fit.slope - 0.5) <= 0.05 &&
                      fit.r2 >= 0.99 && elapsed <= 600.0;
    report("C2 dislocation exponent 1/2 (log-corrected)", pass, os.str());
}

// ---------------------------------------------------------------------------
// C3: two-sided comparability window over a 100-point grid
// ---------------------------------------------------------------------------
void criterion3() {
    GridSpec grid;
    grid.construction = ConstructionChoice::Best;
    grid.gamma = {1.0};
    grid.b = {2e-4};
    grid.r0 = {1e-12};
    grid.e0 = log_spaced(0.1, 10.0, 10);
    grid.d = log_spaced(1e-3, 1.0, 10);
    QuadratureSpec spec;
    spec.rel_tol = 3e-4;
    auto rows = sweep(grid, spec, 2);
    double cal_min = 1e300, cal_max = 0.0;
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < rows.size(); i += 2) {  // calibration half
        if (rows[i].flagged) {
            ++flagged;
            continue;
        }
        cal_min = std::min(cal_min, rows[i].ratio);
        cal_max = std::max(cal_max, rows[i].ratio);
    }
    const double c_lo = cal_min * 0.95;
    const double c_hi = cal_max * 1.05;
    std::size_t violations = 0;
    for (std::size_t i = 1; i < rows.size(); i += 2) {  // validation half
        if (rows[i].flagged) {
            ++flagged;
            continue;
        }
        if (rows[i].ratio < c_lo || rows[i].ratio > c_hi) ++violations;
    }
    std::ostringstream os;
    os << rows.size() << " points, window [" << c_lo << ", " << c_hi
       << "], width ratio " << c_hi / c_lo << " (must be <= 100), "
       << violations << " validation violations, " << flagged << " flagged";
    const bool pass = rows.size() >= 100 && flagged == 0 && violations == 0 &&
                      c_hi / c_lo <= 100.0;
    report("C3 two-sided comparability", pass, os.str());
}

// ---------------------------------------------------------------------------
// C4: curl identity and core circulation
// ---------------------------------------------------------------------------
void criterion4() {
    ModelParams p;
    p.gamma = 1.0;
    p.e0 = 1.0;
    p.b = 0.25;
    p.r0 = 1e-8;
    p.d = 1.0;
    auto res = curl_identity_check(p, 0.9, 1000, p.r0 / 200.0, 20240330);
    std::ostringstream os;
    os << "max residual " << res.max_residual << " vs 1e-4 b/r0^2 = "
       << res.residual_bound << "; worst core circulation rel err "
       << res.worst_circulation_error << " (must be <= 1e-6); " << res.samples
       << " samples";
    report("C4 curl identity", res.pass, os.str());
}

// ---------------------------------------------------------------------------
// C5: surface bound (exact) and elastic log bound with a stable fitted C
// ---------------------------------------------------------------------------
void criterion5() {
    // surface: gamma + 4 gamma d / L, exact closed forms
    Rng rng(555);
    std::size_t surf_violations = 0;
    for (int i = 0; i < 200; ++i) {
        ModelParams p;
        p.gamma = rng.log_uniform(0.1, 10.0);
        p.d = rng.log_uniform(0.01, 50.0);
        p.r0 = rng.log_uniform(1e-6, 1.0);
        const double Lmax = std::min(1.0, p.d / (4.0 * p.r0));
        const double L = Lmax * rng.uniform(0.05, 1.0);
        Profile prof = build_trapezoid_profile(L, p);
        if (surface_energy(prof, p.gamma) >
            (p.gamma + 4.0 * p.gamma * p.d / L) * (1.0 + 1e-12))
            ++surf_violations;
    }

    // elastic: E <= C L b e0 (1 + log(b/(e0 r0))) with one C across a decade
    ModelParams p;
    p.gamma = 1.0;
    p.e0 = 1.0;
    p.b = 0.25;
    p.d = 2.0;
    QuadratureSpec spec;
    spec.rel_tol = 3e-4;
    const double L = 0.9;
    std::vector<double> c_hats;
    for (double r0 : log_spaced(1e-9, 1e-8, 6)) {
        ModelParams q = p;
        q.r0 = r0;
        auto c = build_dislocation_construction(q, L);
        auto el = elastic_energy(c.field, c.profile, 1.0, spec);
        const double denom =
            L * q.b * q.e0 * (1.0 + std::log(q.b / (q.e0 * q.r0)));
        c_hats.push_back(el.value / denom);
    }
    double c_min = c_hats[0], c_max = c_hats[0], c_sum = 0.0;
    for (double c : c_hats) {
        c_min = std::min(c_min, c);
        c_max = std::max(c_max, c);
        c_sum += c;
    }
    const double c_mean = c_sum / c_hats.size();
    const double spread =
        std::max(c_max / c_mean - 1.0, 1.0 - c_min / c_mean);
    std::ostringstream os;
    os << surf_violations << " surface violations /200; fitted C in ["
       << c_min << ", " << c_max << "], spread " << spread * 100.0
       << "% (must be <= 20%)";
    report("C5 upper-bound inequalities", surf_violations == 0 && spread <= 0.20,
           os.str());
}

// ---------------------------------------------------------------------------
// C6: ball construction properties on 1000 random families
// ---------------------------------------------------------------------------
void criterion6() {
    const auto t0 = std::chrono::steady_clock::now();
    auto res = ball_suite(1000, 20240401, {0.0, 0.5, 1.0, 2.0});
    // analytic two-ball case
    auto fam = BallFamily::from_circles({{0, 0}, {4, 0}}, {1.0, 1.0});
    fam.evolve(1.0);
    const bool two_ball =
        fam.events().size() == 1 &&
        std::abs(fam.events()[0].t - std::log(2.0)) <= 1e-9;
    const double elapsed = seconds_since(t0);
    std::ostringstream os;
    os << res.instances << " families, " << res.failures
       << " violations; two-ball merge at ln 2 " << (two_ball ? "ok" : "WRONG")
       << "; " << elapsed << " s (limit 30)";
    report("C6 ball construction", res.failures == 0 && two_ball && elapsed <= 30.0,
           os.str());
}

// ---------------------------------------------------------------------------
// C7: annulus and strip bounds on the randomized suites
// ---------------------------------------------------------------------------
void criterion7() {
    QuadratureSpec spec;
    spec.rel_tol = 1e-3;
    auto ann = annulus_suite(50, 20240402, spec);
    auto strip = strip_suite(20, 20240403, spec);
    std::ostringstream os;
    os << "annulus " << ann.instances << " instances / " << ann.failures
       << " failures; strip " << strip.instances << " instances / "
       << strip.failures << " failures";
    report("C7 annulus and strip bounds", ann.failures == 0 && strip.failures == 0,
           os.str());
}

// ---------------------------------------------------------------------------
// C8: isoperimetric bound and surface floor on random profiles
// ---------------------------------------------------------------------------
void criterion8() {
    auto iso = isoperimetric_suite(100, 20240404);
    auto floor = surface_floor_suite(100, 20240405);
    std::ostringstream os;
    os << "isoperimetric " << iso.failures << " /" << iso.instances
       << " failures; surface floor " << floor.failures << " /"
       << floor.instances << " failures";
    report("C8 isoperimetric and surface floor", iso.failures == 0 && floor.failures == 0,
           os.str());
}

// ---------------------------------------------------------------------------
// C9: byte-identical repeated sweep runs
// ---------------------------------------------------------------------------
void criterion9() {
    namespace fs = std::filesystem;
    const auto dir1 = fs::temp_directory_path() / "episcale_acc_run1";
    const auto dir2 = fs::temp_directory_path() / "episcale_acc_run2";
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    const std::string base =
        "command = sweep\nconstruction = dislocation\ngamma = 1\ne0 = 1\n"
        "b = 0.01\nr0 = 5e-10\nd_min = 1e-5\nd_max = 1e-2\nd_points = 6\n"
        "seed = 20240406\nquad_rel_tol = 1e-3\n";
    auto cfg1 = cli::parse_config(base + "out = " + dir1.string() + "\n");
    auto cfg2 = cli::parse_config(base + "out = " + dir2.string() + "\n");
    const int rc1 = cli::run(cfg1);
    const int rc2 = cli::run(cfg2);
    const std::string s1 = slurp(dir1 / "sweep.csv");
    const std::string s2 = slurp(dir2 / "sweep.csv");
    std::ostringstream os;
    os << "exit codes " << rc1 << "/" << rc2 << ", " << s1.size()
       << " bytes, byte-identical " << (s1 == s2 ? "yes" : "NO");
    report("C9 deterministic sweeps", rc1 == 0 && rc2 == 0 && !s1.empty() && s1 == s2,
           os.str());
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    std::printf("%d of 9 criteria failed\n", failures);
    return failures;
}
