#include "episcale/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "episcale/ball_construction.hpp"
#include "episcale/csv.hpp"
#include "episcale/energy.hpp"
#include "episcale/scaling.hpp"
#include "episcale/verification.hpp"

namespace episcale::cli {

namespace {

const std::set<std::string> kKnownKeys = {
    "command", "gamma", "e0", "b", "d", "r0", "c0", "c1", "construction",
    "L", "d_min", "d_max", "d_points", "e0_min", "e0_max", "e0_points",
    "quad_rel_tol", "quad_base_divisions", "quad_max_cells", "balls",
    "t_end", "times", "n_profiles", "n_annulus", "n_strip",
    "n_ball_families", "n_curl_samples", "dump_nx", "dump_ny", "seed",
    "out", "threads"};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    std::size_t b = s.find_last_not_of(" \t");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& v, char sep) {
    std::vector<double> out;
    std::istringstream is(v);
    std::string cell;
    while (std::getline(is, cell, sep)) {
        cell = trim(cell);
        if (!cell.empty()) out.push_back(parse_double(cell));
    }
    return out;
}

Command parse_command(const std::string& v, int line) {
    if (v == "energy") return Command::Energy;
    if (v == "construct") return Command::Construct;
    if (v == "sweep") return Command::Sweep;
    if (v == "phase") return Command::Phase;
    if (v == "balls") return Command::Balls;
    if (v == "verify") return Command::Verify;
    throw ParseError(line, "unknown command '" + v + "'");
}

[[noreturn]] void usage_error(const std::string& msg) {
    throw std::invalid_argument(msg);
}

int env_threads() {
    if (const char* env = std::getenv("EPISCALE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) usage_error("cannot open output file " + path.string());
    os << content;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    bool command_seen = false;
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError(line_no, "expected 'key = value'");
        if (!kKnownKeys.count(key))
            throw ParseError(line_no, "unknown key '" + key + "'");
        if (!seen.insert(key).second)
            throw ParseError(line_no, "duplicate key '" + key + "'");

        if (key == "command") {
            cfg.command = parse_command(value, line_no);
            command_seen = true;
        } else if (key == "gamma") {
            cfg.params.gamma = parse_double(value);
            cfg.has_gamma = true;
        } else if (key == "e0") {
            cfg.params.e0 = parse_double(value);
            cfg.has_e0 = true;
        } else if (key == "b") {
            cfg.params.b = parse_double(value);
            cfg.has_b = true;
        } else if (key == "d") {
            cfg.params.d = parse_double(value);
            cfg.has_d = true;
        } else if (key == "r0") {
            const double r0 = parse_double(value);
            if (!(r0 > 0.0 && r0 <= 1.0))
                throw std::domain_error("r0 must lie in (0, 1]");
            cfg.params.r0 = r0;
            cfg.has_r0 = true;
        } else if (key == "c0") {
            cfg.params.c0 = parse_double(value);
        } else if (key == "c1") {
            cfg.params.c1 = parse_double(value);
        } else if (key == "construction") {
            if (value != "best" && value != "dislocation" && value != "elastic")
                throw ParseError(line_no, "construction must be best|dislocation|elastic");
            cfg.construction = value;
        } else if (key == "L") {
            cfg.L = parse_double(value);
        } else if (key == "d_min") {
            cfg.d_min = parse_double(value);
        } else if (key == "d_max") {
            cfg.d_max = parse_double(value);
        } else if (key == "d_points") {
            cfg.d_points = static_cast<int>(parse_double(value));
        } else if (key == "e0_min") {
            cfg.e0_min = parse_double(value);
        } else if (key == "e0_max") {
            cfg.e0_max = parse_double(value);
        } else if (key == "e0_points") {
            cfg.e0_points = static_cast<int>(parse_double(value));
        } else if (key == "quad_rel_tol") {
            cfg.quad.rel_tol = parse_double(value);
        } else if (key == "quad_base_divisions") {
            cfg.quad.base_divisions = static_cast<int>(parse_double(value));
        } else if (key == "quad_max_cells") {
            cfg.quad.max_cells = static_cast<std::size_t>(parse_double(value));
        } else if (key == "balls") {
            std::istringstream bs(value);
            std::string triple;
            while (std::getline(bs, triple, ';')) {
                auto vals = parse_list(triple, ',');
                if (vals.size() != 3)
                    throw ParseError(line_no, "balls entries are 'x,y,r' triples");
                cfg.ball_data.insert(cfg.ball_data.end(), vals.begin(), vals.end());
            }
        } else if (key == "t_end") {
            cfg.t_end = parse_double(value);
        } else if (key == "times") {
            cfg.times = parse_list(value, ',');
        } else if (key == "n_profiles") {
            cfg.n_profiles = static_cast<std::size_t>(parse_double(value));
        } else if (key == "n_annulus") {
            cfg.n_annulus = static_cast<std::size_t>(parse_double(value));
        } else if (key == "n_strip") {
            cfg.n_strip = static_cast<std::size_t>(parse_double(value));
        } else if (key == "n_ball_families") {
            cfg.n_ball_families = static_cast<std::size_t>(parse_double(value));
        } else if (key == "n_curl_samples") {
            cfg.n_curl_samples = static_cast<std::size_t>(parse_double(value));
        } else if (key == "dump_nx") {
            cfg.dump_nx = static_cast<int>(parse_double(value));
        } else if (key == "dump_ny") {
            cfg.dump_ny = static_cast<int>(parse_double(value));
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(parse_double(value));
        } else if (key == "out") {
            cfg.out_dir = value;
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(parse_double(value));
        }
    }
    if (!command_seen) throw ParseError(line_no, "missing required key 'command'");
    return cfg;
}

namespace {

void require_params(const RunConfig& cfg) {
    if (!cfg.has_gamma) usage_error("config missing gamma");
    if (!cfg.has_e0) usage_error("config missing e0");
    if (!cfg.has_b) usage_error("config missing b");
    if (!cfg.has_d) usage_error("config missing d");
    if (!cfg.has_r0) usage_error("config missing r0");
    cfg.params.validate();
}

Construction build_choice(const RunConfig& cfg) {
    if (cfg.construction == "dislocation")
        return build_dislocation_construction(cfg.params, cfg.L);
    if (cfg.construction == "elastic")
        return build_elastic_construction(cfg.params, cfg.L);
    auto rep = best_construction(cfg.params, cfg.quad);
    return rep.dislocation_won
               ? build_dislocation_construction(cfg.params)
               : build_elastic_construction(cfg.params);
}

int run_energy(const RunConfig& cfg) {
    require_params(cfg);
    auto c = build_choice(cfg);
    auto energy = total_energy(c.profile, c.field, c.sigma, cfg.params, cfg.quad);
    const std::string comment = header_comment(cfg.params, cfg.seed);
    write_file(std::filesystem::path(cfg.out_dir) / "energy.csv",
               energy_report_csv(energy, comment));
    std::cout << "L=" << format_double(c.L) << "\n"
              << energy_report_csv(energy, comment);
    return 0;
}

int run_construct(const RunConfig& cfg) {
    require_params(cfg);
    auto c = build_choice(cfg);
    const std::string comment = header_comment(cfg.params, cfg.seed);
    const auto dir = std::filesystem::path(cfg.out_dir);
    write_file(dir / "profile.csv", profile_to_csv(c.profile, comment));
    write_file(dir / "dislocations.csv",
               measure_to_csv(c.sigma, cfg.params.r0, comment));
    const double y_top = std::min(c.profile.max_height(),
                                  field_ceiling(c.field) + cfg.params.r0);
    std::vector<Vec2> pts;
    for (int i = 0; i < cfg.dump_nx; ++i)
        for (int j = 0; j < cfg.dump_ny; ++j)
            pts.push_back({(i + 0.5) * c.L / cfg.dump_nx,
                           (j + 0.5) * y_top / cfg.dump_ny});
    write_file(dir / "field.csv", field_dump_csv(c.field, pts, comment));
    auto energy = total_energy(c.profile, c.field, c.sigma, cfg.params, cfg.quad);
    write_file(dir / "energy.csv", energy_report_csv(energy, comment));
    std::cout << "wrote profile.csv dislocations.csv field.csv energy.csv (L="
              << format_double(c.L) << ")\n";
    return 0;
}

GridSpec sweep_grid(const RunConfig& cfg) {
    if (!cfg.d_min || !cfg.d_max || cfg.d_points < 1)
        usage_error("sweep requires d_min, d_max, d_points");
    GridSpec grid;
    grid.gamma = {cfg.params.gamma};
    grid.e0 = {cfg.params.e0};
    grid.b = {cfg.params.b};
    grid.r0 = {cfg.params.r0};
    grid.c0 = {cfg.params.c0};
    grid.d = log_spaced(*cfg.d_min, *cfg.d_max, cfg.d_points);
    grid.seed = cfg.seed;
    if (cfg.construction == "dislocation")
        grid.construction = ConstructionChoice::Dislocation;
    else if (cfg.construction == "elastic")
        grid.construction = ConstructionChoice::Elastic;
    return grid;
}

int run_sweep(const RunConfig& cfg, int threads) {
    if (!cfg.has_gamma || !cfg.has_e0 || !cfg.has_b || !cfg.has_r0)
        usage_error("sweep requires gamma, e0, b, r0");
    auto grid = sweep_grid(cfg);
    auto rows = sweep(grid, cfg.quad, threads);
    ModelParams header = cfg.params;
    header.d = grid.d.front();
    const std::string comment = header_comment(header, cfg.seed);
    const auto dir = std::filesystem::path(cfg.out_dir);
    write_file(dir / "sweep.csv", sweep_to_csv(rows, comment));

    std::ostringstream fit_report;
    fit_report << comment << "\n";
    bool flagged = false;
    for (const auto& row : rows) flagged = flagged || row.flagged;
    try {
        auto pure = fit_exponent(rows, FitX::D, FitY::MinTerm, FitModel::PurePower);
        fit_report << "fit,min_term_vs_d,pure_power,slope="
                   << format_double(pure.slope) << ",r2=" << format_double(pure.r2)
                   << ",points=" << pure.points << "\n";
        auto logc = fit_exponent(rows, FitX::D, FitY::MinTerm, FitModel::PowerWithLog);
        fit_report << "fit,min_term_vs_d,log_corrected,slope="
                   << format_double(logc.slope) << ",r2=" << format_double(logc.r2)
                   << ",points=" << logc.points << "\n";
    } catch (const std::exception& e) {
        fit_report << "fit,error," << e.what() << "\n";
    }
    write_file(dir / "sweep_fit.txt", fit_report.str());
    std::cout << fit_report.str();
    return flagged ? 2 : 0;
}

int run_phase(const RunConfig& cfg, int threads) {
    if (!cfg.has_gamma || !cfg.has_b || !cfg.has_r0)
        usage_error("phase requires gamma, b, r0");
    if (!cfg.d_min || !cfg.d_max || cfg.d_points < 1 || !cfg.e0_min ||
        !cfg.e0_max || cfg.e0_points < 1)
        usage_error("phase requires d_min/d_max/d_points and e0_min/e0_max/e0_points");
    GridSpec grid;
    grid.gamma = {cfg.params.gamma};
    grid.b = {cfg.params.b};
    grid.r0 = {cfg.params.r0};
    grid.c0 = {cfg.params.c0};
    grid.d = log_spaced(*cfg.d_min, *cfg.d_max, cfg.d_points);
    grid.e0 = log_spaced(*cfg.e0_min, *cfg.e0_max, cfg.e0_points);
    const auto points = grid.points();

    std::ostringstream os;
    os << header_comment(cfg.params, cfg.seed) << "\n";
    os << "gamma,e0,b,d,r0,c0,s,s_branch,winner,total_dislocation,total_free,"
          "ratio\n";
    bool flagged = false;
    (void)threads;
    for (const auto& p : points) {
        os << format_double(p.gamma) << "," << format_double(p.e0) << ","
           << format_double(p.b) << "," << format_double(p.d) << ","
           << format_double(p.r0) << "," << format_double(p.c0) << ",";
        try {
            auto rep = best_construction(p, cfg.quad);
            os << format_double(rep.s_value) << "," << branch_name(rep.s_branch)
               << "," << (rep.dislocation_won ? "dislocation" : "elastic") << ","
               << format_double(rep.energy_dislocation.total) << ","
               << format_double(rep.energy_free.total) << ","
               << format_double(rep.ratio) << "\n";
        } catch (const std::exception&) {
            flagged = true;
            os << "nan,error,error,nan,nan,nan\n";
        }
    }
    write_file(std::filesystem::path(cfg.out_dir) / "phase.csv", os.str());
    std::cout << "wrote phase.csv (" << points.size() << " points)\n";
    return flagged ? 2 : 0;
}

int run_balls(const RunConfig& cfg) {
    if (cfg.ball_data.empty()) usage_error("balls command requires a balls list");
    if (!(cfg.t_end > 0.0)) usage_error("balls command requires t_end > 0");
    std::vector<Vec2> centers;
    std::vector<double> radii;
    std::vector<Ball> input;
    for (std::size_t i = 0; i + 2 < cfg.ball_data.size() + 1 &&
                            3 * (i + 1) <= cfg.ball_data.size();
         ++i) {
        centers.push_back({cfg.ball_data[3 * i], cfg.ball_data[3 * i + 1]});
        radii.push_back(cfg.ball_data[3 * i + 2]);
        Ball b;
        b.id = static_cast<std::int64_t>(i);
        b.center = centers.back();
        b.radius = radii.back();
        input.push_back(b);
    }
    BallFamily fam = BallFamily::from_circles(centers, radii);
    fam.evolve(cfg.t_end);
    ModelParams dummy;
    const std::string comment = header_comment(dummy, cfg.seed);
    write_file(std::filesystem::path(cfg.out_dir) / "balls_events.csv",
               ball_events_csv(fam, input, comment));
    int rc = 0;
    if (!cfg.times.empty()) {
        auto rep = verify_ball_properties(input, fam, cfg.times);
        std::cout << "ball properties: " << (rep.pass() ? "pass" : "FAIL") << "\n";
        for (const auto& v : rep.violations) std::cout << "  " << v << "\n";
        if (!rep.pass()) rc = 2;
    }
    std::cout << "wrote balls_events.csv (" << fam.events().size()
              << " merge events)\n";
    return rc;
}

int run_verify(const RunConfig& cfg) {
    require_params(cfg);
    std::ostringstream report;
    report << header_comment(cfg.params, cfg.seed) << "\n";
    bool all_pass = true;
    auto emit = [&](const std::string& line, bool pass) {
        all_pass = all_pass && pass;
        report << (pass ? "[pass] " : "[FAIL] ") << line << "\n";
        std::cout << (pass ? "[pass] " : "[FAIL] ") << line << "\n";
    };

    const double L = cfg.L > 0.0 ? cfg.L
                                 : std::min(1.0, cfg.params.d / (4.0 * cfg.params.r0));
    {
        auto res = curl_identity_check(cfg.params, L, cfg.n_curl_samples,
                                       cfg.params.r0 / 200.0, cfg.seed);
        std::ostringstream os;
        os << "curl identity: max residual " << format_double(res.max_residual)
           << " vs bound " << format_double(res.residual_bound)
           << ", worst circulation error "
           << format_double(res.worst_circulation_error);
        emit(os.str(), res.pass);
    }
    {
        auto res = pointwise_bound_suite(cfg.params, L, cfg.n_curl_samples,
                                         cfg.n_curl_samples, cfg.seed + 17);
        std::ostringstream os;
        os << "pointwise bound: fitted C " << format_double(res.fitted_C)
           << ", max validation ratio " << format_double(res.max_validation_ratio);
        emit(os.str(), res.pass);
    }
    {
        auto res = annulus_suite(cfg.n_annulus, cfg.seed + 29, cfg.quad);
        emit(res.summary(), res.pass());
    }
    {
        auto res = strip_suite(cfg.n_strip, cfg.seed + 43, cfg.quad);
        emit(res.summary(), res.pass());
    }
    {
        auto res = ball_suite(cfg.n_ball_families, cfg.seed + 57,
                              {0.0, 0.5, 1.0, 2.0});
        emit(res.summary(), res.pass());
    }
    {
        auto res = isoperimetric_suite(cfg.n_profiles, cfg.seed + 71);
        emit(res.summary(), res.pass());
    }
    {
        auto res = surface_floor_suite(cfg.n_profiles, cfg.seed + 83);
        emit(res.summary(), res.pass());
    }
    {
        auto res = boundary_trace_report(cfg.params, L, 512);
        report << "[info] substrate trace: max |H11 - e0| = "
               << format_double(res.max_deviation) << " at x = "
               << format_double(res.at_x) << " (reported, not asserted)\n";
        std::cout << "[info] substrate trace: max |H11 - e0| = "
                  << format_double(res.max_deviation) << " at x = "
                  << format_double(res.at_x) << "\n";
    }
    write_file(std::filesystem::path(cfg.out_dir) / "verify_report.txt",
               report.str());
    return all_pass ? 0 : 2;
}

}  // namespace

int run_main(int argc, char** argv) {
    CLI::App app{"scaling-law constructions for strained films with dislocations"};
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    double tol = 0.0;
    int threads = 0;
    app.add_option("--config", config_path, "run configuration file")->required();
    auto* out_opt = app.add_option("--out", out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "seed recorded in outputs");
    auto* tol_opt = app.add_option("--tol", tol, "quadrature relative tolerance");
    auto* thr_opt = app.add_option("--threads", threads,
                                   "worker threads (default: EPISCALE_THREADS or 1)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    Overrides ov;
    if (*out_opt) ov.out_dir = out_dir;
    if (*seed_opt) ov.seed = seed;
    if (*tol_opt) ov.tol = tol;
    if (*thr_opt) ov.threads = threads;
    try {
        std::ifstream is(config_path);
        if (!is) {
            std::cerr << "cannot read config " << config_path << "\n";
            return 1;
        }
        std::stringstream buf;
        buf << is.rdbuf();
        RunConfig cfg = parse_config(buf.str());
        return run(std::move(cfg), ov);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run(RunConfig cfg, const Overrides& overrides) {
    if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.tol) cfg.quad.rel_tol = *overrides.tol;
    const int threads = overrides.threads.value_or(
        cfg.threads > 0 ? cfg.threads : env_threads());
    std::filesystem::create_directories(cfg.out_dir);
    switch (cfg.command) {
        case Command::Energy: return run_energy(cfg);
        case Command::Construct: return run_construct(cfg);
        case Command::Sweep: return run_sweep(cfg, threads);
        case Command::Phase: return run_phase(cfg, threads);
        case Command::Balls: return run_balls(cfg);
        case Command::Verify: return run_verify(cfg);
    }
    return 1;
}

}  // namespace episcale::cli
