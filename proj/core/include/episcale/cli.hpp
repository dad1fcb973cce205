#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "episcale/geometry.hpp"
#include "episcale/quadrature.hpp"

namespace episcale::cli {

enum class Command { Energy, Construct, Sweep, Phase, Balls, Verify };

/// Parsed run configuration. Plain key = value lines, '#' comments, strict
/// key set, duplicates rejected. Defaults: c0 = 1, c1 = 1, construction =
/// best, seed = 0, out = ".", threads from EPISCALE_THREADS (else 1).
struct RunConfig {
    Command command = Command::Energy;
    ModelParams params;
    bool has_gamma = false, has_e0 = false, has_b = false, has_d = false,
         has_r0 = false;
    std::string construction = "best";
    double L = -1.0;  // <= 0: optimal

    // sweep / phase grids (log-spaced)
    std::optional<double> d_min, d_max;
    int d_points = 0;
    std::optional<double> e0_min, e0_max;
    int e0_points = 0;

    // quadrature overrides
    QuadratureSpec quad;

    // balls
    std::vector<double> ball_data;  // triples x,y,r
    double t_end = 0.0;
    std::vector<double> times;

    // verify suite sizes
    std::size_t n_profiles = 100;
    std::size_t n_annulus = 50;
    std::size_t n_strip = 20;
    std::size_t n_ball_families = 1000;
    std::size_t n_curl_samples = 1000;

    // field dump grid
    int dump_nx = 64;
    int dump_ny = 32;

    std::uint64_t seed = 0;
    std::string out_dir = ".";
    int threads = 0;  // 0: environment default
};

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_no, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + msg),
          line(line_no) {}
};

/// Strict parse of a key-value config document. Throws ParseError on
/// malformed lines, unknown or duplicate keys; throws std::domain_error on
/// out-of-range values (r0 outside (0,1], nonpositive parameters).
RunConfig parse_config(const std::string& text);

/// Command-line overrides applied on top of the config file.
struct Overrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<int> threads;
};

/// Executes the configured command. Returns 0 on success, 2 on partial
/// success (flagged rows / failed checks), throws on usage or domain errors
/// (mapped to exit 1 by run_main).
int run(RunConfig config, const Overrides& overrides = {});

/// Full CLI entry: flag parsing, error mapping (0 ok, 2 partial, 1 usage).
int run_main(int argc, char** argv);

}  // namespace episcale::cli
