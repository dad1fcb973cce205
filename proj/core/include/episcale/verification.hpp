#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "episcale/geometry.hpp"
#include "episcale/quadrature.hpp"
#include "episcale/rng.hpp"
#include "episcale/scaling.hpp"

namespace episcale {

/// Outcome of one randomized verification suite.
struct SuiteResult {
    std::string name;
    std::size_t instances = 0;
    std::size_t failures = 0;
    std::vector<std::string> notes;
    bool pass() const { return failures == 0; }
    std::string summary() const;
};

/// Random admissible profile of volume d: controlled breakpoint gaps,
/// nonnegative heights, exact volume by scaling.
Profile random_admissible_profile(Rng& rng, double d, int max_interior = 8);

/// Lemma-style isoperimetric estimate on random profile/box-family pairs.
SuiteResult isoperimetric_suite(std::size_t n, std::uint64_t seed);

/// Surface energy floor gamma (1/2 + d) on random admissible profiles.
SuiteResult surface_floor_suite(std::size_t n, std::uint64_t seed);

/// Finite-difference curl identity and per-core circulation of the mollified
/// construction. Samples avoid the strip x < b/(2 e0): the periodic field
/// carries a lattice image at x = 0 outside Omega_h whose kernel support
/// reaches slightly inside.
struct CurlCheckResult {
    double max_residual = 0.0;
    double residual_bound = 0.0;  // 1e-4 b / r0^2
    double worst_circulation_error = 0.0;  // relative, over all cores
    std::size_t samples = 0;
    bool pass = false;
};
CurlCheckResult curl_identity_check(const ModelParams& params, double L,
                                    std::size_t n_samples, double step,
                                    std::uint64_t seed);

/// Two-sample calibration of the pointwise majorant: the constant is fitted
/// on one sample and validated on a disjoint one.
struct PointwiseBoundSuite {
    double fitted_C = 0.0;
    double max_validation_ratio = 0.0;
    bool pass = false;
};
PointwiseBoundSuite pointwise_bound_suite(const ModelParams& params, double L,
                                          std::size_t n_cal, std::size_t n_val,
                                          std::uint64_t seed);

/// Randomized annulus circulation bounds on mollified one- and two-core
/// configurations.
SuiteResult annulus_suite(std::size_t n, std::uint64_t seed,
                          const QuadratureSpec& spec);

/// Randomized strip lower bounds: sheared-island fields, dislocation-free
/// tail strips, plus gated (not-applicable) core-region instances.
SuiteResult strip_suite(std::size_t n, std::uint64_t seed,
                        const QuadratureSpec& spec);

/// Randomized ball-construction property checks at the given sample times.
SuiteResult ball_suite(std::size_t n_families, std::uint64_t seed,
                       const std::vector<double>& times);

/// Max deviation of H11 from e0 sampled on the substrate line y = 0
/// (reported, not asserted).
struct BoundaryTraceReport {
    double max_deviation = 0.0;
    double at_x = 0.0;
    std::size_t samples = 0;
};
BoundaryTraceReport boundary_trace_report(const ModelParams& params, double L,
                                          std::size_t n);

}  // namespace episcale
