#pragma once

#include <functional>
#include <vector>

#include "episcale/dislocations.hpp"
#include "episcale/geometry.hpp"
#include "episcale/quadrature.hpp"
#include "episcale/strain_fields.hpp"

namespace episcale {

/// Skew(2) is one-dimensional: w represents [[0, w], [-w, 0]].
struct SkewParam {
    double w = 0.0;
    Mat2 matrix() const { return Mat2::skew(w); }
};

/// min over skew W of the L2 distance of H to W on a domain. The minimizer
/// is the mean of (H12 - H21)/2; the minimum value follows in closed form
/// from the same pass: int |H|^2 - (int (H12 - H21))^2 / (2 area).
struct SkewFitResult {
    double w_star = 0.0;
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};
SkewFitResult min_over_skew(const StrainField& field, const Region2D& domain,
                            const QuadratureSpec& spec);
SkewFitResult min_over_skew_annulus(const StrainField& field, Vec2 center,
                                    double r, double R,
                                    const QuadratureSpec& spec);
/// Generic-callable versions (used by invariance tests).
SkewFitResult min_over_skew_fn(const std::function<Mat2(Vec2)>& H,
                               const Region2D& domain,
                               const QuadratureSpec& spec);
SkewFitResult min_over_skew_annulus_fn(const std::function<Mat2(Vec2)>& H,
                                       Vec2 center, double r, double R,
                                       const QuadratureSpec& spec);

/// Circulation lower bound on an annulus: the skew-reduced Dirichlet energy
/// dominates (1/2pi) log(R/r) times the squared curl mass of the inner ball.
/// Pre: every core's mollifier support lies fully inside B_r or fully outside
/// B_R; straddling cores raise std::domain_error.
struct AnnulusBoundResult {
    double lhs = 0.0;  // min over skew of the annulus integral
    double rhs = 0.0;  // log(R/r)/(2 pi) * (b * enclosed)^2
    bool holds = false;
    int enclosed = 0;
    double w_star = 0.0;
};
AnnulusBoundResult annulus_circulation_bound(const StrainField& field,
                                             Vec2 center, double r, double R,
                                             const DislocationMeasure& sigma,
                                             double r0,
                                             const QuadratureSpec& spec,
                                             double tol = 1e-6);

/// Strip estimate: on (x_bar, 2 x_i + l_i - x_bar) x (0, l_i/2) the
/// skew-reduced energy dominates e0^2 l_i^2 / 768 provided the curl mass of
/// the strip stays below e0 l_i / 4. Fields are evaluated with their own
/// extension below y = 0 (constant misfit for every construction variant).
struct StripBoundResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    bool applicable = true;  // false when the curl-mass gate fails
    double curl_mass = 0.0;
    double w_star = 0.0;
};
StripBoundResult strip_lower_bound_check(const StrainField& field, double x_i,
                                         double l_i, double x_bar, double e0,
                                         const QuadratureSpec& spec,
                                         double tol = 1e-6);

/// Total mollified curl mass of the field inside an axis-aligned rectangle
/// (b times the kernel mass of each core clipped to the rectangle).
double curl_mass_in_rect(const StrainField& field, double x0, double x1,
                         double y0, double y1);

enum class ScaleKind { HeightLimited, DislocationLimited };

struct Segment {
    double x;
    double l;
    ScaleKind kind;
    double local_volume;
    long long core_count;
};

struct SegmentDecomposition {
    std::vector<Segment> segments;
    double covered_volume = 0.0;
};

/// Local length scales: starting at the left edge of each support component
/// (plus 1e-9), repeatedly take l = min(largest inscribed square, largest
/// window holding at most |log(b/(e0 r0))|^2 cores). Segments tile the
/// support; ties labeled HeightLimited.
SegmentDecomposition decompose_local_scales(const Profile& profile,
                                            const DislocationMeasure& sigma,
                                            const ModelParams& params);

}  // namespace episcale
