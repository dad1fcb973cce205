#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace episcale {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
double norm(Vec2 a);
double dist(Vec2 a, Vec2 b);

/// 2x2 real matrix, row-major.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    static Mat2 zero() { return {}; }
    /// Skew matrix [[0, w], [-w, 0]].
    static Mat2 skew(double w) { return {0.0, w, -w, 0.0}; }

    Mat2& operator+=(const Mat2& o) {
        a11 += o.a11; a12 += o.a12; a21 += o.a21; a22 += o.a22;
        return *this;
    }
};

inline Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
inline Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22};
}
inline Mat2 operator*(double s, const Mat2& m) {
    return {s * m.a11, s * m.a12, s * m.a21, s * m.a22};
}

/// Frobenius norm squared.
double norm2(const Mat2& m);
/// |sym(M)|^2 where sym(M) = (M + M^T)/2.
double sym_norm2(const Mat2& m);
double frobenius(const Mat2& m);

/// Physical parameter tuple: surface tension gamma, misfit e0, Burgers
/// magnitude b, film volume d, core radius r0, nucleation constant c0 and
/// elastic growth constant c1.
struct ModelParams {
    double gamma = 1.0;
    double e0 = 1.0;
    double b = 1.0;
    double d = 1.0;
    double r0 = 1.0;
    double c0 = 1.0;
    double c1 = 1.0;

    /// Spacing b/e0 of the equidistant dislocation array.
    double period() const { return b / e0; }

    /// b/e0 >= 4 r0, the hypothesis of the explicit construction.
    bool construction_valid() const;
    /// b/e0 >= 64^4 r0, the hypothesis of the two-sided scaling law.
    bool theorem_valid() const;

    /// Throws std::domain_error if any field is outside its admissible range
    /// (all positive, r0 in (0,1], c1 in (0,1]).
    void validate() const;
    /// validate() plus construction_valid(); names the violated bound.
    void require_construction_valid() const;
    /// validate() plus theorem_valid(); names the violated bound.
    void require_theorem_valid() const;
};

/// Hypothesis ratio of the scaling law: b/e0 >= 64^4 r0.
inline constexpr double kTheoremRatio = 16777216.0;  // 64^4

/// Piecewise-linear film profile on [0,1] with h(0) = h(1) = 0.
/// Affine between consecutive breakpoints; abscissae strictly increasing.
class Profile {
  public:
    struct Breakpoint {
        double x;
        double h;
    };

    Profile() = default;
    /// Validates the invariants (endpoints zero, heights >= 0, x strictly
    /// increasing) and throws std::invalid_argument on violation.
    explicit Profile(std::vector<Breakpoint> breakpoints);

    const std::vector<Breakpoint>& breakpoints() const { return pts_; }
    std::size_t segment_count() const { return pts_.size() - 1; }

    double value(double x) const;
    /// max |slope| over all segments.
    double lipschitz_constant() const;
    /// Exact integral of h over [0,1] (sum of trapezoid areas).
    double integral() const;
    /// Exact integral of h over [a,b] (clipped to [0,1]).
    double integral(double a, double b) const;
    /// Exact min of h over [a,b] (clipped to [0,1]).
    double min_on(double a, double b) const;
    double max_height() const;
    /// Left/right endpoints of {h > 0}, or {0,0} when h == 0 everywhere.
    struct Support {
        double left = 0.0;
        double right = 0.0;
        bool empty = true;
    };
    Support support() const;
    /// Maximal connected components of {h > 0}, left to right.
    std::vector<Support> support_components() const;

    /// True if the open ball B_r(p) lies inside Omega_h = {0<x<1, 0<y<h(x)}.
    bool contains_ball(Vec2 p, double r) const;

  private:
    std::vector<Breakpoint> pts_;
};

/// Four-segment trapezoid of Step-1 type: rise on [0,delta], plateau hbar on
/// [delta, L-delta], fall on [L-delta, L], zero on [L,1], where
/// delta = min(r0, L)/16 and hbar = d/(L-delta). Integral equals d exactly.
/// Pre: 0 < L <= 1; violations throw std::domain_error. The stronger Step-1
/// range L <= d/(4 r0) is checked by the dislocation placement.
Profile build_trapezoid_profile(double L, const ModelParams& params);

/// delta and hbar of the trapezoid, exposed for closed-form cross-checks.
struct TrapezoidShape {
    double delta;
    double hbar;
};
TrapezoidShape trapezoid_shape(double L, const ModelParams& params);

/// Exact graph length times gamma: sum over segments of
/// gamma * dx * sqrt(1 + slope^2). Always >= gamma.
double surface_energy(const Profile& profile, double gamma);

/// Report-style admissibility check against a target volume.
struct AdmissibilityReport {
    bool endpoints_zero = false;
    bool nonnegative = false;
    bool volume_ok = false;
    double volume = 0.0;
    double volume_error = 0.0;  // |integral - d|
    bool pass() const { return endpoints_zero && nonnegative && volume_ok; }
};
AdmissibilityReport check_admissible_profile(const Profile& profile, double d,
                                             double rel_tol = 1e-10);

/// Disjoint family of open squares (x_i, x_i+l_i) x (0, l_i), ordered left to
/// right, each required to sit inside Omega_h.
struct BoxFamily {
    struct Box {
        double x;
        double l;
    };
    std::vector<Box> boxes;

    /// Throws std::domain_error if the boxes overlap, are unordered, or some
    /// square is not contained in Omega_h.
    void validate(const Profile& profile) const;
};

/// Isoperimetric-type estimate: the graph length of h dominates 2 d_J / L_J
/// where d_J is the volume under the boxes and L_J the total box width.
struct IsoperimetricResult {
    double lhs;  // integral of sqrt(1+|h'|^2)
    double rhs;  // 2 d_J / L_J (0 for an empty family)
    bool holds;
};
IsoperimetricResult isoperimetric_bound(const Profile& profile,
                                        const BoxFamily& boxes, double gamma,
                                        double tol = 1e-12);

/// Side of the largest open square [x, x+l) x (0, l) fitting under h, capped
/// at 1-x. Exact for piecewise-linear profiles. Returns 0 if h(x) <= 0.
double inscribed_square_size(const Profile& profile, double x);

}  // namespace episcale
