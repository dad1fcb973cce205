#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "episcale/dislocations.hpp"
#include "episcale/geometry.hpp"
#include "episcale/mollifier.hpp"

namespace episcale {

/// Labels of the three-part partition of the periodic cell (0, b/e0] x R:
/// A below the shallow interface line (constant misfit strain), B the wedge
/// carrying the relaxation towards the core, C strain-free.
enum class Region { A, B, C };

/// Classify a point of the principal cell. Pre: x in (0, b/e0]; points
/// outside the cell raise std::domain_error (callers reduce mod b/e0).
/// Conventions: A is closed above, B open.
Region classify_region(double x, double y, const ModelParams& params);

/// Reduce x to the principal cell (0, P].
double reduce_to_cell(double x, double period);

/// Strain of the periodic equidistant-dislocation construction before
/// mollification. k is the floor(L e0/b) count; cores sit at (i b/e0, r0)
/// for i = 1..k-1 and the field switches to a dislocation-free tail right of
/// (k-1) b/e0.
struct PeriodicDislocationField {
    ModelParams params;
    long long k = 0;
    double L = 0.0;

    double period() const { return params.period(); }
    double switch_x() const { return (k - 1) * period(); }
    std::vector<Vec2> cores() const;
};

/// Cell strain (gradient of the cell displacement) on the principal cell;
/// x must lie in (0, P]. Second row identically zero.
Mat2 lattice_cell_value(double x, double y, const ModelParams& params);

/// Dislocation-free tail strain at offset xi right of the switch line:
/// constant misfit below y=0, sheared wedge for 0 < y < xi, zero above.
Mat2 tail_value(double xi, double y, double e0);

/// Full unmollified construction strain at any point of the plane.
Mat2 sharp_value(const PeriodicDislocationField& field, Vec2 z);

/// Dislocation-free island strain: [[e0 (1 - y/L), -e0 x / L], [0, 0]] for
/// 0 <= y <= L, zero above, constant misfit [[e0,0],[0,0]] below y = 0.
struct DislocationFreeField {
    double L = 1.0;
    double e0 = 1.0;
    Mat2 value(Vec2 z) const;
};

struct ConstantMisfitField {
    double e0 = 1.0;
};

struct ZeroField {};

class StrainField;

/// Convolution of a base strain with J_{r0}; evaluated pointwise by adaptive
/// polar quadrature aligned with the base field's interface lines.
struct MollifiedField {
    std::shared_ptr<const StrainField> base;
    MollifierSpec spec;
    int base_order = 24;     // starting angular order
    double abs_tol = -1.0;   // <0: auto 1e-8 max(e0, b/r0)

    double tolerance() const;
};

using StrainFieldVariant =
    std::variant<ZeroField, ConstantMisfitField, DislocationFreeField,
                 PeriodicDislocationField, MollifiedField>;

class StrainField : public StrainFieldVariant {
  public:
    using StrainFieldVariant::StrainFieldVariant;
    const StrainFieldVariant& as_variant() const { return *this; }
};

StrainField make_mollified(PeriodicDislocationField base, double r0_scale = -1.0);

/// Point evaluation of any variant (mollified variants run the convolution
/// at their stored tolerance).
Mat2 evaluate(const StrainField& field, Vec2 z);

/// y level above which the field is identically zero (+inf when none).
double field_ceiling(const StrainField& field);

/// Infinite line in the plane.
struct InterfaceLine {
    Vec2 point;
    Vec2 dir;  // unit direction
};

/// Interface lines of the base field meeting the disc B_radius(z); used to
/// align convolution panels. Empty for fields smooth near z.
std::vector<InterfaceLine> interface_lines_near(const StrainField& base,
                                                Vec2 z, double radius);

/// Points where the base field is unbounded (lattice pinch points) within
/// `radius` of z.
std::vector<Vec2> singular_points_near(const StrainField& base, Vec2 z,
                                       double radius);

/// Local structure of the base field on B_radius(z), used for exact
/// convolution shortcuts.
enum class LocalStructure { Constant, Affine, Smooth, Mixed };
LocalStructure local_structure(const StrainField& base, Vec2 z, double radius);

/// Distance from z to the dislocation lattice {(i b/e0, r0) : i <= k-1}.
double lattice_distance(const PeriodicDislocationField& field, Vec2 z);

/// Pointwise majorant check: |H(z)| against the three-term bound
/// C (b/r0 on the core union S, b/dist off S below y = 4 b/e0, plus e0).
struct PointwiseBoundReport {
    double value;
    double bound;
    double ratio;  // value / bound (0 when both vanish)
};
PointwiseBoundReport verify_pointwise_bound(Vec2 z, const MollifiedField& field,
                                            double fitted_C);

}  // namespace episcale
