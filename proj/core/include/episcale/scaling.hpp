#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "episcale/dislocations.hpp"
#include "episcale/energy.hpp"
#include "episcale/geometry.hpp"
#include "episcale/strain_fields.hpp"

namespace episcale {

enum class Branch { Elastic, Dislocation };
const char* branch_name(Branch b);

/// s(gamma, e0, b, d, r0) = gamma (1 + d)
///   + min{ (gamma e0 d)^{2/3}, [gamma e0 b d (1 + log(b/(e0 r0)))]^{1/2} }.
/// Pre: theorem-valid params. Branch ties resolve to Elastic.
struct ScalingValue {
    double value;
    Branch branch;
    double elastic_term;
    double dislocation_term;
};
ScalingValue scaling_function_s(const ModelParams& params);

/// Optimal island length for the dislocation construction:
/// min{ sqrt(gamma d) [e0 b (1 + c0 + log(b/(e0 r0)))]^{-1/2}, 1, d/(4 r0) }.
/// Pre: construction-valid params.
double optimal_L_dislocation(const ModelParams& params);

/// Optimal island length without dislocations: 1 if e0^2 <= d gamma, else
/// (d gamma)^{1/3} e0^{-2/3}.
double optimal_L_elastic(const ModelParams& params);

/// A complete admissible configuration.
struct Construction {
    Profile profile;
    StrainField field;
    DislocationMeasure sigma;
    double L;
};

/// Step 1-3 construction with equidistant dislocations and mollified strain.
/// L <= 0 selects optimal_L_dislocation clamped to the admissible range.
Construction build_dislocation_construction(const ModelParams& params,
                                            double L = -1.0);
/// Dislocation-free island with the sheared linear profile strain.
Construction build_elastic_construction(const ModelParams& params,
                                        double L = -1.0);

struct ScalingReport {
    double s_value;
    Branch s_branch;
    double L_chosen;
    EnergyBreakdown energy;             // of the winning construction
    EnergyBreakdown energy_dislocation;
    EnergyBreakdown energy_free;
    bool dislocation_won;
    double ratio;  // winning total / s
};
/// Builds both constructions at their optimal lengths, evaluates both
/// energies and reports the smaller one against s.
ScalingReport best_construction(const ModelParams& params,
                                const QuadratureSpec& spec);

enum class ConstructionChoice { Best, Dislocation, Elastic };

struct GridSpec {
    std::vector<double> gamma{1.0};
    std::vector<double> e0{1.0};
    std::vector<double> b{1.0};
    std::vector<double> d{1.0};
    std::vector<double> r0{1.0};
    std::vector<double> c0{1.0};
    ConstructionChoice construction = ConstructionChoice::Best;
    std::uint64_t seed = 0;  // recorded in outputs; grids here are explicit

    std::size_t size() const {
        return gamma.size() * e0.size() * b.size() * d.size() * r0.size() *
               c0.size();
    }
    std::vector<ModelParams> points() const;
};
std::vector<double> log_spaced(double lo, double hi, int n);

struct SweepRow {
    ModelParams params;
    double L = 0.0;
    EnergyBreakdown energy;
    double s = 0.0;
    double ratio = 0.0;
    Branch branch = Branch::Elastic;
    bool flagged = false;
    std::string error;
};

/// One row per grid point in grid order; rows that fail (invalid parameters,
/// quadrature errors) are flagged and the sweep continues. Rows are
/// independent and computed on `threads` workers with fixed output order.
std::vector<SweepRow> sweep(const GridSpec& grid, const QuadratureSpec& spec,
                            int threads = 1);

enum class FitX { D, E0, B, Gamma, R0 };
enum class FitY { Total, MinTerm, SValue, SMinTerm, Elastic };
enum class FitModel { PurePower, PowerWithLog };

/// Least-squares fit of log y against log x over unflagged rows. MinTerm is
/// total - gamma (1 + d) (the additive surface part of s removed); the
/// log-corrected model divides y by sqrt(1 + log(b/(e0 r0))) first.
struct FitResult {
    double slope;
    double intercept;
    double r2;
    std::size_t points;
};
FitResult fit_exponent(std::span<const SweepRow> rows, FitX x_var, FitY y_var,
                       FitModel model);

/// Flat-film criterion: dislocations pay off when min{L, d/L} dominates
/// (b/e0) log(b/(e0 r0)).
struct FlatFilmResult {
    bool favorable;
    double lhs;
    double rhs;
    double elastic_energy_free;   // min{e0^2 L^2, e0^2 d}
    double elastic_energy_disloc; // L e0 b min{log(d/(L r0)), log(b/(e0 r0))}
};
FlatFilmResult flat_film_favorability(double L, const ModelParams& params);

}  // namespace episcale
