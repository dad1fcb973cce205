#pragma once

#include <span>
#include <string>
#include <vector>

#include "episcale/ball_construction.hpp"
#include "episcale/dislocations.hpp"
#include "episcale/energy.hpp"
#include "episcale/geometry.hpp"
#include "episcale/lowerbound.hpp"
#include "episcale/scaling.hpp"

namespace episcale {

/// Shortest decimal representation that round-trips the double exactly
/// (std::to_chars); at most 17 significant digits, locale-free.
std::string format_double(double v);
double parse_double(const std::string& s);

/// Leading comment line carrying the parameter tuple and seed; every emitted
/// file starts with one.
std::string header_comment(const ModelParams& params, std::uint64_t seed);

/// Profiles: "x,h" rows. Readers skip '#' comment lines.
std::string profile_to_csv(const Profile& profile,
                           const std::string& comment = {});
Profile profile_from_csv(const std::string& text);

/// Dislocation measures: header comment carries b and r0, then "x,y" rows.
std::string measure_to_csv(const DislocationMeasure& sigma, double r0,
                           const std::string& comment = {});
DislocationMeasure measure_from_csv(const std::string& text, double* r0_out);

/// Field sampling dump: "x,y,H11,H12,H21,H22".
std::string field_dump_csv(const StrainField& field,
                           std::span<const Vec2> points,
                           const std::string& comment = {});

/// Energy report: "surface,elastic,nucleation,total,elastic_err".
std::string energy_report_csv(const EnergyBreakdown& e,
                              const std::string& comment = {});

/// Sweep rows:
/// "gamma,e0,b,d,r0,c0,L,surface,elastic,nucleation,total,s,ratio,branch";
/// flagged rows carry nan numerics and branch "error".
std::string sweep_to_csv(std::span<const SweepRow> rows,
                         const std::string& comment = {});

/// Ball event log: "t,event,id_a,id_b,id_new,cx,cy,r" with init rows for the
/// input balls (id_a = id_b = -1).
std::string ball_events_csv(const BallFamily& family,
                            std::span<const Ball> input,
                            const std::string& comment = {});

/// Segment decomposition: "x_i,l_i,kind,d_i,cores" with kind in {lh, ld}.
std::string decomposition_csv(const SegmentDecomposition& dec,
                              const std::string& comment = {});

}  // namespace episcale
