#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "lab/concentration.hpp"
#include "lab/covering.hpp"
#include "lab/grid1d.hpp"
#include "lab/measures.hpp"
#include "lab/mckean.hpp"
#include "lab/transport.hpp"

namespace lab {

// Measures: header "d,N", then one "w,x_1,...,x_d" line per atom, decimal,
// round-trip exact at 17 significant digits.
void write_measure(std::ostream& out, const DiscreteMeasure& mu);
void write_measure(const std::filesystem::path& path, const DiscreteMeasure& mu);
DiscreteMeasure read_measure(std::istream& in);
DiscreteMeasure read_measure(const std::filesystem::path& path);

// Plans: "i,j,mass" rows plus a "cost=<value>" trailer.
void write_plan(std::ostream& out, const TransportPlan& plan);
TransportPlan read_plan(std::istream& in);

// Covers serialize as center lists in the measure format (uniform weights);
// net points as a "K" line followed by the numerators.
void write_cover(std::ostream& out, const BallCover& cover);
void write_net_point(std::ostream& out, const NetPoint& np);
NetPoint read_net_point(std::istream& in);

// Densities: CSV "x,f(x)" with a comment header carrying the metadata.
void write_density_csv(const std::filesystem::path& path, const GridDensity1D& g,
                       const std::string& potential_tag);
GridDensity1D read_density_csv(const std::filesystem::path& path);

// Trajectories: binary header (N, d, stride, dt, seed, stream, frames,
// coupled flag), then per-frame time and little-endian positions.
void write_trajectory(const std::filesystem::path& path, const TrajectoryBundle& bundle);
TrajectoryBundle read_trajectory(const std::filesystem::path& path);

// One-line JSON record of a BoundReport.
std::string bound_report_json(const BoundReport& rep);

// 17-significant-digit decimal (round-trip exact for doubles).
std::string format_double(double v);

}  // namespace lab
