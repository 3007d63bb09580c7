// output.hpp - CSV serialization of every command's results, SHA-256 file
// checksums and SVG line plots.

#pragma once

#include "bistab/dynamics.hpp"
#include "bistab/sweep.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace bistab {

// Column sets are fixed per command.
const std::vector<std::string>& arc_columns();         // arc and hysteresis
const std::vector<std::string>& scan_columns();        // "N" followed by arc_columns()
const std::vector<std::string>& grid_columns();
const std::vector<std::string>& steady_columns();
const std::vector<std::string>& trajectory_columns();

/// One row per (phi, solution), in phi order then x1 order. Failed points
/// produce no rows.
void write_arc_csv(std::ostream& out, const ArcSweep& arc);

void write_scan_csv(std::ostream& out, const std::vector<ArcSweep>& scan, const std::vector<double>& N_list);

/// Forward records (branch_id 0) followed by backward records (branch_id 1).
/// `stable` is set only for converged, stable records.
void write_hysteresis_csv(std::ostream& out, const HysteresisResult& r);

/// All nodes except the undriven origin, eta1 major.
void write_grid_csv(std::ostream& out, const PhaseDiagram& pd);

void write_steady_csv(std::ostream& out, const SolutionSet& set);

void write_trajectory_csv(std::ostream& out, const Trajectory& tr);

/// Lower-case hex SHA-256 of a file's contents.
std::string sha256_file(const std::string& path);

// Self-contained SVG 1.1 figures. Stable branches are drawn solid, unstable
// ones dashed.
void write_arc_svg(std::ostream& out, const ArcSweep& arc);
void write_scan_svg(std::ostream& out, const std::vector<ArcSweep>& scan, const std::vector<double>& N_list);
void write_hysteresis_svg(std::ostream& out, const HysteresisResult& r);
void write_grid_svg(std::ostream& out, const PhaseDiagram& pd);

} // namespace bistab
