// sweep.hpp - phase-diagram grids over (eta1, eta2), quarter-circle arc
// cuts with branch connection, and finite-size scans over N.

#pragma once

#include "bistab/arc.hpp"
#include "bistab/model.hpp"
#include "bistab/steady_state.hpp"

#include <string>
#include <vector>

namespace bistab {

enum class NodeStatus { solved, degenerate, failed };

struct PhaseDiagram {
    std::vector<double> eta1_axis, eta2_axis;
    // row-major, index i * eta2_axis.size() + j for (eta1_axis[i], eta2_axis[j])
    std::vector<int> counts;        // stable solutions
    std::vector<int> total_counts;  // real roots
    std::vector<char> marginal_mask;
    std::vector<NodeStatus> status;
    std::vector<std::string> messages;  // warnings or error text per node

    std::size_t index(std::size_t i, std::size_t j) const { return i * eta2_axis.size() + j; }
    std::size_t node_count() const { return counts.size(); }
};

/// Solves every node of a resolution x resolution grid over [0, eta1_max] x
/// [0, eta2_max]. The undriven origin is marked degenerate. Node failures
/// are recorded, never thrown. Output is independent of `threads`.
PhaseDiagram phase_diagram_grid(const SystemParams& base, double eta1_max, double eta2_max, int resolution,
                                int threads = 0);

struct ArcPoint {
    double phi = 0.0;
    double eta1 = 0.0, eta2 = 0.0;
    SolutionSet set;
    bool failed = false;
    std::string error;
};

struct Branch {
    int id = 0;
    // (phi index, solution index within that point's SolutionSet), increasing phi
    std::vector<std::pair<int, int>> members;
};

struct BranchAmbiguity {
    int phi_index = 0;
    int branch_id = 0;
    std::vector<int> candidate_solutions;  // solution indices within threshold
};

struct ArcSweep {
    double radius = 0.0;
    AngleConvention convention = AngleConvention::from_vertical;
    std::vector<ArcPoint> points;
    std::vector<Branch> branches;
    std::vector<std::vector<int>> branch_of;  // [phi index][solution index] -> branch id
    std::vector<BranchAmbiguity> ambiguities;
    double jump_threshold = 0.0;

    std::vector<double> angles() const;
};

/// Full SolutionSet at n_phi equally spaced angles over [0, pi/2], then
/// nearest-neighbour branch connection in (x1, x2) with threshold ten times
/// the median consecutive step.
ArcSweep arc_sweep(const SystemParams& base, double radius, int n_phi,
                   AngleConvention convention = AngleConvention::from_vertical, int threads = 0);

/// Connects solutions of consecutive arc points into branches.
void connect_branches(ArcSweep& arc);

/// One arc per atom number, everything else (including the scaled radius)
/// held fixed.
std::vector<ArcSweep> finite_size_scan(const SystemParams& base, const std::vector<double>& N_list,
                                       double radius, int n_phi,
                                       AngleConvention convention = AngleConvention::from_vertical,
                                       int threads = 0);

/// Angular measure of the points with at least two stable solutions.
double bistable_width(const ArcSweep& arc);

/// Largest ne1 + ne2 over all stable solutions of the arc.
double max_stable_purity_proxy(const ArcSweep& arc);

} // namespace bistab
