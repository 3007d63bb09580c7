#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

#include "bistab/observables.hpp"
#include "bistab/output.hpp"
#include "bistab/sweep.hpp"

#include <cmath>
#include <set>
#include <sstream>

using namespace bistab;
using fixture::count_stable;

namespace {

std::set<int> occurring(const std::vector<int>& v, const PhaseDiagram& pd)
{
    std::set<int> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (pd.status[i] == NodeStatus::solved)
            out.insert(v[i]);
    return out;
}

std::string grid_csv(const PhaseDiagram& pd)
{
    std::ostringstream s;
    write_grid_csv(s, pd);
    return s.str();
}

std::string arc_csv(const ArcSweep& arc)
{
    std::ostringstream s;
    write_arc_csv(s, arc);
    return s.str();
}

const SteadyState& member(const ArcSweep& arc, std::pair<int, int> m)
{
    return arc.points[m.first].set.solutions[m.second];
}

double step(const SteadyState& a, const SteadyState& b)
{
    return std::hypot(a.x1 - b.x1, a.x2 - b.x2);
}

double transmittance_or_nan(const SteadyState& ss, const SystemParams& p, Mode m)
{
    return p.eta(m) > 0.0 ? transmittance_exact(ss, p, m) : NAN;
}

bool close_or_both_nan(double a, double b, double tol)
{
    return (std::isnan(a) && std::isnan(b)) || std::abs(a - b) <= tol;
}

struct Fold {
    int phi_index;
    bool stable;
};

// interior branch endpoints, i.e. where a branch starts after index 0 or
// ends before the last index
std::vector<Fold> folds(const ArcSweep& arc)
{
    std::vector<Fold> out;
    const int last = static_cast<int>(arc.points.size()) - 1;
    for (const Branch& b : arc.branches) {
        const auto first = b.members.front(), end = b.members.back();
        if (first.first > 0)
            out.push_back({first.first, member(arc, first).stable});
        if (end.first < last)
            out.push_back({end.first, member(arc, end).stable});
    }
    return out;
}

// largest consecutive (x1, x2) step along any branch, skipping steps within
// `margin` of a fold angle
double max_branch_step(const ArcSweep& arc, const std::vector<double>& fold_angles, double margin)
{
    double worst = 0.0;
    for (const Branch& b : arc.branches) {
        for (std::size_t i = 1; i < b.members.size(); ++i) {
            const double phi = arc.points[b.members[i].first].phi;
            bool near = false;
            for (double f : fold_angles)
                near = near || std::abs(phi - f) < margin;
            if (!near)
                worst = std::max(worst, step(member(arc, b.members[i - 1]), member(arc, b.members[i])));
        }
    }
    return worst;
}

SteadyState at_inversions(double x1, double x2)
{
    SteadyState ss;
    ss.x1 = x1;
    ss.x2 = x2;
    ss.state.ne1 = 0.0;
    ss.state.ng1 = -x1;
    ss.state.ng2 = -x2;
    return ss;
}

} // namespace

TEST_CASE("phase diagram at N = 5000 has one and three root domains only")
{
    const PhaseDiagram pd = phase_diagram_grid(baseline_params(5000), 5.0, 5.0, 51);
    CHECK(pd.eta1_axis.size() == 51);
    CHECK(pd.eta1_axis.front() == 0.0);
    CHECK(pd.eta1_axis.back() == 5.0);
    CHECK(pd.status[pd.index(0, 0)] == NodeStatus::degenerate);
    const auto totals = occurring(pd.total_counts, pd);
    CHECK(totals == std::set<int>{1, 3});
}

TEST_CASE("phase diagram topology grows with N")
{
    const PhaseDiagram small = phase_diagram_grid(baseline_params(1e4), 5.0, 5.0, 51);
    const auto t4 = occurring(small.total_counts, small);
    CHECK(t4.count(7) == 0);

    const PhaseDiagram large = phase_diagram_grid(baseline_params(1e5), 5.0, 5.0, 51);
    const auto t5 = occurring(large.total_counts, large);
    CHECK(t5.count(5) == 1);
    CHECK(t5.count(7) == 1);
}

TEST_CASE("stable counts follow the root counts at moderate N")
{
    for (double N : {5e3, 1e4}) {
        const PhaseDiagram pd = phase_diagram_grid(baseline_params(N), 5.0, 5.0, 41);
        for (std::size_t i = 0; i < pd.node_count(); ++i) {
            if (pd.status[i] != NodeStatus::solved || pd.marginal_mask[i])
                continue;
            CHECK(pd.counts[i] == (pd.total_counts[i] + 1) / 2);
        }
    }
}

TEST_CASE("grid output does not depend on the worker count")
{
    const SystemParams base = baseline_params(1e5);
    const PhaseDiagram one = phase_diagram_grid(base, 5.0, 5.0, 31, 1);
    const PhaseDiagram four = phase_diagram_grid(base, 5.0, 5.0, 31, 4);
    CHECK(one.counts == four.counts);
    CHECK(one.total_counts == four.total_counts);
    CHECK(grid_csv(one) == grid_csv(four));
}

TEST_CASE("grid and arc arguments are validated")
{
    const SystemParams base = baseline_params();
    CHECK_THROWS_AS(phase_diagram_grid(base, 5.0, 5.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(phase_diagram_grid(base, 0.0, 5.0, 11), std::invalid_argument);
    CHECK_THROWS_AS(phase_diagram_grid(base, 5.0, -1.0, 11), std::invalid_argument);
    CHECK_THROWS_AS(arc_sweep(base, 0.0, 11), std::invalid_argument);
    CHECK_THROWS_AS(arc_sweep(base, 1.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(finite_size_scan(base, {5000, 0.5}, 0.29, 11), std::invalid_argument);
}

TEST_CASE("arc cuts through and past the bistable domain")
{
    const SystemParams base = baseline_params(5000);
    for (double radius : {0.29, 1.13, 2.25}) {
        const ArcSweep arc = arc_sweep(base, radius, 361);
        CHECK(arc.angles().front() == 0.0);
        CHECK(arc.angles().back() == quarter_turn);
        int multivalued = 0, unstable_middle = 0;
        for (const ArcPoint& pt : arc.points) {
            REQUIRE_FALSE(pt.failed);
            if (pt.set.size() == 3) {
                ++multivalued;
                unstable_middle += pt.set.solutions[0].stable && !pt.set.solutions[1].stable &&
                                   pt.set.solutions[2].stable;
            }
        }
        CHECK(multivalued > 0);
        CHECK(unstable_middle == multivalued);
    }
    for (double radius : {3.38, 4.5}) {
        const ArcSweep arc = arc_sweep(base, radius, 361);
        for (const ArcPoint& pt : arc.points) {
            REQUIRE(pt.set.size() == 1);
            CHECK(pt.set.solutions[0].stable);
        }
        CHECK(arc.branches.size() == 1);
    }
}

TEST_CASE("arc traces are mirror symmetric")
{
    const ArcSweep arc = arc_sweep(baseline_params(5000), 1.13, 361);
    const std::size_t n = arc.points.size();
    for (std::size_t k = 0; k < n; ++k) {
        const ArcPoint &a = arc.points[k], &b = arc.points[n - 1 - k];
        REQUIRE(a.set.size() == b.set.size());
        const std::size_t m = a.set.size();
        for (std::size_t s = 0; s < m; ++s) {
            // x1 ascending on one side is x2 ascending on the other
            const SteadyState& u = a.set.solutions[s];
            const SteadyState& v = b.set.solutions[m - 1 - s];
            CHECK(close_or_both_nan(transmittance_or_nan(u, a.set.params, Mode::one),
                                    transmittance_or_nan(v, b.set.params, Mode::two), 1e-9));
            CHECK(u.stable == v.stable);
        }
    }

    // branch-wise: the mirror images of a branch's members form one branch
    for (const Branch& br : arc.branches) {
        std::set<int> images;
        for (auto [k, s] : br.members) {
            const std::size_t m = arc.points[k].set.size();
            images.insert(arc.branch_of[n - 1 - k][m - 1 - s]);
        }
        CHECK(images.size() == 1);
    }
}

TEST_CASE("the two angle conventions are mirror images")
{
    const SystemParams base = baseline_params(5000);
    const ArcSweep vertical = arc_sweep(base, 1.13, 181, AngleConvention::from_vertical);
    const ArcSweep axis = arc_sweep(base, 1.13, 181, AngleConvention::from_axis_1);
    CHECK(vertical.convention == AngleConvention::from_vertical);
    for (std::size_t k = 0; k < vertical.points.size(); ++k) {
        const ArcPoint &v = vertical.points[k], &a = axis.points[k];
        CHECK(v.phi == a.phi);
        CHECK(v.eta1 == a.eta2);
        CHECK(v.eta2 == a.eta1);
        REQUIRE(v.set.size() == a.set.size());
        const std::size_t m = v.set.size();
        for (std::size_t s = 0; s < m; ++s)
            CHECK(oracle::distance(v.set.solutions[s].state, swapped(a.set.solutions[m - 1 - s].state)) < 1e-10);
    }
}

TEST_CASE("branches partition every arc point")
{
    for (double radius : {0.29, 1.13, 2.25, 4.5}) {
        const ArcSweep arc = arc_sweep(baseline_params(5000), radius, 721);
        for (std::size_t k = 0; k < arc.points.size(); ++k) {
            const auto& ids = arc.branch_of[k];
            CHECK(ids.size() == arc.points[k].set.size());
            CHECK(std::set<int>(ids.begin(), ids.end()).size() == ids.size());
        }
        for (const Branch& br : arc.branches) {
            for (std::size_t i = 1; i < br.members.size(); ++i) {
                CHECK(br.members[i].first == br.members[i - 1].first + 1);
                CHECK(step(member(arc, br.members[i - 1]), member(arc, br.members[i])) < arc.jump_threshold);
            }
        }
        // near-degenerate pairs only occur where two branches annihilate
        const auto fs = folds(arc);
        for (const BranchAmbiguity& a : arc.ambiguities) {
            const bool by_fold = std::any_of(fs.begin(), fs.end(),
                                             [&](const Fold& f) { return std::abs(f.phi_index - a.phi_index) <= 3; });
            CHECK(by_fold);
        }
        // an S-curve is three branches: two stable ones and the middle
        CHECK(arc.branches.size() == (radius < 4.0 ? 3u : 1u));
    }
}

TEST_CASE("branch steps shrink linearly with the angular spacing away from folds")
{
    const SystemParams base = baseline_params(5000);
    const ArcSweep coarse = arc_sweep(base, 1.13, 361);
    const ArcSweep fine = arc_sweep(base, 1.13, 721);
    std::vector<double> fold_angles;
    for (const Fold& f : folds(coarse))
        fold_angles.push_back(coarse.points[f.phi_index].phi);
    REQUIRE_FALSE(fold_angles.empty());
    const double margin = 0.05;
    const double ratio = max_branch_step(fine, fold_angles, margin) / max_branch_step(coarse, fold_angles, margin);
    MESSAGE("step ratio " << ratio);
    CHECK(ratio == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("folds pair a stable branch with the unstable one")
{
    for (double radius : {0.29, 1.13, 2.25}) {
        const ArcSweep arc = arc_sweep(baseline_params(5000), radius, 721);
        const auto fs = folds(arc);
        CHECK(fs.size() % 2 == 0);
        CHECK_FALSE(fs.empty());
        for (const Fold& f : fs) {
            const bool paired = std::any_of(fs.begin(), fs.end(), [&](const Fold& g) {
                return g.stable != f.stable && std::abs(g.phi_index - f.phi_index) <= 2;
            });
            CHECK(paired);
        }
    }
}

TEST_CASE("two candidates within the threshold are flagged")
{
    ArcSweep arc;
    arc.points.resize(3);
    arc.points[0].set.solutions = {at_inversions(-0.5, -0.5), at_inversions(-0.1, -0.9)};
    arc.points[1].set.solutions = {at_inversions(-0.5, -0.501), at_inversions(-0.5, -0.499),
                                   at_inversions(-0.1, -0.9)};
    arc.points[2].set.solutions = {at_inversions(-0.5, -0.501), at_inversions(-0.5, -0.499),
                                   at_inversions(-0.1, -0.9)};
    connect_branches(arc);
    // one ambiguous step into index 1, and both twins are ambiguous into index 2
    REQUIRE(arc.ambiguities.size() == 3);
    CHECK(arc.ambiguities[0].phi_index == 1);
    CHECK(arc.ambiguities[0].branch_id == arc.branch_of[0][0]);
    CHECK(arc.ambiguities[0].candidate_solutions == std::vector<int>{0, 1});
    CHECK(arc.ambiguities[1].phi_index == 2);
    CHECK(arc.ambiguities[2].phi_index == 2);
    // both candidates still end up on some branch
    CHECK(arc.branches.size() == 3);
    CHECK(arc.branch_of[1][2] == arc.branch_of[0][1]);
}

TEST_CASE("finite-size scan")
{
    const SystemParams base = baseline_params();
    const std::vector<double> Ns = {5e3, 1e4, 1e5, 1e6};
    const auto scan = finite_size_scan(base, Ns, 0.29, 361);
    REQUIRE(scan.size() == Ns.size());

    std::vector<double> width, purity;
    for (const ArcSweep& arc : scan) {
        width.push_back(bistable_width(arc));
        purity.push_back(max_stable_purity_proxy(arc));
    }
    for (std::size_t i = 1; i < Ns.size(); ++i) {
        CHECK(width[i] > width[i - 1]);
        CHECK(purity[i] < purity[i - 1]);
    }
    CHECK(width.back() < quarter_turn);

    SystemParams p = base;
    p.N = 5e3;
    CHECK(arc_csv(scan[0]) == arc_csv(arc_sweep(p, 0.29, 361)));
}

TEST_CASE("bistable width integrates the multistable angles")
{
    ArcSweep arc;
    arc.points.resize(5);
    for (int k = 0; k < 5; ++k) {
        arc.points[k].phi = 0.25 * k;
        SteadyState s = at_inversions(-1.0, 0.0);
        s.stable = true;
        arc.points[k].set.solutions = {s};
        if (k == 2 || k == 3)
            arc.points[k].set.solutions.push_back(s);
    }
    // two multistable angles: half-intervals on either side plus the one between
    CHECK(bistable_width(arc) == doctest::Approx(0.5));
    CHECK(count_stable(arc.points[2].set) == 2);
}
