#include "bistab/sweep.hpp"

#include "bistab/observables.hpp"
#include "bistab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace bistab {

PhaseDiagram phase_diagram_grid(const SystemParams& base, double eta1_max, double eta2_max, int resolution,
                                int threads)
{
    if (resolution < 2)
        throw std::invalid_argument("grid resolution must be at least 2");
    if (!(eta1_max > 0.0 && eta2_max > 0.0))
        throw std::invalid_argument("grid maxima must be positive");
    require_valid(base, true);

    const auto n = static_cast<std::size_t>(resolution);
    PhaseDiagram pd;
    pd.eta1_axis.resize(n);
    pd.eta2_axis.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        pd.eta1_axis[i] = eta1_max * static_cast<double>(i) / static_cast<double>(n - 1);
        pd.eta2_axis[i] = eta2_max * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    pd.counts.assign(n * n, 0);
    pd.total_counts.assign(n * n, 0);
    pd.marginal_mask.assign(n * n, 0);
    pd.status.assign(n * n, NodeStatus::solved);
    pd.messages.assign(n * n, {});

    parallel_for(n * n, resolve_thread_count(threads), [&](std::size_t k) {
        SystemParams p = base;
        p.eta1 = pd.eta1_axis[k / n];
        p.eta2 = pd.eta2_axis[k % n];
        try {
            const SolutionSet set = find_all_roots(p);
            pd.total_counts[k] = static_cast<int>(set.size());
            pd.counts[k] = set.stable_count();
            pd.marginal_mask[k] = set.has_marginal();
            if (set.size() % 2 == 0) {
                pd.status[k] = NodeStatus::failed;
                pd.messages[k] = "even number of roots recovered";
            }
            if (!set.warnings.empty() && pd.messages[k].empty())
                pd.messages[k] = set.warnings.front();
        } catch (const DegenerateParameterError& e) {
            pd.status[k] = NodeStatus::degenerate;
            pd.messages[k] = e.what();
        } catch (const std::exception& e) {
            pd.status[k] = NodeStatus::failed;
            pd.messages[k] = e.what();
        }
    });
    return pd;
}

std::vector<double> ArcSweep::angles() const
{
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& pt : points)
        out.push_back(pt.phi);
    return out;
}

namespace {

double inversion_distance(const SteadyState& a, const SteadyState& b)
{
    return std::hypot(a.x1 - b.x1, a.x2 - b.x2);
}

struct Link {
    double distance;
    int from, to;
    bool operator<(const Link& o) const { return std::tie(distance, from, to) < std::tie(o.distance, o.from, o.to); }
};

// all (previous, current) pairs sorted by distance
std::vector<Link> candidate_links(const std::vector<SteadyState>& prev, const std::vector<SteadyState>& current)
{
    std::vector<Link> links;
    for (std::size_t a = 0; a < prev.size(); ++a)
        for (std::size_t b = 0; b < current.size(); ++b)
            links.push_back({inversion_distance(prev[a], current[b]), static_cast<int>(a), static_cast<int>(b)});
    std::sort(links.begin(), links.end());
    return links;
}

// greedy one-to-one pairing in order of increasing distance
std::vector<Link> greedy_pairing(const std::vector<Link>& links, std::size_t n_prev, std::size_t n_current,
                                 double cutoff)
{
    std::vector<char> used(n_prev, 0), taken(n_current, 0);
    std::vector<Link> out;
    for (const Link& l : links) {
        if (l.distance >= cutoff)
            break;
        if (used[l.from] || taken[l.to])
            continue;
        used[l.from] = taken[l.to] = 1;
        out.push_back(l);
    }
    return out;
}

} // namespace

void connect_branches(ArcSweep& arc)
{
    const std::size_t n = arc.points.size();
    arc.branches.clear();
    arc.ambiguities.clear();
    arc.branch_of.assign(n, {});
    for (std::size_t k = 0; k < n; ++k)
        arc.branch_of[k].assign(arc.points[k].set.size(), -1);

    std::vector<std::vector<Link>> links(n);
    for (std::size_t k = 1; k < n; ++k)
        links[k] = candidate_links(arc.points[k - 1].set.solutions, arc.points[k].set.solutions);

    // Step scale: largest unconstrained link per interval, with the median
    // taken over the multivalued intervals when there are any. Steps on a
    // lone branch far from any fold are much smaller than those next to a
    // fold and would otherwise cut every branch at its turning point.
    std::vector<double> all_steps, multi_steps;
    for (std::size_t k = 1; k < n; ++k) {
        const auto pairs = greedy_pairing(links[k], arc.points[k - 1].set.size(), arc.points[k].set.size(), INFINITY);
        if (pairs.empty())
            continue;
        double worst = 0.0;
        for (const Link& l : pairs)
            worst = std::max(worst, l.distance);
        all_steps.push_back(worst);
        if (arc.points[k - 1].set.size() > 1 && arc.points[k].set.size() > 1)
            multi_steps.push_back(worst);
    }
    auto& steps = multi_steps.empty() ? all_steps : multi_steps;
    double median = 0.0;
    if (!steps.empty()) {
        std::nth_element(steps.begin(), steps.begin() + steps.size() / 2, steps.end());
        median = steps[steps.size() / 2];
    }
    arc.jump_threshold = std::max(10.0 * median, 1e-12);

    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t n_current = arc.points[k].set.size();
        std::vector<char> taken(n_current, 0);
        if (k > 0) {
            const std::size_t n_prev = arc.points[k - 1].set.size();
            std::vector<std::vector<int>> within(n_prev);
            for (const Link& l : links[k])
                if (l.distance < arc.jump_threshold)
                    within[l.from].push_back(l.to);
            for (std::size_t a = 0; a < n_prev; ++a) {
                if (within[a].size() > 1) {
                    std::sort(within[a].begin(), within[a].end());
                    arc.ambiguities.push_back({static_cast<int>(k), arc.branch_of[k - 1][a], within[a]});
                }
            }
            for (const Link& l : greedy_pairing(links[k], n_prev, n_current, arc.jump_threshold)) {
                taken[l.to] = 1;
                const int id = arc.branch_of[k - 1][l.from];
                arc.branch_of[k][l.to] = id;
                arc.branches[id].members.emplace_back(static_cast<int>(k), l.to);
            }
        }
        for (std::size_t b = 0; b < n_current; ++b) {
            if (taken[b])
                continue;
            Branch br;
            br.id = static_cast<int>(arc.branches.size());
            br.members.emplace_back(static_cast<int>(k), static_cast<int>(b));
            arc.branch_of[k][b] = br.id;
            arc.branches.push_back(std::move(br));
        }
    }
}

ArcSweep arc_sweep(const SystemParams& base, double radius, int n_phi, AngleConvention convention, int threads)
{
    if (!(radius > 0.0))
        throw std::invalid_argument("arc radius must be positive");
    if (n_phi < 3)
        throw std::invalid_argument("an arc needs at least 3 angles");
    require_valid(base, true);

    ArcSweep arc;
    arc.radius = radius;
    arc.convention = convention;
    arc.points.resize(static_cast<std::size_t>(n_phi));
    for (int k = 0; k < n_phi; ++k) {
        ArcPoint& pt = arc.points[k];
        pt.phi = k == n_phi - 1 ? quarter_turn : quarter_turn * k / (n_phi - 1);
        std::tie(pt.eta1, pt.eta2) = arc_drives(radius, pt.phi, convention);
    }

    parallel_for(arc.points.size(), resolve_thread_count(threads), [&](std::size_t k) {
        ArcPoint& pt = arc.points[k];
        SystemParams p = base;
        p.eta1 = pt.eta1;
        p.eta2 = pt.eta2;
        try {
            pt.set = find_all_roots(p);
        } catch (const std::exception& e) {
            pt.set = SolutionSet{};
            pt.set.params = p;
            pt.failed = true;
            pt.error = e.what();
        }
    });

    connect_branches(arc);
    return arc;
}

std::vector<ArcSweep> finite_size_scan(const SystemParams& base, const std::vector<double>& N_list, double radius,
                                       int n_phi, AngleConvention convention, int threads)
{
    std::vector<ArcSweep> out;
    out.reserve(N_list.size());
    for (double N : N_list) {
        if (!(N >= 1.0))
            throw std::invalid_argument("atom numbers must be >= 1");
        SystemParams p = base;
        p.N = N;
        out.push_back(arc_sweep(p, radius, n_phi, convention, threads));
    }
    return out;
}

double bistable_width(const ArcSweep& arc)
{
    const std::size_t n = arc.points.size();
    if (n < 2)
        return 0.0;
    // each angle represents its share of the trapezoid partition
    double width = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (arc.points[k].set.stable_count() < 2)
            continue;
        const double lo = k == 0 ? arc.points[0].phi : 0.5 * (arc.points[k - 1].phi + arc.points[k].phi);
        const double hi = k + 1 == n ? arc.points[n - 1].phi : 0.5 * (arc.points[k].phi + arc.points[k + 1].phi);
        width += hi - lo;
    }
    return width;
}

double max_stable_purity_proxy(const ArcSweep& arc)
{
    double best = 0.0;
    for (const auto& pt : arc.points)
        for (const auto& s : pt.set.solutions)
            if (s.stable)
                best = std::max(best, purity_proxy(s));
    return best;
}

} // namespace bistab
