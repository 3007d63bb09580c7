// Minimal SVG line plots. Each figure holds one or more panels laid out
// side by side; every panel maps its data box onto a fixed pixel frame.

#include "bistab/config.hpp"
#include "bistab/observables.hpp"
#include "bistab/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace bistab {

namespace {

constexpr double kPanelW = 420, kPanelH = 320, kMargin = 55;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Panel {
    double x0, y0;  // pixel origin of the frame
    double xmin, xmax, ymin, ymax;

    double px(double x) const { return x0 + kMargin + (x - xmin) / (xmax - xmin) * (kPanelW - 1.5 * kMargin); }
    double py(double y) const
    {
        return y0 + kPanelH - kMargin + (y - ymin) / (ymax - ymin) * -(kPanelH - 1.5 * kMargin);
    }
};

class Svg {
public:
    Svg(std::ostream& out, int panels) : out_(out)
    {
        out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
             << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(kPanelW * panels)
             << "\" height=\"" << num(kPanelH) << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
             << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    }
    ~Svg() { out_ << "</svg>\n"; }

    void axes(const Panel& p, const std::string& xlabel, const std::string& ylabel)
    {
        const double l = p.px(p.xmin), r = p.px(p.xmax), b = p.py(p.ymin), t = p.py(p.ymax);
        out_ << "<rect x=\"" << num(l) << "\" y=\"" << num(t) << "\" width=\"" << num(r - l) << "\" height=\""
             << num(b - t) << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int i = 0; i <= 4; ++i) {
            const double xv = p.xmin + (p.xmax - p.xmin) * i / 4.0;
            const double yv = p.ymin + (p.ymax - p.ymin) * i / 4.0;
            text(p.px(xv), b + 14, tick_label(xv), "middle");
            text(l - 4, p.py(yv) + 4, tick_label(yv), "end");
        }
        text(0.5 * (l + r), b + 32, xlabel, "middle");
        out_ << "<text transform=\"translate(" << num(p.x0 + 14) << "," << num(0.5 * (b + t))
             << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel << "</text>\n";
    }

    void text(double x, double y, const std::string& s, const char* anchor)
    {
        out_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor << "\">" << s
             << "</text>\n";
    }

    void line(const Panel& p, const std::vector<std::pair<double, double>>& pts, const char* color, bool dashed)
    {
        if (pts.size() < 2)
            return;
        out_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
             << (dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
        for (const auto& [x, y] : pts)
            out_ << num(p.px(x)) << ',' << num(p.py(y)) << ' ';
        out_ << "\"/>\n";
    }

    void cell(const Panel& p, double x, double y, double dx, double dy, const char* color)
    {
        const double l = p.px(x - dx / 2), r = p.px(x + dx / 2), t = p.py(y + dy / 2), b = p.py(y - dy / 2);
        out_ << "<rect x=\"" << num(l) << "\" y=\"" << num(t) << "\" width=\"" << num(r - l + 0.3)
             << "\" height=\"" << num(b - t + 0.3) << "\" fill=\"" << color << "\"/>\n";
    }

private:
    std::ostream& out_;
};

// Splits a branch into runs of equal stability. Neighbouring runs share
// their boundary point so the drawn curve stays connected.
void draw_branch(Svg& svg, const Panel& panel, const ArcSweep& arc, const Branch& br, Mode mode, const char* color)
{
    std::vector<std::pair<double, double>> run;
    bool run_stable = true;
    for (std::size_t m = 0; m < br.members.size(); ++m) {
        const auto [k, b] = br.members[m];
        const ArcPoint& pt = arc.points[k];
        const SteadyState& ss = pt.set.solutions[b];
        const ObservableRecord o = observe(ss, pt.set.params);
        const double T = mode == Mode::one ? o.T1 : o.T2;
        if (!std::isfinite(T)) {
            svg.line(panel, run, color, !run_stable);
            run.clear();
            continue;
        }
        if (!run.empty() && ss.stable != run_stable) {
            const auto last = run.back();
            svg.line(panel, run, color, !run_stable);
            run = {last};
        }
        run_stable = ss.stable;
        run.emplace_back(pt.phi, T);
    }
    svg.line(panel, run, color, !run_stable);
}

void arc_panels(Svg& svg, const std::vector<const ArcSweep*>& arcs, const std::vector<std::string>& labels)
{
    for (int m = 0; m < 2; ++m) {
        const Mode mode = m == 0 ? Mode::one : Mode::two;
        Panel panel{m * kPanelW, 0.0, 0.0, quarter_turn, 0.0, 1.05};
        svg.axes(panel, "phi [rad]", m == 0 ? "T1" : "T2");
        for (std::size_t a = 0; a < arcs.size(); ++a) {
            const char* color = kPalette[a % std::size(kPalette)];
            for (const Branch& br : arcs[a]->branches)
                draw_branch(svg, panel, *arcs[a], br, mode, color);
            if (m == 0 && !labels.empty())
                svg.text(panel.px(quarter_turn) - 4, panel.py(1.05) + 14 + 13.0 * a, labels[a], "end");
        }
    }
}

} // namespace

void write_arc_svg(std::ostream& out, const ArcSweep& arc)
{
    Svg svg(out, 2);
    arc_panels(svg, {&arc}, {"eta = " + tick_label(arc.radius)});
}

void write_scan_svg(std::ostream& out, const std::vector<ArcSweep>& scan, const std::vector<double>& N_list)
{
    Svg svg(out, 2);
    std::vector<const ArcSweep*> arcs;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        arcs.push_back(&scan[i]);
        labels.push_back("N = " + tick_label(i < N_list.size() ? N_list[i] : 0.0));
    }
    arc_panels(svg, arcs, labels);
}

void write_hysteresis_svg(std::ostream& out, const HysteresisResult& r)
{
    Svg svg(out, 1);
    Panel panel{0.0, 0.0, 0.0, quarter_turn, 0.0, 1.05};
    svg.axes(panel, "phi [rad]", "T1");
    const char* colors[] = {kPalette[1], kPalette[0]};
    const char* names[] = {"forward", "backward"};
    int d = 0;
    for (const auto* records : {&r.forward, &r.backward}) {
        std::vector<std::pair<double, double>> pts;
        for (const SweepRecord& rec : *records)
            if (std::isfinite(rec.observables.T1))
                pts.emplace_back(rec.control, rec.observables.T1);
        svg.line(panel, pts, colors[d], d == 1);
        svg.text(panel.px(quarter_turn) - 4, panel.py(1.05) + 14 + 13.0 * d, names[d], "end");
        ++d;
    }
}

void write_grid_svg(std::ostream& out, const PhaseDiagram& pd)
{
    Svg svg(out, 1);
    const double xmax = pd.eta1_axis.back(), ymax = pd.eta2_axis.back();
    Panel panel{0.0, 0.0, 0.0, xmax, 0.0, ymax};
    const double dx = pd.eta1_axis.size() > 1 ? pd.eta1_axis[1] : xmax;
    const double dy = pd.eta2_axis.size() > 1 ? pd.eta2_axis[1] : ymax;
    const char* by_count[] = {"#ffffff", "#d9d9d9", "#6baed6", "#fd8d3c", "#cb181d"};
    for (std::size_t i = 0; i < pd.eta1_axis.size(); ++i) {
        for (std::size_t j = 0; j < pd.eta2_axis.size(); ++j) {
            const std::size_t k = pd.index(i, j);
            if (pd.status[k] != NodeStatus::solved)
                continue;
            const int stable = std::clamp(pd.counts[k], 0, 4);
            svg.cell(panel, pd.eta1_axis[i], pd.eta2_axis[j], dx, dy, by_count[stable]);
        }
    }
    svg.axes(panel, "eta1", "eta2");
    for (int s = 1; s <= 4; ++s) {
        svg.cell(panel, xmax * (0.62 + 0.09 * s), ymax * 0.95, dx * 2, dy * 2, by_count[s]);
        svg.text(panel.px(xmax * (0.62 + 0.09 * s)) + 8, panel.py(ymax * 0.95) + 4, std::to_string(s), "start");
    }
}

} // namespace bistab
