#include "bistab/run.hpp"

#include "bistab/dynamics.hpp"
#include "bistab/output.hpp"
#include "bistab/parallel.hpp"
#include "bistab/sweep.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>

namespace bistab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kIntegerKeys = {"n_phi", "resolution", "samples", "n_steps", "threads"};
const std::set<std::string> kTextKeys = {"command", "convention", "out_dir"};

std::string join_number_list(const json& arr)
{
    std::string s = "[";
    for (std::size_t i = 0; i < arr.size(); ++i)
        s += (i ? ", " : "") + format_double(arr[i].get<double>());
    return s + "]";
}

class RunContext {
public:
    RunContext(const RunConfig& cfg, std::ostream& log) : cfg_(cfg), log_(log) {}

    // Writes one output file and records it for the manifest.
    void write(const std::string& name, const std::function<void(std::ostream&)>& body)
    {
        const fs::path path = fs::path(cfg_.out_dir) / name;
        {
            std::ofstream f(path, std::ios::binary);
            if (!f)
                throw std::runtime_error("cannot write '" + path.string() + "'");
            body(f);
        }
        files_.push_back(name);
        log_ << "wrote " << path.string() << '\n';
    }

    void warn(const std::string& w)
    {
        warnings_.push_back(w);
        log_ << "warning: " << w << '\n';
    }

    void fail(const std::string& w)
    {
        warn(w);
        failed_ = true;
    }

    int finish(double wall_time)
    {
        const SystemParams& p = cfg_.params;
        json manifest;
        manifest["config"] = config_to_json(cfg_);
        manifest["version"] = kVersion;
        manifest["threads"] = resolve_thread_count(cfg_.threads);
        manifest["derived"] = {{"g_collective", p.g()},
                               {"cooperativity1", cooperativity(p, Mode::one)},
                               {"cooperativity2", cooperativity(p, Mode::two)}};
        manifest["wall_time_s"] = wall_time;
        manifest["warnings"] = warnings_;
        json files = json::array();
        for (const auto& name : files_) {
            const fs::path path = fs::path(cfg_.out_dir) / name;
            files.push_back({{"path", name}, {"sha256", sha256_file(path.string())}, {"bytes", fs::file_size(path)}});
        }
        manifest["files"] = files;
        const int code = failed_ ? exit_code::partial : exit_code::ok;
        manifest["exit_code"] = code;

        const fs::path path = fs::path(cfg_.out_dir) / "manifest.json";
        std::ofstream(path) << manifest.dump(2) << '\n';
        log_ << "wrote " << path.string() << '\n';
        return code;
    }

private:
    const RunConfig& cfg_;
    std::ostream& log_;
    std::vector<std::string> files_, warnings_;
    bool failed_ = false;
};

SettleOptions settle_options(const RunConfig& cfg)
{
    SettleOptions o;
    o.eps = cfg.settle_eps;
    o.t_max = cfg.settle_t_max;
    o.rel_tol = cfg.rel_tol;
    o.abs_tol = cfg.abs_tol;
    return o;
}

void report_arc(RunContext& ctx, const ArcSweep& arc, const std::string& tag)
{
    for (const ArcPoint& pt : arc.points) {
        if (pt.failed)
            ctx.fail(tag + "phi=" + format_double(pt.phi) + ": " + pt.error);
        else if (pt.set.has_marginal())
            ctx.warn(tag + "phi=" + format_double(pt.phi) + ": marginal fixed point");
    }
    if (!arc.ambiguities.empty())
        ctx.warn(tag + std::to_string(arc.ambiguities.size()) + " ambiguous branch connections");
}

void run_steady(const RunConfig& cfg, RunContext& ctx)
{
    SolutionSet set;
    try {
        set = find_all_roots(cfg.params);
    } catch (const std::exception& e) {
        ctx.fail(e.what());
        set.params = cfg.params;
    }
    for (const auto& w : set.warnings)
        ctx.warn(w);
    ctx.write("steady.csv", [&](std::ostream& o) { write_steady_csv(o, set); });
}

void run_integrate(const RunConfig& cfg, RunContext& ctx)
{
    std::vector<double> times(static_cast<std::size_t>(cfg.samples));
    for (int i = 0; i < cfg.samples; ++i)
        times[i] = cfg.t_end * i / (cfg.samples - 1);
    times.back() = cfg.t_end;
    Trajectory tr;
    try {
        tr = integrate(ground_state(Mode::one), cfg.params, cfg.t_end, cfg.rel_tol, cfg.abs_tol, times);
    } catch (const StiffnessError& e) {
        ctx.fail(std::string(e.what()) + " at t=" + format_double(e.time));
        tr.times = {e.time};
        tr.states = {e.last_good_state};
    }
    ctx.write("trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(o, tr); });
}

void run_arc(const RunConfig& cfg, RunContext& ctx)
{
    const ArcSweep arc = arc_sweep(cfg.params, cfg.radius, cfg.n_phi, cfg.convention, cfg.threads);
    report_arc(ctx, arc, "");
    ctx.write("arc.csv", [&](std::ostream& o) { write_arc_csv(o, arc); });
    if (cfg.plot)
        ctx.write("arc.svg", [&](std::ostream& o) { write_arc_svg(o, arc); });
}

void run_grid(const RunConfig& cfg, RunContext& ctx)
{
    const PhaseDiagram pd = phase_diagram_grid(cfg.params, cfg.eta1_max, cfg.eta2_max, cfg.resolution, cfg.threads);
    int marginal = 0;
    for (std::size_t k = 0; k < pd.node_count(); ++k) {
        if (pd.status[k] == NodeStatus::failed)
            ctx.fail("node eta1=" + format_double(pd.eta1_axis[k / pd.eta2_axis.size()]) + " eta2=" +
                     format_double(pd.eta2_axis[k % pd.eta2_axis.size()]) + ": " + pd.messages[k]);
        marginal += pd.marginal_mask[k];
    }
    if (marginal > 0)
        ctx.warn(std::to_string(marginal) + " grid nodes with marginal fixed points");
    ctx.write("grid.csv", [&](std::ostream& o) { write_grid_csv(o, pd); });
    if (cfg.plot)
        ctx.write("grid.svg", [&](std::ostream& o) { write_grid_svg(o, pd); });
}

void run_scan(const RunConfig& cfg, RunContext& ctx)
{
    const auto scan = finite_size_scan(cfg.params, cfg.N_list, cfg.radius, cfg.n_phi, cfg.convention, cfg.threads);
    for (std::size_t i = 0; i < scan.size(); ++i)
        report_arc(ctx, scan[i], "N=" + format_double(cfg.N_list[i]) + " ");
    ctx.write("scan.csv", [&](std::ostream& o) { write_scan_csv(o, scan, cfg.N_list); });
    if (cfg.plot)
        ctx.write("scan.svg", [&](std::ostream& o) { write_scan_svg(o, scan, cfg.N_list); });
}

void run_hysteresis(const RunConfig& cfg, RunContext& ctx)
{
    ArcPath path;
    path.radius = cfg.radius;
    path.convention = cfg.convention;
    const HysteresisResult r = hysteresis_sweep(cfg.params, path, cfg.n_steps, settle_options(cfg));
    for (const auto* records : {&r.forward, &r.backward})
        for (const SweepRecord& rec : *records)
            if (!rec.converged)
                ctx.fail("no convergence at phi=" + format_double(rec.control));
    ctx.write("hysteresis.csv", [&](std::ostream& o) { write_hysteresis_csv(o, r); });
    if (cfg.plot)
        ctx.write("hysteresis.svg", [&](std::ostream& o) { write_hysteresis_svg(o, r); });
}

} // namespace

json config_to_json(const RunConfig& cfg)
{
    json j = json::object();
    for (const auto& [key, text] : config_entries(cfg)) {
        if (kTextKeys.count(key))
            j[key] = text;
        else if (key == "plot")
            j[key] = cfg.plot;
        else if (key == "seed")
            j[key] = cfg.seed;
        else if (key == "N_list")
            j[key] = cfg.N_list;
        else if (kIntegerKeys.count(key))
            j[key] = std::stoi(text);
        else
            j[key] = std::stod(text);
    }
    return j;
}

RunConfig config_from_json(const json& j)
{
    if (!j.is_object())
        throw ConfigError("config", "expected an object");
    RunConfig cfg;
    for (const auto& [key, value] : j.items()) {
        std::string text;
        if (value.is_string())
            text = value.get<std::string>();
        else if (value.is_boolean())
            text = value.get<bool>() ? "true" : "false";
        else if (value.is_array())
            text = join_number_list(value);
        else if (value.is_number_unsigned())
            text = std::to_string(value.get<std::uint64_t>());
        else if (value.is_number_integer())
            text = std::to_string(value.get<std::int64_t>());
        else if (value.is_number())
            text = format_double(value.get<double>());
        else
            throw ConfigError(key, "unsupported value type");
        apply_setting(cfg, key, text);
    }
    return cfg;
}

int run(const RunConfig& cfg, std::ostream& log)
{
    check_config(cfg);
    const auto start = std::chrono::steady_clock::now();
    fs::create_directories(cfg.out_dir);
    RunContext ctx(cfg, log);
    try {
        switch (cfg.command) {
        case Command::steady: run_steady(cfg, ctx); break;
        case Command::integrate: run_integrate(cfg, ctx); break;
        case Command::arc: run_arc(cfg, ctx); break;
        case Command::grid: run_grid(cfg, ctx); break;
        case Command::scan: run_scan(cfg, ctx); break;
        case Command::hysteresis: run_hysteresis(cfg, ctx); break;
        }
    } catch (const std::exception& e) {
        ctx.fail(e.what());
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return ctx.finish(wall);
}

} // namespace bistab
