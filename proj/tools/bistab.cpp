// bistab - command-line driver.
//
//   bistab <steady|integrate|arc|grid|scan|hysteresis> [--config FILE] [flags]
//
// Flags override values from the config file. Exit codes: 0 success, 1 run
// completed with failed nodes, 2 configuration error.

#include "bistab/run.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>

namespace {

template <class T>
void maybe_set(bistab::RunConfig& cfg, const char* key, const std::optional<T>& v)
{
    if (!v)
        return;
    if constexpr (std::is_same_v<T, double>)
        bistab::apply_setting(cfg, key, bistab::format_double(*v));
    else
        bistab::apply_setting(cfg, key, std::to_string(*v));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Steady states, dynamics and phase diagrams of a two-mode cavity with four-level atoms"};
    app.set_version_flag("--version", bistab::kVersion);

    std::string command;
    std::string config_path;
    std::optional<double> radius, N, max, eta1, eta2;
    std::optional<int> n_phi, res, threads, n_steps;
    std::string out_dir, convention, n_list;
    bool plot = false;
    std::vector<std::string> sets;

    app.add_option("command", command, "steady | integrate | arc | grid | scan | hysteresis")->required();
    app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--radius", radius, "arc radius eta [gamma]");
    app.add_option("--n-phi", n_phi, "number of arc angles");
    app.add_option("--N", N, "atom number");
    app.add_option("--N-list", n_list, "atom numbers for scan, e.g. \"[5000, 1e4]\"");
    app.add_option("--max", max, "grid extent in both drive amplitudes [gamma]");
    app.add_option("--res", res, "grid nodes per axis");
    app.add_option("--eta1", eta1, "drive amplitude of mode 1 [gamma]");
    app.add_option("--eta2", eta2, "drive amplitude of mode 2 [gamma]");
    app.add_option("--n-steps", n_steps, "hysteresis steps per direction");
    app.add_option("--convention", convention, "from-vertical | from-axis-1");
    app.add_option("--threads", threads, "worker threads (0: BISTAB_THREADS or all cores)");
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--plot", plot, "also write SVG figures");
    app.add_option("--set", sets, "extra key=value overrides")->take_all();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : bistab::exit_code::config;
    }

    bistab::RunConfig cfg;
    try {
        if (!config_path.empty())
            cfg = bistab::parse_config_file(config_path);
        bistab::apply_setting(cfg, "command", command);
        maybe_set(cfg, "radius", radius);
        maybe_set(cfg, "n_phi", n_phi);
        maybe_set(cfg, "N", N);
        maybe_set(cfg, "eta_max", max);
        maybe_set(cfg, "resolution", res);
        maybe_set(cfg, "eta1", eta1);
        maybe_set(cfg, "eta2", eta2);
        maybe_set(cfg, "n_steps", n_steps);
        maybe_set(cfg, "threads", threads);
        if (!n_list.empty())
            bistab::apply_setting(cfg, "N_list", n_list);
        if (!convention.empty())
            bistab::apply_setting(cfg, "convention", convention);
        if (!out_dir.empty())
            bistab::apply_setting(cfg, "out_dir", out_dir);
        if (plot)
            cfg.plot = true;
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw bistab::ConfigError(kv, "expected key=value");
            bistab::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        bistab::check_config(cfg);
    } catch (const bistab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return bistab::exit_code::config;
    }

    try {
        return bistab::run(cfg, std::cout);
    } catch (const bistab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return bistab::exit_code::config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return bistab::exit_code::partial;
    }
}
