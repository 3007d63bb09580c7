// config.hpp - run configuration: flat key = value files, command-line
// overrides and a canonical key/value form used by the run manifest.

#pragma once

#include "bistab/arc.hpp"
#include "bistab/model.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bistab {

/// Unknown key, malformed value or violated parameter invariant. `key` names
/// the offending entry.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& k, const std::string& message)
        : std::runtime_error(k + ": " + message), key(k)
    {
    }
    std::string key;
};

enum class Command { steady, integrate, arc, grid, scan, hysteresis };

std::string to_string(Command c);
Command command_from_string(const std::string& s);

struct RunConfig {
    SystemParams params;  // eta1, eta2 drive steady and integrate
    Command command = Command::steady;

    // arc, scan, hysteresis
    double radius = 1.13;
    int n_phi = 721;
    AngleConvention convention = AngleConvention::from_vertical;

    // grid
    double eta1_max = 5.0;
    double eta2_max = 5.0;
    int resolution = 101;

    // scan
    std::vector<double> N_list{5e3, 1e4, 1e5, 1e6};

    // integrate
    double t_end = 100.0;
    int samples = 1001;

    // hysteresis
    int n_steps = 181;

    // integrator and settling
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double settle_eps = 1e-9;
    double settle_t_max = 1e5;

    std::uint64_t seed = 1;
    int threads = 0;  // 0: BISTAB_THREADS or hardware concurrency
    std::string out_dir = "out";
    bool plot = false;

    bool operator==(const RunConfig&) const = default;
};

/// Sets one key from its text value. Symmetric shorthands (kappa, gamma,
/// Gamma, delta_A, delta_C, eta, eta_max) set both modes.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses `key = value` lines; '#' starts a comment, blank lines are
/// ignored, strings may be quoted, N_list is written `[a, b, ...]`.
RunConfig parse_config_text(const std::string& text, RunConfig cfg = {});

RunConfig parse_config_file(const std::string& path, RunConfig cfg = {});

/// Throws ConfigError for parameters and options outside their domain.
void check_config(const RunConfig& cfg);

/// Every key with its canonical value text, in a fixed order. Feeding the
/// entries back through apply_setting reproduces cfg exactly.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg);

std::string to_config_text(const RunConfig& cfg);

/// 17 significant digits, which reads back to the same double.
std::string format_double(double v);

} // namespace bistab
