#include "bistab/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace bistab {

std::string to_string(Command c)
{
    switch (c) {
    case Command::steady: return "steady";
    case Command::integrate: return "integrate";
    case Command::arc: return "arc";
    case Command::grid: return "grid";
    case Command::scan: return "scan";
    case Command::hysteresis: return "hysteresis";
    }
    return "steady";
}

Command command_from_string(const std::string& s)
{
    for (Command c : {Command::steady, Command::integrate, Command::arc, Command::grid, Command::scan,
                      Command::hysteresis})
        if (to_string(c) == s)
            return c;
    throw ConfigError("command", "unknown command '" + s + "'");
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string unquote(const std::string& s)
{
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        return s.substr(1, s.size() - 2);
    return s;
}

template <class T>
T parse_number(const std::string& key, const std::string& text, const char* what)
{
    T v{};
    const std::string t = trim(text);
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (t.empty() || ec != std::errc() || ptr != end)
        throw ConfigError(key, std::string("expected ") + what + ", got '" + text + "'");
    return v;
}

double as_double(const std::string& key, const std::string& text)
{
    return parse_number<double>(key, text, "a number");
}

int as_int(const std::string& key, const std::string& text)
{
    return parse_number<int>(key, text, "an integer");
}

bool as_bool(const std::string& key, const std::string& text)
{
    if (text == "true")
        return true;
    if (text == "false")
        return false;
    throw ConfigError(key, "expected true or false, got '" + text + "'");
}

std::vector<double> as_list(const std::string& key, const std::string& text)
{
    std::string body = trim(text);
    if (body.size() < 2 || body.front() != '[' || body.back() != ']')
        throw ConfigError(key, "expected a list [a, b, ...], got '" + text + "'");
    body = body.substr(1, body.size() - 2);
    std::vector<double> out;
    if (trim(body).empty())
        return out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(as_double(key, item));
    return out;
}

std::string list_text(const std::vector<double>& v)
{
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? ", " : "") + format_double(v[i]);
    return s + "]";
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters()
{
    auto real = [](double RunConfig::*field) {
        return [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = as_double(k, v); };
    };
    auto param = [](double SystemParams::*field) {
        return [field](RunConfig& c, const std::string& k, const std::string& v) {
            c.params.*field = as_double(k, v);
        };
    };
    auto pair = [](double SystemParams::*a, double SystemParams::*b) {
        return [a, b](RunConfig& c, const std::string& k, const std::string& v) {
            c.params.*a = c.params.*b = as_double(k, v);
        };
    };
    auto integer = [](int RunConfig::*field) {
        return [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = as_int(k, v); };
    };

    static const std::map<std::string, Setter> table = {
        {"gamma1", param(&SystemParams::gamma1)},
        {"gamma2", param(&SystemParams::gamma2)},
        {"Gamma1", param(&SystemParams::Gamma1)},
        {"Gamma2", param(&SystemParams::Gamma2)},
        {"kappa1", param(&SystemParams::kappa1)},
        {"kappa2", param(&SystemParams::kappa2)},
        {"g_single", param(&SystemParams::g_single)},
        {"N", param(&SystemParams::N)},
        {"delta_A1", param(&SystemParams::delta_A1)},
        {"delta_A2", param(&SystemParams::delta_A2)},
        {"delta_C1", param(&SystemParams::delta_C1)},
        {"delta_C2", param(&SystemParams::delta_C2)},
        {"eta1", param(&SystemParams::eta1)},
        {"eta2", param(&SystemParams::eta2)},
        {"gamma", pair(&SystemParams::gamma1, &SystemParams::gamma2)},
        {"Gamma", pair(&SystemParams::Gamma1, &SystemParams::Gamma2)},
        {"kappa", pair(&SystemParams::kappa1, &SystemParams::kappa2)},
        {"delta_A", pair(&SystemParams::delta_A1, &SystemParams::delta_A2)},
        {"delta_C", pair(&SystemParams::delta_C1, &SystemParams::delta_C2)},
        {"eta", pair(&SystemParams::eta1, &SystemParams::eta2)},
        {"command", [](RunConfig& c, const std::string&, const std::string& v) { c.command = command_from_string(v); }},
        {"radius", real(&RunConfig::radius)},
        {"n_phi", integer(&RunConfig::n_phi)},
        {"convention",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             try {
                 c.convention = angle_convention_from_string(v);
             } catch (const std::exception&) {
                 throw ConfigError(k, "expected from-axis-1 or from-vertical, got '" + v + "'");
             }
         }},
        {"eta1_max", real(&RunConfig::eta1_max)},
        {"eta2_max", real(&RunConfig::eta2_max)},
        {"eta_max", [](RunConfig& c, const std::string& k,
                       const std::string& v) { c.eta1_max = c.eta2_max = as_double(k, v); }},
        {"resolution", integer(&RunConfig::resolution)},
        {"N_list", [](RunConfig& c, const std::string& k, const std::string& v) { c.N_list = as_list(k, v); }},
        {"t_end", real(&RunConfig::t_end)},
        {"samples", integer(&RunConfig::samples)},
        {"n_steps", integer(&RunConfig::n_steps)},
        {"rel_tol", real(&RunConfig::rel_tol)},
        {"abs_tol", real(&RunConfig::abs_tol)},
        {"settle_eps", real(&RunConfig::settle_eps)},
        {"settle_t_max", real(&RunConfig::settle_t_max)},
        {"seed", [](RunConfig& c, const std::string& k,
                    const std::string& v) { c.seed = parse_number<std::uint64_t>(k, v, "a nonnegative integer"); }},
        {"threads", integer(&RunConfig::threads)},
        {"out_dir", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }},
        {"plot", [](RunConfig& c, const std::string& k, const std::string& v) { c.plot = as_bool(k, v); }},
    };
    return table;
}

} // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value)
{
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end())
        throw ConfigError(key, "unknown key");
    it->second(cfg, key, unquote(trim(value)));
}

RunConfig parse_config_text(const std::string& text, RunConfig cfg)
{
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // '#' inside a quoted value is kept
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"')
                quoted = !quoted;
            else if (line[i] == '#' && !quoted) {
                line.resize(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no), "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no), "missing key");
        apply_setting(cfg, key, line.substr(eq + 1));
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path, RunConfig cfg)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError("config", "cannot open '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str(), std::move(cfg));
}

void check_config(const RunConfig& cfg)
{
    const ValidationReport report = validate(cfg.params, true);
    if (!report.ok()) {
        const std::string& first = report.issues.front();
        const auto colon = first.find(':');
        throw ConfigError(colon == std::string::npos ? "params" : first.substr(0, colon),
                          colon == std::string::npos ? first : trim(first.substr(colon + 1)));
    }
    if (!(cfg.radius > 0.0))
        throw ConfigError("radius", "must be positive");
    if (cfg.n_phi < 3)
        throw ConfigError("n_phi", "must be at least 3");
    if (!(cfg.eta1_max > 0.0))
        throw ConfigError("eta1_max", "must be positive");
    if (!(cfg.eta2_max > 0.0))
        throw ConfigError("eta2_max", "must be positive");
    if (cfg.resolution < 2)
        throw ConfigError("resolution", "must be at least 2");
    if (cfg.N_list.empty())
        throw ConfigError("N_list", "must not be empty");
    for (double N : cfg.N_list)
        if (!(N >= 1.0))
            throw ConfigError("N_list", "atom numbers must be >= 1");
    if (!(cfg.t_end > 0.0))
        throw ConfigError("t_end", "must be positive");
    if (cfg.samples < 2)
        throw ConfigError("samples", "must be at least 2");
    if (cfg.n_steps < 10)
        throw ConfigError("n_steps", "must be at least 10");
    if (!(cfg.rel_tol > 1e-14 && cfg.rel_tol < 1e-2))
        throw ConfigError("rel_tol", "must lie in (1e-14, 1e-2)");
    if (!(cfg.abs_tol > 1e-14 && cfg.abs_tol < 1e-2))
        throw ConfigError("abs_tol", "must lie in (1e-14, 1e-2)");
    if (!(cfg.settle_eps > 0.0))
        throw ConfigError("settle_eps", "must be positive");
    if (!(cfg.settle_t_max > 0.0))
        throw ConfigError("settle_t_max", "must be positive");
    if (cfg.threads < 0)
        throw ConfigError("threads", "must be nonnegative");
    if (cfg.out_dir.empty())
        throw ConfigError("out_dir", "must not be empty");
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg)
{
    const SystemParams& p = cfg.params;
    return {
        {"command", to_string(cfg.command)},
        {"gamma1", format_double(p.gamma1)},
        {"gamma2", format_double(p.gamma2)},
        {"Gamma1", format_double(p.Gamma1)},
        {"Gamma2", format_double(p.Gamma2)},
        {"kappa1", format_double(p.kappa1)},
        {"kappa2", format_double(p.kappa2)},
        {"g_single", format_double(p.g_single)},
        {"N", format_double(p.N)},
        {"delta_A1", format_double(p.delta_A1)},
        {"delta_A2", format_double(p.delta_A2)},
        {"delta_C1", format_double(p.delta_C1)},
        {"delta_C2", format_double(p.delta_C2)},
        {"eta1", format_double(p.eta1)},
        {"eta2", format_double(p.eta2)},
        {"radius", format_double(cfg.radius)},
        {"n_phi", std::to_string(cfg.n_phi)},
        {"convention", to_string(cfg.convention)},
        {"eta1_max", format_double(cfg.eta1_max)},
        {"eta2_max", format_double(cfg.eta2_max)},
        {"resolution", std::to_string(cfg.resolution)},
        {"N_list", list_text(cfg.N_list)},
        {"t_end", format_double(cfg.t_end)},
        {"samples", std::to_string(cfg.samples)},
        {"n_steps", std::to_string(cfg.n_steps)},
        {"rel_tol", format_double(cfg.rel_tol)},
        {"abs_tol", format_double(cfg.abs_tol)},
        {"settle_eps", format_double(cfg.settle_eps)},
        {"settle_t_max", format_double(cfg.settle_t_max)},
        {"seed", std::to_string(cfg.seed)},
        {"threads", std::to_string(cfg.threads)},
        {"out_dir", cfg.out_dir},
        {"plot", cfg.plot ? "true" : "false"},
    };
}

std::string to_config_text(const RunConfig& cfg)
{
    std::string out;
    for (const auto& [k, v] : config_entries(cfg)) {
        const bool is_text = k == "command" || k == "convention" || k == "out_dir";
        out += k + " = " + (is_text ? "\"" + v + "\"" : v) + "\n";
    }
    return out;
}

} // namespace bistab
