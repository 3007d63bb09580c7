#include "doctest.h"

#include "bistab/config.hpp"
#include "bistab/output.hpp"
#include "bistab/run.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <sys/wait.h>

using namespace bistab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("bistab_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string first_line(const fs::path& p)
{
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

std::string joined(const std::vector<std::string>& cols)
{
    std::string out;
    for (const auto& c : cols)
        out += (out.empty() ? "" : ",") + c;
    return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p)
{
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::stringstream s(line);
        std::string cell;
        while (std::getline(s, cell, ','))
            row.push_back(cell);
        rows.push_back(row);
    }
    return rows;
}

int cli(const std::string& args)
{
    const std::string cmd = std::string(BISTAB_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig quiet(RunConfig cfg, const fs::path& dir)
{
    cfg.out_dir = dir.string();
    return cfg;
}

} // namespace

TEST_CASE("baseline configuration file")
{
    const RunConfig cfg = parse_config_text("# baseline\n"
                                            "kappa = 1.32\n"
                                            "Gamma = 1\n"
                                            "g_single = 0.1\n"
                                            "delta_A = -12\n"
                                            "delta_C = 0\n"
                                            "N = 5000\n"
                                            "eta = 1.0\n");
    CHECK_NOTHROW(check_config(cfg));
    SystemParams want = baseline_params(5000);
    want.eta1 = want.eta2 = 1.0;
    CHECK(cfg.params == want);

    const fs::path dir = scratch("baseline");
    std::ostringstream log;
    REQUIRE(run(quiet(cfg, dir), log) == exit_code::ok);
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["derived"]["cooperativity1"].get<double>() == doctest::Approx(3.1457).epsilon(1e-4));
    CHECK(manifest["derived"]["cooperativity2"].get<double>() == doctest::Approx(3.1457).epsilon(1e-4));
    CHECK(manifest["derived"]["g_collective"].get<double>() == doctest::Approx(0.1 * std::sqrt(5000.0)));
    CHECK(manifest["version"] == kVersion);
    CHECK(manifest["exit_code"] == 0);
}

TEST_CASE("unknown keys and bad values are rejected with the key")
{
    try {
        parse_config_text("kapa = 1.32\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key == "kapa");
        CHECK(std::string(e.what()).find("kapa") != std::string::npos);
    }
    try {
        parse_config_text("n_phi = many\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key == "n_phi");
    }
    CHECK_THROWS_AS(parse_config_text("n_phi = 3.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("kappa1 = 1.0x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("just a line\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("convention = sideways\n"), ConfigError);

    const RunConfig bad = parse_config_text("kappa1 = 0\n");
    try {
        check_config(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key == "kappa1");
    }
    CHECK_THROWS_AS(check_config(parse_config_text("n_phi = 2\n")), ConfigError);
    CHECK_THROWS_AS(check_config(parse_config_text("resolution = 1\n")), ConfigError);
    CHECK_THROWS_AS(check_config(parse_config_text("N_list = [5000, 0]\n")), ConfigError);
}

TEST_CASE("empty configuration gives the defaults")
{
    const RunConfig a = parse_config_text("");
    CHECK(a == RunConfig{});
    CHECK(parse_config_text("\n# nothing\n   \n") == a);
    CHECK(a.params == baseline_params());
    CHECK_NOTHROW(check_config(a));
}

TEST_CASE("comments, quotes and lists")
{
    const RunConfig cfg = parse_config_text("out_dir = \"a # b\"  # trailing\n"
                                            "N_list = [5e3, 1e4]\n"
                                            "command = scan\n"
                                            "eta = 0.5\n"
                                            "convention = from-axis-1\n");
    CHECK(cfg.out_dir == "a # b");
    CHECK(cfg.N_list == std::vector<double>{5e3, 1e4});
    CHECK(cfg.command == Command::scan);
    CHECK(cfg.params.eta1 == 0.5);
    CHECK(cfg.params.eta2 == 0.5);
    CHECK(cfg.convention == AngleConvention::from_axis_1);
}

TEST_CASE("configuration round-trips through text and manifest")
{
    RunConfig cfg;
    cfg.command = Command::hysteresis;
    cfg.params.N = 12345.678;
    cfg.params.eta1 = 0.1 + 0.2;
    cfg.params.delta_A2 = -11.999999999999998;
    cfg.radius = 2.0 / 3.0;
    cfg.N_list = {5e3, 1.5e4};
    cfg.seed = 18446744073709551615ull;
    cfg.threads = 3;
    cfg.out_dir = "some dir";
    cfg.plot = true;
    cfg.convention = AngleConvention::from_axis_1;

    CHECK(parse_config_text(to_config_text(cfg)) == cfg);
    CHECK(config_from_json(config_to_json(cfg)) == cfg);
    CHECK(config_from_json(nlohmann::json::parse(config_to_json(cfg).dump())) == cfg);
    CHECK(config_to_json(cfg)["n_phi"].is_number_integer());
    CHECK(config_to_json(cfg)["plot"].is_boolean());

    nlohmann::json j = config_to_json(cfg);
    j["kapa"] = 1.0;
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
}

TEST_CASE("csv headers are fixed per command")
{
    CHECK(joined(arc_columns()) == "phi_rad,eta1,eta2,branch_id,stable,T1,T2,ng1,ng2,ne1,ne2,x1,x2,"
                                   "re_alpha1,im_alpha1,re_alpha2,im_alpha2,residual");
    CHECK(joined(scan_columns()) == "N," + joined(arc_columns()));
    CHECK(joined(grid_columns()) == "eta1,eta2,n_total,n_stable,marginal");
    CHECK(steady_columns().front() == "solution");
    CHECK(trajectory_columns().front() == "t");
    CHECK(trajectory_columns().size() == 13);
}

TEST_CASE("arc run writes a multivalued trace")
{
    const fs::path dir = scratch("arc");
    RunConfig cfg;
    cfg.command = Command::arc;
    cfg.radius = 1.13;
    cfg.n_phi = 361;
    cfg.plot = true;
    std::ostringstream log;
    REQUIRE(run(quiet(cfg, dir), log) == exit_code::ok);
    CHECK(first_line(dir / "arc.csv") == joined(arc_columns()));
    CHECK(fs::exists(dir / "arc.svg"));
    CHECK(slurp(dir / "arc.svg").find("<svg") != std::string::npos);

    const auto rows = read_csv(dir / "arc.csv");
    std::map<std::string, int> per_phi;
    std::set<std::string> stability;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        REQUIRE(rows[r].size() == arc_columns().size());
        ++per_phi[rows[r][0]];
        stability.insert(rows[r][4]);
    }
    CHECK(per_phi.size() == 361);
    int multivalued = 0;
    for (const auto& [phi, n] : per_phi)
        multivalued += n == 3;
    CHECK(multivalued > 0);
    CHECK(stability == std::set<std::string>{"0", "1"});
}

TEST_CASE("grid run writes only one and three root counts at N = 5000")
{
    const fs::path dir = scratch("grid");
    RunConfig cfg;
    cfg.command = Command::grid;
    cfg.resolution = 41;
    std::ostringstream log;
    REQUIRE(run(quiet(cfg, dir), log) == exit_code::ok);
    const auto rows = read_csv(dir / "grid.csv");
    CHECK(rows.size() == 41 * 41);  // header plus every node but the origin
    std::set<std::string> total, stable;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        total.insert(rows[r][2]);
        stable.insert(rows[r][3]);
    }
    CHECK(total == std::set<std::string>{"1", "3"});
    CHECK(stable == std::set<std::string>{"1", "2"});
}

TEST_CASE("identical runs give byte-identical outputs listed in the manifest")
{
    for (Command c : {Command::steady, Command::arc, Command::grid, Command::scan, Command::hysteresis,
                      Command::integrate}) {
        RunConfig cfg;
        cfg.command = c;
        cfg.params.eta1 = 1.0;
        cfg.params.eta2 = 0.7;
        cfg.n_phi = 91;
        cfg.resolution = 21;
        cfg.n_steps = 30;
        cfg.t_end = 5.0;
        cfg.samples = 51;
        cfg.N_list = {5e3, 1e5};
        cfg.plot = true;
        const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
        std::ostringstream log;
        cfg.threads = 1;
        const RunConfig first = quiet(cfg, a);
        REQUIRE(run(first, log) == exit_code::ok);
        cfg.threads = 3;
        REQUIRE(run(quiet(cfg, b), log) == exit_code::ok);

        const std::string name = to_string(c);
        CHECK(slurp(a / (name + ".csv")) == slurp(b / (name + ".csv")));
        const bool plotted = c != Command::steady && c != Command::integrate;
        if (plotted)
            CHECK(slurp(a / (name + ".svg")) == slurp(b / (name + ".svg")));

        const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
        CHECK(config_from_json(manifest["config"]) == first);
        REQUIRE(manifest["files"].size() == (plotted ? 2u : 1u));
        for (const auto& f : manifest["files"]) {
            const fs::path p = a / f["path"].get<std::string>();
            CHECK(f["sha256"] == sha256_file(p.string()));
            CHECK(f["bytes"].get<std::uintmax_t>() == fs::file_size(p));
        }
    }
}

TEST_CASE("manifest echoes the resolved configuration")
{
    const fs::path dir = scratch("manifest");
    RunConfig cfg = parse_config_text("command = arc\nn_phi = 31\nradius = 0.29\nN = 1e4\n");
    cfg = quiet(cfg, dir);
    std::ostringstream log;
    REQUIRE(run(cfg, log) == exit_code::ok);
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(config_from_json(manifest["config"]) == cfg);
    CHECK(manifest.contains("wall_time_s"));
    CHECK(manifest["warnings"].is_array());
}

TEST_CASE("an undriven steady run is degenerate and flagged")
{
    const fs::path dir = scratch("undriven");
    RunConfig cfg;
    std::ostringstream log;
    CHECK(run(quiet(cfg, dir), log) == exit_code::partial);
    CHECK(fs::exists(dir / "steady.csv"));
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["warnings"].size() >= 1);
}

TEST_CASE("sha256 of a known file")
{
    const fs::path dir = scratch("sha");
    std::ofstream(dir / "abc.txt", std::ios::binary) << "abc";
    CHECK(sha256_file((dir / "abc.txt").string()) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("command-line exit codes")
{
    const fs::path dir = scratch("cli");
    const std::string out = " --out " + dir.string();
    CHECK(cli("steady --eta1 1.0 --eta2 0.5" + out) == 0);
    CHECK(fs::exists(dir / "steady.csv"));
    CHECK(cli("arc --radius 1.13 --n-phi 91 --N 5000 --plot" + out) == 0);
    CHECK(fs::exists(dir / "arc.svg"));

    CHECK(cli("steady --set kapa=1.32" + out) == 2);
    CHECK(cli("steady --set kappa1=0" + out) == 2);
    CHECK(cli("steady --n-phi abc" + out) == 2);
    CHECK(cli("teleport" + out) == 2);
    CHECK(cli("arc --n-phi 2" + out) == 2);

    const fs::path file = dir / "bad.cfg";
    std::ofstream(file) << "kapa = 1.32\n";
    CHECK(cli("steady --config " + file.string() + out) == 2);

    // stiffness error during integration: partial results, exit 1
    CHECK(cli("integrate --eta1 1 --set kappa1=1e20 --set t_end=1" + out) == 1);
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["exit_code"] == 1);
    CHECK(fs::exists(dir / "trajectory.csv"));
}

TEST_CASE("flags override the configuration file")
{
    const fs::path dir = scratch("override");
    const fs::path file = dir / "run.cfg";
    std::ofstream(file) << "command = arc\nradius = 4.5\nn_phi = 11\n";
    REQUIRE(cli("arc --config " + file.string() + " --radius 0.29 --out " + dir.string()) == 0);
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["config"]["radius"].get<double>() == 0.29);
    CHECK(manifest["config"]["n_phi"].get<int>() == 11);
}
