#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

#ifndef SYMPL_CLI_PATH
#error "SYMPL_CLI_PATH must point at the sympl executable"
#endif

namespace {

fs::path workdir() {
    static fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / ("sympl_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_config(const std::string& name, const json& j) {
    fs::path p = workdir() / name;
    std::ofstream(p) << j.dump();
    return p;
}

struct Run {
    int code;
    std::string out;
};

// stdout captured, stderr dropped
Run run(const std::string& args) {
    fs::path out = workdir() / "stdout.txt";
    std::string cmd = std::string("\"") + SYMPL_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2>/dev/null";
    int st = std::system(cmd.c_str());
    int code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return {code, slurp(out)};
}

std::string cfg(const fs::path& p) { return "--config \"" + p.string() + "\""; }

}  // namespace

TEST_CASE("version and usage errors") {
    CHECK(run("--version").code == 0);
    CHECK(run("").code == 1);
    CHECK(run("no-such-command").code == 1);
    auto p = write_config("sc.json", {{"kind", "passive"}, {"example", {{"chi", 1.0}}}});
    CHECK(run("scatter " + cfg(p) + " --format yaml").code == 1);
}

TEST_CASE("scatter example at unit cooperativity transduces perfectly") {
    auto p = write_config("sc.json", {{"kind", "passive"}, {"example", {{"chi", 1.0}}}});
    auto r = run("scatter " + cfg(p));
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["t"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(j["r"].get<double>()) < 1e-12);
    CHECK(j["S"].size() == 4);
}

TEST_CASE("unknown keys are rejected with error JSON") {
    auto p = write_config("uk.json", {{"kind", "passive"}, {"example", {{"chi", 1.0}}}, {"bogus", 1}});
    auto r = run("scatter " + cfg(p));
    CHECK(r.code == 1);
    auto j = json::parse(r.out);
    CHECK(j["error"]["code"] == "UnknownKey");
    CHECK(j["error"]["exit_code"] == 1);
}

TEST_CASE("random inputs need a seed") {
    auto p = write_config("dl.json", {{"random", {{"modes", 2}}}});
    auto r = run("dilate " + cfg(p));
    CHECK(r.code == 1);
    CHECK(json::parse(r.out)["error"]["code"] == "MissingSeed");
}

TEST_CASE("domain errors exit 2 and leave no output file") {
    // T = Id has no dilation through I - T
    auto p = write_config("bad.json", {{"T", {{1, 0}, {0, 1}}}, {"N", {{0, 0}, {0, 0}}}});
    fs::path out = workdir() / "bad_out.json";
    fs::remove(out);
    auto r = run("dilate " + cfg(p) + " --out \"" + out.string() + "\"");
    CHECK(r.code == 2);
    CHECK(json::parse(r.out).contains("error"));
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("dilate round trip on a seeded random channel") {
    auto p = write_config("dl.json", {{"random", {{"modes", 2}}}});
    auto r = run("dilate " + cfg(p) + " --seed 3");
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["roundtrip_residual"].get<double>() < 1e-8);
    CHECK(j["roundtrip_ok"].get<bool>());
}

TEST_CASE("dv-teleport example and CSV feedforward table") {
    auto p = write_config("dv.json", {{"example", "teleportation"}});
    auto r = run("dv-teleport " + cfg(p));
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["F_star"] == json::parse("[[0,1],[1,0]]"));
    CHECK(j["S_tilde"] == json::parse("[[1,0],[0,1]]"));
    auto c = run("dv-teleport " + cfg(p) + " --format csv");
    REQUIRE(c.code == 0);
    CHECK(c.out == "syndrome,correction,pauli\n0 0,0 0,I\n0 1,1 0,Z\n1 0,0 1,X\n1 1,1 1,ZX\n");
}

TEST_CASE("fidelity sweep CSV header and precision") {
    auto p = write_config("fs.json", {{"model", "passive"}, {"t_sq", {0.1, 0.8}}, {"mu", {0.0}}, {"nu", {0.0}}});
    auto r = run("fidelity-sweep " + cfg(p));
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "model,t_sq,mu,nu,fidelity_adaptive,fidelity_direct,threshold");
    std::getline(in, row);
    // t_sq = 0.1 is written with round-trip precision
    CHECK(row.rfind("passive,0.10000000000000001,", 0) == 0);
    CHECK(std::stod(row.substr(row.rfind(',', row.rfind(',') - 1) + 1)) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("ep-fisher writes a fit summary next to the output") {
    auto p = write_config("ep.json", {{"model", "ep"}, {"theta", {{"lo", 1e-3}, {"hi", 1e-2}, {"points", 8}}}});
    fs::path out = workdir() / "ep.csv";
    auto r = run("ep-fisher " + cfg(p) + " --out \"" + out.string() + "\"");
    REQUIRE(r.code == 0);
    CHECK(fs::exists(out));
    auto s = json::parse(slurp(out.string() + ".summary.json"));
    CHECK(s["slope"].get<double>() == doctest::Approx(-4.0).epsilon(0.025));
}
