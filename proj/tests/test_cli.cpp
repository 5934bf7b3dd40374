#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "kmre/cli.hpp"

using namespace kmre;

namespace {

struct ExecResult {
    int exit_code;
    std::string out;
};

ExecResult exec_cli(const std::string& args) {
    const std::string cmd = std::string(KMRE_BIN) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

json strip_timestamp(json j) {
    j.erase("timestamp");
    return j;
}

std::string tmp_path(const std::string& name) {
    return std::string("/tmp/kmre_test_") + name;
}

} // namespace

TEST_CASE("pattern parsing") {
    CHECK(parse_pattern("coin").kind == Pattern::Kind::Coin);
    CHECK(parse_pattern("single").kind == Pattern::Kind::SingleOne);
    CHECK(parse_pattern("allones:5").run == 5);
    CHECK(parse_pattern("bits:1011").bits.size() == 4);
    CHECK_THROWS(parse_pattern("allones:0"));
    CHECK_THROWS(parse_pattern("garbage"));
    CHECK_THROWS(parse_pattern("bits:10a1"));
}

TEST_CASE("reports are reproducible for identical configs and seeds") {
    SimulateParams p;
    p.domain_len = 128;
    p.n_jumps = 500;
    p.seed = 42;
    p.out = tmp_path("sim_a.json");
    json a = run_simulate(p);
    p.out = tmp_path("sim_b.json");
    json b = run_simulate(p);
    CHECK(strip_timestamp(a) == strip_timestamp(b));

    SimulateParams q = p;
    q.seed = 43;
    q.out = tmp_path("sim_c.json");
    json c = run_simulate(q);
    CHECK(strip_timestamp(a) != strip_timestamp(c));
}

TEST_CASE("simulate report carries the seed and config echo") {
    SimulateParams p;
    p.domain_len = 128;
    p.n_jumps = 1000;
    p.seed = 7;
    p.out = tmp_path("sim_echo.json");
    json rep = run_simulate(p);
    CHECK(rep["seed"] == 7);
    CHECK(rep["params"]["n_jumps"] == 1000);
    CHECK(rep["command"] == "simulate");
    CHECK(rep["version"] == std::string(kVersion));

    // the file on disk matches the returned report
    std::ifstream in(p.out);
    json from_disk = json::parse(in);
    CHECK(strip_timestamp(from_disk) == strip_timestamp(rep));
}

TEST_CASE("truncated simulation reports validity=false and exits nonzero") {
    auto r = exec_cli("simulate --domain-len 2 --pattern single --n-jumps 4 --seed 1 --out " +
                      tmp_path("sim_trunc.json"));
    CHECK(r.exit_code == 1);
    json rep = json::parse(r.out);
    CHECK(rep["results"]["validity"] == false);
}

TEST_CASE("binary: flag parsing, config files, precedence, unknown keys") {
    // plain run (the stock bad set keeps leaves clean for depth >= 13)
    auto ok = exec_cli("lower-bound --depth 13 --out " + tmp_path("lb1.json"));
    CHECK(ok.exit_code == 0);
    json rep = json::parse(ok.out);
    CHECK(rep["results"]["depth"] == 13);

    // config file value is used
    const std::string cfg = tmp_path("lb.cfg");
    {
        std::ofstream f(cfg);
        f << "depth = 14\n";
    }
    auto from_cfg =
        exec_cli("lower-bound --config " + cfg + " --out " + tmp_path("lb2.json"));
    CHECK(from_cfg.exit_code == 0);
    CHECK(json::parse(from_cfg.out)["results"]["depth"] == 14);

    // explicit flag beats the file
    auto flag_wins = exec_cli("lower-bound --config " + cfg + " --depth 15 --out " +
                              tmp_path("lb3.json"));
    CHECK(flag_wins.exit_code == 0);
    CHECK(json::parse(flag_wins.out)["results"]["depth"] == 15);

    // unknown keys are rejected by name
    const std::string bad = tmp_path("lb_bad.cfg");
    {
        std::ofstream f(bad);
        f << "depth = 14\nfoo = 1\n";
    }
    auto rejected = exec_cli("lower-bound --config " + bad);
    CHECK(rejected.exit_code != 0);
    CHECK(rejected.out.find("foo") != std::string::npos);

    // unknown command
    auto nocmd = exec_cli("frobnicate");
    CHECK(nocmd.exit_code != 0);

    // type mismatch
    auto badtype = exec_cli("lower-bound --depth notanumber");
    CHECK(badtype.exit_code != 0);

    // a depth that lets the stock set touch the leaves is refused
    auto refused = exec_cli("lower-bound --depth 10");
    CHECK(refused.exit_code == 2);
    CHECK(refused.out.find("leaf") != std::string::npos);
}

TEST_CASE("custom bad-set file flows through the lower-bound command") {
    const std::string path = tmp_path("badset.txt");
    {
        std::ofstream f(path);
        f << "# tiny custom set\n14\n";
    }
    LowerBoundParams p;
    p.depth = 6;
    p.bad_set_path = path;
    p.out = tmp_path("lb_custom.json");
    json rep = run_lower_bound(p);
    CHECK(rep["results"]["bad_size"] == 1);
    CHECK(rep["results"]["bound"].get<double>() >= 1.0);
}

TEST_CASE("window census command: deterministic single sample") {
    WindowCensusParams p;
    p.domain_len = 16;
    p.offset = 0;
    p.width = 2;
    p.samples = 1;
    p.pattern = "bits:1011";
    p.out = tmp_path("census.json");
    p.csv = tmp_path("census.csv");
    json rep = run_window_census(p);
    CHECK(rep["results"]["total_samples"] == 1);
    CHECK(rep["results"]["patterns"].size() == 1);
    // MSB-first read of "10" is 2
    CHECK(rep["results"]["patterns"].contains("2"));

    std::ifstream csv(p.csv);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "pattern,count,frequency");
}

TEST_CASE("km commands emit bounds, residuals and convention") {
    KmExactParams p;
    p.n = 8;
    p.identity_n_max = 6;
    p.out = tmp_path("km_exact.json");
    p.curve_csv = tmp_path("km_exact.csv");
    json rep = run_km_exact(p);
    CHECK(rep["checks"]["bounds_hold"] == true);
    CHECK(rep["checks"]["identity_residual_below_1e10"] == true);
    CHECK(rep["results"]["lstar_convention"] == "pad-left-zeros");

    std::ifstream csv(p.curve_csv);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "n,e_n,lower,upper");

    KmMcParams q;
    q.n = 6;
    q.replicas = 20000;
    q.seed = 5;
    q.out = tmp_path("km_mc.json");
    json mc = run_km_mc(q);
    CHECK(mc["checks"]["matches_exact_4sigma"] == true);

    DualityParams d;
    d.n = 3;
    d.t = 3;
    d.out = tmp_path("duality.json");
    json du = run_duality(d);
    CHECK(du["checks"]["single_identity"] == true);
    CHECK(du["checks"]["set_identity"] == true);
    CHECK(du["results"]["orientation"] == "ones-suffix");
}

TEST_CASE("output directory env var is honored") {
    setenv("KMRE_OUT_DIR", "/tmp", 1);
    CHECK(output_dir() == "/tmp");
    CHECK(output_path("", "x.json") == "/tmp/x.json");
    CHECK(output_path("/elsewhere/y.json", "x.json") == "/elsewhere/y.json");
    unsetenv("KMRE_OUT_DIR");
}
