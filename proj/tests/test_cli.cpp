// Exercises the installed binary: exit codes, seed echo, flag rejection.

#include "test_util.hpp"

#include <cstdlib>
#include <fstream>

namespace {

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

CliResult run(const std::string& args) {
    std::string cmd =
        std::string(WSNKM_CLI_PATH) + " " + args + " > cli_t_out.tmp 2> cli_t_err.tmp";
    int rc = std::system(cmd.c_str());
    auto slurp = [](const char* path) {
        std::ifstream in(path, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    return {WEXITSTATUS(rc), slurp("cli_t_out.tmp"), slurp("cli_t_err.tmp")};
}

std::string scenario_path(const char* name) {
    return std::string(WSNKM_SCENARIO_DIR) + "/" + name;
}

} // namespace

TEST_CASE("unknown commands and flags exit with the usage code", "[cli]") {
    CHECK(run("frobnicate").exit_code == 1);
    CHECK(run("").exit_code == 1);
    CHECK(run("ibe-demo --no-such-flag").exit_code == 1);
    CHECK(run("simulate").exit_code == 1);                          // missing --scenario
    CHECK(run("simulate --scenario /does/not/exist").exit_code == 1);
}

TEST_CASE("configuration errors exit with code 2", "[cli]") {
    CHECK(run("ibe-demo --p 7 --q 2").exit_code == 2);   // 7 = 1 (mod 3)
    CHECK(run("ibe-demo --n 12").exit_code == 2);        // not a multiple of 8
    CHECK(run("metrics --m 0").exit_code == 2);
    CHECK(run("metrics --m 9..3").exit_code == 2);
    CHECK(run("metrics --m bogus").exit_code == 2);
}

TEST_CASE("every run echoes the effective seed on stderr", "[cli]") {
    CHECK(run("ibe-demo --seed 42").err == "seed=42\n");
    CHECK(run("negotiate-demo --seed 9").err == "seed=9\n");
    CHECK(run("metrics --m 3").err == "seed=0\n");
    std::string sim = "simulate --scenario " + scenario_path("default.json");
    CHECK(run(sim).err == "seed=0\n");
    CHECK(run(sim + " --seed 5").err == "seed=5\n");
}

TEST_CASE("the seed override changes the simulation", "[cli]") {
    std::string base = "simulate --scenario " + scenario_path("default.json");
    CliResult a = run(base);
    CliResult b = run(base + " --seed 5");
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(a.out != b.out);
    CHECK(run(base + " --seed 5").out == b.out);
}

TEST_CASE("demo transcripts report success", "[cli]") {
    CliResult ibe = run("ibe-demo");
    REQUIRE(ibe.exit_code == 0);
    CHECK(ibe.out.find("roundtrip=ok") != std::string::npos);

    CliResult nego = run("negotiate-demo");
    REQUIRE(nego.exit_code == 0);
    CHECK(nego.out.find("agreed=ok") != std::string::npos);

    // a bigger toy curve through the same flags
    CliResult big = run("ibe-demo --p 1019 --q 17 --n 256 --seed 1 --id sensor-3");
    REQUIRE(big.exit_code == 0);
    CHECK(big.out.find("roundtrip=ok") != std::string::npos);
}

TEST_CASE("metrics writes files and supports N ranges", "[cli]") {
    CliResult r = run("metrics --m 2..3 --subnets 1..2 --out cli_metrics.tmp");
    REQUIRE(r.exit_code == 0);
    std::ifstream in("cli_metrics.tmp");
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "scheme,M,N,negotiations,time_s,energy_mJ");
    size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 3 * 2 * 2);
}
