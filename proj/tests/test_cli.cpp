#include "doctest.h"

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include "json.hpp"

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(TIETIME_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace

TEST_CASE("estimate emits the summary fields and is byte-stable") {
    const std::string args = "estimate --m 3 --gaps 2,3 --trials 20000 --seed 7 --no-meta";
    const auto a = run_cli(args);
    REQUIRE(a.exit_code == 0);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(j.at("trials") == 20000);
    CHECK(j.at("block_count") == 24);
    const double mean = j.at("mean");
    CHECK(mean > 16.0);
    CHECK(mean < 20.0);
    CHECK(j.contains("mom_ci_low"));
    CHECK(j.contains("mom_ci_high"));
    CHECK(j.contains("horizon"));
    CHECK(j.contains("truncated"));

    const auto b = run_cli(args);
    CHECK(a.out == b.out);
}

TEST_CASE("worker count does not change the bytes") {
    const auto a = run_cli("estimate --m 4 --gaps 1,2,1 --trials 10000 --seed 3 --no-meta");
    const auto b = run_cli(
        "estimate --m 4 --gaps 1,2,1 --trials 10000 --seed 3 --workers 4 --no-meta");
    CHECK(a.out == b.out);
}

TEST_CASE("simulate writes the per-trial CSV schema") {
    const std::string path = "/tmp/tietime_test_samples.csv";
    const auto r = run_cli("simulate --m 3 --gaps 1,1 --trials 50 --seed 2 --samples " + path +
                           " --no-meta");
    REQUIRE(r.exit_code == 0);
    std::ifstream f(path);
    std::string header;
    std::getline(f, header);
    CHECK(header == "trial,T,absorbed,hit_index");
    int rows = 0;
    std::string line;
    while (std::getline(f, line)) ++rows;
    CHECK(rows == 50);
    std::remove(path.c_str());
}

TEST_CASE("estimate-pair reports the reference product") {
    const auto r = run_cli(
        "estimate-pair --m 4 --gaps 2,3,9 --i 1 --trials 20000 --seed 5 --no-meta");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("reference") == 24.0);
    CHECK(j.at("consistent_with_reference") == true);
}

TEST_CASE("verify exits zero on clean suites") {
    const auto r = run_cli("verify --suite all --m 4 --grid 8 --nmax 4 --no-meta");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("failed") == false);
    for (const auto& suite : j.at("suites")) {
        CHECK(suite.at("failures").empty());
        CHECK(suite.at("states_checked").get<std::uint64_t>() > 0);
    }
}

TEST_CASE("series search mirrors the coefficient-family results") {
    SUBCASE("two variables solve") {
        const auto r = run_cli("series search --k 2 --degree 4 --normalize 1 --no-meta");
        REQUIRE(r.exit_code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j.at("status") == "solved");
        CHECK(j.at("gamma") == "1/3");
    }
    SUBCASE("three variables with constant term: inconsistent, with certificate") {
        const auto r = run_cli("series search --k 3 --degree 4 --normalize 1 --no-meta");
        REQUIRE(r.exit_code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j.at("status") == "inconsistent");
        CHECK(j.contains("certificate"));
    }
    SUBCASE("pole family") {
        const auto r = run_cli("series search --family gamma --degree 3 --normalize 1 --no-meta");
        REQUIRE(r.exit_code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j.at("status") == "inconsistent");
    }
}

TEST_CASE("series residual consumes series files") {
    const std::string path = "/tmp/tietime_test_series.json";
    {
        std::ofstream f(path);
        f << R"([{"exponents":[1,0,0],"coeff":"1"}])";
    }
    const auto r = run_cli("series residual --file " + path + " --gamma 1/4 --degree 6 --no-meta");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("zero") == true);

    const auto r2 =
        run_cli("series residual --file " + path + " --gamma 1/3 --degree 6 --no-meta");
    const auto j2 = nlohmann::json::parse(r2.out);
    CHECK(j2.at("zero") == false);
    std::remove(path.c_str());
}

TEST_CASE("series commute-check runs clean") {
    const auto r = run_cli("series commute-check --vars 3 --degree 6 --trials 20 --seed 9 --no-meta");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("all_commute") == true);
}

TEST_CASE("solve and bracket subcommands") {
    SUBCASE("closed-form oracle") {
        const auto r = run_cli(
            "solve --m 3 --gaps 5,7 --radius 16 --policy closed_form --method exact_rational "
            "--no-meta");
        REQUIRE(r.exit_code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j.at("exact_value") == "105");
    }
    SUBCASE("bracket CSV export") {
        const std::string path = "/tmp/tietime_test_bracket.csv";
        const auto r = run_cli("bracket --m 3 --gaps 2,3 --radius 12 --csv " + path + " --no-meta");
        REQUIRE(r.exit_code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j.at("lower").get<double>() <= 18.0);
        CHECK(j.at("upper").get<double>() >= 18.0 - 1e-9);
        std::ifstream f(path);
        std::string header;
        std::getline(f, header);
        CHECK(header == "a1,a2,tau_lower,tau_upper");
        std::remove(path.c_str());
    }
    SUBCASE("second moment") {
        const auto r = run_cli("second-moment --m 3 --gaps 1,1 --radius 20 --no-meta");
        REQUIRE(r.exit_code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j.at("second_moment_lower").get<double>() > 0.0);
    }
}

TEST_CASE("config files merge under explicit flags") {
    const std::string path = "/tmp/tietime_test_config.json";
    {
        std::ofstream f(path);
        f << R"({"command":"estimate","m":3,"gaps":[2,3],"trials":5000,"seed":7,"no-meta":true})";
    }
    const auto from_config = run_cli("--config " + path);
    REQUIRE(from_config.exit_code == 0);
    const auto j = nlohmann::json::parse(from_config.out);
    CHECK(j.at("trials") == 5000);

    // a flag on the command line overrides the config value
    const auto overridden = run_cli("--config " + path + " estimate --trials 6000");
    REQUIRE(overridden.exit_code == 0);
    const auto j2 = nlohmann::json::parse(overridden.out);
    CHECK(j2.at("trials") == 6000);
    std::remove(path.c_str());
}

TEST_CASE("invalid configurations exit with status 2") {
    SUBCASE("wrong gap count") {
        CHECK(run_cli("estimate --m 3 --gaps 1,2,3 --seed 1").exit_code == 2);
    }
    SUBCASE("unknown flag") {
        CHECK(run_cli("estimate --m 3 --gaps 1,1 --seed 1 --frobnicate 3").exit_code == 2);
    }
    SUBCASE("unknown config field is rejected") {
        const std::string path = "/tmp/tietime_bad_config.json";
        {
            std::ofstream f(path);
            f << R"({"command":"estimate","m":3,"gaps":[1,1],"seed":1,"frobnicate":3})";
        }
        CHECK(run_cli("--config " + path).exit_code == 2);
        std::remove(path.c_str());
    }
    SUBCASE("missing required seed") {
        CHECK(run_cli("estimate --m 3 --gaps 1,1").exit_code == 2);
    }
    SUBCASE("unknown policy") {
        CHECK(run_cli("solve --m 3 --gaps 1,1 --policy magic").exit_code == 2);
    }
}
