#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include "schurlim/io.hpp"

#include "fixtures.hpp"

#ifndef SCHURLIM_CLI_PATH
#error "SCHURLIM_CLI_PATH must be defined by the build"
#endif

using namespace schurlim;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(SCHURLIM_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    CliResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) res.output += buf.data();
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& contents)
        : path("schurlim_cli_test_" + name) {
        std::ofstream(path) << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("cli check command") {
    const Matrix sigma5 = fixtures::sigma5();
    Matrix g5(5, 5);
    // user-sequence mode only needs the S-block of the first-order term to be
    // right for the verdict; use the derived block embedded at {2,3,4}
    const Matrix block = fixtures::g234();
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) g5(i + 1, j + 1) = block(i, j);
    TempFile sigma_file("sigma5.json", matrix_to_json(sigma5).dump());
    TempFile g_file("g5.json", matrix_to_json(g5).dump());

    SECTION("5-node example exits 0 with the 1/10 limit") {
        const auto res = run_cli("check --sigma " + sigma_file.path + " --sigma1 " + g_file.path +
                                 " --cond 2,3,4 --target 1,5");
        INFO(res.output);
        CHECK(res.exit_code == 0);
        CHECK(res.output.find("converges-by-theorem") != std::string::npos);
        CHECK(res.output.find("0.1") != std::string::npos);
    }
    SECTION("json mode emits a parsable document with the same numbers") {
        const auto res = run_cli("--json check --sigma " + sigma_file.path + " --sigma1 " +
                                 g_file.path + " --cond 2,3,4 --target 1,5");
        INFO(res.output);
        CHECK(res.exit_code == 0);
        const auto j = nlohmann::json::parse(res.output);
        CHECK(j["verdict"] == "converges-by-theorem");
        CHECK(std::abs(j["limit_conditional"]["rows"][0][1].get<double>() - 0.1) <= 1e-8);
    }
    SECTION("deterministic output: identical flags give byte-identical JSON") {
        const std::string args = "--json check --sigma " + sigma_file.path + " --sigma1 " +
                                 g_file.path + " --cond 2,3,4 --target 1,5";
        const auto a = run_cli(args);
        const auto b = run_cli(args);
        CHECK(a.output == b.output);
        CHECK(a.exit_code == b.exit_code);
    }
    SECTION("identity sigma with zero first-order term converges trivially") {
        TempFile id_file("id.json", matrix_to_json(Matrix::identity(3)).dump());
        TempFile zero_file("zero.json", matrix_to_json(Matrix(3, 3)).dump());
        const auto res = run_cli("check --sigma " + id_file.path + " --sigma1 " + zero_file.path +
                                 " --cond 1,2 --target 3");
        CHECK(res.exit_code == 0);
    }
    SECTION("overlapping sets exit 1") {
        const auto res = run_cli("check --sigma " + sigma_file.path + " --sigma1 " + g_file.path +
                                 " --cond 1,2 --target 2,3");
        CHECK(res.exit_code == 1);
    }
    SECTION("violated conditions exit 2") {
        Matrix sigma(3, 3);
        sigma(0, 0) = 1.0;
        sigma(2, 2) = 1.0;
        TempFile s_file("neg_sigma.json", matrix_to_json(sigma).dump());
        TempFile z_file("neg_zero.json", matrix_to_json(Matrix(3, 3)).dump());
        const auto res = run_cli("check --sigma " + s_file.path + " --sigma1 " + z_file.path +
                                 " --cond 1,2 --target 3");
        CHECK(res.exit_code == 2);
        CHECK(res.output.find("conditions-violated") != std::string::npos);
    }
}

TEST_CASE("cli trek command") {
    SECTION("(1,3) reports the 1/10 limit") {
        const auto res = run_cli("trek --left 1 --right 3");
        INFO(res.output);
        CHECK(res.exit_code == 0);
        CHECK(res.output.find("0.1") != std::string::npos);
    }
    SECTION("json mode") {
        const auto res = run_cli("--json trek --left 0 --right 4");
        INFO(res.output);
        CHECK(res.exit_code == 0);
        const auto j = nlohmann::json::parse(res.output);
        CHECK(std::abs(j["computed_limit"].get<double>() - (-1.0 / 24.0)) <= 1e-8);
        CHECK(j["case"] == "path");
    }
    SECTION("invalid spec exits 1") {
        const auto res = run_cli("trek --left -2 --right 3");
        CHECK(res.exit_code == 1);
    }
}

TEST_CASE("cli lemma command") {
    SECTION("rank-1 probes all pass") {
        const auto res = run_cli("lemma --k 4 --r 1 --trials 50 --seed 7");
        INFO(res.output);
        CHECK(res.exit_code == 0);
        CHECK(res.output.find("50/50") != std::string::npos);
    }
    SECTION("k=5 r=2 stays within the ratio tolerance") {
        const auto res = run_cli("lemma --k 5 --r 2 --trials 20 --seed 1");
        INFO(res.output);
        CHECK(res.exit_code == 0);
    }
    SECTION("r = k is a usage error") {
        const auto res = run_cli("lemma --k 2 --r 2 --trials 5 --seed 1");
        CHECK(res.exit_code == 1);
    }
}

TEST_CASE("cli lyapunov command") {
    TempFile m4_file("m4.json", matrix_to_json(fixtures::m4()).dump());
    SECTION("stable drift prints the covariance with a small residual") {
        const auto res = run_cli("--json lyapunov --matrix " + m4_file.path);
        INFO(res.output);
        CHECK(res.exit_code == 0);
        const auto j = nlohmann::json::parse(res.output);
        CHECK(j["residual"].get<double>() <= 1e-10);
        const Matrix sigma = matrix_from_json(j["sigma"]);
        CHECK((sigma - fixtures::sigma4()).max_norm() <= 1e-10);
    }
    SECTION("unstable drift exits 2 and reports the abscissa") {
        TempFile id_file("ident.json", matrix_to_json(Matrix::identity(2)).dump());
        const auto res = run_cli("lyapunov --matrix " + id_file.path);
        INFO(res.output);
        CHECK(res.exit_code == 2);
        CHECK(res.output.find("1") != std::string::npos);
    }
    SECTION("csv input works") {
        TempFile csv_file("m4.csv", matrix_to_csv(fixtures::m4()));
        const auto res = run_cli("lyapunov --matrix " + csv_file.path);
        CHECK(res.exit_code == 0);
    }
}

TEST_CASE("cli toeplitz command") {
    SECTION("closed form and elimination agree") {
        const auto res = run_cli("--json toeplitz --n 5");
        INFO(res.output);
        CHECK(res.exit_code == 0);
        const auto j = nlohmann::json::parse(res.output);
        CHECK(j["closed_form"].get<double>() == -32.0);
        CHECK(j["match"] == true);
    }
    SECTION("replaced column") {
        const auto res = run_cli("--json toeplitz --n 5 --replace 1");
        const auto j = nlohmann::json::parse(res.output);
        CHECK(j["closed_form"].get<double>() == 8.0);
        CHECK(j["match"] == true);
    }
    SECTION("interior replaced column is zero") {
        const auto res = run_cli("--json toeplitz --n 5 --replace 3");
        const auto j = nlohmann::json::parse(res.output);
        CHECK(j["closed_form"].get<double>() == 0.0);
        CHECK(j["match"] == true);
    }
    SECTION("bad index exits 1") {
        const auto res = run_cli("toeplitz --n 3 --replace 7");
        CHECK(res.exit_code == 1);
    }
}
