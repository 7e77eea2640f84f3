#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "schurlim/io.hpp"
#include "schurlim/random.hpp"

#include "fixtures.hpp"

using namespace schurlim;

namespace {

std::string temp_path(const std::string& name) {
    return std::string("schurlim_io_test_") + name;
}

}  // namespace

TEST_CASE("matrix JSON round trip") {
    Rng rng(89);
    for (int t = 0; t < 10; ++t) {
        const std::size_t r = static_cast<std::size_t>(rng.uniform_int(1, 6));
        const std::size_t c = static_cast<std::size_t>(rng.uniform_int(1, 6));
        const Matrix m = rng.matrix_uniform(r, c, -10.0, 10.0);
        const Matrix back = matrix_from_json(matrix_to_json(m));
        CHECK(back == m);
    }
}

TEST_CASE("matrix CSV round trip") {
    Rng rng(97);
    for (int t = 0; t < 10; ++t) {
        const std::size_t r = static_cast<std::size_t>(rng.uniform_int(1, 6));
        const std::size_t c = static_cast<std::size_t>(rng.uniform_int(1, 6));
        const Matrix m = rng.matrix_uniform(r, c, -10.0, 10.0);
        std::istringstream in(matrix_to_csv(m));
        const Matrix back = matrix_from_csv(in);
        REQUIRE(back.rows() == m.rows());
        REQUIRE(back.cols() == m.cols());
        CHECK((back - m).max_norm() <= 1e-15 * (1.0 + m.max_norm()));
    }
}

TEST_CASE("readers reject malformed input") {
    SECTION("ragged JSON rows") {
        const auto j = nlohmann::json::parse(R"({"rows": [[1, 2], [3]]})");
        CHECK_THROWS_AS(matrix_from_json(j), parse_error);
    }
    SECTION("JSON without the rows key") {
        const auto j = nlohmann::json::parse(R"({"data": []})");
        CHECK_THROWS_AS(matrix_from_json(j), parse_error);
    }
    SECTION("non-numeric JSON entry") {
        const auto j = nlohmann::json::parse(R"({"rows": [[1, "x"]]})");
        CHECK_THROWS_AS(matrix_from_json(j), parse_error);
    }
    SECTION("ragged CSV rows") {
        std::istringstream in("1,2\n3\n");
        CHECK_THROWS_AS(matrix_from_csv(in), parse_error);
    }
    SECTION("non-numeric CSV cell") {
        std::istringstream in("1,two\n");
        CHECK_THROWS_AS(matrix_from_csv(in), parse_error);
    }
    SECTION("empty CSV") {
        std::istringstream in("\n  \n");
        CHECK_THROWS_AS(matrix_from_csv(in), parse_error);
    }
}

TEST_CASE("read_matrix_file dispatches on extension and content") {
    const Matrix m = fixtures::m4();
    SECTION("json file") {
        const std::string path = temp_path("m4.json");
        std::ofstream(path) << matrix_to_json(m).dump();
        CHECK((read_matrix_file(path) - m).max_norm() == 0.0);
        std::remove(path.c_str());
    }
    SECTION("csv file") {
        const std::string path = temp_path("m4.csv");
        std::ofstream(path) << matrix_to_csv(m);
        CHECK((read_matrix_file(path) - m).max_norm() <= 1e-15);
        std::remove(path.c_str());
    }
    SECTION("extensionless json is sniffed") {
        const std::string path = temp_path("m4_noext");
        std::ofstream(path) << matrix_to_json(m).dump();
        CHECK((read_matrix_file(path) - m).max_norm() == 0.0);
        std::remove(path.c_str());
    }
    SECTION("missing file") { CHECK_THROWS_AS(read_matrix_file("no_such_file.json"), parse_error); }
}

TEST_CASE("theorem report JSON carries the typed fields") {
    TheoremReport rep;
    rep.condition_i_value = 2.0;
    rep.condition_i_holds = true;
    rep.condition_ii_holds = true;
    rep.rank_r = 2;
    rep.limit_conditional = Matrix::identity(2);
    rep.empirical_table.push_back({1e3, 1e-4, true});
    rep.empirical_table.push_back({1e4, 0.0, false});
    rep.verdict = Verdict::converges_by_theorem;
    const auto j = theorem_report_to_json(rep);
    CHECK(j["condition_i_value"] == 2.0);
    CHECK(j["condition_i_holds"] == true);
    CHECK(j["condition_ii_holds"] == true);
    CHECK(j["rank_r"] == 2);
    CHECK(j["verdict"] == "converges-by-theorem");
    REQUIRE(j["empirical_table"].size() == 2);
    CHECK(j["empirical_table"][0]["m"] == 1e3);
    CHECK(j["empirical_table"][0]["error"] == 1e-4);
    CHECK(j["empirical_table"][1]["available"] == false);
    CHECK_FALSE(j["empirical_table"][1].contains("error"));
    const Matrix lim = matrix_from_json(j["limit_conditional"]);
    CHECK(lim == rep.limit_conditional);
    // the text rendering reports the same verdict and value
    const std::string text = theorem_report_to_text(rep);
    CHECK(text.find("converges-by-theorem") != std::string::npos);
    CHECK(text.find('2') != std::string::npos);
}
