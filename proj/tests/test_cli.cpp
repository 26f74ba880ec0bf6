#include "cli.hpp"
#include "csv_io.hpp"

#include "gpid/gpid.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gpid;
using nlohmann::json;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "gpid");
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "gpid_cli_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("example: pure unique") {
    const Outcome o = invoke({"example", "--name", "pure_unique"});
    REQUIRE(o.code == cli::kExitOk);
    const json j = json::parse(o.out);
    CHECK(std::abs(j["ui_x"].get<double>() - 0.5) < 1e-5);
    CHECK(std::abs(j["ui_y"].get<double>()) < 1e-5);
    CHECK(std::abs(j["ri"].get<double>()) < 1e-5);
    CHECK(std::abs(j["si"].get<double>()) < 1e-5);
    CHECK(j["units"] == "bits");
    CHECK(j["method"] == "TildeG");
    CHECK(j["example"] == "pure_unique");
    CHECK(j["ground_truth_source"] == "ScalarMMI");
    CHECK(j["ground_truth"]["ui_x"].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("result JSON schema") {
    const json j = json::parse(invoke({"example", "--name", "gain_sweep", "--alpha", "2"}).out);
    for (const char* key : {"ui_x", "ui_y", "ri", "si", "i_mx", "i_my", "i_mxy", "union", "units",
                            "method", "converged", "iterations", "bias_corrected", "n", "warnings"}) {
        CAPTURE(key);
        CHECK(j.contains(key));
    }
    CHECK(j["warnings"].is_array());
    CHECK(j["n"].is_null());
    CHECK(j["converged"].get<bool>());
    const double sum = j["ui_x"].get<double>() + j["ui_y"].get<double>() + j["ri"].get<double>() +
                       j["si"].get<double>();
    CHECK(sum == doctest::Approx(j["i_mxy"].get<double>()).epsilon(1e-12));
}

TEST_CASE("compute: identity covariance has nothing to decompose") {
    const auto path = scratch("identity.csv");
    write_file(path, "1,0,0\n0,1,0\n0,0,1\n");
    const Outcome o = invoke({"compute", "--cov", path.string(), "--dm", "1", "--dx", "1", "--dy", "1"});
    REQUIRE(o.code == cli::kExitOk);
    const json j = json::parse(o.out);
    for (const char* key : {"ui_x", "ui_y", "ri", "si", "i_mxy"}) {
        CHECK(std::abs(j[key].get<double>()) < 1e-9);
    }
}

TEST_CASE("compute: covariance round-trip through --save-cov") {
    const auto saved = scratch("saved.csv");
    const Outcome a = invoke({"example", "--name", "ri_si", "--rho", "0.4", "--save-cov", saved.string()});
    REQUIRE(a.code == cli::kExitOk);
    const Outcome b = invoke({"compute", "--cov", saved.string(), "--dm", "1", "--dx", "1", "--dy", "1"});
    REQUIRE(b.code == cli::kExitOk);
    const json ja = json::parse(a.out);
    const json jb = json::parse(b.out);
    for (const char* key : {"ui_x", "ui_y", "ri", "si", "union"}) {
        CHECK(ja[key].get<double>() == jb[key].get<double>());
    }
}

TEST_CASE("estimate: Poisson samples with bias correction") {
    const auto path = scratch("poisson.csv");
    const Outcome s = invoke({"sample", "--name", "poisson", "--alpha", "0.8", "--n", "20000",
                              "--seed", "3", "--out", path.string()});
    REQUIRE(s.code == cli::kExitOk);
    CHECK(read_file(path).rfind("m1,m2,x1,y1\n", 0) == 0);
    const Outcome o = invoke({"estimate", "--samples", path.string(), "--dm", "2", "--dx", "1",
                              "--dy", "1", "--bias-correct"});
    REQUIRE(o.code == cli::kExitOk);
    const json j = json::parse(o.out);
    CHECK(j["bias_corrected"].get<bool>());
    CHECK(j["n"] == 20000);
    CHECK(j.contains("raw"));
    CHECK(j["bias"]["i_mxy"].get<double>() > 0.0);
    CHECK(j["ui_x"].get<double>() >= 0.0);
    CHECK(j["i_mxy"].get<double>() < j["raw"]["i_mxy"].get<double>());
}

TEST_CASE("estimate with PCA reduction") {
    const auto path = scratch("both_unique.csv");
    REQUIRE(invoke({"sample", "--name", "both_unique", "--dm", "4", "--n", "500", "--seed", "1",
                    "--out", path.string()})
                .code == cli::kExitOk);
    const Outcome o = invoke({"estimate", "--samples", path.string(), "--dm", "4", "--dx", "4",
                              "--dy", "4", "--pca-k", "2"});
    REQUIRE(o.code == cli::kExitOk);
    CHECK(json::parse(o.out)["i_mxy"].get<double>() > 0.0);
}

TEST_CASE("bootstrap output") {
    const auto path = scratch("gain.csv");
    REQUIRE(invoke({"sample", "--name", "gain_sweep", "--alpha", "1", "--n", "400", "--seed", "2",
                    "--out", path.string()})
                .code == cli::kExitOk);
    const std::vector<std::string> args{"bootstrap", "--samples", path.string(), "--dm", "2", "--dx",
                                        "2", "--dy", "2", "--b", "8", "--seed", "5"};
    const Outcome a = invoke(args);
    REQUIRE(a.code == cli::kExitOk);
    const json j = json::parse(a.out);
    CHECK(j["b"] == 8);
    CHECK(j["used"].get<int>() + j["skipped"].get<int>() == 8);
    CHECK(j["components"]["ri"]["q1"].get<double>() <= j["components"]["ri"]["q3"].get<double>());
    CHECK(invoke(args).out == a.out);
    std::vector<std::string> csv = args;
    csv.insert(csv.end(), {"--format", "csv"});
    const Outcome c = invoke(csv);
    CHECK(c.out.rfind("component,mean,sd,q1,median,q3\nui_x,", 0) == 0);
}

TEST_CASE("sweep: redundancy is constant and synergy falls with rho") {
    const Outcome o = invoke({"sweep", "--name", "ri_si", "--grid", "0:0.2:0.8", "--threads", "2"});
    REQUIRE(o.code == cli::kExitOk);
    const json j = json::parse(o.out);
    CHECK(j["parameter"] == "rho");
    REQUIRE(j["rows"].size() == 5);
    double prev_si = 1e9;
    for (const auto& row : j["rows"]) {
        CHECK(row["error"].is_null());
        CHECK(std::abs(row["result"]["ri"].get<double>() - 0.5) < 1e-5);
        const double si = row["result"]["si"].get<double>();
        CHECK(si < prev_si);
        prev_si = si;
    }
    SUBCASE("CSV has one line per grid point") {
        const Outcome c = invoke({"sweep", "--name", "ri_si", "--grid", "0:0.2:0.8", "--format", "csv"});
        REQUIRE(c.code == cli::kExitOk);
        std::istringstream in(c.out);
        std::string line;
        std::getline(in, line);
        CHECK(line.rfind("rho,ui_x,ui_y,ri,si,", 0) == 0);
        int rows = 0;
        while (std::getline(in, line)) ++rows;
        CHECK(rows == 5);
    }
    SUBCASE("results do not depend on the thread count") {
        const Outcome one = invoke({"sweep", "--name", "ri_si", "--grid", "0:0.2:0.8", "--threads", "1"});
        CHECK(one.out == o.out);
    }
    SUBCASE("empty grid") {
        const Outcome e = invoke({"sweep", "--name", "ri_si", "--grid", "1:0.1:0"});
        REQUIRE(e.code == cli::kExitOk);
        CHECK(json::parse(e.out)["rows"].empty());
    }
    SUBCASE("infeasible grid points are reported per row") {
        const Outcome e = invoke({"sweep", "--name", "ri_si", "--grid", "0.5:0.5:1.0"});
        REQUIRE(e.code == cli::kExitOk);
        const json rows = json::parse(e.out)["rows"];
        REQUIRE(rows.size() == 2);
        CHECK(rows[0]["error"].is_null());
        CHECK(rows[1]["result"].is_null());
        CHECK(rows[1]["error"].get<std::string>().find("InfeasibleParameters") != std::string::npos);
    }
}

TEST_CASE("usage errors exit with code 2") {
    const auto path = scratch("identity2.csv");
    write_file(path, "1,0,0\n0,1,0\n0,0,1\n");
    const std::vector<std::vector<std::string>> cases{
        {},
        {"frobnicate"},
        {"example"},
        {"example", "--name", "no_such_thing"},
        {"compute", "--cov", path.string()},
        {"compute", "--dm", "1", "--dx", "1", "--dy", "1"},
        {"sweep", "--name", "ri_si"},
        {"sweep", "--name", "pure_unique", "--grid", "0:1:2"},
        {"sweep", "--name", "ri_si", "--grid", "0:-1:2"},
        {"example", "--name", "pure_unique", "--format", "xml"},
        {"sample", "--name", "pure_unique"},
    };
    for (const auto& c : cases) {
        CAPTURE(c.size());
        const Outcome o = invoke(c);
        CHECK(o.code == cli::kExitUsage);
        CHECK(o.err.find("usage error") != std::string::npos);
    }
}

TEST_CASE("computation errors exit with code 1 and a JSON line") {
    const auto path = scratch("indefinite.csv");
    write_file(path, "1,2,0\n2,1,0\n0,0,1\n");
    const Outcome o = invoke({"compute", "--cov", path.string(), "--dm", "1", "--dx", "1", "--dy", "1"});
    CHECK(o.code == cli::kExitFailure);
    const json j = json::parse(o.err);
    CHECK(j["error"] == "NotPositiveSemidefinite");
    CHECK(j.contains("message"));
    CHECK(o.out.empty());
}

TEST_CASE("solver overrides and diagnostics") {
    SUBCASE("an iteration cap reports non-convergence but still succeeds") {
        const Outcome o = invoke({"example", "--name", "gain_sweep", "--alpha", "2", "--max-iter", "1"});
        CHECK(o.code == cli::kExitOk);
        const json j = json::parse(o.out);
        CHECK_FALSE(j["converged"].get<bool>());
        CHECK_FALSE(j["warnings"].empty());
        CHECK(o.err.find("warning") != std::string::npos);
    }
    SUBCASE("--trace writes the objective per iteration") {
        const Outcome o = invoke({"example", "--name", "gain_sweep", "--alpha", "2", "--trace"});
        REQUIRE(o.code == cli::kExitOk);
        const int iterations = json::parse(o.out)["iterations"].get<int>();
        std::istringstream in(o.err);
        std::string line;
        int lines = 0;
        while (std::getline(in, line)) {
            if (line.rfind("trace,", 0) == 0) ++lines;
        }
        CHECK(lines == iterations);
    }
    SUBCASE("invalid solver settings are computation errors") {
        const Outcome o = invoke({"example", "--name", "pure_unique", "--eta0", "-1"});
        CHECK(o.code == cli::kExitFailure);
    }
    SUBCASE("GPID_THREADS does not change results") {
        const std::vector<std::string> args{"sweep", "--name", "gain_sweep", "--grid", "0:1:3"};
        const Outcome a = invoke(args);
        setenv("GPID_THREADS", "3", 1);
        const Outcome b = invoke(args);
        unsetenv("GPID_THREADS");
        CHECK(a.out == b.out);
    }
}

TEST_CASE("repeated runs are identical") {
    const std::vector<std::string> args{"example", "--name", "bit_of_all", "--dm", "6", "--seed", "4"};
    CHECK(invoke(args).out == invoke(args).out);
}

TEST_CASE("--out writes to a file") {
    const auto path = scratch("out.json");
    const Outcome o = invoke({"example", "--name", "pure_unique", "--out", path.string()});
    REQUIRE(o.code == cli::kExitOk);
    CHECK(o.out.empty());
    CHECK(json::parse(read_file(path))["example"] == "pure_unique");
}

TEST_CASE("parse_grid") {
    CHECK(cli::parse_grid("").empty());
    CHECK(cli::parse_grid("2:1:1").empty());
    const std::vector<double> g = cli::parse_grid("0:0.1:1");
    REQUIRE(g.size() == 11);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    CHECK(cli::parse_grid("0.5:1:0.5") == std::vector<double>{0.5});
    CHECK_THROWS(cli::parse_grid("0:0:1"));
    CHECK_THROWS(cli::parse_grid("0;1;2"));
    CHECK_THROWS(cli::parse_grid("0:1:2:3"));
}

TEST_CASE("CSV parsing") {
    SUBCASE("header is skipped") {
        std::istringstream in("a,b\n1,2\n3,4.5\n");
        const Matrix m = io::parse_csv_matrix(in, "test");
        REQUIRE(m.rows() == 2);
        CHECK(m(1, 1) == 4.5);
    }
    SUBCASE("ragged rows") {
        std::istringstream in("1,2\n3\n");
        CHECK_THROWS_AS((void)io::parse_csv_matrix(in, "test"), Error);
    }
    SUBCASE("bad number after the first line") {
        std::istringstream in("1,2\n3,x\n");
        CHECK_THROWS_AS((void)io::parse_csv_matrix(in, "test"), Error);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS((void)io::read_csv_matrix("/nonexistent/file.csv"), Error);
    }
    SUBCASE("write then read is exact") {
        Matrix m(2, 2);
        m << 0.1, 1.0 / 3.0, -2.5e-300, 7.0;
        std::stringstream s;
        io::write_csv_matrix(s, m, {"p", "q"});
        CHECK(io::parse_csv_matrix(s, "roundtrip") == m);
    }
}
