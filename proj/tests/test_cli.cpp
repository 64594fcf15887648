#include <doctest.h>

#include <cstdlib>
#include <igamg/bench.hpp>
#include <json.hpp>
#include <sstream>

using namespace igamg;

TEST_SUITE_BEGIN("cli");

namespace {

RunConfig small_config() {
    RunConfig cfg;
    cfg.d = 1;
    cfg.p = 2;
    cfg.level = 5;
    return cfg;
}

}  // namespace

TEST_CASE("runs are deterministic for fixed flags and seed") {
    const RunRecord a = run_single(small_config());
    const RunRecord b = run_single(small_config());
    CHECK(a.iterations == b.iterations);
    CHECK(a.final_relative_residual == b.final_relative_residual);
    CHECK(a.contraction_estimate == b.contraction_estimate);
    CHECK(a.flops.total() == b.flops.total());
    CHECK(a.flops.smooth == b.flops.smooth);

    // bit-identical JSON apart from the timing fields
    auto ja = nlohmann::json::parse(record_json(a));
    auto jb = nlohmann::json::parse(record_json(b));
    for (auto* j : {&ja, &jb}) {
        (*j)["setup_seconds"] = 0.0;
        (*j)["solve_seconds"] = 0.0;
    }
    CHECK(ja.dump() == jb.dump());

    RunConfig other = small_config();
    other.seed = 99;
    const RunRecord c = run_single(other);
    CHECK(c.converged);  // a different start may shift the count slightly
}

TEST_CASE("json records carry every field") {
    const RunRecord rec = run_single(small_config());
    const auto j = nlohmann::json::parse(record_json(rec));
    for (const char* key :
         {"d", "p", "level", "cycle", "solver", "sigma_mode", "tau", "nu_pre", "nu_post", "tol",
          "iterations", "converged", "final_relative_residual", "contraction_estimate",
          "setup_seconds", "solve_seconds", "flop_counts", "failure"}) {
        CAPTURE(key);
        CHECK(j.contains(key));
    }
    CHECK(j["flop_counts"].contains("smooth"));
    CHECK(j["iterations"].get<int>() == rec.iterations);
    CHECK(j["final_relative_residual"].get<double>() <= j["tol"].get<double>());
}

TEST_CASE("csv rows match the header") {
    const RunRecord rec = run_single(small_config());
    const std::string header = record_csv_header();
    const std::string row = record_csv_row(rec);
    CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
}

TEST_CASE("table cells agree with the underlying records") {
    RunConfig base = small_config();
    const TableResult t = run_table(base, 4, 5, 2, 3);
    REQUIRE(t.levels == std::vector<int>{5, 4});
    REQUIRE(t.degrees == std::vector<int>{2, 3});
    const auto j = nlohmann::json::parse(table_json(t));
    for (size_t i = 0; i < t.levels.size(); ++i)
        for (size_t k = 0; k < t.degrees.size(); ++k) {
            const auto& rec = j["records"][i * t.degrees.size() + k];
            CHECK(rec["level"].get<int>() == t.levels[i]);
            CHECK(rec["p"].get<int>() == t.degrees[k]);
            CHECK(rec["iterations"].get<int>() == t.iterations[i][k]);
        }

    const std::string csv = table_csv(t);
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line == "level,p2,p3");
    std::getline(is, line);
    CHECK(line == "5," + std::to_string(t.iterations[0][0]) + "," + std::to_string(t.iterations[0][1]));
}

TEST_CASE("empty table ranges produce a header-only csv") {
    const TableResult t = run_table(small_config(), 5, 4, 2, 3);
    CHECK(t.records.empty());
    CHECK(table_csv(t) == "level,p2,p3\n");
}

TEST_CASE("failed cells are marked -1 and the sweep continues") {
    RunConfig base = small_config();
    base.max_iter = 1;  // cannot converge
    const TableResult t = run_table(base, 5, 5, 2, 2);
    CHECK(t.iterations[0][0] == -1);
    CHECK_FALSE(t.records[0].converged);
}

TEST_CASE("check suite smoke run") {
    CheckOptions opts;
    opts.max_p = 2;
    opts.max_level = 3;
    std::ostringstream out;
    CHECK(run_check_suite("kron", opts, out) == 0);
    CHECK(out.str().find("[ok]") != std::string::npos);
    CHECK(run_check_suite("bogus", opts, out) == 2);
}

#ifdef IGAMG_CLI_BINARY
TEST_CASE("cli exit codes") {
    const std::string bin = IGAMG_CLI_BINARY;
    CHECK(std::system((bin + " solve --degree 2 --dim 1 --level 4 > /dev/null").c_str()) == 0);
    // invalid flags -> 2
    CHECK(WEXITSTATUS(std::system((bin + " solve --cycle nope 2> /dev/null").c_str())) == 2);
    CHECK(WEXITSTATUS(std::system((bin + " solve --sigma -3 2> /dev/null").c_str())) == 2);
    // divergence -> 3
    CHECK(WEXITSTATUS(std::system(
              (bin + " solve --degree 2 --dim 1 --level 4 --max-iter 1 > /dev/null").c_str())) == 3);
    // table with empty range -> 0, header only
    CHECK(std::system((bin + " table --levels 6..5 --degrees 2..3 > /dev/null").c_str()) == 0);
}
#endif

TEST_SUITE_END();
