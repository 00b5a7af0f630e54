#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>

#include "doctest.h"
#include "siegel/io.hpp"
#include "siegel/siegel.hpp"

using namespace siegel;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(SIEGEL_CLI_PATH) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* f = popen(cmd.c_str(), "r");
    REQUIRE(f != nullptr);
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, n);
    int status = pclose(f);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace

TEST_CASE("lattice descriptors") {
    auto ctx = PrimeCtx::make(3);
    auto L = parse_lattice("diag(1,3,27)", ctx);
    CHECK(fundamental_invariants(L) == std::vector<int>{0, 1, 3});
    CHECK(emit_lattice(L) == "diag(1,3,27)");
    CHECK(emit_lattice(parse_lattice(emit_lattice(L), ctx)) == "diag(1,3,27)");

    auto G = parse_lattice(R"([[2,1],[1,"3/2"]])", ctx);
    CHECK(G.gram[1][1] == Q(3) / 2);
    CHECK(parse_lattice(emit_lattice(G), ctx).gram == G.gram);
    CHECK(parse_lattice(" diag( -1/3 , 6/4 ) ", ctx).gram[1][1] == Q(3) / 2);

    for (std::string bad : {"diag(1,3/,27)", "diag(1,/3)", "diag(1,2", "diag()", "dig(1)", "diag(1,2)x", "diag(1/0)",
                            "[[1,2],[3]", "", "[[1.5]]"}) {
        CHECK_THROWS_AS(parse_lattice(bad, ctx), ParseError);
    }
    try {
        parse_lattice("diag(1,3/,27)", ctx);
    } catch (const ParseError& e) {
        CHECK(e.offset() == 9);
        CHECK(std::string(e.what()).find("at byte 9") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_lattice("[[1,2],[3,4]]", ctx), Error);
}

TEST_CASE("csv quoting") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    Json j;
    j["a"] = "x,y";
    j["b"] = 3;
    j["c"] = Json::array({1, "2/3"});
    auto rows = parse_csv(to_csv(j));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
    CHECK(rows[1] == std::vector<std::string>{"x,y", "3", "[1,\"2/3\"]"});
}

TEST_CASE("command line examples") {
    auto r = run("pden --p 3 --epsilon -1 --gram \"diag(3,3,3)\"");
    CHECK(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["pden"] == 0);
    CHECK(j["fe_sign"] == -1);

    r = run("fe-check --p 3 --random 100 --seed 7");
    CHECK(r.code == 0);
    CHECK(Json::parse(r.out)["passed"] == 100);
    CHECK(run("fe-check --p 3 --random 100 --seed 7").out == r.out);

    r = run("selftest");
    CHECK(r.code == 0);
    j = Json::parse(r.out);
    CHECK(j["failed"] == 0);
    CHECK(j["passed"].get<int>() >= 20);

    r = run("invariants --p 3 --gram \"diag(1,3,27)\"");
    CHECK(Json::parse(r.out)["fundamental_invariants"] == Json::array({0, 1, 3}));
}

TEST_CASE("exit codes") {
    CHECK(run("").code == 2);
    CHECK(run("nosuch").code == 2);
    CHECK(run("pden --p 3").code == 2);
    CHECK(run("pden --p 3 --gram \"diag(1,3/,27)\"").code == 2);
    CHECK(run("pden --p 3 --epsilon 2 --gram \"diag(1)\"").code == 2);
    CHECK(run("pden --p 9 --gram \"diag(1)\"").code == 2);
    CHECK(run("counting-check --p 3 --t 1").code == 2);
    auto r = run("pden --p 3 --gram \"diag(1/3)\"");
    CHECK(r.code == 0);
    CHECK(Json::parse(r.out)["pden"] == 0);
    CHECK(run("--help").code == 0);
}

TEST_CASE("json and csv carry the same fields") {
    std::vector<std::string> cmds = {
        "invariants --p 3 --gram \"diag(1,3,27)\"",
        "invariants --p 5 --gram \"[[2,1],[1,5]]\"",
        "pden --p 3 --epsilon -1 --gram \"diag(3,3,3)\"",
        "pden --p 5 --epsilon -1 --gram \"diag(5,5,5)\"",
        "den --p 3 --gram \"diag(3,9)\"",
        "den --p 5 --epsilon -1 --gram \"diag(1,5)\"",
        "overlattices --p 3 --gram \"diag(3,-3)\"",
        "fe-check --p 5 --random 5 --seed 3",
        "induction-check --p 3 --random 4 --seed 2",
        "oracle --p 3 --m 3 --gram \"diag(3)\"",
        "horizontal --p 3 --gram \"diag(9,3)\"",
        "horizontal --p 3 --epsilon -1 --gram \"diag(9,3)\"",
        "int --p 3 --epsilon -1 --gram \"diag(3,3,3)\"",
        "int --p 5 --epsilon 1 --gram \"diag(1,5,25)\"",
        "vertex --p 3 --m 4 --epsilon -1",
        "vertex --p 3 --m 6 --d 2 --epsilon -1",
        "modularity-check --p 3 --m 4 --epsilon -1",
        "counting-check --p 3 --t 3 --val 5 --trials 3 --seed 1",
        "whittaker --p 3 --epsilon -1 --gram \"diag(3,3,3)\"",
        "whittaker --p 5 --epsilon 1 --gram \"diag(1,5)\" --k 2",
    };
    for (auto& c : cmds) {
        auto rj = run(c);
        auto rc = run(c + " --format csv");
        CAPTURE(c);
        REQUIRE(rj.code == 0);
        REQUIRE(rc.code == 0);
        Json j = Json::parse(rj.out);
        auto rows = parse_csv(rc.out);
        REQUIRE(rows.size() == 2);
        REQUIRE(rows[0].size() == j.size());
        size_t i = 0;
        for (auto it = j.begin(); it != j.end(); ++it, ++i) {
            CHECK(rows[0][i] == it.key());
            const Json& v = it.value();
            CHECK(rows[1][i] == (v.is_string() ? v.get<std::string>() : v.dump()));
        }
    }
}

TEST_CASE("overlattice cache file") {
    std::string path = "siegel_cli_test_cache.json";
    std::remove(path.c_str());
    auto first = run("den --p 3 --cache " + path + " --gram \"diag(3,9,27)\"");
    auto second = run("den --p 3 --cache " + path + " --gram \"diag(3,9,27)\"");
    CHECK(first.code == 0);
    CHECK(first.out == second.out);
    FILE* f = std::fopen(path.c_str(), "r");
    CHECK(f != nullptr);
    if (f) std::fclose(f);
    setenv("SIEGEL_CACHE", path.c_str(), 1);
    CHECK(run("den --p 3 --gram \"diag(3,9,27)\"").out == first.out);
    unsetenv("SIEGEL_CACHE");
    std::remove(path.c_str());
}
