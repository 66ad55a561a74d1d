#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <sstream>
#include <string>

#include "oracle.hpp"
#include "regret/analysis.hpp"
#include "regret/corpus.hpp"
#include "regret/text.hpp"

using namespace regret;
using Catch::Matchers::ContainsSubstring;

namespace {

std::string parse_error(const std::string& text) {
    try {
        parse_prospect(text);
    } catch (const Error& e) {
        return std::string(to_string(e.kind())) + "|" + e.what();
    }
    return "ok";
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("prospect notation examples") {
    const Prospect a = parse_prospect("(2500, 0.33; 2400, 0.66; 0, 0.01)");
    REQUIRE(a.branches.size() == 3);
    CHECK(a.branches[1].outcome == Outcome::known(2400));
    CHECK(a.branches[2].prob == 0.01);

    const Prospect b = parse_prospect("(-4000, 0.8; ?, 0.2)");
    CHECK(b.branches[0].outcome == Outcome::known(-4000));
    CHECK(b.branches[1].outcome.is_unknown());

    try {
        parse_prospect("(1.0, 0.5)");
        FAIL("expected ProbabilitySumMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ProbabilitySumMismatch);
        CHECK(e.value() == 0.5);
    }
}

TEST_CASE("whitespace is insignificant") {
    CHECK(parse_prospect("(1,0.5;?,0.5)") == parse_prospect(" (\n 1 ,\t0.5 ; ? , 0.5 )  "));
    CHECK(parse_prospect("(+1e3, .25; -2.5E-1, 0.75)").branches[0].outcome == Outcome::known(1000));
}

TEST_CASE("parse errors carry line and column") {
    CHECK_THAT(parse_error("(1, 0.5; x, 0.5)"), ContainsSubstring("ParseError") && ContainsSubstring("column 10"));
    CHECK_THAT(parse_error("(1, 0.5\n; 2 0.5)"), ContainsSubstring("line 2, column 5"));
    CHECK_THAT(parse_error("1, 1)"), ContainsSubstring("column 1"));
    CHECK_THAT(parse_error("(1, 1"), ContainsSubstring("input ended"));
    CHECK_THAT(parse_error("(1, 1) extra"), ContainsSubstring("trailing"));
    CHECK_THAT(parse_error("(1e, 1)"), ContainsSubstring("exponent"));
    CHECK_THAT(parse_error("(1e999, 1)"), ContainsSubstring("out of range"));
    CHECK_THAT(parse_error("(?, 1; ?, ?)"), ContainsSubstring("ParseError"));
}

TEST_CASE("print then parse is the identity") {
    CHECK(print_prospect(parse_prospect("(2500, 0.33; ?, 0.67)")) == "(2500, 0.33; ?, 0.67)");
    oracle::Gen gen(51);
    for (int i = 0; i < 5000; ++i) {
        Prospect p = gen.prospect(6, -1e6, 1e6, 0.3, Interpretation::money);
        if (validate(p)) continue;
        const std::string text = print_prospect(p);
        const Prospect back = parse_prospect(text);
        CHECK(back == p);
        CHECK(print_prospect(back) == text);
    }
}

TEST_CASE("profile specs") {
    const AgentProfile d = parse_profile("");
    CHECK(d.describe() == "u:identity v:poly:1 q:power:3");
    const AgentProfile p = parse_profile("  u:affine:0.001:0   v:sin:2 r:power:3:0.5 ");
    CHECK(p.describe() == "u:affine:0.001:0 v:sin:2 r:power:3:0.5");
    CHECK(parse_profile(p.describe()).describe() == p.describe());
    CHECK(parse_profile("u:power:0.5 q:linear").describe() == "u:power:0.5 v:poly:1 q:linear");
    CHECK_THROWS_AS(parse_profile("u:log"), Error);
    CHECK_THROWS_AS(parse_profile("v:poly"), Error);
    CHECK_THROWS_AS(parse_profile("v:poly:abc"), Error);
    CHECK_THROWS_AS(parse_profile("q:power:2"), Error);
    CHECK_THROWS_AS(parse_profile("x:y"), Error);
    CHECK(parse_fear("v:poly:0.5").name() == "v:poly:0.5");
}

TEST_CASE("CSV values survive a text round trip exactly") {
    const SweepTable t = sweep_pu(AgentProfile{}, SweepCase::I, {FearFn::poly(1), FearFn::sinpoly(0.5)}, 41);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < t.p_u.size(); ++k) rows.push_back({t.p_u[k], t.psi[0][k], t.psi[1][k]});
    std::ostringstream out;
    write_csv(out, {"p_u", "v:poly:1", "v:sin:0.5"}, rows);
    const std::string text = out.str();
    CHECK(text.find('\r') == std::string::npos);
    const auto cells = read_csv(text);
    REQUIRE(cells.size() == 42);
    CHECK(cells[0] == std::vector<std::string>{"p_u", "v:poly:1", "v:sin:0.5"});
    for (std::size_t k = 0; k < t.p_u.size(); ++k) {
        const double pu = std::strtod(cells[k + 1][0].c_str(), nullptr);
        CHECK(pu == t.p_u[k]);
        CHECK(std::strtod(cells[k + 1][1].c_str(), nullptr) == t.psi[0][k]);
        AgentProfile p;
        p.v = FearFn::sinpoly(0.5);
        CHECK(std::strtod(cells[k + 1][2].c_str(), nullptr) == psi_modified(p, surgery(pu), radiotherapy()));
    }
}

TEST_CASE("corpus parsing") {
    const ScenarioFile file = parse_corpus(R"(# header
[case a]
f = (1, 0.5; ?, 0.5)
g = (0.5, 1)
expect = f<g
note = hello there

[case b]
interpretation = utility
g = (1, 1)
f = (2, 1)
)");
    REQUIRE(file.cases.size() == 2);
    CHECK(file.cases[0].name == "a");
    CHECK(file.cases[0].expect == Relation::g_strict);
    CHECK(file.cases[0].note == "hello there");
    CHECK(file.cases[0].f.interpretation == Interpretation::money);
    CHECK_FALSE(file.cases[1].expect);
    CHECK(file.cases[1].f.interpretation == Interpretation::utility);
    CHECK(file.cases[1].f.branches[0].outcome == Outcome::known(2));
}

TEST_CASE("corpus errors") {
    auto err = [](const std::string& text) {
        try {
            parse_corpus(text);
        } catch (const Error& e) {
            return std::string(e.what());
        }
        return std::string("ok");
    };
    CHECK_THAT(err("[case a]\nf = (1, 1)\ng = (1, 1)\n[case a]\nf = (1, 1)\ng = (1, 1)\n"),
               ContainsSubstring("duplicate"));
    CHECK_THAT(err("[case a]\nf = (1, 1)\n"), ContainsSubstring("needs both"));
    CHECK_THAT(err("f = (1, 1)\n"), ContainsSubstring("outside"));
    CHECK_THAT(err("[case a]\nf = (1, 1)\ng = (1, 1)\nexpect = f>>g\n"), ContainsSubstring("line 4"));
    CHECK_THAT(err("[case a]\nf = (1, 1)\ng = (1; 1)\n"), ContainsSubstring("line 3, column 7"));
    CHECK_THAT(err("[case a]\nf = (1, 0.5)\ng = (1, 1)\n"), ContainsSubstring("ProbabilitySumMismatch"));
    CHECK_THAT(err("[case a]\nfoo = 1\n"), ContainsSubstring("unknown key"));
    CHECK(parse_corpus("[case a]\nf = (1, 0.5)\ng = (1, 1)\n", true).cases[0].f.branches[0].prob == 1.0);
}

TEST_CASE("bundled corpora load") {
    const ScenarioFile t1 = load_corpus(std::string(REGRET_DATA_DIR) + "/table1.cases");
    const ScenarioFile t2 = load_corpus(std::string(REGRET_DATA_DIR) + "/table2.cases");
    const ScenarioFile med = load_corpus(std::string(REGRET_DATA_DIR) + "/medical.cases");
    CHECK(t1.cases.size() == 10);
    CHECK(t2.cases.size() == 13);
    CHECK(med.cases.size() == 4);
    for (const auto& c : t1.cases) {
        CHECK(c.expect);
        CHECK_FALSE(has_unknown(c.f));
    }
    for (const auto& c : t2.cases) CHECK((has_unknown(c.f) || has_unknown(c.g)));
    CHECK(t2.cases[2].name == "2'");
    CHECK(med.cases[0].f.interpretation == Interpretation::utility);
    CHECK_THROWS_AS(load_corpus("/nonexistent/file.cases"), Error);
}
