#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <jetsym/casebook.hpp>
#include <jetsym/maxsym.hpp>

#include <fstream>
#include <set>
#include <sstream>

using namespace jetsym;

namespace
{

expr P(const char *s)
{
    return parse(s);
}

const claim &find(const case_report &r, const std::string &id)
{
    for (const auto &c : r.claims) {
        if (c.id == id) {
            return c;
        }
    }
    FAIL("missing claim " << id);
    throw std::logic_error("unreachable");
}

} // namespace

TEST_CASE("numeric validation")
{
    auto sym = source_context::symbolic();
    auto d3 = build_lode(3, sym);
    CHECK(numeric_validate(P("2*q*y^2 - y1^2/2 + y*y2"), d3, 1, {1, 0, 1}) < 1e-6);
    CHECK(numeric_validate(P("2*q*y^2 - y1^2/2 + 101/100*y*y2"), d3, 1, {1, 0, 1}) > 1e-3);

    auto trivial = make_diff_eq(P("y2"));
    CHECK(numeric_validate(P("y1"), trivial, 0, {0.3L, -1.7L}) < 1e-15);

    // Pole of q = 1/x^2 at x = 0 on the way from -1 to 1.
    CHECK_THROWS_AS((void)numeric_validate(P("y"), build_lode(2, sym), P("x^(-2)"), {1, 0}, {-1, 2, 2000, {}}),
                    singularity_encountered);
    // y'' = -y crosses y = 0 with a logarithmic integral.
    CHECK_THROWS_AS((void)numeric_validate(P("ln(y)"), make_diff_eq(P("y2 + y")), 0, {1, 0}, {0, 3, 300, {}}),
                    singularity_encountered);
    CHECK_THROWS_AS((void)numeric_validate(P("y"), trivial, 0, {1}), invalid_argument);
    CHECK_THROWS_AS((void)numeric_validate(P("k2*y"), trivial, 0, {1, 0}), invalid_argument);
}

TEST_CASE("case inventory matches the README")
{
    std::ifstream in(JETSYM_README);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    const auto text = ss.str();
    std::set<std::string> ids;
    for (const auto &c : case_inventory()) {
        CAPTURE(c.id);
        CHECK(ids.insert(c.id).second);
        CHECK(text.find("`" + c.id + "`") != std::string::npos);
        CHECK(text.find(c.name) != std::string::npos);
        CHECK_FALSE(c.anchors.empty());
    }
    CHECK(ids.size() == 7);
    CHECK_THROWS_AS((void)run_case("C9"), invalid_argument);
}

TEST_CASE("reports")
{
    case_report empty;
    CHECK(emit_report(empty, report_format::json) == R"({"case":null,"claims":[]})");
    case_report r{"C0", "demo", {{"a", claim_status::refuted, "y1 - y", "somewhere", 1.5}}};
    auto j = emit_report(r, report_format::json);
    CHECK(j == R"({"case":"C0","claims":[{"id":"a","status":"refuted-witness","residual":"y1 - y",)"
               R"("paper_ref":"somewhere","millis":1.5}]})");
    CHECK(emit_report(r, report_format::text).find("refuted-witness") != std::string::npos);
    CHECK_FALSE(r.all_verified());
}

TEST_CASE("every claim carries a reference, and verified means zero residual")
{
    for (const auto &r : run_all_cases()) {
        CAPTURE(r.id);
        CHECK_FALSE(r.claims.empty());
        std::set<std::string> seen;
        for (const auto &c : r.claims) {
            CAPTURE(c.id);
            CHECK(seen.insert(c.id).second);
            CHECK_FALSE(c.paper_ref.empty());
            CHECK(c.status != claim_status::skipped);
            CHECK((c.status == claim_status::verified) == (c.residual == "0"));
        }
    }
}

TEST_CASE("case outcomes")
{
    auto c1 = run_case("C1");
    CHECK(c1.all_verified());
    CHECK(c1.claims.size() >= 3);

    auto c4 = run_case("C4");
    CHECK(c4.all_verified());
    CHECK(find(c4, "n4-V0-variational-at-q0-u1").status == claim_status::verified);

    auto c6 = run_case("C6");
    CHECK(c6.all_verified());
    CHECK(find(c6, "lagrangian-constant-multiple").paper_ref.find("-1 x printed") != std::string::npos);

    CHECK(run_case("C3").all_verified());
    CHECK(run_case("C7").all_verified());

    // Known disagreements with the printed formulas, see the README.
    auto c2 = run_case("C2");
    CHECK(find(c2, "L2-matches-printed").status == claim_status::verified);
    CHECK(find(c2, "L4-matches-printed").status == claim_status::verified);
    CHECK(find(c2, "L6-matches-printed").status == claim_status::refuted);
    CHECK(find(c2, "L6-matches-printed-with-y2-term-negated").status == claim_status::verified);
    auto c5 = run_case("C5");
    CHECK(find(c5, "F-family-S(F4)-vanishes").status == claim_status::verified);
    CHECK(find(c5, "H-family-S(H4)-vanishes").status == claim_status::verified);
    CHECK(find(c5, "G-family-alpha-negative-S(G4)-vanishes").status == claim_status::verified);
    CHECK(find(c5, "G-family-alpha-positive-S(G4)-vanishes").status == claim_status::refuted);
    CHECK(find(c5, "G-power-family-lam-1/2-S(G4)-vanishes").status == claim_status::verified);
}
