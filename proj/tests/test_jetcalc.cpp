#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <jetsym/jet.hpp>

#include "random_expr.hpp"

using namespace jetsym;

namespace
{

expr P(const char *s)
{
    return parse(s);
}

} // namespace

TEST_CASE("total derivative")
{
    CHECK(total_derivative(P("y^2")) == P("2*y*y1"));
    CHECK(total_derivative(P("q*y")) == P("q1*y + q*y1"));
    CHECK(total_derivative(ln(P("y"))) == P("y1/y"));
    CHECK(total_derivative(P("x^3"), 2) == P("6*x"));
    CHECK(total_derivative(P("k1*u2")) == P("k1*u3"));
    CHECK(total_derivative(P("sqrt(2*x - k1)")) == P("(2*x - k1)^(-1/2)"));
}

TEST_CASE("characteristic and prolongation")
{
    CHECK(characteristic(make_vector_field(0, P("y"))) == P("y"));
    CHECK(characteristic(make_vector_field(1, 0)) == P("-y1"));
    CHECK(characteristic(make_vector_field(P("u^2"), P("3*u*u1*y"))) == P("3*u*u1*y - u^2*y1"));

    auto w = prolong(make_vector_field(0, P("y")), 2);
    CHECK(w == std::vector<expr>{P("y"), P("y1"), P("y2")});
    auto s = prolong(make_vector_field(P("x"), 0), 1);
    CHECK(s == std::vector<expr>{0, P("-y1")});
    // Hand expansion: D^2(-x^2 y1) + x^2 y3 = -2 y1 - 4 x y2
    auto p = prolong(make_vector_field(P("x^2"), 0), 2);
    CHECK(p[2] == P("-4*x*y2 - 2*y1"));
    CHECK_THROWS_AS(make_vector_field(P("y1"), 0), invalid_argument);
}

TEST_CASE("Euler operator")
{
    CHECK(euler(P("-y1^2/2")) == P("y2"));
    CHECK(euler(P("y*y2")) == P("2*y2"));
    CHECK(euler(P("x*y*y1")) == P("-y"));
}

TEST_CASE("Frechet derivative and adjoint")
{
    auto q = P("x*y + y1");
    CHECK(frechet(P("y2 + q*y"), q) == total_derivative(q, 2) + P("q") * q);
    CHECK(frechet_adjoint(P("y2"), 1).is_zero());
    auto d = P("y2 + q*y");
    auto y = P("y");
    CHECK(euler(y * d) == P("2*y2 + 2*q*y"));
    CHECK(frechet_adjoint(d, y) + frechet_adjoint(y, d) == P("2*y2 + 2*q*y"));
}

TEST_CASE("inverse total derivative")
{
    CHECK(inverse_total_derivative(P("y1*y2")) == P("y1^2/2"));
    CHECK(inverse_total_derivative(P("y*(y3 + 4*q*y1 + 2*q1*y)")) == P("2*q*y^2 - y1^2/2 + y*y2"));
    CHECK_THROWS_AS((void)inverse_total_derivative(P("y*y1^2")), not_exact);
    CHECK_THROWS_AS((void)inverse_total_derivative(P("q1*y")), not_exact);
    CHECK(inverse_total_derivative(P("3*x^2 + 1/x")) == P("x^3 + ln(x)"));
    CHECK(inverse_total_derivative(P("y1/y")) == P("ln(y)"));
}

TEST_CASE("equations")
{
    auto d = make_diff_eq(P("2*y3 + 4*q*y1"));
    CHECK(d.order == 3);
    CHECK(d.leading == expr(2));
    CHECK(d.solved_rhs() == P("-2*q*y1"));
    CHECK(d.monic().delta == P("y3 + 2*q*y1"));
    CHECK(d.on_shell(P("y4")) == P("-2*q1*y1 - 2*q*y2"));
    CHECK_THROWS_AS(make_diff_eq(P("y + x")), invalid_argument);
    CHECK_THROWS_AS(make_diff_eq(P("y2^2 + y")), invalid_argument);
}

TEST_CASE("property: E annihilates total derivatives")
{
    std::mt19937_64 rng(11);
    auto atoms = testgen::jet_atoms(3);
    for (int i = 0; i < 200; ++i) {
        auto e = testgen::random_poly(rng, atoms, 4, 3);
        CAPTURE(to_string(e));
        CHECK(euler(total_derivative(e)).is_zero());
    }
}

TEST_CASE("property: Frechet identity")
{
    std::mt19937_64 rng(12);
    auto atoms = testgen::jet_atoms(2);
    for (int i = 0; i < 100; ++i) {
        auto d = testgen::random_poly(rng, atoms, 3, 3);
        auto q = testgen::random_poly(rng, atoms, 3, 2);
        CAPTURE(to_string(d));
        CAPTURE(to_string(q));
        CHECK(euler(q * d) == frechet_adjoint(d, q) + frechet_adjoint(q, d));
    }
}

TEST_CASE("property: inverse total derivative round trip")
{
    std::mt19937_64 rng(13);
    auto atoms = testgen::jet_atoms(3);
    for (int i = 0; i < 200; ++i) {
        auto f = testgen::random_poly(rng, atoms, 4, 3);
        CAPTURE(to_string(f));
        auto g = inverse_total_derivative(total_derivative(f));
        CHECK(total_derivative(g - f).is_zero());
    }
}

TEST_CASE("property: prolongation is linear and D_x commutes with parameter derivatives")
{
    std::mt19937_64 rng(14);
    auto point = std::vector<atom>{atom::indep(), atom::jet(0), atom::param("k1"), atom::symbol('u', 0)};
    auto jets = testgen::jet_atoms(2);
    for (int i = 0; i < 30; ++i) {
        auto v1 = make_vector_field(testgen::random_poly(rng, point, 3, 2), testgen::random_poly(rng, point, 3, 2));
        auto v2 = make_vector_field(testgen::random_poly(rng, point, 3, 2), testgen::random_poly(rng, point, 3, 2));
        auto a = expr(static_cast<long>(rng() % 5) - 2);
        auto b = P("k1");
        auto lhs = prolong(a * v1 + b * v2, 3);
        auto p1 = prolong(v1, 3);
        auto p2 = prolong(v2, 3);
        for (int k = 0; k <= 3; ++k) {
            CHECK(lhs[k] == a * p1[k] + b * p2[k]);
        }
        auto e = testgen::random_poly(rng, jets, 4, 3);
        CHECK(total_derivative(partial(e, atom::param("k1"))) == partial(total_derivative(e), atom::param("k1")));
    }
}
