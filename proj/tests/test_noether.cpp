#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "random_expr.hpp"

#include <jetsym/maxsym.hpp>
#include <jetsym/noether.hpp>

using namespace jetsym;

namespace
{

expr P(const char *s)
{
    return parse(s);
}

const source_context sym = source_context::symbolic();
const vector_field wy = make_vector_field(0, P("y"));

} // namespace

TEST_CASE("Lie symmetry check")
{
    CHECK(lie_symmetry_check(wy, build_lode(3, sym), sym).holds);
    CHECK(lie_symmetry_check(generators(4).get("F"), build_lode(4, sym), sym).holds);
    auto dx = lie_symmetry_check(make_vector_field(1, 0), build_lode(4, sym), sym);
    CHECK_FALSE(dx.holds);
    CHECK(depends_on(dx.witness, atom::symbol('q', 1)));
    CHECK(certify_nonzero(dx.witness));
}

TEST_CASE("variational check")
{
    auto l4 = transformed_lagrangian(4, sym);
    CHECK(variational_check(generators(4).get("G"), l4, sym).holds);
    auto h = variational_check(generators(4).get("H"), l4, sym);
    CHECK_FALSE(h.holds);
    CHECK(certify_nonzero(h.witness));

    auto can = source_context::canonical();
    auto v0 = reduce(generators(4), can).get("V0");
    CHECK(variational_check(v0, natural_lagrangian(4, can), can).holds);
    auto s = variational_check(generators(4).get("V0"), natural_lagrangian(4, sym), sym);
    CHECK_FALSE(s.holds);
    CHECK(certify_nonzero(s.witness));
}

TEST_CASE("divergence check")
{
    CHECK(divergence_check(wy, build_lode(3, sym), sym).holds);
    auto w4 = divergence_check(wy, build_lode(4, sym), sym);
    CHECK_FALSE(w4.holds);
    CHECK(certify_nonzero(w4.witness));
    CHECK(divergence_check(generators(4).get("V2"), build_lode(4, sym), sym).holds);
}

TEST_CASE("first integrals")
{
    auto f3 = first_integral(wy, build_lode(3, sym), sym);
    CHECK(f3.integral == P("2*q*y^2 - y1^2/2 + y*y2"));
    CHECK(f3.witness.is_zero());
    CHECK(f3.characteristic == P("y"));
    auto f5 = first_integral(wy, build_lode(5, sym), sym);
    CHECK(sym.reduce(f5.integral -
                     P("10*y*q1*y1 - 10*q*y1^2 + 4*y^2*(8*q^2 + q2) + 20*q*y*y2 + y2^2/2 - y1*y3 + y*y4"))
              .is_zero());
    auto trivial = make_diff_eq(P("y4"));
    CHECK(first_integral(make_vector_field(0, 1), trivial).integral == P("y3"));
    CHECK_THROWS_AS((void)first_integral(wy, build_lode(4, sym), sym), not_a_divergence_symmetry);
}

TEST_CASE("first integral verification")
{
    CHECK(verify_first_integral(P("2*q*y^2 - y1^2/2 + y*y2"), build_lode(3, sym), sym) == P("y"));
    auto f7 = first_integral(wy, build_lode(7, sym), sym).integral;
    CHECK(verify_first_integral(f7, build_lode(7, sym), sym) == P("y"));
    CHECK_THROWS_AS((void)verify_first_integral(P("y1"), build_lode(2, sym), sym), not_first_integral);
    auto can = source_context::canonical();
    CHECK(verify_first_integral(P("y1"), build_lode(2, can), can) == expr(1));
}

TEST_CASE("divergence relation")
{
    CHECK(divergence_relation_check(P("-y1^2/2"), P("y^2"), 3, wy).holds);
    CHECK(divergence_relation_check(transformed_lagrangian(2, sym).density, P("x*y*y1"), 1, generators(2).get("F"),
                                    sym)
              .holds);
    std::mt19937_64 rng(99);
    const std::vector<atom> atoms = {atom::indep(), atom::jet(0), atom::jet(1), atom::jet(2)};
    const std::vector<atom> point = {atom::indep(), atom::jet(0)};
    for (int i = 0; i < 25; ++i) {
        auto l0 = testgen::random_poly(rng, atoms, 4, 3);
        auto p = testgen::random_poly(rng, atoms, 3, 3);
        auto v = make_vector_field(testgen::random_poly(rng, point, 2, 2), testgen::random_poly(rng, point, 3, 2));
        CHECK(divergence_relation_check(l0, p, static_cast<long>(i % 4) + 1, v).holds);
    }
}

TEST_CASE("property: variational implies divergence")
{
    for (int n : {4, 6}) {
        auto l = transformed_lagrangian(n, sym);
        auto eq = make_diff_eq(euler(l.density));
        for (const auto &f : generators(n).fields) {
            if (variational_check(f.field, l, sym).holds) {
                CAPTURE(f.name);
                CHECK(divergence_check(f.field, eq, sym).holds);
            }
        }
    }
}

TEST_CASE("property: Noether multiplier equals the characteristic")
{
    for (int n : {3, 4, 5}) {
        auto eq = build_lode(n, sym);
        for (const auto &f : generators(n).fields) {
            if (!divergence_check(f.field, eq, sym).holds) {
                continue;
            }
            CAPTURE(n);
            CAPTURE(f.name);
            auto fi = first_integral(f.field, eq, sym);
            auto mu = verify_first_integral(fi.integral, eq, sym);
            CHECK(sym.reduce(mu - fi.characteristic).is_zero());
        }
    }
}

TEST_CASE("property: homogeneity integrals degenerate at q = 0")
{
    for (int n : {3, 5, 7}) {
        auto f = first_integral(wy, build_lode(n, sym), sym).integral;
        auto at0 = substitute(f, [](atom a) -> std::optional<expr> {
            if (a.kind() == atom_kind::symbol) {
                return expr();
            }
            return std::nullopt;
        });
        CHECK(symbol_order(at0, 'q') < 0);
        CHECK(at0 == first_integral(wy, make_diff_eq(expr(atom::jet(n)))).integral);
    }
}
