#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

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

} // namespace

TEST_CASE("source rewrites")
{
    CHECK(sym.reduce(P("u2")) == P("-q*u"));
    CHECK(sym.reduce(P("u*v1 - u1*v")) == expr(1));
    CHECK(sym.reduce(P("u1*v2 - u2*v1")) == P("q"));
    CHECK(sym.reduce(P("v3 + q*v1 + q1*v")).is_zero());
    auto c = source_context::canonical();
    CHECK(c.reduce(P("u*v1 + q + u2")) == expr(1));
}

TEST_CASE("generators")
{
    auto g = generators(4);
    CHECK(g.fields.size() == 8);
    CHECK(g.get("V2").psi == P("u*v^2"));
    CHECK(g.get("H").xi == P("-v^2"));
    CHECK(g.get("H").psi == P("-3*v*v1*y"));
    auto g2 = generators(2);
    CHECK(g2.get("F").xi == P("u^2"));
    CHECK(g2.get("F").psi == P("u*u1*y"));
    CHECK_THROWS_AS((void)generators(1), bad_order);
    for (int n = 2; n <= 6; ++n) {
        CHECK(generators(n).fields.size() == static_cast<std::size_t>(n + 4));
    }
}

TEST_CASE("commutators")
{
    auto g = generators(2);
    auto b = commutator(g.get("V0"), g.get("W"));
    CHECK(b.xi.is_zero());
    CHECK(b.psi == g.get("V0").psi);
    auto dx = make_vector_field(1, 0);
    auto xdx = make_vector_field(P("x"), 0);
    CHECK(commutator(dx, xdx).xi == expr(1));
    auto fh = commutator(g.get("F"), g.get("H"), sym);
    CHECK(sym.reduce(fh.xi + g.get("G").xi).is_zero());
    CHECK(sym.reduce(fh.psi + g.get("G").psi).is_zero());
}

TEST_CASE("algebra structure")
{
    for (int n = 2; n <= 5; ++n) {
        auto g = generators(n);
        for (int j = 0; j < n; ++j) {
            auto vj = g.get("V" + std::to_string(j));
            auto wv = commutator(g.get("W"), vj, sym);
            CHECK(sym.reduce(wv.psi + vj.psi).is_zero());
            for (int k = j + 1; k < n; ++k) {
                auto c = commutator(vj, g.get("V" + std::to_string(k)), sym);
                CHECK(c.xi.is_zero());
                CHECK(sym.reduce(c.psi).is_zero());
            }
        }
        auto fh = commutator(g.get("F"), g.get("H"), sym);
        CHECK(sym.reduce(fh.xi + g.get("G").xi).is_zero());
        CHECK(sym.reduce(fh.psi + g.get("G").psi).is_zero());
    }
}

TEST_CASE("build_lode")
{
    CHECK(build_lode(2, sym).delta == P("y2 + q*y"));
    CHECK(build_lode(3, sym).delta == P("y3 + 4*q*y1 + 2*q1*y"));
    CHECK(build_lode(4, sym).delta == P("y4 + 10*q*y2 + 10*q1*y1 + (3*q2 + 9*q^2)*y"));
    CHECK(build_lode(3, source_context::canonical()).delta == P("y3"));
    CHECK(build_lode(2, source_context::with_q(P("x^2"))).delta == P("y2 + x^2*y"));
    // oracle for n = 3: D_x of the homogeneity integral equals y Delta_3
    auto f3 = P("2*q*y^2 - y1^2/2 + y*y2");
    CHECK(total_derivative(f3) == P("y") * build_lode(3, sym).delta);
}

TEST_CASE("property: every s_k solves Delta_n")
{
    for (int n = 2; n <= 6; ++n) {
        auto eq = build_lode(n, sym);
        for (int k = 0; k < n; ++k) {
            auto s = solution(n, k);
            auto img = substitute(eq.delta, [&](atom a) -> std::optional<expr> {
                if (a.kind() == atom_kind::jet) {
                    return total_derivative(s, a.order());
                }
                return std::nullopt;
            });
            CAPTURE(n);
            CAPTURE(k);
            CHECK(sym.reduce(img).is_zero());
        }
        CHECK(jet_order(eq.delta - expr(atom::jet(n))) <= n - 2);
    }
}

TEST_CASE("property: every generator is a Lie symmetry")
{
    for (int n = 2; n <= 6; ++n) {
        auto eq = build_lode(n, sym);
        for (const auto &f : generators(n).fields) {
            CAPTURE(n);
            CAPTURE(f.name);
            CHECK(lie_symmetry_check(f.field, eq, sym).holds);
        }
    }
}

TEST_CASE("Lagrangians")
{
    CHECK(canonical_lagrangian(2).density == P("-y1^2/2"));
    CHECK(canonical_lagrangian(4).density == P("y2^2/2"));
    CHECK(canonical_lagrangian(6).density == P("-y3^2/2"));
    CHECK_THROWS_AS((void)canonical_lagrangian(3), odd_order);
    CHECK_THROWS_AS((void)natural_lagrangian(5, sym), odd_order);

    CHECK(natural_lagrangian(2, sym).density == P("-y1^2/2 + q*y^2/2"));
    CHECK(natural_lagrangian(4, source_context::canonical()).density == P("y2^2/2"));
    for (int n : {2, 4, 6}) {
        auto delta = build_lode(n, sym).delta;
        CHECK(sym.reduce(euler(natural_lagrangian(n, sym).density) - delta).is_zero());
        CHECK(sym.reduce(euler(transformed_lagrangian(n, sym).density) - delta).is_zero());
        CHECK(natural_lagrangian(n, sym).order == n / 2);
    }
}

TEST_CASE("integration by parts")
{
    auto r = reduce_by_parts(P("y*y2"));
    CHECK(r == P("-y1^2"));
    auto d = P("x*y*y4 + q*y*y2");
    auto rd = reduce_by_parts(d);
    CHECK(jet_order(rd) <= 2);
    CHECK(sym.reduce(euler(rd) - euler(d)).is_zero());
}
