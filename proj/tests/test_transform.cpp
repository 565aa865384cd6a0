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

expr W(const char *s)
{
    return parse(s, {true});
}

const point_transformation log_map = make_point_transformation(P("x"), P("k2 - ln(y)"));

} // namespace

TEST_CASE("jet substitution")
{
    auto id = make_point_transformation(P("x"), P("y"));
    auto imgs = jet_substitution(id, 3);
    for (int k = 0; k <= 3; ++k) {
        CHECK(imgs.w[k] == expr(atom::jet(k)));
    }
    CHECK(jet_substitution(log_map, 1).w[1] == P("-y1/y"));

    // maximal map at n = 3: D_x z = u^-2, so w_1 = u^2 D_x(u^-2 y)
    auto ctx = source_context::symbolic();
    auto m = maximal_map(3);
    auto w1 = jet_substitution(m, 1, ctx).w[1];
    CHECK(ctx.reduce(w1 - P("u^2") * total_derivative(P("u^(-2)*y"))).is_zero());

    CHECK_THROWS_AS((void)make_point_transformation(P("x"), P("x")), singular_map);
    CHECK_THROWS_AS((void)make_point_transformation(P("x + y1"), P("y")), invalid_argument);
}

TEST_CASE("equation images")
{
    auto ctx = source_context::symbolic();
    auto e2 = ctx.reduce(transform_equation(W("w2"), maximal_map(2), ctx));
    // the raw image carries the factor u^3 from w = u^-1 y and z_x = u^-2
    CHECK(ctx.reduce(e2 / P("u^3") - build_lode(2, ctx).delta).is_zero());

    auto raw = transform_equation(W("w4"), log_map);
    CHECK(zero_test(raw - P("(6*y1^4 - 12*y*y1^2*y2 + 3*y^2*y2^2 + 4*y^2*y1*y3 - y^3*y4)/y^4")));

    auto id = make_point_transformation(P("x"), P("y"));
    CHECK(transform_equation(W("w3 + z*w1"), id) == P("y3 + x*y1"));
}

TEST_CASE("push-forward")
{
    auto pf = [](const char *xi, const char *psi) { return pushforward(make_vector_field(W(xi), W(psi)), log_map); };
    auto f = pf("1", "0");
    CHECK(f.xi == expr(1));
    CHECK(f.psi.is_zero());
    auto v0 = pf("0", "1");
    CHECK(v0.xi.is_zero());
    CHECK(v0.psi == P("-y"));
    auto h = pf("-z^2", "-3*z*w");
    CHECK(zero_test(h.xi - P("-x^2")));
    CHECK(zero_test(h.psi - P("3*x*y*(k2 - ln(y))")));
}

TEST_CASE("Lagrangians and first integrals")
{
    auto ctx = source_context::symbolic();
    auto l2 = transform_lagrangian(canonical_lagrangian(2), maximal_map(2), ctx);
    CHECK(ctx.reduce(l2.density - P("-1/2*(u1/u)^2*y^2 + (u1/u)*y*y1 - y1^2/2")).is_zero());

    auto id = make_point_transformation(P("x"), P("y"));
    CHECK(transform_lagrangian(make_lagrangian(W("w2^2/2 + z*w")), id).density == P("y2^2/2 + x*y"));
    CHECK(transform_first_integral(W("w1"), id) == P("y1"));

    // The logarithmic map sends +w_zz^2/2 to the negative of the printed
    // Lagrangian of the nonlinear example; see the ledger.
    auto l = transform_lagrangian(canonical_lagrangian(4), log_map).density;
    CHECK(zero_test(l + P("-(y1^2 - y*y2)^2/(2*y^4)")));

    CHECK(zero_test(transform_first_integral(W("w3"), log_map) + P("(2*y1^3 - 3*y*y1*y2 + y^2*y3)/y^3")));
}

TEST_CASE("composition is functorial")
{
    auto inner = make_point_transformation(P("2*x"), P("x*y + 1"));
    auto outer = make_point_transformation(P("x^2"), P("y^3"));
    auto both = compose(outer, inner);
    const expr src = W("w3 + z*w1^2");
    auto stepwise = transform_expression(transform_expression(src, outer), inner);
    CHECK(zero_test(transform_expression(src, both) - stepwise));
    auto v = make_vector_field(W("z"), W("w"));
    auto a = pushforward(pushforward(v, outer), inner);
    auto b = pushforward(v, both);
    CHECK(zero_test(a.xi - b.xi));
    CHECK(zero_test(a.psi - b.psi));
}

// Divergence symmetries of w''' = 0 (span{1, z, z^2} d_w and w d_w) stay
// divergence symmetries of the Euler form of the image; z d_z stays outside.
TEST_CASE("property: divergence symmetries are preserved by point maps")
{
    std::mt19937_64 rng(2024);
    const expr z = atom::indep();
    const expr w = atom::jet(0);
    for (int i = 0; i < 10; ++i) {
        auto m = testgen::random_fiber_map(rng);
        auto s = make_point_transformation(m.zeta, m.phi);
        auto eq = make_diff_eq(transform_equation_euler_form(expr(atom::jet(3)), s));
        auto c = [&] { return expr(static_cast<long>(rng() % 7) - 3); };
        auto v = make_vector_field(0, c() + c() * z + c() * z * z + c() * w);
        CAPTURE(to_string(m.zeta));
        CAPTURE(to_string(m.phi));
        CHECK(divergence_check(pushforward(v, s), eq).holds);
        auto neg = divergence_check(pushforward(make_vector_field(z, 0), s), eq);
        CHECK_FALSE(neg.holds);
        CHECK(certify_nonzero(neg.witness));
    }
    // the logarithmic map too, fourth order
    auto eq = make_diff_eq(transform_equation_euler_form(expr(atom::jet(4)), log_map));
    CHECK(divergence_check(pushforward(make_vector_field(W("-z^2"), W("-3*z*w")), log_map), eq).holds);
}
