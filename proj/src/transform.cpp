#include <jetsym/transform.hpp>

namespace jetsym
{

point_transformation make_point_transformation(expr zeta, expr phi)
{
    if (jet_order(zeta) > 0 || jet_order(phi) > 0) {
        throw invalid_argument("point transformation must not depend on derivatives of y");
    }
    point_transformation s{std::move(zeta), std::move(phi)};
    if (zero_test(jacobian(s))) {
        throw singular_map("Jacobian of the transformation vanishes identically");
    }
    return s;
}

expr jacobian(const point_transformation &s, const reducer &r)
{
    const atom y = atom::jet(0);
    return r.reduce(partial_x(s.zeta) * partial(s.phi, y) - partial(s.zeta, y) * partial_x(s.phi));
}

jet_images jet_substitution(const point_transformation &s, int order, const reducer &r)
{
    auto dz = r.reduce(total_derivative(s.zeta));
    if (dz.is_zero() || zero_test(dz)) {
        throw singular_map("D_x zeta vanishes identically");
    }
    const auto inv = pow(dz, exponent(-1));
    jet_images out{s.zeta, {r.reduce(s.phi)}};
    for (int k = 1; k <= order; ++k) {
        out.w.push_back(r.reduce(total_derivative(out.w.back()) * inv));
    }
    return out;
}

namespace
{

expr apply_images(const expr &source, const jet_images &im)
{
    return substitute(source, [&](atom a) -> std::optional<expr> {
        if (a.kind() == atom_kind::indep) {
            return im.z;
        }
        if (a.kind() == atom_kind::jet) {
            return im.w.at(static_cast<std::size_t>(a.order()));
        }
        return std::nullopt;
    });
}

} // namespace

expr transform_expression(const expr &source, const point_transformation &s, const reducer &r)
{
    auto im = jet_substitution(s, std::max(jet_order(source), 0), r);
    return r.reduce(apply_images(source, im));
}

expr transform_equation_euler_form(const expr &source, const point_transformation &s, const reducer &r)
{
    return r.reduce(jacobian(s, r) * transform_expression(source, s, r));
}

lagrangian transform_lagrangian(const lagrangian &source, const point_transformation &s, const reducer &r)
{
    auto im = jet_substitution(s, source.order, r);
    auto dz = r.reduce(total_derivative(s.zeta));
    auto density = r.reduce(apply_images(source.density, im) * dz);
    return {density, std::max(source.order, jet_order(density))};
}

vector_field pushforward(const vector_field &source, const point_transformation &s, const reducer &r)
{
    jet_images im{s.zeta, {s.phi}};
    auto a = r.reduce(apply_images(source.xi, im));
    auto b = r.reduce(apply_images(source.psi, im));
    const atom y = atom::jet(0);
    auto zx = r.reduce(partial_x(s.zeta));
    auto zy = partial(s.zeta, y);
    auto px = r.reduce(partial_x(s.phi));
    auto py = partial(s.phi, y);
    auto det = r.reduce(zx * py - zy * px);
    if (zero_test(det)) {
        throw singular_map("Jacobian of the transformation vanishes identically");
    }
    auto inv = pow(det, exponent(-1));
    auto xi = r.reduce((py * a - zy * b) * inv);
    auto psi = r.reduce((zx * b - px * a) * inv);
    return make_vector_field(xi, psi);
}

point_transformation compose(const point_transformation &outer, const point_transformation &inner)
{
    jet_images im{inner.zeta, {inner.phi}};
    return {apply_images(outer.zeta, im), apply_images(outer.phi, im)};
}

} // namespace jetsym
