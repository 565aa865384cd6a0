#pragma once

#include <jetsym/jet.hpp>

namespace jetsym
{

// Change of variables z = zeta(x, y), w = phi(x, y). Expressions on the
// source side use the same atoms as the target side: x and y_k stand for z
// and w_k there, and print as such with print_options{.source_vars = true}.
struct point_transformation {
    expr zeta;
    expr phi;
};

point_transformation make_point_transformation(expr zeta, expr phi);

// zeta_x phi_y - zeta_y phi_x, with x-dependence through the symbol
// functions included.
expr jacobian(const point_transformation &s, const reducer &r = identity_reducer());

struct jet_images {
    expr z;
    std::vector<expr> w; // w[k] is the image of w_k
};

// w_{k+1} = D_x(w_k) / D_x(zeta); throws singular_map if D_x zeta vanishes.
jet_images jet_substitution(const point_transformation &s, int order, const reducer &r = identity_reducer());

// Any source-side differential function rewritten in target coordinates.
expr transform_expression(const expr &source, const point_transformation &s, const reducer &r = identity_reducer());

// Image of the source equation, Delta~ composed with the jet substitution.
inline expr transform_equation(const expr &source, const point_transformation &s,
                               const reducer &r = identity_reducer())
{
    return transform_expression(source, s, r);
}

// Jacobian times the raw image. This is the representative for which
// E(L~ * D_x zeta) = jacobian * E(L~) composed with the map, and the one
// whose divergence symmetries correspond to those of the source equation.
expr transform_equation_euler_form(const expr &source, const point_transformation &s,
                                   const reducer &r = identity_reducer());

// L(x, y^(m)) = L~(z, w^(m)) * D_x zeta
lagrangian transform_lagrangian(const lagrangian &source, const point_transformation &s,
                                const reducer &r = identity_reducer());

inline expr transform_first_integral(const expr &source, const point_transformation &s,
                                     const reducer &r = identity_reducer())
{
    return transform_expression(source, s, r);
}

// Field v with (zeta, phi)_* v = v~: solves J (xi, psi) = (a, b) composed with
// the map, where v~ = a d_z + b d_w.
vector_field pushforward(const vector_field &source, const point_transformation &s,
                         const reducer &r = identity_reducer());

// Map whose source coordinates are those of `outer`, reached through
// `inner`: the source coordinates of inner are the target ones of outer.
point_transformation compose(const point_transformation &outer, const point_transformation &inner);

} // namespace jetsym
