#pragma once

#include <jetsym/expr.hpp>

namespace jetsym
{

// Rewriting applied after differential operations, e.g. the source-equation
// rules of a maximal-symmetry context. The default leaves expressions alone.
class reducer
{
public:
    virtual ~reducer() = default;
    [[nodiscard]] virtual expr reduce(const expr &e) const
    {
        return e;
    }
};

const reducer &identity_reducer();

// D_x: x -> 1, y_k -> y_{k+1}, s_k -> s_{k+1} for the symbol functions,
// parameters constant.
expr total_derivative(const expr &e, int times = 1);

// Explicit x-dependence at fixed jet coordinates: D_x f - sum y_{k+1} df/dy_k.
// Symbol functions count as functions of x.
expr partial_x(const expr &e);

struct vector_field {
    expr xi;
    expr psi;
};

// Checks that the coefficients are point functions (no jets of order >= 1).
vector_field make_vector_field(expr xi, expr psi);

vector_field operator+(const vector_field &a, const vector_field &b);
vector_field operator*(const expr &c, const vector_field &v);

// Q = psi - xi*y1
expr characteristic(const vector_field &v);

// phi_0 .. phi_n with phi_k = D_x^k Q + xi*y_{k+1}
std::vector<expr> prolong(const vector_field &v, int order);

// pr v(f) = sum_k phi_k df/dy_k + xi * partial_x f, prolonged as far as f needs.
expr apply_prolonged(const vector_field &v, const expr &f);

struct lagrangian {
    expr density;
    int order;
};

lagrangian make_lagrangian(expr density, int order);
lagrangian make_lagrangian(expr density);

// E(L) = sum_k (-D_x)^k dL/dy_k
expr euler(const expr &density);
inline expr euler(const lagrangian &l)
{
    return euler(l.density);
}

// D_Delta(Q) = sum_k dDelta/dy_k D_x^k Q
expr frechet(const expr &delta, const expr &q);
// D*_Delta(Q) = sum_k (-D_x)^k (Q dDelta/dy_k)
expr frechet_adjoint(const expr &delta, const expr &q);

// F with D_x F = P, integration constant 0. Throws not_exact when P is not a
// total derivative or the x-only remainder is not a Laurent polynomial in x.
// With a reducer, every step is reduced so that integration can proceed
// modulo the relations it encodes.
expr inverse_total_derivative(const expr &p, const reducer &r = identity_reducer());

// Equation Delta = 0 of order n, linear in y_n.
struct diff_eq {
    expr delta;
    int order;
    expr leading;

    // y_n expressed through lower jets on Delta = 0.
    [[nodiscard]] expr solved_rhs() const;
    [[nodiscard]] diff_eq monic() const;
    // Replace y_n, y_{n+1}, ... by their on-shell values.
    [[nodiscard]] expr on_shell(const expr &e, const reducer &r = identity_reducer()) const;
};

diff_eq make_diff_eq(const expr &delta);

} // namespace jetsym
