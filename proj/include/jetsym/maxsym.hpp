#pragma once

#include <jetsym/transform.hpp>

#include <memory>

namespace jetsym
{

// Rewrite context for the solutions u, v of the source equation
// y'' + q y = 0 with Wronskian u v' - u' v = 1.
//
//   symbolic   q, u, v all symbolic; u^(k), v^(k) for k >= 2 reduced to
//              combinations of u, u' (v, v') with q-derivative coefficients,
//              and v' eliminated through the Wronskian
//   with_q     the same rules with q a given function of x
//   concrete   q, u, v given explicitly; plain substitution, no relation
//              between them is assumed or enforced
//   canonical  concrete with q = 0, u = 1, v = x
class source_context : public reducer
{
public:
    static source_context symbolic();
    static source_context with_q(expr q);
    static source_context concrete(expr q, expr u, expr v);
    static source_context canonical();

    [[nodiscard]] expr reduce(const expr &e) const override;

    [[nodiscard]] bool symbolic_q() const noexcept;
    [[nodiscard]] bool concrete_solutions() const noexcept;
    // q as an expression: the symbol q or the given function.
    [[nodiscard]] const expr &q() const noexcept;
    [[nodiscard]] const expr &u() const noexcept;
    [[nodiscard]] const expr &v() const noexcept;

    // Context sharing q but with symbolic u, v (the one used for eliminating
    // u, v from transformed objects).
    [[nodiscard]] source_context symbolic_solutions() const;

private:
    struct state;
    explicit source_context(std::shared_ptr<state> s) : m_state(std::move(s)) {}
    std::shared_ptr<state> m_state;
};

// u'/u
expr iota();

// s_k = u^(n-k-1) v^k
expr solution(int n, int k);

struct named_field {
    std::string name;
    vector_field field;
};

struct generator_set {
    int n;
    // V0 .. V{n-1}, W, F, G, H
    std::vector<named_field> fields;

    [[nodiscard]] const vector_field &get(const std::string &name) const;
};

generator_set generators(int n);
generator_set reduce(const generator_set &g, const reducer &r);

// Lie bracket [a, b] of point vector fields, reduced.
vector_field commutator(const vector_field &a, const vector_field &b, const reducer &r = identity_reducer());

// z = v/u (an antiderivative of u^-2 when the Wronskian is 1), w = u^(1-n) y.
point_transformation maximal_map(int n);

// Image of w^(n) = 0, monic and free of u, v. Throws elimination_failed if
// u or v survive reduction or some s_k fails to solve the result.
diff_eq build_lode(int n, const source_context &ctx);

// (-1)^(n/2) (w_{n/2})^2 / 2 in source coordinates.
lagrangian canonical_lagrangian(int n);
lagrangian transformed_lagrangian(int n, const source_context &ctx);
// y*Delta_n/2 with every term linear in a derivative integrated by parts,
// top order first, leaving a sum of c_k(x) (y_k)^2 of order n/2.
lagrangian natural_lagrangian(int n, const source_context &ctx);

// Integration by parts on a density: removes every term linear in some y_m,
// m >= 1, highest m first. Returns the reduced density (differs from the
// input by a total derivative).
expr reduce_by_parts(const expr &density);

} // namespace jetsym
