#pragma once

#include <jetsym/jet.hpp>

namespace jetsym
{

enum class symmetry_kind : std::uint8_t { lie, variational, divergence };

std::string to_string(symmetry_kind k);

struct symmetry_verdict {
    symmetry_kind kind;
    bool holds;
    // Reduced residual; holds iff it passes the zero test.
    expr witness;
};

// S(v) = pr v(L) + L D_x xi
expr variational_expression(const vector_field &v, const expr &density);

// pr v(Delta) with y_n and its derivatives replaced from Delta = 0.
symmetry_verdict lie_symmetry_check(const vector_field &v, const diff_eq &eq, const reducer &r = identity_reducer());
symmetry_verdict variational_check(const vector_field &v, const lagrangian &l, const reducer &r = identity_reducer());
// E(Q Delta) = 0
symmetry_verdict divergence_check(const vector_field &v, const diff_eq &eq, const reducer &r = identity_reducer());

// F with D_x F = Q Delta.
struct first_integral_result {
    expr integral;
    expr characteristic;
    diff_eq equation;
    // D_x F - Q Delta after reduction, zero by construction
    expr witness;
};

first_integral_result first_integral(const vector_field &v, const diff_eq &eq, const reducer &r = identity_reducer());

// Multiplier mu with D_x F = mu Delta; throws not_first_integral carrying the
// remainder when no such differential function exists.
expr verify_first_integral(const expr &f, const diff_eq &eq, const reducer &r = identity_reducer());

// S_L(v) - theta S_L0(v) - S_{D_x P}(v) for L = theta L0 + D_x P.
symmetry_verdict divergence_relation_check(const expr &l0, const expr &p, const expr &theta, const vector_field &v,
                                           const reducer &r = identity_reducer());

} // namespace jetsym
