#include <jetsym/noether.hpp>

namespace jetsym
{

std::string to_string(symmetry_kind k)
{
    switch (k) {
        case symmetry_kind::lie:
            return "lie";
        case symmetry_kind::variational:
            return "variational";
        default:
            return "divergence";
    }
}

namespace
{

symmetry_verdict verdict(symmetry_kind k, expr witness)
{
    const bool holds = witness.is_zero() || zero_test(witness);
    return {k, holds, std::move(witness)};
}

} // namespace

expr variational_expression(const vector_field &v, const expr &density)
{
    return apply_prolonged(v, density) + density * total_derivative(v.xi);
}

symmetry_verdict lie_symmetry_check(const vector_field &v, const diff_eq &eq, const reducer &r)
{
    auto image = r.reduce(apply_prolonged(v, eq.delta));
    return verdict(symmetry_kind::lie, eq.on_shell(image, r));
}

symmetry_verdict variational_check(const vector_field &v, const lagrangian &l, const reducer &r)
{
    return verdict(symmetry_kind::variational, r.reduce(variational_expression(v, l.density)));
}

symmetry_verdict divergence_check(const vector_field &v, const diff_eq &eq, const reducer &r)
{
    auto qd = r.reduce(characteristic(v) * eq.delta);
    return verdict(symmetry_kind::divergence, r.reduce(euler(qd)));
}

first_integral_result first_integral(const vector_field &v, const diff_eq &eq, const reducer &r)
{
    auto check = divergence_check(v, eq, r);
    if (!check.holds) {
        throw not_a_divergence_symmetry("E(Q Delta) does not vanish: " + to_string(check.witness));
    }
    auto q = r.reduce(characteristic(v));
    auto p = r.reduce(q * eq.delta);
    auto f = inverse_total_derivative(p, r);
    auto witness = r.reduce(total_derivative(f) - p);
    return {f, q, eq, witness};
}

expr verify_first_integral(const expr &f, const diff_eq &eq, const reducer &r)
{
    if (jet_order(f) >= eq.order) {
        throw not_first_integral("first integral must have order below " + std::to_string(eq.order));
    }
    auto d = r.reduce(total_derivative(f));
    auto mu = r.reduce(partial(d, atom::jet(eq.order)) / eq.leading);
    auto remainder = r.reduce(d - mu * eq.delta);
    if (!remainder.is_zero() && !zero_test(remainder)) {
        throw not_first_integral("D_x F is not a multiple of the equation; remainder " + to_string(remainder));
    }
    return mu;
}

symmetry_verdict divergence_relation_check(const expr &l0, const expr &p, const expr &theta, const vector_field &v,
                                           const reducer &r)
{
    auto dp = total_derivative(p);
    auto l = theta * l0 + dp;
    auto residual = variational_expression(v, l) - theta * variational_expression(v, l0) - variational_expression(v, dp);
    return verdict(symmetry_kind::divergence, r.reduce(residual));
}

} // namespace jetsym
