#include <jetsym/jet.hpp>

#include <algorithm>

namespace jetsym
{

const reducer &identity_reducer()
{
    static const reducer r;
    return r;
}

namespace
{

expr d_atom(atom a)
{
    switch (a.kind()) {
        case atom_kind::indep:
            return expr(1);
        case atom_kind::jet:
            return expr(atom::jet(a.order() + 1));
        case atom_kind::symbol:
            return expr(atom::symbol(a.symbol_name(), a.order() + 1));
        default:
            return expr();
    }
}

} // namespace

expr total_derivative(const expr &e, int times)
{
    expr out = e;
    for (int i = 0; i < times; ++i) {
        out = derive(out, d_atom);
    }
    return out;
}

expr partial_x(const expr &e)
{
    return derive(e, [](atom a) {
        if (a.kind() == atom_kind::jet) {
            return expr();
        }
        return d_atom(a);
    });
}

vector_field make_vector_field(expr xi, expr psi)
{
    if (jet_order(xi) > 0 || jet_order(psi) > 0) {
        throw invalid_argument("vector field coefficients must not depend on derivatives of y");
    }
    return {std::move(xi), std::move(psi)};
}

vector_field operator+(const vector_field &a, const vector_field &b)
{
    return {a.xi + b.xi, a.psi + b.psi};
}

vector_field operator*(const expr &c, const vector_field &v)
{
    return {c * v.xi, c * v.psi};
}

expr characteristic(const vector_field &v)
{
    return v.psi - v.xi * expr(atom::jet(1));
}

std::vector<expr> prolong(const vector_field &v, int order)
{
    if (order < 0) {
        throw invalid_argument("negative prolongation order");
    }
    std::vector<expr> out;
    expr dq = characteristic(v);
    for (int k = 0; k <= order; ++k) {
        out.push_back(dq + v.xi * expr(atom::jet(k + 1)));
        if (k < order) {
            dq = total_derivative(dq);
        }
    }
    return out;
}

expr apply_prolonged(const vector_field &v, const expr &f)
{
    const int n = jet_order(f);
    expr out = v.xi * total_derivative(f);
    expr dq = characteristic(v);
    for (int k = 0; k <= n; ++k) {
        auto df = partial(f, atom::jet(k));
        if (!df.is_zero()) {
            out += dq * df;
        }
        if (k < n) {
            dq = total_derivative(dq);
        }
    }
    return out;
}

lagrangian make_lagrangian(expr density, int order)
{
    if (order < 0) {
        throw invalid_argument("negative Lagrangian order");
    }
    if (jet_order(density) > order) {
        throw invalid_argument("Lagrangian density exceeds its declared order");
    }
    return {std::move(density), order};
}

lagrangian make_lagrangian(expr density)
{
    const int m = std::max(jet_order(density), 0);
    return {std::move(density), m};
}

expr euler(const expr &density)
{
    const int m = jet_order(density);
    expr out;
    for (int k = m; k >= 0; --k) {
        // Horner form: E = dL/dy_0 - D(dL/dy_1 - D(dL/dy_2 - ...))
        out = partial(density, atom::jet(k)) - total_derivative(out);
    }
    return out;
}

expr frechet(const expr &delta, const expr &q)
{
    const int n = jet_order(delta);
    expr out;
    expr dq = q;
    for (int k = 0; k <= n; ++k) {
        auto c = partial(delta, atom::jet(k));
        if (!c.is_zero()) {
            out += c * dq;
        }
        if (k < n) {
            dq = total_derivative(dq);
        }
    }
    return out;
}

expr frechet_adjoint(const expr &delta, const expr &q)
{
    const int n = jet_order(delta);
    expr out;
    for (int k = n; k >= 0; --k) {
        out = q * partial(delta, atom::jet(k)) - total_derivative(out);
    }
    return out;
}

// ---------------------------------------------------------------------------
// inverse total derivative

namespace
{

// Highest-order differential atom to peel next: y first, then q, u, v.
std::optional<atom> top_atom(const expr &e)
{
    if (int m = jet_order(e); m >= 1) {
        return atom::jet(m);
    }
    std::optional<atom> best;
    for (char s : {'q', 'u', 'v'}) {
        int m = symbol_order(e, s);
        if (m >= 1 && (!best || m > best->order())) {
            best = atom::symbol(s, m);
        }
    }
    return best;
}

bool inside_elementary(const expr &e, atom a)
{
    for (const auto &t : e.terms()) {
        for (const auto &f : t.mono) {
            if (f.base.is_elementary() && depends_on(f.base.argument(), a)) {
                return true;
            }
        }
    }
    return false;
}

// Antiderivative with respect to a plain atom that enters as powers only.
expr antiderivative(const expr &c, atom a)
{
    if (inside_elementary(c, a)) {
        throw not_exact("cannot integrate " + to_string(c) + " with respect to " + to_string(a));
    }
    expr out;
    for (const auto &[k, coef] : collect(c, a)) {
        if (k == exponent(-1)) {
            out += coef * ln(expr(a));
        } else {
            auto k1 = k + exponent(1);
            out += coef * pow(expr(a), k1) * expr(rational(1) / k1.to_rational());
        }
    }
    return out;
}

} // namespace

expr inverse_total_derivative(const expr &p, const reducer &red)
{
    expr f;
    expr r = red.reduce(p);
    for (int step = 0; step < 200 && !r.is_zero(); ++step) {
        auto top = top_atom(r);
        if (!top) {
            break;
        }
        if (inside_elementary(r, *top)) {
            throw not_exact("top derivative " + to_string(*top) + " enters non-polynomially");
        }
        auto parts = collect(r, *top);
        for (const auto &[k, _] : parts) {
            if (k != exponent(0) && k != exponent(1)) {
                throw not_exact("not linear in its top derivative " + to_string(*top) + ": " + to_string(p));
            }
        }
        auto it = parts.find(exponent(1));
        if (it == parts.end()) {
            throw not_exact("not a total derivative: " + to_string(p));
        }
        atom lower = top->kind() == atom_kind::jet ? atom::jet(top->order() - 1)
                                                   : atom::symbol(top->symbol_name(), top->order() - 1);
        auto g = antiderivative(it->second, lower);
        f += g;
        r = red.reduce(r - total_derivative(g));
    }
    if (!r.is_zero()) {
        // Remainder must be a function of x and constants alone.
        for (auto a : free_atoms(r)) {
            if (a.kind() == atom_kind::jet || a.kind() == atom_kind::symbol) {
                throw not_exact("remainder depends on " + to_string(a) + ": " + to_string(r));
            }
        }
        const atom x = atom::indep();
        if (inside_elementary(r, x)) {
            throw not_exact("x-only remainder is not a Laurent polynomial: " + to_string(r));
        }
        f += antiderivative(r, x);
    }
    auto check = red.reduce(total_derivative(f) - p);
    if (!check.is_zero() && !zero_test(check)) {
        throw not_exact("integration did not close: " + to_string(p));
    }
    return f;
}

// ---------------------------------------------------------------------------
// equations

diff_eq make_diff_eq(const expr &delta)
{
    const int n = jet_order(delta);
    if (n < 1) {
        throw invalid_argument("equation must involve a derivative of y: " + to_string(delta));
    }
    auto lead = partial(delta, atom::jet(n));
    if (depends_on(lead, atom::jet(n))) {
        throw invalid_argument("equation is not linear in its highest derivative");
    }
    if (zero_test(lead)) {
        throw invalid_argument("leading coefficient vanishes identically");
    }
    return {delta, n, lead};
}

expr diff_eq::solved_rhs() const
{
    const expr yn = atom::jet(order);
    return -(delta - leading * yn) / leading;
}

diff_eq diff_eq::monic() const
{
    auto d = delta / leading;
    return {d, order, expr(1)};
}

expr diff_eq::on_shell(const expr &e, const reducer &r) const
{
    const int top = jet_order(e);
    if (top < order) {
        return e;
    }
    std::vector<std::pair<atom, expr>> rules;
    expr rhs = r.reduce(solved_rhs());
    rules.emplace_back(atom::jet(order), rhs);
    for (int k = order + 1; k <= top; ++k) {
        rhs = r.reduce(substitute(total_derivative(rhs), {{atom::jet(order), rules.front().second}}));
        // Lower-order rules are already expressed below order n.
        rhs = r.reduce(substitute(rhs, rules));
        rules.emplace_back(atom::jet(k), rhs);
    }
    return r.reduce(substitute(e, rules));
}

} // namespace jetsym
