#include <jetsym/maxsym.hpp>

#include <mutex>

namespace jetsym
{

// ---------------------------------------------------------------------------
// source context

struct source_context::state {
    enum class mode { symbolic, with_q, concrete } kind;
    expr q, u, v;

    // u^(k) = a[k] u + b[k] u' for the symbolic-solution modes
    mutable std::mutex mutex;
    mutable std::vector<expr> a, b;

    void extend(int k) const
    {
        if (a.empty()) {
            a = {expr(0), expr(0), -q};
            b = {expr(1), expr(1), expr(0)};
            // a[0], b[0], a[1], b[1] are unused placeholders
        }
        while (static_cast<int>(a.size()) <= k) {
            const auto &ak = a.back();
            const auto &bk = b.back();
            auto na = total_derivative(ak) - q * bk;
            auto nb = ak + total_derivative(bk);
            if (kind == mode::with_q) {
                na = substitute_q(na);
                nb = substitute_q(nb);
            }
            a.push_back(na);
            b.push_back(nb);
        }
    }

    [[nodiscard]] expr substitute_q(const expr &e) const
    {
        // Concrete q never contains the q symbol, so this only matters if a
        // caller mixed symbolic q atoms into a with_q computation.
        return substitute(e, [&](atom t) -> std::optional<expr> {
            if (t.kind() == atom_kind::symbol && t.symbol_name() == 'q') {
                return total_derivative(q, t.order());
            }
            return std::nullopt;
        });
    }
};

source_context source_context::symbolic()
{
    auto s = std::make_shared<state>();
    s->kind = state::mode::symbolic;
    s->q = expr(atom::symbol('q', 0));
    s->u = expr(atom::symbol('u', 0));
    s->v = expr(atom::symbol('v', 0));
    return source_context(s);
}

source_context source_context::with_q(expr q)
{
    auto s = std::make_shared<state>();
    s->kind = state::mode::with_q;
    s->q = std::move(q);
    s->u = expr(atom::symbol('u', 0));
    s->v = expr(atom::symbol('v', 0));
    return source_context(s);
}

source_context source_context::concrete(expr q, expr u, expr v)
{
    auto s = std::make_shared<state>();
    s->kind = state::mode::concrete;
    s->q = std::move(q);
    s->u = std::move(u);
    s->v = std::move(v);
    return source_context(s);
}

source_context source_context::canonical()
{
    return concrete(expr(0), expr(1), expr(atom::indep()));
}

bool source_context::symbolic_q() const noexcept
{
    return m_state->kind == state::mode::symbolic;
}

bool source_context::concrete_solutions() const noexcept
{
    return m_state->kind == state::mode::concrete;
}

const expr &source_context::q() const noexcept
{
    return m_state->q;
}
const expr &source_context::u() const noexcept
{
    return m_state->u;
}
const expr &source_context::v() const noexcept
{
    return m_state->v;
}

source_context source_context::symbolic_solutions() const
{
    return symbolic_q() ? symbolic() : with_q(q());
}

expr source_context::reduce(const expr &e) const
{
    const auto &st = *m_state;
    if (st.kind == state::mode::concrete) {
        return substitute(e, [&](atom t) -> std::optional<expr> {
            if (t.kind() != atom_kind::symbol) {
                return std::nullopt;
            }
            const expr &base = t.symbol_name() == 'q' ? st.q : t.symbol_name() == 'u' ? st.u : st.v;
            return total_derivative(base, t.order());
        });
    }
    int top = std::max(symbol_order(e, 'u'), symbol_order(e, 'v'));
    if (top < 1 && (st.kind == state::mode::symbolic || symbol_order(e, 'q') < 0)) {
        return e;
    }
    std::vector<expr> a, b;
    {
        std::lock_guard lock(st.mutex);
        st.extend(std::max(top, 2));
        a = st.a;
        b = st.b;
    }
    const expr u(atom::symbol('u', 0));
    const expr u1(atom::symbol('u', 1));
    const expr v(atom::symbol('v', 0));
    const expr v1 = (expr(1) + u1 * v) * pow(u, -1);
    return substitute(e, [&](atom t) -> std::optional<expr> {
        if (t.kind() != atom_kind::symbol) {
            return std::nullopt;
        }
        const int k = t.order();
        switch (t.symbol_name()) {
            case 'q':
                if (st.kind == state::mode::with_q) {
                    return total_derivative(st.q, k);
                }
                return std::nullopt;
            case 'u':
                if (k >= 2) {
                    return a[k] * u + b[k] * u1;
                }
                return std::nullopt;
            default:
                if (k == 1) {
                    return v1;
                }
                if (k >= 2) {
                    return a[k] * v + b[k] * v1;
                }
                return std::nullopt;
        }
    });
}

// ---------------------------------------------------------------------------
// generators

expr iota()
{
    return expr(atom::symbol('u', 1)) * pow(expr(atom::symbol('u', 0)), -1);
}

expr solution(int n, int k)
{
    return pow(expr(atom::symbol('u', 0)), n - k - 1) * pow(expr(atom::symbol('v', 0)), k);
}

const vector_field &generator_set::get(const std::string &name) const
{
    for (const auto &f : fields) {
        if (f.name == name) {
            return f.field;
        }
    }
    throw invalid_argument("no generator named " + name);
}

generator_set generators(int n)
{
    if (n < 2) {
        throw bad_order("generators need order n >= 2, got " + std::to_string(n));
    }
    const expr u(atom::symbol('u', 0)), u1(atom::symbol('u', 1));
    const expr v(atom::symbol('v', 0)), v1(atom::symbol('v', 1));
    const expr y(atom::jet(0));
    const expr m(n - 1);
    generator_set g{n, {}};
    for (int k = 0; k < n; ++k) {
        g.fields.push_back({"V" + std::to_string(k), {expr(), solution(n, k)}});
    }
    g.fields.push_back({"W", {expr(), y}});
    g.fields.push_back({"F", {u * u, m * u * u1 * y}});
    g.fields.push_back({"G", {2 * u * v, m * (u * v1 + u1 * v) * y}});
    g.fields.push_back({"H", {-(v * v), -m * v * v1 * y}});
    return g;
}

generator_set reduce(const generator_set &g, const reducer &r)
{
    generator_set out{g.n, {}};
    for (const auto &f : g.fields) {
        out.fields.push_back({f.name, {r.reduce(f.field.xi), r.reduce(f.field.psi)}});
    }
    return out;
}

vector_field commutator(const vector_field &a, const vector_field &b, const reducer &r)
{
    const atom y = atom::jet(0);
    auto act = [&](const vector_field &v, const expr &f) { return v.xi * partial_x(f) + v.psi * partial(f, y); };
    return {r.reduce(act(a, b.xi) - act(b, a.xi)), r.reduce(act(a, b.psi) - act(b, a.psi))};
}

point_transformation maximal_map(int n)
{
    const expr u(atom::symbol('u', 0));
    return {expr(atom::symbol('v', 0)) * pow(u, -1), pow(u, 1 - n) * expr(atom::jet(0))};
}

// ---------------------------------------------------------------------------
// equations and Lagrangians

namespace
{

bool has_solution_symbols(const expr &e)
{
    return symbol_order(e, 'u') >= 0 || symbol_order(e, 'v') >= 0;
}

} // namespace

diff_eq build_lode(int n, const source_context &ctx)
{
    if (n < 2) {
        throw bad_order("build_lode needs n >= 2, got " + std::to_string(n));
    }
    const auto work = ctx.symbolic_solutions();
    auto raw = transform_equation(expr(atom::jet(n)), maximal_map(n), work);
    auto eq = make_diff_eq(raw).monic();
    auto delta = work.reduce(eq.delta);
    if (has_solution_symbols(delta)) {
        throw elimination_failed("u, v survive in the transformed equation: " + to_string(delta));
    }
    for (int k = 0; k < n; ++k) {
        auto s = solution(n, k);
        std::vector<std::pair<atom, expr>> rules;
        expr d = s;
        for (int j = 0; j <= n; ++j) {
            rules.emplace_back(atom::jet(j), d);
            d = work.reduce(total_derivative(d));
        }
        auto residue = work.reduce(substitute(delta, rules));
        if (!residue.is_zero()) {
            throw elimination_failed("s_" + std::to_string(k) + " does not solve the equation, residue " +
                                     to_string(residue));
        }
    }
    return make_diff_eq(delta);
}

lagrangian canonical_lagrangian(int n)
{
    if (n % 2 != 0) {
        throw odd_order("canonical Lagrangian needs even order, got " + std::to_string(n));
    }
    const int m = n / 2;
    const expr sign = (m % 2 == 0) ? expr(1) : expr(-1);
    return {sign * expr::frac(1, 2) * pow(expr(atom::jet(m)), 2), m};
}

lagrangian transformed_lagrangian(int n, const source_context &ctx)
{
    auto canon_l = canonical_lagrangian(n);
    auto l = transform_lagrangian(canon_l, maximal_map(n), ctx.symbolic_solutions());
    if (ctx.concrete_solutions()) {
        l.density = ctx.reduce(l.density);
    }
    return l;
}

expr reduce_by_parts(const expr &density)
{
    expr l = density;
    for (int guard = 0; guard < 200; ++guard) {
        int found = -1;
        expr coeff;
        for (int m = jet_order(l); m >= 1; --m) {
            auto parts = collect(l, atom::jet(m));
            auto it = parts.find(exponent(1));
            if (it != parts.end()) {
                found = m;
                coeff = it->second;
                break;
            }
        }
        if (found < 0) {
            return l;
        }
        const atom lower = atom::jet(found - 1);
        expr g;
        for (const auto &[k, c] : collect(coeff, lower)) {
            if (depends_on(c, lower)) {
                throw not_exact("cannot integrate by parts: " + to_string(coeff));
            }
            if (k == exponent(-1)) {
                g += c * ln(expr(lower));
            } else {
                auto k1 = k + exponent(1);
                g += c * pow(expr(lower), k1) * expr(rational(1) / k1.to_rational());
            }
        }
        l -= total_derivative(g);
    }
    throw not_exact("integration by parts did not terminate");
}

lagrangian natural_lagrangian(int n, const source_context &ctx)
{
    if (n % 2 != 0) {
        throw odd_order("natural Lagrangian needs even order, got " + std::to_string(n));
    }
    auto eq = build_lode(n, ctx);
    auto l = reduce_by_parts(expr::frac(1, 2) * expr(atom::jet(0)) * eq.delta);
    if (ctx.concrete_solutions()) {
        l = ctx.reduce(l);
    }
    if (jet_order(l) > n / 2) {
        throw not_exact("natural Lagrangian kept order " + std::to_string(jet_order(l)));
    }
    return {l, n / 2};
}

} // namespace jetsym
