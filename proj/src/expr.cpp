#include <jetsym/expr.hpp>

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <set>
#include <unordered_map>

namespace jetsym
{

// ---------------------------------------------------------------------------
// exponent

exponent::exponent(std::int64_t n, std::int64_t d)
{
    if (d == 0) {
        throw unsupported_form("zero denominator in exponent");
    }
    if (d < 0) {
        n = -n;
        d = -d;
    }
    auto g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) {
        g = 1;
    }
    m_num = n / g;
    m_den = d / g;
}

std::int64_t exponent::floor() const noexcept
{
    if (m_num >= 0) {
        return m_num / m_den;
    }
    return -((-m_num + m_den - 1) / m_den);
}

exponent exponent::from_rational(const rational &q)
{
    if (!q.get_num().fits_slong_p() || !q.get_den().fits_slong_p()) {
        throw unsupported_form("exponent too large: " + q.get_str());
    }
    return exponent(q.get_num().get_si(), q.get_den().get_si());
}

exponent operator+(exponent a, exponent b)
{
    return exponent(a.m_num * b.m_den + b.m_num * a.m_den, a.m_den * b.m_den);
}

exponent operator-(exponent a, exponent b)
{
    return a + (-b);
}

exponent operator*(exponent a, exponent b)
{
    return exponent(a.m_num * b.m_num, a.m_den * b.m_den);
}

std::strong_ordering operator<=>(exponent a, exponent b) noexcept
{
    // Denominators are positive so cross multiplication preserves order.
    return (a.m_num * b.m_den) <=> (b.m_num * a.m_den);
}

std::string exponent::str() const
{
    if (m_den == 1) {
        return std::to_string(m_num);
    }
    return std::to_string(m_num) + "/" + std::to_string(m_den);
}

// ---------------------------------------------------------------------------
// expression payload

struct expr::data {
    std::vector<term> terms;
};

namespace
{

const std::shared_ptr<const expr::data> &empty_data()
{
    static const auto d = std::make_shared<const expr::data>();
    return d;
}

} // namespace

// ---------------------------------------------------------------------------
// atoms

struct atom_node {
    atom_kind kind{};
    int order = 0;
    char sym = 0;
    std::string name;
    expr arg;
    std::string family;
    bool negated = false;
    std::string key;
};

namespace
{

struct intern_table {
    std::mutex mutex;
    std::unordered_map<std::string, std::unique_ptr<atom_node>> nodes;
};

intern_table &table()
{
    static intern_table t;
    return t;
}

const atom_node *intern(atom_node proto)
{
    auto &t = table();
    std::lock_guard lock(t.mutex);
    auto it = t.nodes.find(proto.key);
    if (it != t.nodes.end()) {
        return it->second.get();
    }
    auto key = proto.key;
    auto node = std::make_unique<atom_node>(std::move(proto));
    auto *raw = node.get();
    t.nodes.emplace(std::move(key), std::move(node));
    return raw;
}

int symbol_rank(char c)
{
    switch (c) {
        case 'q':
            return 0;
        case 'u':
            return 1;
        default:
            return 2;
    }
}

} // namespace

atom atom::indep()
{
    static const atom_node *n = intern({.kind = atom_kind::indep, .key = "x"});
    return atom(n);
}

atom atom::jet(int order)
{
    if (order < 0) {
        throw invalid_argument("negative jet order");
    }
    thread_local std::vector<const atom_node *> cache;
    if (static_cast<std::size_t>(order) < cache.size() && cache[order] != nullptr) {
        return atom(cache[order]);
    }
    const auto *n = intern({.kind = atom_kind::jet, .order = order, .key = "j:" + std::to_string(order)});
    if (cache.size() <= static_cast<std::size_t>(order)) {
        cache.resize(order + 1, nullptr);
    }
    cache[order] = n;
    return atom(n);
}

atom atom::symbol(char name, int order)
{
    if (name != 'q' && name != 'u' && name != 'v') {
        throw invalid_argument(std::string("unknown symbol function ") + name);
    }
    if (order < 0) {
        throw invalid_argument("negative symbol order");
    }
    thread_local std::array<std::vector<const atom_node *>, 3> cache;
    auto &c = cache[symbol_rank(name)];
    if (static_cast<std::size_t>(order) < c.size() && c[order] != nullptr) {
        return atom(c[order]);
    }
    const auto *n = intern({.kind = atom_kind::symbol,
                            .order = order,
                            .sym = name,
                            .key = std::string("s:") + name + ":" + std::to_string(order)});
    if (c.size() <= static_cast<std::size_t>(order)) {
        c.resize(order + 1, nullptr);
    }
    c[order] = n;
    return atom(n);
}

atom atom::param(const std::string &name)
{
    return atom(intern({.kind = atom_kind::param, .name = name, .key = "p:" + name}));
}

atom atom::aux(int index)
{
    return atom(intern({.kind = atom_kind::aux, .order = index, .key = "t:" + std::to_string(index)}));
}

atom atom::make_ln(const expr &arg)
{
    return atom(intern({.kind = atom_kind::ln, .arg = arg, .key = "ln(" + to_string(arg) + ")"}));
}

atom atom::make_exp(const expr &mono_arg)
{
    return atom(intern({.kind = atom_kind::exp, .arg = mono_arg, .key = "exp(" + to_string(mono_arg) + ")"}));
}

atom atom::make_base(const expr &value, const std::string &family, bool negated)
{
    return atom(intern({.kind = atom_kind::base,
                        .arg = value,
                        .family = family,
                        .negated = negated,
                        .key = "base(" + to_string(value) + ")"}));
}

atom_kind atom::kind() const noexcept
{
    return m_node->kind;
}
int atom::order() const noexcept
{
    return m_node->order;
}
char atom::symbol_name() const noexcept
{
    return m_node->sym;
}
const std::string &atom::name() const noexcept
{
    return m_node->name;
}
const expr &atom::argument() const
{
    return m_node->arg;
}
bool atom::negated() const noexcept
{
    return m_node->negated;
}
const std::string &atom::family() const noexcept
{
    return m_node->family;
}
const std::string &atom::key() const noexcept
{
    return m_node->key;
}

std::strong_ordering operator<=>(atom a, atom b)
{
    if (a.m_node == b.m_node) {
        return std::strong_ordering::equal;
    }
    if (auto c = a.kind() <=> b.kind(); c != 0) {
        return c;
    }
    switch (a.kind()) {
        case atom_kind::param:
            return a.name() <=> b.name();
        case atom_kind::symbol:
            if (auto c = symbol_rank(a.symbol_name()) <=> symbol_rank(b.symbol_name()); c != 0) {
                return c;
            }
            return a.order() <=> b.order();
        case atom_kind::jet:
        case atom_kind::aux:
            return a.order() <=> b.order();
        case atom_kind::indep:
            return std::strong_ordering::equal;
        default:
            return a.key() <=> b.key();
    }
}

std::strong_ordering compare(const monomial &a, const monomial &b)
{
    const auto n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (auto c = a[i].base <=> b[i].base; c != 0) {
            return c;
        }
        if (auto c = a[i].power <=> b[i].power; c != 0) {
            return c;
        }
    }
    return a.size() <=> b.size();
}

// ---------------------------------------------------------------------------
// monomial normalisation

namespace
{

monomial mul_monomials(const monomial &a, const monomial &b)
{
    monomial out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        auto c = a[i].base <=> b[j].base;
        if (c < 0) {
            out.push_back(a[i++]);
        } else if (c > 0) {
            out.push_back(b[j++]);
        } else {
            auto p = a[i].power + b[j].power;
            if (!p.is_zero()) {
                out.push_back({a[i].base, p});
            }
            ++i;
            ++j;
        }
    }
    for (; i < a.size(); ++i) {
        out.push_back(a[i]);
    }
    for (; j < b.size(); ++j) {
        out.push_back(b[j]);
    }
    return out;
}

// A monomial needs normalising when a base atom carries a power >= 1 or two
// base atoms of the same family (g and -g) meet.
bool needs_fix(const monomial &m)
{
    const std::string *prev_family = nullptr;
    for (const auto &f : m) {
        if (f.base.kind() != atom_kind::base) {
            continue;
        }
        if (f.power >= exponent(1)) {
            return true;
        }
        if (prev_family != nullptr && *prev_family == f.base.family()) {
            return true;
        }
        prev_family = &f.base.family();
    }
    // Siblings are not necessarily adjacent; do a full check when there are
    // several base atoms.
    std::size_t nbase = 0;
    for (const auto &f : m) {
        nbase += f.base.kind() == atom_kind::base;
    }
    if (nbase > 1) {
        std::set<std::string> seen;
        for (const auto &f : m) {
            if (f.base.kind() == atom_kind::base && !seen.insert(f.base.family()).second) {
                return true;
            }
        }
    }
    return false;
}

expr integer_power(const expr &b, std::int64_t n);

expr finalize(monomial m, rational c)
{
    // Fold g^a into (-g)^b when a is an integer (or the other way round).
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i].base.kind() != atom_kind::base) {
            continue;
        }
        for (std::size_t j = i + 1; j < m.size(); ++j) {
            if (m[j].base.kind() != atom_kind::base || m[j].base.family() != m[i].base.family()) {
                continue;
            }
            std::size_t keep = 0, drop = 0;
            if (m[i].power.is_integer()) {
                keep = j;
                drop = i;
            } else if (m[j].power.is_integer()) {
                keep = i;
                drop = j;
            } else {
                continue;
            }
            if (m[drop].power.num() % 2 != 0) {
                c = -c;
            }
            m[keep].power = m[keep].power + m[drop].power;
            m.erase(m.begin() + static_cast<std::ptrdiff_t>(drop));
            m.erase(std::remove_if(m.begin(), m.end(), [](const factor &f) { return f.power.is_zero(); }), m.end());
            return finalize(std::move(m), std::move(c));
        }
    }
    std::vector<expr> expansions;
    for (auto &f : m) {
        if (f.base.kind() == atom_kind::base && f.power >= exponent(1)) {
            auto k = f.power.floor();
            expansions.push_back(integer_power(f.base.argument(), k));
            f.power = f.power - exponent(k);
        }
    }
    m.erase(std::remove_if(m.begin(), m.end(), [](const factor &f) { return f.power.is_zero(); }), m.end());
    std::map<monomial, rational, monomial_less> one;
    if (c != 0) {
        one.emplace(std::move(m), std::move(c));
    }
    auto out = expr::from_terms(std::move(one));
    for (const auto &e : expansions) {
        out = out * e;
    }
    return out;
}

expr integer_power(const expr &b, std::int64_t n)
{
    assert(n >= 0);
    expr result(1);
    expr base = b;
    while (n > 0) {
        if (n & 1) {
            result = result * base;
        }
        n >>= 1;
        if (n > 0) {
            base = base * base;
        }
    }
    return result;
}

} // namespace

// ---------------------------------------------------------------------------
// expr

expr::expr() : m_data(empty_data()) {}

expr::expr(int n) : expr(static_cast<long>(n)) {}

expr::expr(long n) : expr(rational(n)) {}

expr::expr(const rational &q) : m_data(empty_data())
{
    if (q != 0) {
        auto d = std::make_shared<data>();
        d->terms.push_back({monomial{}, q});
        d->terms.back().coeff.canonicalize();
        m_data = std::move(d);
    }
}

expr::expr(atom a) : m_data(empty_data())
{
    if (a.kind() == atom_kind::base) {
        *this = a.argument();
        return;
    }
    auto d = std::make_shared<data>();
    d->terms.push_back({monomial{{a, exponent(1)}}, rational(1)});
    m_data = std::move(d);
}

expr expr::frac(long num, long den)
{
    rational q(num, den);
    q.canonicalize();
    return expr(q);
}

expr expr::from_terms(std::map<monomial, rational, monomial_less> &&terms)
{
    auto d = std::make_shared<data>();
    d->terms.reserve(terms.size());
    for (auto &[m, c] : terms) {
        if (c != 0) {
            d->terms.push_back({m, std::move(c)});
        }
    }
    if (d->terms.empty()) {
        return expr();
    }
    return expr(std::shared_ptr<const data>(std::move(d)));
}

expr expr::from_monomial(monomial m, rational c)
{
    if (c == 0) {
        return expr();
    }
    if (needs_fix(m)) {
        return finalize(std::move(m), std::move(c));
    }
    auto d = std::make_shared<data>();
    d->terms.push_back({std::move(m), std::move(c)});
    return expr(std::shared_ptr<const data>(std::move(d)));
}

const std::vector<term> &expr::terms() const noexcept
{
    return m_data->terms;
}

std::optional<rational> expr::constant() const
{
    if (is_zero()) {
        return rational(0);
    }
    if (terms().size() == 1 && terms()[0].mono.empty()) {
        return terms()[0].coeff;
    }
    return std::nullopt;
}

expr operator+(const expr &a, const expr &b)
{
    if (a.is_zero()) {
        return b;
    }
    if (b.is_zero()) {
        return a;
    }
    auto d = std::make_shared<expr::data>();
    const auto &x = a.terms();
    const auto &y = b.terms();
    d->terms.reserve(x.size() + y.size());
    std::size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
        auto c = compare(x[i].mono, y[j].mono);
        if (c < 0) {
            d->terms.push_back(x[i++]);
        } else if (c > 0) {
            d->terms.push_back(y[j++]);
        } else {
            rational s = x[i].coeff + y[j].coeff;
            if (s != 0) {
                d->terms.push_back({x[i].mono, std::move(s)});
            }
            ++i;
            ++j;
        }
    }
    for (; i < x.size(); ++i) {
        d->terms.push_back(x[i]);
    }
    for (; j < y.size(); ++j) {
        d->terms.push_back(y[j]);
    }
    if (d->terms.empty()) {
        return expr();
    }
    return expr(std::shared_ptr<const expr::data>(std::move(d)));
}

expr operator-(const expr &a)
{
    if (a.is_zero()) {
        return a;
    }
    auto d = std::make_shared<expr::data>(*a.m_data);
    for (auto &t : d->terms) {
        t.coeff = -t.coeff;
    }
    return expr(std::shared_ptr<const expr::data>(std::move(d)));
}

expr operator-(const expr &a, const expr &b)
{
    return a + (-b);
}

expr operator*(const expr &a, const expr &b)
{
    if (a.is_zero() || b.is_zero()) {
        return expr();
    }
    if (auto c = a.constant()) {
        if (*c == 1) {
            return b;
        }
        auto d = std::make_shared<expr::data>(*b.m_data);
        for (auto &t : d->terms) {
            t.coeff *= *c;
        }
        return expr(std::shared_ptr<const expr::data>(std::move(d)));
    }
    if (b.constant()) {
        return b * a;
    }
    std::map<monomial, rational, monomial_less> acc;
    expr_builder fixes;
    bool any_fix = false;
    for (const auto &s : a.terms()) {
        for (const auto &t : b.terms()) {
            auto m = mul_monomials(s.mono, t.mono);
            rational c = s.coeff * t.coeff;
            if (needs_fix(m)) {
                fixes.add(finalize(std::move(m), std::move(c)));
                any_fix = true;
                continue;
            }
            auto [it, inserted] = acc.try_emplace(std::move(m), c);
            if (!inserted) {
                it->second += c;
            }
        }
    }
    auto out = expr::from_terms(std::move(acc));
    if (any_fix) {
        out = out + fixes.build();
    }
    return out;
}

expr operator/(const expr &a, const expr &b)
{
    return a * pow(b, exponent(-1));
}

bool operator==(const expr &a, const expr &b)
{
    if (a.m_data == b.m_data) {
        return true;
    }
    const auto &x = a.terms();
    const auto &y = b.terms();
    if (x.size() != y.size()) {
        return false;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].coeff != y[i].coeff || compare(x[i].mono, y[i].mono) != 0) {
            return false;
        }
    }
    return true;
}

std::strong_ordering compare(const expr &a, const expr &b)
{
    const auto &x = a.terms();
    const auto &y = b.terms();
    const auto n = std::min(x.size(), y.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (auto c = compare(x[i].mono, y[i].mono); c != 0) {
            return c;
        }
        auto cc = cmp(x[i].coeff, y[i].coeff);
        if (cc != 0) {
            return cc < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
        }
    }
    return x.size() <=> y.size();
}

void expr_builder::add(const expr &e, const rational &scale)
{
    if (scale == 0) {
        return;
    }
    for (const auto &t : e.terms()) {
        add_term(t.mono, scale == 1 ? t.coeff : rational(t.coeff * scale));
    }
}

void expr_builder::add_term(const monomial &m, const rational &c)
{
    auto [it, inserted] = m_terms.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
    }
}

expr expr_builder::build()
{
    auto out = expr::from_terms(std::move(m_terms));
    m_terms.clear();
    return out;
}

std::ostream &operator<<(std::ostream &os, const expr &e)
{
    return os << to_string(e);
}

// ---------------------------------------------------------------------------
// powers, logarithms, exponentials

namespace
{

// Prime factorisation by trial division; a leftover cofactor above the trial
// bound is treated as prime.
std::vector<std::pair<mpz_class, std::int64_t>> factorize(mpz_class n)
{
    std::vector<std::pair<mpz_class, std::int64_t>> out;
    if (n <= 1) {
        return out;
    }
    for (unsigned long p = 2; p < 100000 && mpz_class(p) * p <= n; p += (p == 2 ? 1 : 2)) {
        std::int64_t k = 0;
        while (mpz_divisible_ui_p(n.get_mpz_t(), p) != 0) {
            n /= p;
            ++k;
        }
        if (k > 0) {
            out.emplace_back(mpz_class(p), k);
        }
    }
    if (n > 1) {
        out.emplace_back(n, 1);
    }
    return out;
}

expr prime_root(const mpz_class &p, exponent e)
{
    // p^e with e possibly negative; integer part goes to the coefficient.
    auto k = e.floor();
    auto frac = e - exponent(k);
    rational coeff(1);
    mpz_class pk;
    mpz_pow_ui(pk.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(k < 0 ? -k : k));
    coeff = k < 0 ? rational(1, pk) : rational(pk);
    coeff.canonicalize();
    if (frac.is_zero()) {
        return expr(coeff);
    }
    auto b = atom::make_base(expr(rational(p)), p.get_str(), false);
    return expr::from_monomial(monomial{{b, frac}}, coeff);
}

// c^e for a positive rational constant and arbitrary rational e.
expr constant_power(const rational &c, exponent e)
{
    assert(c > 0);
    if (e.is_integer()) {
        mpz_class n, d;
        auto k = e.num();
        auto ak = static_cast<unsigned long>(k < 0 ? -k : k);
        mpz_pow_ui(n.get_mpz_t(), c.get_num_mpz_t(), ak);
        mpz_pow_ui(d.get_mpz_t(), c.get_den_mpz_t(), ak);
        rational r = k < 0 ? rational(d, n) : rational(n, d);
        r.canonicalize();
        return expr(r);
    }
    expr out(1);
    for (const auto &[p, k] : factorize(c.get_num())) {
        out = out * prime_root(p, exponent(k) * e);
    }
    for (const auto &[p, k] : factorize(c.get_den())) {
        out = out * prime_root(p, exponent(-k) * e);
    }
    return out;
}

rational content(const expr &e)
{
    mpz_class g = 0, l = 1;
    for (const auto &t : e.terms()) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coeff.get_num_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coeff.get_den_mpz_t());
    }
    rational c(g, l);
    c.canonicalize();
    if (e.terms().front().coeff < 0) {
        c = -c;
    }
    return c;
}

expr pow_monomial(const term &t, exponent r)
{
    if (t.coeff < 0 && !r.is_integer()) {
        if (r.den() % 2 == 1) {
            auto out = pow_monomial(term{t.mono, -t.coeff}, r);
            return r.num() % 2 == 0 ? out : -out;
        }
        if (t.mono.empty()) {
            throw unsupported_form("negative constant " + t.coeff.get_str() + " raised to " + r.str());
        }
        auto unit = expr::from_monomial(t.mono, rational(1));
        auto b = atom::make_base(-unit, to_string(unit), true);
        return constant_power(-t.coeff, r) * expr::from_monomial(monomial{{b, r}}, rational(1));
    }
    monomial m = t.mono;
    for (auto &f : m) {
        f.power = f.power * r;
    }
    expr c_part;
    if (r.is_integer() && r.num() < 0) {
        c_part = constant_power(t.coeff < 0 ? rational(-t.coeff) : t.coeff, r);
        if (t.coeff < 0 && r.num() % 2 != 0) {
            c_part = -c_part;
        }
    } else if (t.coeff < 0) {
        // integer positive power of a negative coefficient
        c_part = constant_power(-t.coeff, r);
        if (r.num() % 2 != 0) {
            c_part = -c_part;
        }
    } else {
        c_part = constant_power(t.coeff, r);
    }
    return c_part * expr::from_monomial(std::move(m), rational(1));
}

expr ln_of_constant(const rational &c)
{
    rational a = c < 0 ? rational(-c) : c;
    expr out;
    for (const auto &[p, k] : factorize(a.get_num())) {
        out = out + expr(rational(k)) * expr(atom::make_ln(expr(rational(p))));
    }
    for (const auto &[p, k] : factorize(a.get_den())) {
        out = out - expr(rational(k)) * expr(atom::make_ln(expr(rational(p))));
    }
    return out;
}

expr ln_of_atom(atom a)
{
    switch (a.kind()) {
        case atom_kind::exp:
            return a.argument();
        case atom_kind::base: {
            const auto &v = a.argument();
            if (v.constant()) {
                return ln_of_constant(*v.constant());
            }
            return ln(v);
        }
        default:
            return expr(atom::make_ln(expr(a)));
    }
}

} // namespace

expr pow(const expr &b, exponent r)
{
    if (r.is_zero()) {
        return expr(1);
    }
    if (b.is_zero()) {
        if (r > exponent(0)) {
            return expr();
        }
        throw unsupported_form("division by zero");
    }
    if (r.is_integer() && r.num() > 0) {
        return integer_power(b, r.num());
    }
    if (b.is_monomial()) {
        return pow_monomial(b.terms().front(), r);
    }
    const auto c = content(b);
    const expr g0 = b * expr(rational(1 / c));
    const auto fam = to_string(g0);
    if (r.is_integer() || c > 0) {
        auto base = atom::make_base(g0, fam, false);
        expr cp = pow_monomial(term{monomial{}, c}, r);
        return cp * expr::from_monomial(monomial{{base, r}}, rational(1));
    }
    auto base = atom::make_base(-g0, fam, true);
    return constant_power(-c, r) * expr::from_monomial(monomial{{base, r}}, rational(1));
}

expr pow(const expr &b, const expr &e)
{
    auto c = e.constant();
    if (!c) {
        throw unsupported_form("non-constant exponent " + to_string(e));
    }
    return pow(b, exponent::from_rational(*c));
}

expr sqrt(const expr &e)
{
    return pow(e, exponent(1, 2));
}

expr ln(const expr &e)
{
    if (e.is_zero()) {
        throw unsupported_form("ln(0)");
    }
    if (e.is_monomial()) {
        const auto &t = e.terms().front();
        expr out = ln_of_constant(t.coeff);
        for (const auto &f : t.mono) {
            out = out + expr(f.power.to_rational()) * ln_of_atom(f.base);
        }
        return out;
    }
    const auto c = content(e);
    const expr g0 = e * expr(rational(1 / c));
    return ln_of_constant(c) + expr(atom::make_ln(g0));
}

expr exp(const expr &e)
{
    expr out(1);
    for (const auto &t : e.terms()) {
        if (t.mono.empty()) {
            auto a = atom::make_exp(expr(1));
            out = out * expr::from_monomial(monomial{{a, exponent::from_rational(t.coeff)}}, rational(1));
            continue;
        }
        if (t.mono.size() == 1 && t.mono[0].base.kind() == atom_kind::ln && t.mono[0].power == exponent(1)) {
            out = out * pow(t.mono[0].base.argument(), exponent::from_rational(t.coeff));
            continue;
        }
        auto a = atom::make_exp(expr::from_monomial(t.mono, rational(1)));
        out = out * expr::from_monomial(monomial{{a, exponent::from_rational(t.coeff)}}, rational(1));
    }
    return out;
}

// ---------------------------------------------------------------------------
// structural operations

namespace
{

expr substitute_impl(const expr &e, const std::function<std::optional<expr>(atom)> *f, bool force,
                     std::map<atom, std::optional<expr>, atom_less> &memo);

// Replacement value of an atom, or nullopt when it is unchanged.
std::optional<expr> replace_atom(atom a, const std::function<std::optional<expr>(atom)> *f, bool force,
                                 std::map<atom, std::optional<expr>, atom_less> &memo)
{
    if (auto it = memo.find(a); it != memo.end()) {
        return it->second;
    }
    std::optional<expr> out;
    if (!a.is_elementary()) {
        if (f != nullptr) {
            out = (*f)(a);
        }
    } else {
        auto arg = substitute_impl(a.argument(), f, force, memo);
        if (force || !(arg == a.argument())) {
            switch (a.kind()) {
                case atom_kind::ln:
                    out = ln(arg);
                    break;
                case atom_kind::exp:
                    out = exp(arg);
                    break;
                default:
                    // The base value itself; the monomial applies the power.
                    out = arg;
                    break;
            }
        }
    }
    memo.emplace(a, out);
    return out;
}

expr substitute_impl(const expr &e, const std::function<std::optional<expr>(atom)> *f, bool force,
                     std::map<atom, std::optional<expr>, atom_less> &memo)
{
    bool changed = force;
    for (const auto &t : e.terms()) {
        for (const auto &fa : t.mono) {
            if (replace_atom(fa.base, f, force, memo)) {
                changed = true;
            }
        }
    }
    if (!changed) {
        return e;
    }
    expr_builder out;
    for (const auto &t : e.terms()) {
        monomial kept;
        expr prod(1);
        for (const auto &fa : t.mono) {
            auto r = replace_atom(fa.base, f, force, memo);
            if (!r) {
                kept.push_back(fa);
            } else {
                prod = prod * pow(*r, fa.power);
            }
        }
        out.add(expr::from_monomial(std::move(kept), force ? rational(1) : t.coeff) * prod,
                force ? t.coeff : rational(1));
    }
    return out.build();
}

void collect_atoms(const expr &e, std::set<atom, atom_less> &out, bool recurse_plain_only)
{
    for (const auto &t : e.terms()) {
        for (const auto &f : t.mono) {
            if (f.base.is_elementary()) {
                collect_atoms(f.base.argument(), out, recurse_plain_only);
                if (!recurse_plain_only) {
                    out.insert(f.base);
                }
            } else {
                out.insert(f.base);
            }
        }
    }
}

} // namespace

expr substitute(const expr &e, const std::function<std::optional<expr>(atom)> &replacement)
{
    std::map<atom, std::optional<expr>, atom_less> memo;
    return substitute_impl(e, &replacement, false, memo);
}

expr substitute(const expr &e, const std::vector<std::pair<atom, expr>> &replacement)
{
    std::function<std::optional<expr>(atom)> f = [&](atom a) -> std::optional<expr> {
        for (const auto &[k, v] : replacement) {
            if (k == a) {
                return v;
            }
        }
        return std::nullopt;
    };
    return substitute(e, f);
}

expr canon(const expr &e)
{
    std::map<atom, std::optional<expr>, atom_less> memo;
    return substitute_impl(e, nullptr, true, memo);
}

expr derive(const expr &e, const std::function<expr(atom)> &on_plain_atom)
{
    std::map<atom, expr, atom_less> memo;
    std::function<expr(atom)> d_atom = [&](atom a) -> expr {
        if (auto it = memo.find(a); it != memo.end()) {
            return it->second;
        }
        expr r;
        switch (a.kind()) {
            case atom_kind::ln:
                r = derive(a.argument(), on_plain_atom) * pow(a.argument(), exponent(-1));
                break;
            case atom_kind::exp:
                r = expr::from_monomial(monomial{{a, exponent(1)}}, rational(1)) * derive(a.argument(), on_plain_atom);
                break;
            case atom_kind::base:
                r = derive(a.argument(), on_plain_atom);
                break;
            default:
                r = on_plain_atom(a);
        }
        memo.emplace(a, r);
        return r;
    };
    expr_builder out;
    for (const auto &t : e.terms()) {
        for (std::size_t i = 0; i < t.mono.size(); ++i) {
            const auto &f = t.mono[i];
            auto da = d_atom(f.base);
            if (da.is_zero()) {
                continue;
            }
            monomial m = t.mono;
            m[i].power = m[i].power - exponent(1);
            if (m[i].power.is_zero()) {
                m.erase(m.begin() + static_cast<std::ptrdiff_t>(i));
            }
            out.add(expr::from_monomial(std::move(m), t.coeff * f.power.to_rational()) * da);
        }
    }
    return out.build();
}

expr partial(const expr &e, atom a)
{
    return derive(e, [a](atom b) { return b == a ? expr(1) : expr(); });
}

std::map<exponent, expr> collect(const expr &e, atom a)
{
    std::map<exponent, expr_builder> acc;
    for (const auto &t : e.terms()) {
        exponent k(0);
        monomial rest;
        rest.reserve(t.mono.size());
        for (const auto &f : t.mono) {
            if (f.base == a) {
                k = f.power;
            } else {
                rest.push_back(f);
            }
        }
        acc[k].add_term(rest, t.coeff);
    }
    std::map<exponent, expr> out;
    for (auto &[k, b] : acc) {
        auto v = b.build();
        if (!v.is_zero()) {
            out.emplace(k, std::move(v));
        }
    }
    return out;
}

bool depends_on(const expr &e, atom a)
{
    for (const auto &t : e.terms()) {
        for (const auto &f : t.mono) {
            if (f.base == a) {
                return true;
            }
            if (f.base.is_elementary() && depends_on(f.base.argument(), a)) {
                return true;
            }
        }
    }
    return false;
}

std::vector<atom> free_atoms(const expr &e)
{
    std::set<atom, atom_less> s;
    collect_atoms(e, s, true);
    return {s.begin(), s.end()};
}

int jet_order(const expr &e)
{
    int best = -1;
    for (const auto &t : e.terms()) {
        for (const auto &f : t.mono) {
            if (f.base.kind() == atom_kind::jet) {
                best = std::max(best, f.base.order());
            } else if (f.base.is_elementary()) {
                best = std::max(best, jet_order(f.base.argument()));
            }
        }
    }
    return best;
}

int symbol_order(const expr &e, char name)
{
    int best = -1;
    for (const auto &t : e.terms()) {
        for (const auto &f : t.mono) {
            if (f.base.kind() == atom_kind::symbol && f.base.symbol_name() == name) {
                best = std::max(best, f.base.order());
            } else if (f.base.is_elementary()) {
                best = std::max(best, symbol_order(f.base.argument(), name));
            }
        }
    }
    return best;
}

bool has_opaque_atoms(const expr &e)
{
    for (const auto &t : e.terms()) {
        for (const auto &f : t.mono) {
            const auto k = f.base.kind();
            if ((k == atom_kind::base || k == atom_kind::ln) && f.base.argument().size() > 1) {
                return true;
            }
            if (f.base.is_elementary() && has_opaque_atoms(f.base.argument())) {
                return true;
            }
        }
    }
    return false;
}

namespace
{

long double power_of(long double v, exponent k)
{
    if (k.is_integer()) {
        auto n = k.num();
        long double r = 1;
        long double b = n < 0 ? 1 / v : v;
        for (auto m = n < 0 ? -n : n; m > 0; m >>= 1) {
            if (m & 1) {
                r *= b;
            }
            b *= b;
        }
        return r;
    }
    if (v < 0) {
        if (k.den() % 2 == 1) {
            auto r = std::pow(-v, static_cast<long double>(k.num()) / static_cast<long double>(k.den()));
            return k.num() % 2 == 0 ? r : -r;
        }
        return std::numeric_limits<long double>::quiet_NaN();
    }
    return std::pow(v, static_cast<long double>(k.num()) / static_cast<long double>(k.den()));
}

struct evaluation {
    long double value;
    long double scale;
};

evaluation evaluate_scaled(const expr &e, const std::function<long double(atom)> &value,
                           std::map<atom, long double, atom_less> &memo)
{
    auto atom_value = [&](atom a) -> long double {
        if (auto it = memo.find(a); it != memo.end()) {
            return it->second;
        }
        long double v = 0;
        switch (a.kind()) {
            case atom_kind::ln:
                v = std::log(std::fabs(evaluate_scaled(a.argument(), value, memo).value));
                break;
            case atom_kind::exp:
                v = std::exp(evaluate_scaled(a.argument(), value, memo).value);
                break;
            case atom_kind::base:
                v = evaluate_scaled(a.argument(), value, memo).value;
                break;
            default:
                v = value(a);
        }
        memo.emplace(a, v);
        return v;
    };
    evaluation out{0, 0};
    for (const auto &t : e.terms()) {
        long double v = static_cast<long double>(t.coeff.get_d());
        for (const auto &f : t.mono) {
            v *= power_of(atom_value(f.base), f.power);
        }
        out.value += v;
        out.scale += std::fabs(v);
    }
    return out;
}

} // namespace

long double evaluate(const expr &e, const std::function<long double(atom)> &value)
{
    std::map<atom, long double, atom_less> memo;
    return evaluate_scaled(e, value, memo).value;
}

// ---------------------------------------------------------------------------
// zero test

namespace
{

struct sampler {
    std::uint64_t state;

    std::uint64_t next()
    {
        // splitmix64
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31U);
    }

    // Random rational in (1/10, 10).
    long double value()
    {
        for (;;) {
            auto den = static_cast<long>(next() % 97 + 1);
            auto num = static_cast<long>(next() % (10 * den) + 1);
            long double v = static_cast<long double>(num) / static_cast<long double>(den);
            if (v > 0.1L && v < 10.0L) {
                return v;
            }
        }
    }
};

// Samples the expression; returns the number of valid points and whether all
// of them vanished.
std::pair<int, bool> sample(const expr &e, const zero_test_options &opts, int wanted)
{
    auto atoms = free_atoms(e);
    sampler rng{opts.seed};
    int valid = 0;
    const int max_attempts = wanted * 25;
    for (int attempt = 0; attempt < max_attempts && valid < wanted; ++attempt) {
        std::map<atom, long double, atom_less> point;
        for (auto a : atoms) {
            point[a] = rng.value();
        }
        std::map<atom, long double, atom_less> memo;
        auto ev = evaluate_scaled(
            e, [&](atom a) { return point.at(a); }, memo);
        if (!std::isfinite(ev.value) || !std::isfinite(ev.scale)) {
            continue;
        }
        ++valid;
        if (std::fabs(ev.value) > static_cast<long double>(opts.tolerance) * std::max(ev.scale, 1e-300L)) {
            return {valid, false};
        }
    }
    return {valid, true};
}

// Replace a base or logarithm argument that is linear in some plain atom by a
// fresh variable, which turns the expression back into a canonical one.
std::optional<expr> eliminate_one(const expr &e, int &next_aux)
{
    std::set<atom, atom_less> all;
    collect_atoms(e, all, false);
    for (auto a : all) {
        if ((a.kind() != atom_kind::base && a.kind() != atom_kind::ln) || a.argument().size() <= 1) {
            continue;
        }
        const expr g = a.argument();
        for (auto v : free_atoms(g)) {
            auto parts = collect(g, v);
            if (parts.size() > 2 || !parts.contains(exponent(1))) {
                continue;
            }
            if (parts.size() == 2 && !parts.contains(exponent(0))) {
                continue;
            }
            auto c = parts.at(exponent(1)).constant();
            if (!c) {
                continue;
            }
            bool inside = false;
            for (const auto &t : g.terms()) {
                for (const auto &f : t.mono) {
                    if (f.base.is_elementary() && depends_on(f.base.argument(), v)) {
                        inside = true;
                    }
                }
            }
            if (inside) {
                continue;
            }
            expr h = parts.contains(exponent(0)) ? parts.at(exponent(0)) : expr();
            auto t = atom::aux(next_aux++);
            expr solved = (expr(t) - h) * expr(rational(1 / *c));
            return substitute(e, {{v, solved}});
        }
    }
    return std::nullopt;
}

} // namespace

zero_test_result zero_test_detailed(const expr &e, const zero_test_options &opts)
{
    if (e.is_zero()) {
        return {true, zero_method::canonical};
    }
    if (!has_opaque_atoms(e)) {
        return {false, zero_method::canonical};
    }
    int next_aux = 1;
    for (auto a : free_atoms(e)) {
        if (a.kind() == atom_kind::aux) {
            next_aux = std::max(next_aux, a.order() + 1);
        }
    }
    expr cur = e;
    for (int round = 0; round < 8; ++round) {
        auto r = eliminate_one(cur, next_aux);
        if (!r) {
            break;
        }
        cur = *r;
        if (cur.is_zero()) {
            return {true, zero_method::elimination};
        }
        if (!has_opaque_atoms(cur)) {
            return {false, zero_method::elimination};
        }
    }
    auto [valid, vanished] = sample(e, opts, opts.samples);
    if (!vanished) {
        return {false, zero_method::sampling};
    }
    if (valid < opts.samples) {
        throw inconclusive("zero test inconclusive: only " + std::to_string(valid) + " of " +
                           std::to_string(opts.samples) + " sample points were regular for " + to_string(e));
    }
    return {true, zero_method::sampling};
}

bool zero_test(const expr &e, const zero_test_options &opts)
{
    return zero_test_detailed(e, opts).zero;
}

bool certify_nonzero(const expr &e, const zero_test_options &opts)
{
    if (e.is_zero()) {
        return false;
    }
    auto [valid, vanished] = sample(e, opts, opts.samples);
    return valid > 0 && !vanished;
}

} // namespace jetsym
