#include <jetsym/expr.hpp>

#include <algorithm>
#include <cctype>

namespace jetsym
{

const std::vector<std::string> &known_parameters()
{
    static const std::vector<std::string> names = {"k1", "k2", "k3", "lam", "alpha", "theta", "a0", "a1", "a2", "a3"};
    return names;
}

// ---------------------------------------------------------------------------
// printing

namespace
{

std::string power_suffix(exponent k)
{
    if (k == exponent(1)) {
        return "";
    }
    if (k.is_integer() && k.num() > 0) {
        return "^" + k.str();
    }
    return "^(" + k.str() + ")";
}

std::string print_factor(const factor &f, const print_options &opts)
{
    const auto a = f.base;
    switch (a.kind()) {
        case atom_kind::exp:
            return "exp(" + to_string(a.argument() * expr(f.power.to_rational()), opts) + ")";
        case atom_kind::base:
            return "(" + to_string(a.argument(), opts) + ")^(" + f.power.str() + ")";
        default:
            return to_string(a, opts) + power_suffix(f.power);
    }
}

} // namespace

std::string to_string(atom a, const print_options &opts)
{
    switch (a.kind()) {
        case atom_kind::indep:
            return opts.source_vars ? "z" : "x";
        case atom_kind::jet: {
            std::string s = opts.source_vars ? "w" : "y";
            return a.order() == 0 ? s : s + std::to_string(a.order());
        }
        case atom_kind::symbol: {
            std::string s(1, a.symbol_name());
            return a.order() == 0 ? s : s + std::to_string(a.order());
        }
        case atom_kind::param:
            return a.name();
        case atom_kind::aux:
            return "%t" + std::to_string(a.order());
        case atom_kind::ln:
            return "ln(" + to_string(a.argument(), opts) + ")";
        case atom_kind::exp:
            return "exp(" + to_string(a.argument(), opts) + ")";
        case atom_kind::base:
            return "(" + to_string(a.argument(), opts) + ")";
    }
    return "?";
}

std::string to_string(const expr &e, const print_options &opts)
{
    if (e.is_zero()) {
        return "0";
    }
    std::string s;
    bool first = true;
    for (const auto &t : e.terms()) {
        const bool neg = t.coeff < 0;
        rational mag = neg ? rational(-t.coeff) : t.coeff;
        if (first) {
            if (neg) {
                s += "-";
            }
        } else {
            s += neg ? " - " : " + ";
        }
        first = false;
        if (t.mono.empty()) {
            s += mag.get_str();
            continue;
        }
        if (mag != 1) {
            s += mag.get_str() + "*";
        }
        for (std::size_t i = 0; i < t.mono.size(); ++i) {
            if (i > 0) {
                s += "*";
            }
            s += print_factor(t.mono[i], opts);
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// parsing

namespace
{

class parser
{
public:
    parser(std::string_view text, const parse_options &opts) : m_text(text), m_opts(opts) {}

    expr run()
    {
        auto e = sum();
        skip_space();
        if (m_pos < m_text.size()) {
            fail(std::string("unexpected '") + m_text[m_pos] + "'");
        }
        return e;
    }

private:
    std::string_view m_text;
    parse_options m_opts;
    std::size_t m_pos = 0;

    [[noreturn]] void fail(const std::string &msg) const
    {
        int line = 1, col = 1;
        for (std::size_t i = 0; i < m_pos && i < m_text.size(); ++i) {
            if (m_text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw parse_error(msg, line, col);
    }

    void skip_space()
    {
        while (m_pos < m_text.size() && std::isspace(static_cast<unsigned char>(m_text[m_pos])) != 0) {
            ++m_pos;
        }
    }

    bool accept(char c)
    {
        skip_space();
        if (m_pos < m_text.size() && m_text[m_pos] == c) {
            ++m_pos;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            fail(std::string("expected '") + c + "'");
        }
    }

    expr sum()
    {
        auto e = product();
        for (;;) {
            if (accept('+')) {
                e = e + product();
            } else if (accept('-')) {
                e = e - product();
            } else {
                return e;
            }
        }
    }

    expr product()
    {
        auto e = unary();
        for (;;) {
            if (accept('*')) {
                e = e * unary();
            } else if (accept('/')) {
                auto start = m_pos;
                auto d = unary();
                if (d.is_zero()) {
                    m_pos = start;
                    fail("division by zero");
                }
                e = e / d;
            } else {
                return e;
            }
        }
    }

    expr unary()
    {
        if (accept('-')) {
            return -unary();
        }
        if (accept('+')) {
            return unary();
        }
        return power();
    }

    expr power()
    {
        auto b = primary();
        if (accept('^')) {
            auto start = m_pos;
            auto e = unary();
            auto c = e.constant();
            if (!c) {
                m_pos = start;
                fail("exponent must be a rational constant");
            }
            try {
                return pow(b, exponent::from_rational(*c));
            } catch (const unsupported_form &ex) {
                m_pos = start;
                fail(ex.what());
            }
        }
        return b;
    }

    expr number()
    {
        auto start = m_pos;
        while (m_pos < m_text.size() && std::isdigit(static_cast<unsigned char>(m_text[m_pos])) != 0) {
            ++m_pos;
        }
        std::string digits(m_text.substr(start, m_pos - start));
        mpz_class den = 1;
        if (m_pos < m_text.size() && m_text[m_pos] == '.') {
            ++m_pos;
            auto fstart = m_pos;
            while (m_pos < m_text.size() && std::isdigit(static_cast<unsigned char>(m_text[m_pos])) != 0) {
                ++m_pos;
            }
            auto frac = m_text.substr(fstart, m_pos - fstart);
            digits += frac;
            for (std::size_t i = 0; i < frac.size(); ++i) {
                den *= 10;
            }
        }
        if (digits.empty()) {
            m_pos = start;
            fail("malformed number");
        }
        rational q(mpz_class(digits), den);
        q.canonicalize();
        return expr(q);
    }

    expr primary()
    {
        skip_space();
        if (m_pos >= m_text.size()) {
            fail("unexpected end of input");
        }
        char c = m_text[m_pos];
        if (c == '(') {
            ++m_pos;
            auto e = sum();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '.') {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) == 0) {
            fail(std::string("unexpected '") + c + "'");
        }
        auto start = m_pos;
        while (m_pos < m_text.size() && std::isalnum(static_cast<unsigned char>(m_text[m_pos])) != 0) {
            ++m_pos;
        }
        std::string id(m_text.substr(start, m_pos - start));
        if (id == "ln" || id == "exp" || id == "sqrt") {
            expect('(');
            auto inner_start = m_pos;
            auto arg = sum();
            expect(')');
            try {
                if (id == "ln") {
                    return ln(arg);
                }
                if (id == "exp") {
                    return exp(arg);
                }
                return sqrt(arg);
            } catch (const unsupported_form &ex) {
                m_pos = inner_start;
                fail(ex.what());
            }
        }
        if (auto a = identifier(id)) {
            return expr(*a);
        }
        m_pos = start;
        fail("unknown identifier '" + id + "'");
    }

    std::optional<atom> identifier(const std::string &id) const
    {
        for (const auto &p : known_parameters()) {
            if (p == id) {
                return atom::param(id);
            }
        }
        const char indep = m_opts.source_vars ? 'z' : 'x';
        const char dep = m_opts.source_vars ? 'w' : 'y';
        if (id.size() == 1 && id[0] == indep) {
            return atom::indep();
        }
        const char head = id[0];
        auto rest = id.substr(1);
        if (!rest.empty() && (rest.size() > 2 || !std::all_of(rest.begin(), rest.end(), [](char ch) {
                                  return std::isdigit(static_cast<unsigned char>(ch)) != 0;
                              }))) {
            return std::nullopt;
        }
        int order = rest.empty() ? 0 : std::stoi(rest);
        if (head == dep) {
            return atom::jet(order);
        }
        if (head == 'q' || head == 'u' || head == 'v') {
            return atom::symbol(head, order);
        }
        return std::nullopt;
    }
};

} // namespace

expr parse(std::string_view text, const parse_options &opts)
{
    return parser(text, opts).run();
}

} // namespace jetsym
