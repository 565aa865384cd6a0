#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include <jetsym/errors.hpp>

namespace jetsym
{

using rational = mpq_class;

// Small exact rational used for powers of atoms. Powers in this domain are
// tiny (jet degrees, square roots), so machine integers are enough.
class exponent
{
public:
    constexpr exponent() = default;
    constexpr exponent(std::int64_t n) : m_num(n), m_den(1) {}
    exponent(std::int64_t n, std::int64_t d);

    [[nodiscard]] std::int64_t num() const noexcept
    {
        return m_num;
    }
    [[nodiscard]] std::int64_t den() const noexcept
    {
        return m_den;
    }
    [[nodiscard]] bool is_integer() const noexcept
    {
        return m_den == 1;
    }
    [[nodiscard]] bool is_zero() const noexcept
    {
        return m_num == 0;
    }
    // Largest integer not above the value.
    [[nodiscard]] std::int64_t floor() const noexcept;
    [[nodiscard]] rational to_rational() const
    {
        return rational(static_cast<long>(m_num), static_cast<unsigned long>(m_den));
    }
    static exponent from_rational(const rational &);

    friend exponent operator+(exponent a, exponent b);
    friend exponent operator-(exponent a, exponent b);
    friend exponent operator*(exponent a, exponent b);
    friend exponent operator-(exponent a)
    {
        return exponent(-a.m_num, a.m_den);
    }
    friend bool operator==(exponent a, exponent b) noexcept
    {
        return a.m_num == b.m_num && a.m_den == b.m_den;
    }
    friend std::strong_ordering operator<=>(exponent a, exponent b) noexcept;

    [[nodiscard]] std::string str() const;

private:
    std::int64_t m_num = 0;
    std::int64_t m_den = 1;
};

// Ordering of the kinds doubles as the print order of factors in a monomial.
enum class atom_kind : std::uint8_t { param, indep, symbol, jet, aux, ln, exp, base };

class expr;
struct atom_node;

// Interned handle to an atom. Equality is identity of the interned node;
// ordering is structural and therefore deterministic across runs.
//
//   indep   the independent variable (x, or z on the source side of a map)
//   jet     y^(k)
//   symbol  u^(k), v^(k), q^(k): derivatives of the functions of x that
//           parametrise the maximal-symmetry family
//   param   a named constant
//   aux     fresh variables used internally by the zero test
//   ln      ln|g|
//   exp     exp(m), m a monomial with unit coefficient
//   base    a base g that cannot be distributed into plain atoms; carries
//           rational powers in monomials, e.g. (2x - k1)^(1/2)
class atom
{
public:
    static atom indep();
    static atom jet(int order);
    static atom symbol(char name, int order);
    static atom param(const std::string &name);
    static atom aux(int index);

    [[nodiscard]] atom_kind kind() const noexcept;
    [[nodiscard]] int order() const noexcept;
    [[nodiscard]] char symbol_name() const noexcept;
    [[nodiscard]] const std::string &name() const noexcept;
    // Argument of an elementary atom (ln, exp, base). For base atoms this is
    // the value raised to the power carried by the monomial.
    [[nodiscard]] const expr &argument() const;
    [[nodiscard]] bool negated() const noexcept;
    [[nodiscard]] const std::string &family() const noexcept;
    [[nodiscard]] const std::string &key() const noexcept;
    [[nodiscard]] bool is_elementary() const noexcept
    {
        return kind() >= atom_kind::ln;
    }
    // x, y^(k) and the symbol functions: the atoms D_x acts on nontrivially.
    [[nodiscard]] bool is_differential() const noexcept
    {
        auto k = kind();
        return k == atom_kind::indep || k == atom_kind::jet || k == atom_kind::symbol;
    }

    [[nodiscard]] const atom_node *node() const noexcept
    {
        return m_node;
    }

    friend bool operator==(atom a, atom b) noexcept
    {
        return a.m_node == b.m_node;
    }
    friend std::strong_ordering operator<=>(atom a, atom b);

    // Internal constructors for elementary atoms, used by the kernel.
    static atom make_ln(const expr &arg);
    static atom make_exp(const expr &mono_arg);
    static atom make_base(const expr &value, const std::string &family, bool negated);

private:
    explicit atom(const atom_node *n) : m_node(n) {}
    const atom_node *m_node;
};

struct atom_less {
    bool operator()(atom a, atom b) const
    {
        return (a <=> b) < 0;
    }
};

struct factor {
    atom base;
    exponent power;
};

using monomial = std::vector<factor>;

std::strong_ordering compare(const monomial &, const monomial &);

struct monomial_less {
    bool operator()(const monomial &a, const monomial &b) const
    {
        return compare(a, b) < 0;
    }
};

struct term {
    monomial mono;
    rational coeff;
};

// Immutable canonical sum of monomials with exact rational coefficients.
// Every constructor and operation returns the canonical form, so two
// polynomial expressions over plain atoms are equal as functions iff they
// compare equal.
class expr
{
public:
    expr();
    expr(int n);
    expr(long n);
    expr(long long n) : expr(static_cast<long>(n)) {}
    expr(const rational &q);
    expr(atom a);

    static expr frac(long num, long den);
    static expr from_terms(std::map<monomial, rational, monomial_less> &&terms);
    static expr from_monomial(monomial m, rational c);

    [[nodiscard]] const std::vector<term> &terms() const noexcept;
    [[nodiscard]] std::size_t size() const noexcept
    {
        return terms().size();
    }
    [[nodiscard]] bool is_zero() const noexcept
    {
        return terms().empty();
    }
    [[nodiscard]] std::optional<rational> constant() const;
    [[nodiscard]] bool is_monomial() const noexcept
    {
        return terms().size() == 1;
    }

    friend expr operator+(const expr &, const expr &);
    friend expr operator-(const expr &, const expr &);
    friend expr operator*(const expr &, const expr &);
    friend expr operator/(const expr &, const expr &);
    friend expr operator-(const expr &);
    expr &operator+=(const expr &o)
    {
        return *this = *this + o;
    }
    expr &operator-=(const expr &o)
    {
        return *this = *this - o;
    }
    expr &operator*=(const expr &o)
    {
        return *this = *this * o;
    }

    // Structural identity of canonical forms.
    friend bool operator==(const expr &, const expr &);
    friend std::strong_ordering compare(const expr &, const expr &);

    // Opaque payload, defined in the kernel source.
    struct data;

private:
    explicit expr(std::shared_ptr<const data> d) : m_data(std::move(d)) {}
    std::shared_ptr<const data> m_data;
};

// Sum accumulator that defers canonicalisation until the end.
class expr_builder
{
public:
    void add(const expr &e, const rational &scale = 1);
    void add_term(const monomial &m, const rational &c);
    [[nodiscard]] expr build();

private:
    std::map<monomial, rational, monomial_less> m_terms;
};

expr pow(const expr &base, exponent e);
inline expr pow(const expr &base, int n)
{
    return pow(base, exponent(n));
}
// The exponent must canonicalise to a rational constant.
expr pow(const expr &base, const expr &e);
expr sqrt(const expr &e);
expr ln(const expr &e);
expr exp(const expr &e);

// Idempotent re-normalisation of every atom and factor.
expr canon(const expr &e);

// Extends a derivation given on plain atoms to all expressions through the
// Leibniz rule and the chain rule for ln, exp and base atoms.
expr derive(const expr &e, const std::function<expr(atom)> &on_plain_atom);
// Formal partial derivative, all other atoms independent.
expr partial(const expr &e, atom a);

// Simultaneous substitution of plain atoms. Elementary atoms are rebuilt
// from their substituted arguments.
expr substitute(const expr &e, const std::function<std::optional<expr>(atom)> &replacement);
expr substitute(const expr &e, const std::vector<std::pair<atom, expr>> &replacement);

// Coefficients of the powers of a plain atom (not looking inside elementary
// atoms).
std::map<exponent, expr> collect(const expr &e, atom a);
bool depends_on(const expr &e, atom a);
// Plain atoms occurring anywhere, including inside elementary arguments.
std::vector<atom> free_atoms(const expr &e);
// Highest jet order present, -1 if no y at all.
int jet_order(const expr &e);
// Highest derivative order of the given symbol function, -1 if absent.
int symbol_order(const expr &e, char name);
// True if the expression contains a base atom or a ln of a non-monomial.
bool has_opaque_atoms(const expr &e);

long double evaluate(const expr &e, const std::function<long double(atom)> &value);

struct print_options {
    // Source side of a point transformation prints as (z, w).
    bool source_vars = false;
};
std::string to_string(const expr &e, const print_options &opts = {});
std::string to_string(atom a, const print_options &opts = {});

struct parse_options {
    bool source_vars = false;
};
expr parse(std::string_view text, const parse_options &opts = {});

// Parameters recognised by the text grammar.
const std::vector<std::string> &known_parameters();

enum class zero_method : std::uint8_t { canonical, elimination, sampling };

struct zero_test_options {
    int samples = 20;
    double tolerance = 1e-9;
    std::uint64_t seed = 0x5eed'1234'abcdULL;
};

struct zero_test_result {
    bool zero;
    zero_method method;
};

zero_test_result zero_test_detailed(const expr &e, const zero_test_options &opts = {});
bool zero_test(const expr &e, const zero_test_options &opts = {});
// A failing claim is certified when some sample point gives a value above
// the tolerance relative to the size of the individual terms.
bool certify_nonzero(const expr &e, const zero_test_options &opts = {});

std::ostream &operator<<(std::ostream &, const expr &);

} // namespace jetsym
