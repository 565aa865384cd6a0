#pragma once

#include <stdexcept>
#include <string>

namespace jetsym
{

// Every failure raised by the library derives from this type so the CLI can
// map it onto an exit code in one place.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

#define JETSYM_DECLARE_ERROR(name)                                                                                     \
    class name : public error                                                                                          \
    {                                                                                                                  \
    public:                                                                                                            \
        using error::error;                                                                                            \
    }

// exprcore
JETSYM_DECLARE_ERROR(unsupported_form);
JETSYM_DECLARE_ERROR(inconclusive);

// jetcalc
JETSYM_DECLARE_ERROR(not_exact);
JETSYM_DECLARE_ERROR(invalid_argument);

// maxsym
JETSYM_DECLARE_ERROR(bad_order);
JETSYM_DECLARE_ERROR(odd_order);
JETSYM_DECLARE_ERROR(elimination_failed);

// transform
JETSYM_DECLARE_ERROR(singular_map);

// noether
JETSYM_DECLARE_ERROR(not_a_divergence_symmetry);
JETSYM_DECLARE_ERROR(not_first_integral);

// casebook
JETSYM_DECLARE_ERROR(singularity_encountered);

#undef JETSYM_DECLARE_ERROR

class parse_error : public error
{
public:
    parse_error(const std::string &msg, int line, int column)
        : error(msg + " at line " + std::to_string(line) + ", column " + std::to_string(column)), m_line(line),
          m_column(column)
    {
    }

    [[nodiscard]] int line() const noexcept
    {
        return m_line;
    }
    [[nodiscard]] int column() const noexcept
    {
        return m_column;
    }

private:
    int m_line;
    int m_column;
};

} // namespace jetsym
