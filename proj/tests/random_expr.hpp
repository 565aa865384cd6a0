#pragma once

// Hand-rolled generators for property tests.

#include <jetsym/expr.hpp>

#include <random>
#include <vector>

namespace testgen
{

using jetsym::atom;
using jetsym::expr;

// Random polynomial with small integer coefficients over the given atoms.
inline expr random_poly(std::mt19937_64 &rng, const std::vector<atom> &atoms, int max_terms, int max_degree)
{
    expr out;
    const int nterms = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_terms));
    for (int t = 0; t < nterms; ++t) {
        expr m(static_cast<long>(rng() % 9) - 4);
        const int deg = static_cast<int>(rng() % static_cast<unsigned>(max_degree + 1));
        for (int d = 0; d < deg; ++d) {
            m = m * expr(atoms[rng() % atoms.size()]);
        }
        out = out + m;
    }
    return out;
}

// x, y, y1..y_order, q, q1, k1
inline std::vector<atom> jet_atoms(int order)
{
    std::vector<atom> out = {atom::indep(), atom::symbol('q', 0), atom::symbol('q', 1), atom::param("k1")};
    for (int k = 0; k <= order; ++k) {
        out.push_back(atom::jet(k));
    }
    return out;
}

// z = c x^p, w = x^a y^b + r x + s with small integers, b >= 1.
struct fiber_map {
    expr zeta;
    expr phi;
};

inline fiber_map random_fiber_map(std::mt19937_64 &rng)
{
    auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1)); };
    const expr x = atom::indep();
    const expr y = atom::jet(0);
    expr zeta = pick(1, 4) * pow(x, pick(1, 3));
    expr phi = pow(x, pick(-2, 2)) * pow(y, pick(1, 3)) + pick(-3, 3) * x + pick(-2, 2);
    return {zeta, phi};
}

} // namespace testgen
