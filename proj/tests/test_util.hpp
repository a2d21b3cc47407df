#pragma once

#include "critfin/io.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>

namespace testutil {

using namespace critfin;

inline std::string fixture_path(const std::string& name) {
    return std::string(CRITFIN_SOURCE_DIR) + "/fixtures/" + name + ".json";
}

inline Endomorphism fixture(const std::string& name) { return endomorphism_from_map(read_map_file(fixture_path(name))); }

inline HomogPoly P(const std::string& s, int nvars = 3) { return poly_parse(s, nvars); }

inline Endomorphism map_of(std::initializer_list<const char*> forms) {
    std::vector<HomogPoly> v;
    for (const char* s : forms) v.push_back(P(s, static_cast<int>(forms.size())));
    return Endomorphism::create(std::move(v));
}

/// Random form of degree d in nvars variables with small integer coefficients.
inline HomogPoly random_form(std::mt19937_64& rng, int nvars, int d, int range = 5) {
    std::uniform_int_distribution<int> coef(-range, range);
    Poly p(nvars);
    for (const auto& e : detail::monomials_of_degree(nvars, d)) p.add_term(e, Rational(coef(rng)));
    if (p.is_zero()) p.add_term(detail::monomials_of_degree(nvars, d)[0], Rational(1));
    return HomogPoly(std::move(p));
}

/// Linear substitution x -> A x with a random unimodular-ish integer matrix (det checked nonzero).
inline std::vector<HomogPoly> random_substitution(std::mt19937_64& rng, int nvars) {
    std::uniform_int_distribution<int> coef(-3, 3);
    while (true) {
        RatMatrix a(static_cast<std::size_t>(nvars), std::vector<Rational>(static_cast<std::size_t>(nvars)));
        for (auto& row : a) {
            for (auto& v : row) v = coef(rng);
        }
        if (determinant(a) == 0) continue;
        std::vector<HomogPoly> subs;
        for (int i = 0; i < nvars; ++i) {
            Poly p(nvars);
            for (int j = 0; j < nvars; ++j) {
                Exponent e{0, 0, 0};
                e[static_cast<std::size_t>(j)] = 1;
                p.add_term(e, a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
            }
            subs.push_back(HomogPoly(std::move(p)));
        }
        return subs;
    }
}

inline Rational Q(long n, long d = 1) {
    Rational r(n, d);
    r.canonicalize();
    return r;
}

} // namespace testutil
