#pragma once

// Resultants of binary forms (Sylvester) and of three ternary forms
// (Macaulay: det of the full matrix over det of the extraneous minor).
// Normalization: Res(z^a, w^b) = 1 and Res(z^a, w^b, t^c) = 1.

#include "error.hpp"
#include "linalg.hpp"
#include "poly.hpp"
#include "upoly.hpp"

#include <array>
#include <span>
#include <vector>

namespace critfin {

/// Sylvester resultant of two polynomials read with formal degrees `da`, `db`
/// (coefficients beyond the actual degree are zero).
template <class T>
inline std::vector<std::vector<T>> sylvester_matrix(const std::vector<T>& a, int da, const std::vector<T>& b, int db) {
    const int n = da + db;
    std::vector<std::vector<T>> m(n, std::vector<T>(n, T(0)));
    auto coef = [](const std::vector<T>& p, int i) { return i < static_cast<int>(p.size()) ? p[i] : T(0); };
    for (int r = 0; r < db; ++r) {
        for (int j = 0; j <= da; ++j) m[r][r + j] = coef(a, da - j);
    }
    for (int r = 0; r < da; ++r) {
        for (int j = 0; j <= db; ++j) m[db + r][r + j] = coef(b, db - j);
    }
    return m;
}

inline Rational sylvester_resultant(const UPoly& a, int da, const UPoly& b, int db) {
    if (da == 0 && db == 0) return 1;
    return determinant(sylvester_matrix(a.c, da, b.c, db));
}

inline Complex sylvester_resultant(const std::vector<Complex>& a, int da, const std::vector<Complex>& b, int db) {
    if (da == 0 && db == 0) return 1.0;
    auto rows = sylvester_matrix(a, da, b, db);
    Eigen::MatrixXcd m(da + db, da + db);
    for (int i = 0; i < da + db; ++i) {
        for (int j = 0; j < da + db; ++j) m(i, j) = rows[i][j];
    }
    return determinant(m);
}

/// Binary form F(z, w) as a polynomial in z (w = 1); the formal degree is deg F.
inline UPoly binary_to_upoly(const HomogPoly& f) {
    std::vector<Rational> c(f.degree() + 1, Rational(0));
    for (const auto& [e, v] : f.terms()) c[e[0]] = v;
    return UPoly(std::move(c));
}

/// Inverse of binary_to_upoly at the given degree.
inline HomogPoly upoly_to_binary(const UPoly& p, int degree) {
    Poly out(2);
    for (int i = 0; i <= p.degree(); ++i) out.add_term({i, degree - i, 0}, p.c[i]);
    return HomogPoly(std::move(out));
}

namespace detail {

inline std::vector<Exponent> monomials_of_degree(int nvars, int d) {
    std::vector<Exponent> out;
    if (nvars == 2) {
        for (int i = d; i >= 0; --i) out.push_back({i, d - i, 0});
    } else {
        for (int i = d; i >= 0; --i) {
            for (int j = d - i; j >= 0; --j) out.push_back({i, j, d - i - j});
        }
    }
    return out;
}

/// Unimodular upper-triangular change of variables z -> z + a w + c t, w -> w + b t.
inline std::vector<HomogPoly> shear(std::span<const HomogPoly> forms, int a, int b, int c) {
    std::vector<HomogPoly> subs{
        HomogPoly(Poly::variable(3, 0) + Poly::variable(3, 1) * Rational(a) + Poly::variable(3, 2) * Rational(c)),
        HomogPoly(Poly::variable(3, 1) + Poly::variable(3, 2) * Rational(b)), HomogPoly(Poly::variable(3, 2))};
    std::vector<HomogPoly> out;
    for (const auto& f : forms) out.push_back(f.compose(subs));
    return out;
}

struct MacaulayMatrices {
    RatMatrix full;
    RatMatrix extraneous;
};

inline MacaulayMatrices macaulay_matrices(std::span<const HomogPoly> f) {
    const std::array<int, 3> d{f[0].degree(), f[1].degree(), f[2].degree()};
    const int D = d[0] + d[1] + d[2] - 2;
    auto monos = monomials_of_degree(3, D);
    std::map<Exponent, std::size_t, DegRevLexGreater> column;
    for (std::size_t i = 0; i < monos.size(); ++i) column[monos[i]] = i;

    MacaulayMatrices out;
    out.full.assign(monos.size(), std::vector<Rational>(monos.size(), Rational(0)));
    std::vector<std::size_t> non_reduced;
    for (std::size_t r = 0; r < monos.size(); ++r) {
        const Exponent& m = monos[r];
        int owner = -1, hits = 0;
        for (int i = 0; i < 3; ++i) {
            if (m[i] >= d[i]) {
                ++hits;
                if (owner < 0) owner = i;
            }
        }
        if (hits > 1) non_reduced.push_back(r);
        Exponent shift = m;
        shift[owner] -= d[owner];
        for (const auto& [e, c] : f[owner].terms()) {
            Exponent target{e[0] + shift[0], e[1] + shift[1], e[2] + shift[2]};
            out.full[r][column.at(target)] = c;
        }
    }
    out.extraneous.assign(non_reduced.size(), std::vector<Rational>(non_reduced.size(), Rational(0)));
    for (std::size_t i = 0; i < non_reduced.size(); ++i) {
        for (std::size_t j = 0; j < non_reduced.size(); ++j) {
            out.extraneous[i][j] = out.full[non_reduced[i]][non_reduced[j]];
        }
    }
    return out;
}

inline void check_forms(std::span<const HomogPoly> forms) {
    if (forms.empty()) throw Error(ErrorKind::invalid_argument, "resultant: no forms");
    const int nv = forms[0].num_vars();
    if (static_cast<int>(forms.size()) != nv) {
        throw Error(ErrorKind::invalid_argument, "resultant: need exactly one form per variable");
    }
    for (const auto& f : forms) {
        if (f.num_vars() != nv) throw Error(ErrorKind::invalid_argument, "resultant: mixed variable counts");
        if (f.is_zero()) throw Error(ErrorKind::invalid_argument, "resultant: zero form");
    }
}

/// Deterministic sequence of small shears; index 0 is the identity.
inline std::array<int, 3> shear_parameters(int attempt) {
    if (attempt == 0) return {0, 0, 0};
    static const int vals[] = {1, -1, 2, -2, 3, -3, 5};
    return {vals[attempt % 7], vals[(attempt * 3 + 1) % 7], vals[(attempt * 5 + 2) % 7]};
}

} // namespace detail

/// Number of rows of the Macaulay matrix for three ternary forms of the given degrees.
inline std::size_t macaulay_size(int d0, int d1, int d2) {
    std::size_t D = static_cast<std::size_t>(d0 + d1 + d2 - 2);
    return (D + 1) * (D + 2) / 2;
}

/// Multivariate resultant: two binary forms or three ternary forms. Zero iff a common projective zero exists.
inline Rational resultant(std::span<const HomogPoly> forms) {
    detail::check_forms(forms);
    if (forms.size() == 2) {
        return sylvester_resultant(binary_to_upoly(forms[0]), forms[0].degree(), binary_to_upoly(forms[1]),
                                   forms[1].degree());
    }
    for (int attempt = 0; attempt < 12; ++attempt) {
        auto [a, b, c] = detail::shear_parameters(attempt);
        std::vector<HomogPoly> g = attempt == 0 ? std::vector<HomogPoly>(forms.begin(), forms.end())
                                                : detail::shear(forms, a, b, c);
        auto mats = detail::macaulay_matrices(g);
        Rational ext = determinant(mats.extraneous);
        if (ext == 0) continue; // extraneous minor singular for this coordinate system
        return determinant(mats.full) / ext;
    }
    // Fallback: Res(f_i + s x_i^{d_i}) is a polynomial in s of degree at most d0 d1 + d0 d2 + d1 d2;
    // interpolate it at values of s where the extraneous minor survives and evaluate at s = 0.
    const int d0 = forms[0].degree(), d1 = forms[1].degree(), d2 = forms[2].degree();
    const int n = d0 * d1 + d0 * d2 + d1 * d2;
    std::vector<Rational> xs, ys;
    for (int s = 1; static_cast<int>(xs.size()) <= n && s < 64 * (n + 1); ++s) {
        std::vector<HomogPoly> g(forms.begin(), forms.end());
        for (int i = 0; i < 3; ++i) g[i] = g[i] + Rational(s) * HomogPoly::variable(3, i).pow(static_cast<unsigned>(g[i].degree()));
        auto mats = detail::macaulay_matrices(g);
        Rational ext = determinant(mats.extraneous);
        if (ext == 0) continue;
        xs.emplace_back(s);
        ys.push_back(determinant(mats.full) / ext);
    }
    if (static_cast<int>(xs.size()) <= n) {
        throw Error(ErrorKind::degenerate, "Macaulay extraneous minor vanished in every tried coordinate system");
    }
    // Lagrange evaluation at 0
    Rational value(0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        Rational term = ys[i];
        for (std::size_t j = 0; j < xs.size(); ++j) {
            if (j != i) term *= xs[j] / (xs[j] - xs[i]);
        }
        value += term;
    }
    return value;
}

inline Rational resultant(std::initializer_list<HomogPoly> forms) {
    std::vector<HomogPoly> v(forms);
    return resultant(std::span<const HomogPoly>(v));
}

/// Certifies Res(forms) != 0 by finding a prime for which the Macaulay determinant is nonzero.
/// Returns false when no certificate was found (which does not prove vanishing).
inline bool resultant_nonzero_modular(std::span<const HomogPoly> forms, int attempts = 6) {
    detail::check_forms(forms);
    if (forms.size() == 2) return resultant(forms) != 0; // a Sylvester determinant is cheap
    static const std::uint64_t primes[] = {2147483629ULL, 2147483587ULL, 2147483579ULL};
    for (int attempt = 0; attempt < attempts; ++attempt) {
        auto [a, b, c] = detail::shear_parameters(attempt);
        std::vector<HomogPoly> g = attempt == 0 ? std::vector<HomogPoly>(forms.begin(), forms.end())
                                                : detail::shear(forms, a, b, c);
        auto mats = detail::macaulay_matrices(g);
        IntMatrix im(mats.full.size());
        for (std::size_t i = 0; i < mats.full.size(); ++i) {
            Integer l = denominator_lcm(mats.full[i]);
            for (const auto& v : mats.full[i]) {
                Rational s = v * l;
                im[i].push_back(s.get_num());
            }
        }
        for (std::uint64_t p : primes) {
            if (det_mod_p(im, p) != 0) return true;
        }
    }
    return false;
}

} // namespace critfin
