#pragma once

// Square-free parts and irreducible factorization over Q of binary and ternary forms.
//
// Ternary forms are moved by a unimodular change of coordinates T so that the
// transformed form is monic in w after setting t = 1. The bivariate result is
// factored by reduction at z = 0, univariate factorization, z-adic Hensel
// lifting and subset recombination, then mapped back through T^-1.

#include "error.hpp"
#include "poly.hpp"
#include "resultant.hpp"
#include "upoly.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace critfin {

struct FactorConfig {
    int degree_cap = 24; ///< largest square-free degree handed to the factorizer
};

/// unit * prod(factor^multiplicity) reproduces the input exactly.
struct Factorization {
    Rational unit = 1;
    std::vector<std::pair<HomogPoly, int>> factors;

    HomogPoly expand(int nvars) const {
        Poly acc = Poly::constant(nvars, unit);
        for (const auto& [f, m] : factors) acc *= f.poly().pow(static_cast<unsigned>(m));
        return HomogPoly(std::move(acc));
    }
};

namespace detail {

inline UPoly univariate_of(const Poly& p1) {
    std::vector<Rational> c(std::max(0, p1.total_degree()) + 1, Rational(0));
    for (const auto& [e, v] : p1.terms()) c[e[0]] = v;
    return UPoly(std::move(c));
}

inline Poly linear_poly(int nvars, std::array<Rational, 4> coeffs) {
    // coeffs[0..nvars-1] for variables, coeffs[3] constant
    Poly p = Poly::constant(nvars, coeffs[3]);
    for (int i = 0; i < nvars; ++i) p += Poly::variable(nvars, i) * coeffs[i];
    return p;
}

/// Shear data: T(z,w,t) = (z + a w + c t, w, t + b w), det T = 1.
struct Shear {
    int a = 0, b = 0, c = 0;

    std::vector<HomogPoly> forward() const {
        return {HomogPoly(linear_poly(3, {1, a, c, 0})), HomogPoly(linear_poly(3, {0, 1, 0, 0})),
                HomogPoly(linear_poly(3, {0, b, 1, 0}))};
    }
    std::vector<HomogPoly> inverse() const {
        return {HomogPoly(linear_poly(3, {1, Rational(-(a - c * b)), Rational(-c), 0})),
                HomogPoly(linear_poly(3, {0, 1, 0, 0})), HomogPoly(linear_poly(3, {0, Rational(-b), 1, 0}))};
    }
    /// (z, w) -> Q(z + a w + c, w, 1 + b w), the t = 1 slice of Q o T.
    Poly dehomogenize(const HomogPoly& q) const {
        std::vector<Poly> subs{linear_poly(2, {1, a, 0, c}), linear_poly(2, {0, 1, 0, 0}),
                               linear_poly(2, {0, b, 0, 1})};
        return q.poly().compose(subs);
    }
};

inline std::vector<Shear> candidate_shears() {
    static const int vals[] = {0, 1, -1, 2, -2, 3, -3};
    std::vector<Shear> out;
    for (int c : vals) {
        for (int a : vals) {
            for (int b : vals) out.push_back({a, b, c});
        }
    }
    return out;
}

/// t = 1 homogenization of a bivariate polynomial to the given degree.
inline HomogPoly homogenize(const Poly& p2, int degree) {
    Poly out(3);
    for (const auto& [e, v] : p2.terms()) out.add_term({e[0], e[1], degree - e[0] - e[1]}, v);
    return HomogPoly(std::move(out));
}

/// Polynomial in w with coefficients in Q[z], indexed by w-power.
using WPoly = std::vector<UPoly>;

inline WPoly to_wpoly(const Poly& p2) {
    WPoly out(std::max(0, p2.degree_in(1)) + 1);
    for (const auto& [e, v] : p2.terms()) {
        UPoly& slot = out[e[1]];
        if (static_cast<int>(slot.c.size()) <= e[0]) slot.c.resize(e[0] + 1, Rational(0));
        slot.c[e[0]] += v;
    }
    for (auto& s : out) s.trim();
    while (!out.empty() && out.back().is_zero()) out.pop_back();
    return out;
}

inline Poly from_wpoly(const WPoly& a) {
    Poly out(2);
    for (std::size_t j = 0; j < a.size(); ++j) {
        for (std::size_t i = 0; i < a[j].c.size(); ++i) out.add_term({static_cast<int>(i), static_cast<int>(j), 0}, a[j].c[i]);
    }
    return out;
}

inline WPoly wpoly_primitive(WPoly a) {
    UPoly g;
    for (const auto& c : a) g = gcd(g, c);
    if (g.degree() > 0) {
        for (auto& c : a) c = divmod(c, g).first;
    }
    return a;
}

/// gcd in Q[z][w] by the primitive pseudo-remainder sequence (contents ignored).
inline WPoly wpoly_gcd(WPoly a, WPoly b) {
    if (a.size() < b.size()) std::swap(a, b);
    a = wpoly_primitive(a);
    b = wpoly_primitive(b);
    while (!b.empty()) {
        WPoly r = a;
        const UPoly lb = b.back();
        while (!r.empty() && r.size() >= b.size()) {
            const UPoly lr = r.back();
            std::size_t shift = r.size() - b.size();
            for (auto& c : r) c = lb * c;
            for (std::size_t j = 0; j < b.size(); ++j) r[j + shift] = r[j + shift] - lr * b[j];
            while (!r.empty() && r.back().is_zero()) r.pop_back();
        }
        a = std::move(b);
        b = r.empty() ? WPoly{} : wpoly_primitive(r);
    }
    return a;
}

/// Extended gcd over Q: s*a + t*b = 1 for coprime a, b.
inline UPoly inverse_mod(const UPoly& a, const UPoly& m) {
    UPoly r0 = m, r1 = divmod(a, m).second;
    UPoly t0, t1 = UPoly::constant(1);
    while (!r1.is_zero()) {
        auto [q, r] = divmod(r0, r1);
        UPoly t2 = t0 - q * t1;
        r0 = std::move(r1);
        r1 = std::move(r);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (r0.degree() != 0) throw Error(ErrorKind::solver_failure, "Hensel lifting: factors not coprime");
    return (Rational(1) / r0.lc()) * t0;
}

using Series = std::vector<UPoly>; // coefficients of z^0 .. z^(K-1), each a polynomial in w

inline Series series_mul(const Series& a, const Series& b, std::size_t K) {
    Series out(K);
    for (std::size_t i = 0; i < a.size() && i < K; ++i) {
        if (a[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.size() && i + j < K; ++j) {
            if (!b[j].is_zero()) out[i + j] = out[i + j] + a[i] * b[j];
        }
    }
    return out;
}

/// Irreducible factors of a square-free bivariate p(z, w) whose w-leading coefficient is a
/// nonzero constant, total degree = deg_w, and p(0, w) square-free of full degree.
inline std::vector<Poly> factor_bivariate(const Poly& p, const std::vector<ZPoly>& base_factors) {
    const int n = p.degree_in(1);
    const std::size_t K = static_cast<std::size_t>(n) + 1;
    std::vector<UPoly> u;
    for (const auto& g : base_factors) u.push_back(to_upoly(g).monic());
    const std::size_t r = u.size();
    if (r == 1) return {p};

    WPoly pw = to_wpoly(p);
    Rational lcp = pw.back().coeff(0);
    Series target(K);
    for (std::size_t j = 0; j < pw.size(); ++j) {
        for (std::size_t i = 0; i < pw[j].c.size() && i < K; ++i) {
            std::vector<Rational> coeffs(j + 1, Rational(0));
            coeffs[j] = pw[j].c[i] / lcp;
            target[i] = target[i] + UPoly(std::move(coeffs));
        }
    }

    // s_i with s_i * prod_{l != i} u_l = 1 mod u_i
    std::vector<UPoly> cofactor(r), s(r);
    for (std::size_t i = 0; i < r; ++i) {
        cofactor[i] = UPoly::constant(1);
        for (std::size_t l = 0; l < r; ++l) {
            if (l != i) cofactor[i] = cofactor[i] * u[l];
        }
        s[i] = inverse_mod(cofactor[i], u[i]);
    }

    std::vector<Series> lifted(r, Series(K));
    for (std::size_t i = 0; i < r; ++i) lifted[i][0] = u[i];
    for (std::size_t j = 1; j < K; ++j) {
        Series prod{UPoly::constant(1)};
        for (std::size_t i = 0; i < r; ++i) prod = series_mul(prod, lifted[i], j + 1);
        UPoly rhs = target[j] - prod[j];
        if (rhs.is_zero()) continue;
        for (std::size_t i = 0; i < r; ++i) lifted[i][j] = divmod(rhs * s[i], u[i]).second;
    }

    auto to_poly = [](const Series& ser) {
        Poly out(2);
        for (std::size_t i = 0; i < ser.size(); ++i) {
            for (std::size_t k = 0; k < ser[i].c.size(); ++k) {
                out.add_term({static_cast<int>(i), static_cast<int>(k), 0}, ser[i].c[k]);
            }
        }
        return out;
    };

    std::vector<Poly> found;
    Poly current = p;
    std::vector<Series> pool = lifted;
    std::size_t sub = 1;
    while (2 * sub <= pool.size()) {
        bool hit = false;
        std::vector<std::size_t> idx(sub);
        std::iota(idx.begin(), idx.end(), 0);
        const std::size_t m = pool.size();
        for (;;) {
            Series g{UPoly::constant(1)};
            for (std::size_t i : idx) g = series_mul(g, pool[i], K);
            Poly cand = to_poly(g);
            Poly quotient;
            if (cand.total_degree() <= cand.degree_in(1) && current.divides_into(cand, quotient)) {
                found.push_back(cand);
                current = quotient;
                std::vector<Series> rest;
                for (std::size_t i = 0; i < m; ++i) {
                    if (std::find(idx.begin(), idx.end(), i) == idx.end()) rest.push_back(pool[i]);
                }
                pool = std::move(rest);
                hit = true;
                break;
            }
            std::size_t k = sub;
            while (k > 0 && idx[k - 1] == m - sub + k - 1) --k;
            if (k == 0) break;
            ++idx[k - 1];
            for (std::size_t q = k; q < sub; ++q) idx[q] = idx[q - 1] + 1;
        }
        if (!hit) ++sub;
    }
    if (current.total_degree() > 0) found.push_back(current);
    return found;
}

inline bool univariate_squarefree(const UPoly& u) { return gcd(u, u.derivative()).degree() == 0; }

/// Splits off the largest monomial factor: p = z^e0 w^e1 t^e2 * rest.
inline std::pair<Exponent, HomogPoly> split_monomial(const HomogPoly& p) {
    Exponent lo{1 << 20, 1 << 20, 1 << 20};
    for (const auto& [e, c] : p.terms()) {
        for (int i = 0; i < 3; ++i) lo[i] = std::min(lo[i], e[i]);
    }
    for (int i = p.num_vars(); i < 3; ++i) lo[i] = 0;
    Poly rest(p.num_vars());
    for (const auto& [e, c] : p.terms()) rest.add_term({e[0] - lo[0], e[1] - lo[1], e[2] - lo[2]}, c);
    return {lo, HomogPoly(std::move(rest))};
}

/// Distinct irreducible factors (normalized) of a binary form.
inline std::vector<HomogPoly> binary_irreducibles(const HomogPoly& p) {
    auto [mono, rest] = split_monomial(p);
    std::vector<HomogPoly> out;
    if (mono[0] > 0) out.push_back(HomogPoly::variable(2, 0));
    if (mono[1] > 0) out.push_back(HomogPoly::variable(2, 1));
    if (rest.degree() > 0) {
        UPoly u = binary_to_upoly(rest);
        for (auto& [g, m] : factor(u).factors) out.push_back(upoly_to_binary(to_upoly(g), degree(g)).normalized());
    }
    return out;
}

/// Distinct irreducible factors (normalized) of a square-free ternary form without monomial factors.
inline std::vector<HomogPoly> ternary_irreducibles_squarefree(const HomogPoly& q) {
    const int n = q.degree();
    if (n == 0) return {};
    if (n == 1) return {q.normalized()};
    for (const Shear& sh : candidate_shears()) {
        std::array<Rational, 3> probe{Rational(sh.a), Rational(1), Rational(sh.b)};
        if (q.evaluate(std::span<const Rational>(probe)) == 0) continue;
        Poly p = sh.dehomogenize(q);
        Poly slice = p.compose(std::vector<Poly>{Poly::constant(1, 0), Poly::variable(1, 0)});
        UPoly u = univariate_of(slice);
        if (u.degree() != n || !univariate_squarefree(u)) continue;
        auto base = factor(u);
        std::vector<ZPoly> base_factors;
        for (auto& [g, m] : base.factors) base_factors.push_back(g);
        std::vector<HomogPoly> out;
        auto inv = sh.inverse();
        for (const Poly& g : factor_bivariate(p, base_factors)) {
            out.push_back(homogenize(g, g.total_degree()).compose(inv).normalized());
        }
        return out;
    }
    throw Error(ErrorKind::degenerate, "factor: no admissible coordinate shear found");
}

/// Square-free part of a ternary form without monomial factors.
inline HomogPoly ternary_squarefree_part(const HomogPoly& q) {
    if (q.degree() <= 1) return q.normalized();
    for (const Shear& sh : candidate_shears()) {
        std::array<Rational, 3> probe{Rational(sh.a), Rational(1), Rational(sh.b)};
        if (q.evaluate(std::span<const Rational>(probe)) == 0) continue;
        Poly p = sh.dehomogenize(q);
        WPoly g = wpoly_gcd(to_wpoly(p), to_wpoly(p.derivative(1)));
        Poly gp = from_wpoly(g);
        Poly quotient;
        if (!p.divides_into(gp, quotient)) throw Error(ErrorKind::solver_failure, "square_free: gcd does not divide");
        return homogenize(quotient, quotient.total_degree()).compose(sh.inverse()).normalized();
    }
    throw Error(ErrorKind::degenerate, "square_free: no admissible coordinate shear found");
}

inline void require_nonzero(const HomogPoly& p, const char* what) {
    if (p.is_zero()) throw Error(ErrorKind::invalid_argument, std::string(what) + ": zero polynomial");
}

} // namespace detail

/// Product of the distinct irreducible factors, primitive and sign-normalized.
inline HomogPoly square_free(const HomogPoly& p) {
    detail::require_nonzero(p, "square_free");
    auto [mono, rest] = detail::split_monomial(p);
    Poly acc = Poly::constant(p.num_vars(), 1);
    for (int i = 0; i < p.num_vars(); ++i) {
        if (mono[i] > 0) acc *= Poly::variable(p.num_vars(), i);
    }
    if (p.num_vars() == 2) {
        if (rest.degree() > 0) {
            auto parts = squarefree_decomposition(binary_to_upoly(rest));
            UPoly prod = UPoly::constant(1);
            for (auto& [part, m] : parts) prod = prod * part;
            acc *= upoly_to_binary(prod, prod.degree()).poly();
        }
    } else if (rest.degree() > 0) {
        acc *= detail::ternary_squarefree_part(rest).poly();
    }
    return HomogPoly(std::move(acc)).normalized();
}

/// Complete irreducible factorization over Q. Factors are primitive, sign-normalized,
/// pairwise non-associate and sorted by normal form.
inline Factorization factor(const HomogPoly& p, const FactorConfig& cfg = {}) {
    detail::require_nonzero(p, "factor");
    Factorization out;
    if (p.degree() == 0) {
        out.unit = p.terms().begin()->second;
        return out;
    }
    HomogPoly sqf = square_free(p);
    if (sqf.degree() > cfg.degree_cap) {
        throw Error(ErrorKind::budget_exceeded, "factor: square-free degree " + std::to_string(sqf.degree()) +
                                                    " exceeds cap " + std::to_string(cfg.degree_cap));
    }
    std::vector<HomogPoly> irreducibles;
    if (p.num_vars() == 2) {
        irreducibles = detail::binary_irreducibles(sqf);
    } else {
        auto [mono, rest] = detail::split_monomial(sqf);
        for (int i = 0; i < 3; ++i) {
            if (mono[i] > 0) irreducibles.push_back(HomogPoly::variable(3, i));
        }
        for (auto& f : detail::ternary_irreducibles_squarefree(rest)) irreducibles.push_back(f);
    }
    std::sort(irreducibles.begin(), irreducibles.end());
    HomogPoly remaining = p;
    for (const auto& f : irreducibles) {
        int mult = 0;
        HomogPoly q;
        while (remaining.divides_into(f, q)) {
            remaining = q;
            ++mult;
        }
        if (mult == 0) throw Error(ErrorKind::solver_failure, "factor: computed factor does not divide input");
        out.factors.push_back({f, mult});
    }
    if (remaining.degree() != 0) throw Error(ErrorKind::solver_failure, "factor: incomplete factorization");
    out.unit = remaining.terms().begin()->second;
    return out;
}

inline bool is_irreducible(const HomogPoly& p, const FactorConfig& cfg = {}) {
    if (p.is_zero() || p.degree() == 0) return false;
    auto f = factor(p, cfg);
    return f.factors.size() == 1 && f.factors[0].second == 1;
}

} // namespace critfin
