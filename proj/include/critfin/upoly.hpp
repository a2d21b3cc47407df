#pragma once

// Univariate polynomials over Q, Z and Z/p, with complete factorization over Q
// (Cantor-Zassenhaus modulo a small prime, quadratic Hensel lifting and
// subset recombination) and floating-point root finding.

#include "error.hpp"
#include "rational.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace critfin {

/// Dense univariate polynomial over Q, coefficients low to high, no trailing zeros.
struct UPoly {
    std::vector<Rational> c;

    UPoly() = default;
    explicit UPoly(std::vector<Rational> coeffs) : c(std::move(coeffs)) { trim(); }

    static UPoly constant(const Rational& v) { return UPoly(std::vector<Rational>{v}); }
    static UPoly x() { return UPoly(std::vector<Rational>{0, 1}); }

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }

    bool is_zero() const { return c.empty(); }
    int degree() const { return static_cast<int>(c.size()) - 1; }
    const Rational& lc() const { return c.back(); }
    Rational coeff(int i) const { return i < static_cast<int>(c.size()) ? c[i] : Rational(0); }

    Rational evaluate(const Rational& x) const {
        Rational s = 0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
        return s;
    }

    Complex evaluate(Complex x) const {
        Complex s = 0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + to_double(*it);
        return s;
    }

    UPoly derivative() const {
        std::vector<Rational> d;
        for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * static_cast<long>(i));
        return UPoly(std::move(d));
    }

    UPoly monic() const {
        if (is_zero()) return *this;
        UPoly r = *this;
        Rational l = lc();
        for (auto& v : r.c) v /= l;
        return r;
    }

    friend UPoly operator+(const UPoly& a, const UPoly& b) {
        std::vector<Rational> r(std::max(a.c.size(), b.c.size()));
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i));
        return UPoly(std::move(r));
    }
    friend UPoly operator-(const UPoly& a, const UPoly& b) {
        std::vector<Rational> r(std::max(a.c.size(), b.c.size()));
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(static_cast<int>(i)) - b.coeff(static_cast<int>(i));
        return UPoly(std::move(r));
    }
    friend UPoly operator*(const UPoly& a, const UPoly& b) {
        if (a.is_zero() || b.is_zero()) return UPoly();
        std::vector<Rational> r(a.c.size() + b.c.size() - 1);
        for (std::size_t i = 0; i < a.c.size(); ++i) {
            if (a.c[i] == 0) continue;
            for (std::size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
        }
        return UPoly(std::move(r));
    }
    friend UPoly operator*(const Rational& s, const UPoly& a) {
        UPoly r = a;
        for (auto& v : r.c) v *= s;
        r.trim();
        return r;
    }
    friend bool operator==(const UPoly& a, const UPoly& b) { return a.c == b.c; }
};

/// Quotient and remainder over Q.
inline std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b) {
    if (b.is_zero()) throw Error(ErrorKind::invalid_argument, "polynomial division by zero");
    if (a.degree() < b.degree()) return {UPoly(), a};
    std::vector<Rational> rem = a.c;
    std::vector<Rational> q(a.degree() - b.degree() + 1);
    const Rational& lb = b.lc();
    for (int i = a.degree(); i >= b.degree(); --i) {
        if (rem[i] == 0) continue;
        Rational f = rem[i] / lb;
        q[i - b.degree()] = f;
        for (int j = 0; j <= b.degree(); ++j) rem[i - b.degree() + j] -= f * b.c[j];
    }
    return {UPoly(std::move(q)), UPoly(std::move(rem))};
}

/// Monic gcd over Q by the Euclidean algorithm (reference; `gcd` is the fast path).
inline UPoly gcd_euclid(UPoly a, UPoly b) {
    while (!b.is_zero()) {
        UPoly r = divmod(a, b).second;
        a = std::move(b);
        b = r.monic();
    }
    return a.monic();
}

/// Integer-coefficient polynomial, low to high.
using ZPoly = std::vector<Integer>;

inline void trim(ZPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int degree(const ZPoly& p) { return static_cast<int>(p.size()) - 1; }

/// Scales to primitive integer coefficients with positive leading coefficient.
inline ZPoly primitive_integer(const UPoly& p) {
    if (p.is_zero()) return {};
    Integer den = 1;
    Integer num = 0;
    for (const auto& v : p.c) {
        den = lcm(den, v.get_den());
        num = gcd(num, v.get_num());
    }
    ZPoly out(p.c.size());
    for (std::size_t i = 0; i < p.c.size(); ++i) {
        Rational s = p.c[i] * Rational(den, num);
        out[i] = s.get_num();
    }
    if (out.back() < 0) {
        for (auto& v : out) v = -v;
    }
    return out;
}

inline UPoly to_upoly(const ZPoly& p) {
    std::vector<Rational> c(p.begin(), p.end());
    return UPoly(std::move(c));
}

inline ZPoly primitive_part(ZPoly p) {
    trim(p);
    Integer g = 0;
    for (const auto& v : p) g = gcd(g, v);
    if (g == 0) return p;
    if (!p.empty() && p.back() < 0) g = -g;
    for (auto& v : p) v /= g;
    return p;
}

namespace detail {

// ---------------------------------------------------------------------------
// Arithmetic in (Z/p)[x], p an odd prime below 2^31.

using u64 = std::uint64_t;
using PPoly = std::vector<u64>;

inline void ptrim(PPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline u64 mulmod(u64 a, u64 b, u64 p) { return (a * b) % p; }

inline u64 powmod(u64 a, u64 e, u64 p) {
    u64 r = 1;
    a %= p;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

inline u64 invmod(u64 a, u64 p) { return powmod(a, p - 2, p); }

inline PPoly reduce(const ZPoly& f, u64 p) {
    PPoly r(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        Integer m = f[i] % static_cast<unsigned long>(p);
        if (m < 0) m += static_cast<unsigned long>(p);
        r[i] = m.get_ui();
    }
    ptrim(r);
    return r;
}

inline PPoly psub(const PPoly& a, const PPoly& b, u64 p) {
    PPoly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        u64 x = i < a.size() ? a[i] : 0;
        u64 y = i < b.size() ? b[i] : 0;
        r[i] = (x + p - y) % p;
    }
    ptrim(r);
    return r;
}

inline PPoly padd(const PPoly& a, const PPoly& b, u64 p) {
    PPoly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        u64 x = i < a.size() ? a[i] : 0;
        u64 y = i < b.size() ? b[i] : 0;
        r[i] = (x + y) % p;
    }
    ptrim(r);
    return r;
}

inline PPoly pmul(const PPoly& a, const PPoly& b, u64 p) {
    if (a.empty() || b.empty()) return {};
    PPoly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    }
    ptrim(r);
    return r;
}

inline std::pair<PPoly, PPoly> pdivmod(const PPoly& a, const PPoly& b, u64 p) {
    if (b.empty()) throw Error(ErrorKind::invalid_argument, "division by zero mod p");
    if (a.size() < b.size()) return {{}, a};
    PPoly rem = a;
    PPoly q(a.size() - b.size() + 1, 0);
    u64 inv = invmod(b.back(), p);
    for (std::size_t i = a.size(); i-- >= b.size();) {
        u64 coef = mulmod(rem[i], inv, p);
        if (!coef) continue;
        std::size_t shift = i - (b.size() - 1);
        q[shift] = coef;
        for (std::size_t j = 0; j < b.size(); ++j) rem[shift + j] = (rem[shift + j] + p - mulmod(coef, b[j], p)) % p;
    }
    ptrim(q);
    ptrim(rem);
    return {q, rem};
}

inline PPoly pmonic(PPoly a, u64 p) {
    if (a.empty()) return a;
    u64 inv = invmod(a.back(), p);
    for (auto& v : a) v = mulmod(v, inv, p);
    return a;
}

inline PPoly pgcd(PPoly a, PPoly b, u64 p) {
    while (!b.empty()) {
        PPoly r = pdivmod(a, b, p).second;
        a = std::move(b);
        b = std::move(r);
    }
    return pmonic(a, p);
}

/// s*a + t*b = gcd(a, b) (monic).
inline PPoly pxgcd(const PPoly& a, const PPoly& b, u64 p, PPoly& s, PPoly& t) {
    PPoly r0 = a, r1 = b;
    PPoly s0{1}, s1{}, t0{}, t1{1};
    while (!r1.empty()) {
        auto [q, r] = pdivmod(r0, r1, p);
        PPoly s2 = psub(s0, pmul(q, s1, p), p);
        PPoly t2 = psub(t0, pmul(q, t1, p), p);
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    u64 inv = invmod(r0.back(), p);
    for (auto& v : s0) v = mulmod(v, inv, p);
    for (auto& v : t0) v = mulmod(v, inv, p);
    s = s0;
    t = t0;
    return pmonic(r0, p);
}

inline bool is_word_prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

/// Gcd of nonzero integer polynomials by Chinese remaindering over word-size primes,
/// accepted once an exact trial division confirms it. Primitive, positive leading coefficient.
inline ZPoly zgcd_modular(const ZPoly& a, const ZPoly& b) {
    const Integer g = gcd(a.back(), b.back());
    auto divides = [](const UPoly& h, const UPoly& f) { return divmod(f, h).second.is_zero(); };
    ZPoly H;                 // symmetric residues modulo M
    Integer M = 1;
    int deg = std::min(degree(a), degree(b)) + 1;
    u64 p = (1ULL << 31);
    while (true) {
        do {
            --p;
        } while (!is_word_prime(p));
        if (a.back() % static_cast<unsigned long>(p) == 0 || b.back() % static_cast<unsigned long>(p) == 0) continue;
        PPoly hp = pgcd(reduce(a, p), reduce(b, p), p);
        const int d = static_cast<int>(hp.size()) - 1;
        if (d == 0) return {Integer(1)};
        if (d > deg) continue; // unlucky prime
        Integer gm = g % static_cast<unsigned long>(p);
        if (gm < 0) gm += static_cast<unsigned long>(p);
        for (auto& v : hp) v = mulmod(v, gm.get_ui(), p);
        if (d < deg) {
            deg = d;
            M = 1;
            H.assign(hp.size(), Integer(0));
        }
        Integer Mp = M % static_cast<unsigned long>(p);
        u64 inv = invmod(Mp.get_ui(), p);
        ZPoly next(H.size());
        bool same = M != 1;
        const Integer M2 = M * static_cast<unsigned long>(p);
        for (std::size_t i = 0; i < H.size(); ++i) {
            Integer r = H[i] % static_cast<unsigned long>(p);
            if (r < 0) r += static_cast<unsigned long>(p);
            u64 diff = (hp[i] + p - r.get_ui()) % p;
            Integer v = H[i] + M * static_cast<unsigned long>(mulmod(diff, inv, p));
            if (2 * v > M2) v -= M2;
            if (2 * v <= -M2) v += M2;
            if (v != H[i]) same = false;
            next[i] = v;
        }
        H = std::move(next);
        M = M2;
        if (same) {
            UPoly h = to_upoly(H);
            if (divides(h, to_upoly(a)) && divides(h, to_upoly(b))) return primitive_integer(h);
        }
    }
}

} // namespace detail

/// Monic gcd over Q (zero only when both inputs are zero).
inline UPoly gcd(const UPoly& a, const UPoly& b) {
    if (a.is_zero()) return b.is_zero() ? UPoly() : b.monic();
    if (b.is_zero()) return a.monic();
    if (a.degree() == 0 || b.degree() == 0) return UPoly::constant(1);
    return to_upoly(detail::zgcd_modular(primitive_integer(a), primitive_integer(b))).monic();
}

namespace detail {

inline PPoly pderivative(const PPoly& a, u64 p) {
    PPoly d;
    for (std::size_t i = 1; i < a.size(); ++i) d.push_back(mulmod(a[i], i % p, p));
    ptrim(d);
    return d;
}

inline PPoly ppowmod(PPoly base, const Integer& e, const PPoly& f, u64 p) {
    PPoly r{1};
    base = pdivmod(base, f, p).second;
    std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    for (std::size_t i = bits; i-- > 0;) {
        r = pdivmod(pmul(r, r, p), f, p).second;
        if (mpz_tstbit(e.get_mpz_t(), i)) r = pdivmod(pmul(r, base, p), f, p).second;
    }
    return r;
}

inline std::vector<std::pair<PPoly, int>> distinct_degree(PPoly f, u64 p) {
    std::vector<std::pair<PPoly, int>> out;
    PPoly x{0, 1};
    PPoly h = x;
    int d = 1;
    while (static_cast<int>(f.size()) - 1 >= 2 * d) {
        h = ppowmod(h, Integer(static_cast<unsigned long>(p)), f, p);
        PPoly g = pgcd(psub(h, x, p), f, p);
        if (g.size() > 1) {
            out.push_back({g, d});
            f = pdivmod(f, g, p).first;
            h = pdivmod(h, f, p).second;
        }
        ++d;
    }
    if (f.size() > 1) out.push_back({pmonic(f, p), static_cast<int>(f.size()) - 1});
    return out;
}

inline void equal_degree(const PPoly& g, int d, u64 p, std::mt19937_64& rng, std::vector<PPoly>& out) {
    int n = static_cast<int>(g.size()) - 1;
    if (n == d) {
        out.push_back(g);
        return;
    }
    Integer e;
    mpz_ui_pow_ui(e.get_mpz_t(), p, static_cast<unsigned long>(d));
    e = (e - 1) / 2;
    std::uniform_int_distribution<u64> coef(0, p - 1);
    for (;;) {
        PPoly a(n);
        for (auto& v : a) v = coef(rng);
        ptrim(a);
        if (a.size() <= 1) continue;
        PPoly b = psub(ppowmod(a, e, g, p), PPoly{1}, p);
        PPoly u = pgcd(b, g, p);
        int du = static_cast<int>(u.size()) - 1;
        if (du > 0 && du < n) {
            equal_degree(u, d, p, rng, out);
            equal_degree(pdivmod(g, u, p).first, d, p, rng, out);
            return;
        }
    }
}

/// Monic irreducible factors of a monic square-free polynomial mod p.
inline std::vector<PPoly> factor_mod_p(const PPoly& f, u64 p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<PPoly> out;
    for (auto& [g, d] : distinct_degree(f, p)) equal_degree(g, d, p, rng, out);
    return out;
}

// ---------------------------------------------------------------------------
// Arithmetic in (Z/M)[x] for Hensel lifting; residues kept in [0, M).

inline void zmod(ZPoly& a, const Integer& m) {
    for (auto& v : a) {
        mpz_mod(v.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t());
    }
    critfin::trim(a);
}

inline ZPoly zmul(const ZPoly& a, const ZPoly& b, const Integer& m) {
    if (a.empty() || b.empty()) return {};
    ZPoly r(a.size() + b.size() - 1, Integer(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    zmod(r, m);
    return r;
}

inline ZPoly zadd(const ZPoly& a, const ZPoly& b, const Integer& m) {
    ZPoly r(std::max(a.size(), b.size()), Integer(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    zmod(r, m);
    return r;
}

inline ZPoly zsub(const ZPoly& a, const ZPoly& b, const Integer& m) {
    ZPoly r(std::max(a.size(), b.size()), Integer(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    zmod(r, m);
    return r;
}

/// Division by a monic divisor modulo m.
inline std::pair<ZPoly, ZPoly> zdivmod_monic(const ZPoly& a, const ZPoly& b, const Integer& m) {
    if (a.size() < b.size()) return {{}, a};
    ZPoly rem = a;
    ZPoly q(a.size() - b.size() + 1, Integer(0));
    for (std::size_t i = a.size(); i-- >= b.size();) {
        Integer coef = rem[i] % m;
        if (coef < 0) coef += m;
        if (coef == 0) continue;
        std::size_t shift = i - (b.size() - 1);
        q[shift] = coef;
        for (std::size_t j = 0; j < b.size(); ++j) {
            rem[shift + j] -= coef * b[j];
            mpz_mod(rem[shift + j].get_mpz_t(), rem[shift + j].get_mpz_t(), m.get_mpz_t());
        }
    }
    zmod(q, m);
    zmod(rem, m);
    return {q, rem};
}

inline ZPoly lift_residues(const PPoly& a) {
    ZPoly r;
    r.reserve(a.size());
    for (u64 v : a) r.emplace_back(static_cast<unsigned long>(v));
    return r;
}

/// One quadratic Hensel step: f = g*h (mod m) with s*g + t*h = 1 (mod m) becomes valid mod m^2.
inline void hensel_step(const ZPoly& f, ZPoly& g, ZPoly& h, ZPoly& s, ZPoly& t, const Integer& m) {
    Integer m2 = m * m;
    ZPoly e = zsub(f, zmul(g, h, m2), m2);
    auto [q, r] = zdivmod_monic(zmul(s, e, m2), h, m2);
    ZPoly g2 = zadd(g, zadd(zmul(t, e, m2), zmul(q, g, m2), m2), m2);
    ZPoly h2 = zadd(h, r, m2);
    ZPoly b = zsub(zadd(zmul(s, g2, m2), zmul(t, h2, m2), m2), ZPoly{Integer(1)}, m2);
    auto [c, d] = zdivmod_monic(zmul(s, b, m2), h2, m2);
    s = zsub(s, d, m2);
    t = zsub(zsub(t, zmul(t, b, m2), m2), zmul(c, g2, m2), m2);
    g = std::move(g2);
    h = std::move(h2);
}

/// Lifts f = lc(f) * prod(factors) (mod p) to monic factors modulo p^(2^steps).
inline std::vector<ZPoly> multifactor_lift(const ZPoly& f, const std::vector<PPoly>& factors, u64 p, int steps,
                                           const Integer& modulus) {
    if (factors.size() == 1) {
        Integer inv;
        Integer lcf = f.back() % modulus;
        if (lcf < 0) lcf += modulus;
        mpz_invert(inv.get_mpz_t(), lcf.get_mpz_t(), modulus.get_mpz_t());
        ZPoly r = f;
        for (auto& v : r) v *= inv;
        zmod(r, modulus);
        return {r};
    }
    std::size_t half = factors.size() / 2;
    PPoly g0{static_cast<u64>(mpz_fdiv_ui(f.back().get_mpz_t(), p))};
    for (std::size_t i = 0; i < half; ++i) g0 = pmul(g0, factors[i], p);
    PPoly h0{1};
    for (std::size_t i = half; i < factors.size(); ++i) h0 = pmul(h0, factors[i], p);
    PPoly s0, t0;
    pxgcd(g0, h0, p, s0, t0);
    ZPoly g = lift_residues(g0), h = lift_residues(h0), s = lift_residues(s0), t = lift_residues(t0);
    Integer m(static_cast<unsigned long>(p));
    for (int i = 0; i < steps; ++i) {
        hensel_step(f, g, h, s, t, m);
        m = m * m;
    }
    std::vector<PPoly> left(factors.begin(), factors.begin() + static_cast<long>(half));
    std::vector<PPoly> right(factors.begin() + static_cast<long>(half), factors.end());
    auto a = multifactor_lift(g, left, p, steps, modulus);
    auto b = multifactor_lift(h, right, p, steps, modulus);
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

inline bool exact_divide(const ZPoly& a, const ZPoly& b, ZPoly& q) {
    auto [qq, r] = divmod(to_upoly(a), to_upoly(b));
    if (!r.is_zero()) return false;
    q.clear();
    for (const auto& v : qq.c) {
        if (v.get_den() != 1) return false;
        q.push_back(v.get_num());
    }
    return true;
}

inline const std::vector<unsigned>& small_primes() {
    static const std::vector<unsigned> primes = [] {
        std::vector<unsigned> ps;
        for (unsigned n = 3; ps.size() < 200; n += 2) {
            bool prime = true;
            for (unsigned d = 3; d * d <= n; d += 2) {
                if (n % d == 0) {
                    prime = false;
                    break;
                }
            }
            if (prime) ps.push_back(n);
        }
        return ps;
    }();
    return primes;
}

} // namespace detail

/// Irreducible factors over Z of a primitive, square-free polynomial of degree >= 1.
inline std::vector<ZPoly> factor_squarefree(const ZPoly& f_in) {
    using namespace detail;
    ZPoly f = primitive_part(f_in);
    int n = degree(f);
    if (n < 1) throw Error(ErrorKind::invalid_argument, "factor_squarefree: constant input");
    if (n == 1) return {f};

    std::vector<PPoly> best;
    u64 best_p = 0;
    int tried = 0;
    for (unsigned pr : small_primes()) {
        u64 p = pr;
        if (mpz_fdiv_ui(f.back().get_mpz_t(), pr) == 0) continue;
        PPoly fp = reduce(f, p);
        if (pgcd(fp, pderivative(fp, p), p).size() != 1) continue;
        auto facs = factor_mod_p(pmonic(fp, p), p, 0x5eed0000ULL + p);
        if (facs.size() == 1) return {f};
        if (best.empty() || facs.size() < best.size()) {
            best = facs;
            best_p = p;
        }
        if (++tried >= 5) break;
    }
    if (best.empty()) throw Error(ErrorKind::solver_failure, "no suitable prime for factorization");

    // Coefficient bound for lc(f) * g over factors g: 2^n * ||f||_2 * |lc(f)|.
    Integer norm2 = 0;
    for (const auto& v : f) norm2 += v * v;
    Integer root;
    mpz_sqrt(root.get_mpz_t(), norm2.get_mpz_t());
    root += 1;
    Integer bound = ipow(Integer(2), static_cast<unsigned long>(n)) * root * ::abs(f.back());
    Integer p_big(static_cast<unsigned long>(best_p));
    Integer modulus = p_big;
    int steps = 0;
    while (modulus <= 2 * bound) {
        modulus *= modulus;
        ++steps;
    }
    std::vector<ZPoly> lifted = multifactor_lift(f, best, best_p, steps, modulus);

    std::vector<ZPoly> result;
    ZPoly current = f;
    Integer half = modulus / 2;
    auto symmetric = [&](ZPoly a) {
        for (auto& v : a) {
            mpz_mod(v.get_mpz_t(), v.get_mpz_t(), modulus.get_mpz_t());
            if (v > half) v -= modulus;
        }
        trim(a);
        return a;
    };
    std::size_t s = 1;
    while (2 * s <= lifted.size()) {
        bool found = false;
        std::vector<std::size_t> idx(s);
        std::iota(idx.begin(), idx.end(), 0);
        const std::size_t r = lifted.size();
        for (;;) {
            ZPoly g{current.back()};
            for (std::size_t i : idx) g = zmul(g, lifted[i], modulus);
            g = primitive_part(symmetric(g));
            bool plausible = degree(g) >= 1;
            if (plausible && current.front() != 0 && g.front() != 0) {
                plausible = mpz_divisible_p(current.front().get_mpz_t(), g.front().get_mpz_t()) != 0;
            }
            ZPoly q;
            if (plausible && exact_divide(current, g, q)) {
                result.push_back(g);
                current = primitive_part(q);
                std::vector<ZPoly> rest;
                for (std::size_t i = 0; i < r; ++i) {
                    if (std::find(idx.begin(), idx.end(), i) == idx.end()) rest.push_back(lifted[i]);
                }
                lifted = std::move(rest);
                found = true;
                break;
            }
            // next combination
            std::size_t k = s;
            while (k > 0 && idx[k - 1] == r - s + k - 1) --k;
            if (k == 0) break;
            ++idx[k - 1];
            for (std::size_t j = k; j < s; ++j) idx[j] = idx[j - 1] + 1;
        }
        if (!found) ++s;
    }
    if (degree(current) >= 1) result.push_back(primitive_part(current));
    return result;
}

/// Square-free decomposition over Q (Yun): pairs (monic part, multiplicity).
inline std::vector<std::pair<UPoly, int>> squarefree_decomposition(const UPoly& f) {
    std::vector<std::pair<UPoly, int>> out;
    if (f.degree() < 1) return out;
    UPoly fp = f.derivative();
    UPoly a = gcd(f, fp);
    UPoly b = divmod(f, a).first;
    UPoly c = divmod(fp, a).first;
    UPoly d = c - b.derivative();
    int i = 1;
    while (b.degree() > 0) {
        UPoly ai = gcd(b, d);
        b = divmod(b, ai).first;
        c = divmod(d, ai).first;
        d = c - b.derivative();
        if (ai.degree() > 0) out.push_back({ai.monic(), i});
        ++i;
    }
    return out;
}

struct UFactorization {
    Rational unit;
    std::vector<std::pair<ZPoly, int>> factors; // primitive, positive leading coefficient
};

/// Complete factorization over Q.
inline UFactorization factor(const UPoly& f) {
    if (f.is_zero()) throw Error(ErrorKind::invalid_argument, "factor: zero polynomial");
    UFactorization out;
    UPoly product = UPoly::constant(1);
    for (auto& [part, mult] : squarefree_decomposition(f)) {
        for (auto& g : factor_squarefree(primitive_integer(part))) {
            out.factors.push_back({g, mult});
            UPoly gq = to_upoly(g);
            for (int k = 0; k < mult; ++k) product = product * gq;
        }
    }
    out.unit = f.lc() / product.lc();
    std::sort(out.factors.begin(), out.factors.end(), [](const auto& a, const auto& b) {
        if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
        return a.first < b.first;
    });
    return out;
}

namespace detail {

/// Simultaneous Aberth refinement of all roots of the monic polynomial with coefficients c (low to high).
/// Unlike per-root Newton it separates clustered roots that the eigenvalue start merged.
inline void aberth_refine(const std::vector<std::complex<long double>>& c, std::vector<std::complex<long double>>& z,
                          int max_iter = 200) {
    const int n = static_cast<int>(z.size());
    std::vector<bool> done(z.size(), false);
    for (int it = 0; it < max_iter; ++it) {
        bool moved = false;
        for (int i = 0; i < n; ++i) {
            if (done[i]) continue;
            std::complex<long double> v = 0, dv = 0;
            for (int k = n; k >= 0; --k) {
                dv = dv * z[i] + v;
                v = v * z[i] + c[k];
            }
            if (v == std::complex<long double>(0)) {
                done[i] = true;
                continue;
            }
            std::complex<long double> ratio = v / dv, sum = 0;
            for (int j = 0; j < n; ++j) {
                if (j != i) sum += 1.0L / (z[i] - z[j]);
            }
            std::complex<long double> step = ratio / (1.0L - ratio * sum);
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
                done[i] = true;
                continue;
            }
            z[i] -= step;
            if (std::abs(step) <= 1e-18L * std::max<long double>(1.0L, std::abs(z[i]))) {
                done[i] = true;
            } else {
                moved = true;
            }
        }
        if (!moved) break;
    }
}

inline std::vector<Complex> polished_roots(const std::vector<std::complex<long double>>& c) {
    const int n = static_cast<int>(c.size()) - 1;
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -Complex(static_cast<double>(c[i].real()), static_cast<double>(c[i].imag()));
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::solver_failure, "companion eigenvalue solve failed");
    std::vector<std::complex<long double>> z;
    for (int i = 0; i < n; ++i) z.emplace_back(solver.eigenvalues()[i].real(), solver.eigenvalues()[i].imag());
    // separate exact coincidences so the Aberth correction is defined
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            if (z[i] == z[j]) z[i] += std::complex<long double>(1e-9L * (i + 1), 1e-9L * j);
        }
    }
    aberth_refine(c, z);
    std::vector<Complex> roots;
    for (const auto& r : z) roots.emplace_back(static_cast<double>(r.real()), static_cast<double>(r.imag()));
    return roots;
}

/// Minimal complex arithmetic over mpf_class.
struct MpComplex {
    mpf_class re, im;
    MpComplex(mp_bitcnt_t prec, double r = 0, double i = 0) : re(r, prec), im(i, prec) {}
};

/// Aberth refinement with exact rational coefficients in `prec`-bit floating point.
/// Needed for high-degree polynomials whose clustered roots double precision cannot resolve.
inline void aberth_refine_mp(const UPoly& f, std::vector<Complex>& roots, mp_bitcnt_t prec = 256, int max_iter = 300) {
    const int n = f.degree();
    std::vector<mpf_class> c;
    for (const auto& q : f.c) {
        mpf_class v(q / f.lc(), prec);
        c.push_back(v);
    }
    std::vector<MpComplex> z;
    for (const auto& r : roots) z.emplace_back(prec, r.real(), r.imag());
    mpf_class tol(1, prec);
    mpf_div_2exp(tol.get_mpf_t(), tol.get_mpf_t(), prec / 2 + 20);
    std::vector<bool> done(z.size(), false);
    MpComplex v(prec), dv(prec), sum(prec), t(prec);
    mpf_class a(0, prec), b(0, prec), den(0, prec);
    auto mul = [&](MpComplex& x, const MpComplex& y) { // x *= y
        a = x.re * y.re - x.im * y.im;
        b = x.re * y.im + x.im * y.re;
        x.re = a;
        x.im = b;
    };
    auto div = [&](MpComplex& x, const MpComplex& y) { // x /= y
        den = y.re * y.re + y.im * y.im;
        a = (x.re * y.re + x.im * y.im) / den;
        b = (x.im * y.re - x.re * y.im) / den;
        x.re = a;
        x.im = b;
    };
    for (int it = 0; it < max_iter; ++it) {
        bool moved = false;
        for (int i = 0; i < n; ++i) {
            if (done[i]) continue;
            v.re = 0, v.im = 0, dv.re = 0, dv.im = 0;
            for (int k = n; k >= 0; --k) {
                mul(dv, z[i]);
                dv.re += v.re, dv.im += v.im;
                mul(v, z[i]);
                v.re += c[k];
            }
            if (v.re == 0 && v.im == 0) {
                done[i] = true;
                continue;
            }
            div(v, dv); // ratio
            sum.re = 0, sum.im = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                t.re = z[i].re - z[j].re;
                t.im = z[i].im - z[j].im;
                den = t.re * t.re + t.im * t.im;
                if (den == 0) continue;
                sum.re += t.re / den;
                sum.im -= t.im / den;
            }
            // step = ratio / (1 - ratio * sum)
            t = v;
            mul(t, sum);
            t.re = 1 - t.re;
            t.im = -t.im;
            if (t.re == 0 && t.im == 0) continue;
            div(v, t);
            z[i].re -= v.re;
            z[i].im -= v.im;
            den = abs(v.re) + abs(v.im);
            if (den <= tol * (1 + abs(z[i].re) + abs(z[i].im))) {
                done[i] = true;
            } else {
                moved = true;
            }
        }
        if (!moved) break;
    }
    for (int i = 0; i < n; ++i) roots[static_cast<std::size_t>(i)] = Complex(z[i].re.get_d(), z[i].im.get_d());
}

} // namespace detail

/// All complex roots of a square-free polynomial: companion-matrix eigenvalues then Aberth refinement.
inline std::vector<Complex> complex_roots(const UPoly& f) {
    int n = f.degree();
    if (n < 1) return {};
    if (n == 1) return {Complex(-to_double(f.c[0] / f.c[1]), 0.0)};
    std::vector<std::complex<long double>> c(f.c.size());
    for (std::size_t i = 0; i < f.c.size(); ++i) c[i] = static_cast<long double>(to_double(f.c[i] / f.lc()));
    auto roots = detail::polished_roots(c);
    if (n >= 16) detail::aberth_refine_mp(f, roots);
    return roots;
}

/// Complex-coefficient univariate roots (coefficients low to high), with Newton polish.
inline std::vector<Complex> complex_roots(const std::vector<Complex>& coeffs_in) {
    std::vector<Complex> coeffs = coeffs_in;
    while (!coeffs.empty() && std::abs(coeffs.back()) == 0.0) coeffs.pop_back();
    int n = static_cast<int>(coeffs.size()) - 1;
    if (n < 1) return {};
    std::vector<Complex> c(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) c[i] = coeffs[i] / coeffs.back();
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::solver_failure, "companion eigenvalue solve failed");
    std::vector<Complex> roots;
    for (int i = 0; i < n; ++i) {
        std::complex<long double> z(solver.eigenvalues()[i].real(), solver.eigenvalues()[i].imag());
        for (int it = 0; it < 6; ++it) {
            std::complex<long double> v = 0, dv = 0;
            for (int k = n; k >= 0; --k) {
                dv = dv * z + v;
                v = v * z + std::complex<long double>(c[k].real(), c[k].imag());
            }
            if (std::abs(dv) < 1e-30L) break;
            std::complex<long double> step = v / dv;
            if (std::abs(step) > 1e-3L * std::max<long double>(1.0L, std::abs(z))) break;
            z -= step;
        }
        roots.push_back(Complex(static_cast<double>(z.real()), static_cast<double>(z.imag())));
    }
    return roots;
}

} // namespace critfin
