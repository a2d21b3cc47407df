#pragma once

#include "error.hpp"
#include "rational.hpp"

#include <algorithm>
#include <array>
#include <complex>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace critfin {

/// Exponent vector over (z, w, t). Unused trailing slots stay zero.
using Exponent = std::array<int, 3>;

inline int exponent_degree(const Exponent& e) { return e[0] + e[1] + e[2]; }

/// Degree-reverse-lexicographic "greater than" with z > w > t.
struct DegRevLexGreater {
    bool operator()(const Exponent& a, const Exponent& b) const {
        int da = exponent_degree(a);
        int db = exponent_degree(b);
        if (da != db) return da > db;
        for (int i = 2; i >= 0; --i) {
            if (a[i] != b[i]) return a[i] < b[i];
        }
        return false;
    }
};

inline const char* variable_name(int nvars, int i) {
    static const char* names[] = {"z", "w", "t"};
    (void)nvars;
    return names[i];
}

/// Sparse polynomial in two or three variables with rational coefficients.
/// Not necessarily homogeneous; `HomogPoly` layers that invariant on top.
class Poly {
public:
    using Terms = std::map<Exponent, Rational, DegRevLexGreater>;

    explicit Poly(int nvars = 3) : nvars_(nvars) {
        if (nvars < 1 || nvars > 3) throw Error(ErrorKind::invalid_argument, "Poly supports 1 to 3 variables");
    }

    static Poly constant(int nvars, const Rational& c) {
        Poly p(nvars);
        p.add_term({0, 0, 0}, c);
        return p;
    }

    static Poly variable(int nvars, int i) {
        Exponent e{0, 0, 0};
        e[i] = 1;
        return monomial(nvars, e, 1);
    }

    static Poly monomial(int nvars, const Exponent& e, const Rational& c) {
        Poly p(nvars);
        p.add_term(e, c);
        return p;
    }

    /// Linear form a0*z + a1*w (+ a2*t).
    static Poly linear(std::span<const Rational> coeffs) {
        Poly p(static_cast<int>(coeffs.size()));
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            Exponent e{0, 0, 0};
            e[i] = 1;
            p.add_term(e, coeffs[i]);
        }
        return p;
    }

    int num_vars() const { return nvars_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    /// -1 for the zero polynomial.
    int total_degree() const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, exponent_degree(e));
        return d;
    }

    int degree_in(int var) const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
        return d;
    }

    bool is_homogeneous() const {
        if (terms_.empty()) return true;
        int d = exponent_degree(terms_.begin()->first);
        for (const auto& [e, c] : terms_) {
            if (exponent_degree(e) != d) return false;
        }
        return true;
    }

    const Exponent& leading_exponent() const { return terms_.begin()->first; }
    const Rational& leading_coefficient() const { return terms_.begin()->second; }

    Rational coefficient(const Exponent& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add_term(const Exponent& e, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Poly& operator+=(const Poly& o) {
        check_compatible(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }

    Poly& operator-=(const Poly& o) {
        check_compatible(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }

    Poly& operator*=(const Rational& s) {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, const Rational& s) { return a *= s; }
    friend Poly operator*(const Rational& s, Poly a) { return a *= s; }
    Poly operator-() const { return *this * Rational(-1); }

    friend Poly operator*(const Poly& a, const Poly& b) {
        a.check_compatible(b);
        Poly r(a.nvars_);
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                r.add_term({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
            }
        }
        return r;
    }

    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    Poly pow(unsigned n) const {
        Poly result = constant(nvars_, 1);
        Poly base = *this;
        while (n > 0) {
            if (n & 1u) result *= base;
            n >>= 1u;
            if (n > 0) base *= base;
        }
        return result;
    }

    Poly derivative(int var) const {
        Poly r(nvars_);
        for (const auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            Exponent f = e;
            f[var] -= 1;
            r.add_term(f, c * e[var]);
        }
        return r;
    }

    Rational evaluate(std::span<const Rational> x) const {
        std::vector<std::vector<Rational>> powers = power_table(x);
        Rational s = 0;
        for (const auto& [e, c] : terms_) {
            Rational m = c;
            for (int i = 0; i < nvars_; ++i) m *= powers[i][e[i]];
            s += m;
        }
        return s;
    }

    Complex evaluate(std::span<const Complex> x) const {
        std::vector<std::vector<Complex>> powers = power_table(x);
        Complex s = 0;
        for (const auto& [e, c] : terms_) {
            Complex m = to_double(c);
            for (int i = 0; i < nvars_; ++i) m *= powers[i][e[i]];
            s += m;
        }
        return s;
    }

    /// Substitutes `subs[i]` for variable i. All substitutes share a variable count.
    Poly compose(std::span<const Poly> subs) const {
        if (static_cast<int>(subs.size()) != nvars_) {
            throw Error(ErrorKind::invalid_argument, "compose: substitution arity mismatch");
        }
        int out_vars = subs.empty() ? nvars_ : subs[0].num_vars();
        std::vector<std::vector<Poly>> powers(nvars_);
        for (int i = 0; i < nvars_; ++i) {
            int deg = std::max(0, degree_in(i));
            powers[i].reserve(deg + 1);
            powers[i].push_back(constant(out_vars, 1));
            for (int k = 1; k <= deg; ++k) powers[i].push_back(powers[i].back() * subs[i]);
        }
        Poly r(out_vars);
        for (const auto& [e, c] : terms_) {
            Poly m = constant(out_vars, c);
            for (int i = 0; i < nvars_; ++i) {
                if (e[i] > 0) m *= powers[i][e[i]];
            }
            r += m;
        }
        return r;
    }

    /// Exact quotient, or nullopt-like failure flag when `d` does not divide.
    /// A single divisor is its own Groebner basis, so reduction by leading terms decides divisibility.
    bool divides_into(const Poly& d, Poly& quotient) const {
        check_compatible(d);
        if (d.is_zero()) throw Error(ErrorKind::invalid_argument, "division by zero polynomial");
        quotient = Poly(nvars_);
        Poly rem = *this;
        const Exponent& ld = d.leading_exponent();
        const Rational& lc = d.leading_coefficient();
        while (!rem.is_zero()) {
            const Exponent le = rem.leading_exponent();
            Exponent q{le[0] - ld[0], le[1] - ld[1], le[2] - ld[2]};
            if (q[0] < 0 || q[1] < 0 || q[2] < 0) return false;
            Rational qc = rem.leading_coefficient() / lc;
            quotient.add_term(q, qc);
            for (const auto& [e, c] : d.terms_) {
                rem.add_term({e[0] + q[0], e[1] + q[1], e[2] + q[2]}, -qc * c);
            }
        }
        return true;
    }

    /// Positive rational s such that s * p has coprime integer coefficients with positive leading term.
    Rational normalizing_scalar() const {
        if (terms_.empty()) return 1;
        Integer den = 1;
        Integer num = 0;
        for (const auto& [e, c] : terms_) {
            den = lcm(den, c.get_den());
            num = gcd(num, c.get_num());
        }
        Rational s(den, num);
        s.canonicalize();
        if (leading_coefficient() < 0) s = -s;
        return s;
    }

    /// Primitive integer coefficients, content 1, degrevlex-leading coefficient positive.
    Poly normalized() const { return *this * normalizing_scalar(); }

    friend bool operator==(const Poly& a, const Poly& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [e, c] : terms_) {
            Rational mag = abs(c);
            if (first) {
                if (c < 0) os << "-";
            } else {
                os << (c < 0 ? " - " : " + ");
            }
            first = false;
            bool constant_term = exponent_degree(e) == 0;
            if (mag != 1 || constant_term) {
                os << mag.get_str();
                if (!constant_term) os << "*";
            }
            bool first_var = true;
            for (int i = 0; i < nvars_; ++i) {
                if (e[i] == 0) continue;
                if (!first_var) os << "*";
                first_var = false;
                os << variable_name(nvars_, i);
                if (e[i] > 1) os << "^" << e[i];
            }
        }
        return os.str();
    }

private:
    void check_compatible(const Poly& o) const {
        if (o.nvars_ != nvars_) throw Error(ErrorKind::invalid_argument, "polynomials over different variable sets");
    }

    template <class T>
    std::vector<std::vector<T>> power_table(std::span<const T> x) const {
        if (static_cast<int>(x.size()) != nvars_) {
            throw Error(ErrorKind::invalid_argument, "evaluate: point arity mismatch");
        }
        std::vector<std::vector<T>> powers(nvars_);
        for (int i = 0; i < nvars_; ++i) {
            int deg = std::max(0, degree_in(i));
            powers[i].resize(deg + 1);
            powers[i][0] = T(1);
            for (int k = 1; k <= deg; ++k) powers[i][k] = powers[i][k - 1] * x[i];
        }
        return powers;
    }

    int nvars_;
    Terms terms_;
};

/// Homogeneous form in (z, w) or (z, w, t). The zero form has degree 0.
class HomogPoly {
public:
    explicit HomogPoly(int nvars = 3) : poly_(nvars), degree_(0) { check_vars(nvars); }

    explicit HomogPoly(Poly p) : poly_(std::move(p)) {
        check_vars(poly_.num_vars());
        if (!poly_.is_homogeneous()) {
            int lo = poly_.total_degree();
            int hi = lo;
            for (const auto& [e, c] : poly_.terms()) {
                lo = std::min(lo, exponent_degree(e));
                hi = std::max(hi, exponent_degree(e));
            }
            throw Error(ErrorKind::inhomogeneous,
                        "polynomial is not homogeneous: monomials of degree " + std::to_string(hi) +
                            " and " + std::to_string(lo));
        }
        degree_ = poly_.is_zero() ? 0 : poly_.total_degree();
    }

    static HomogPoly variable(int nvars, int i) { return HomogPoly(Poly::variable(nvars, i)); }

    const Poly& poly() const { return poly_; }
    int num_vars() const { return poly_.num_vars(); }
    int degree() const { return degree_; }
    bool is_zero() const { return poly_.is_zero(); }
    const Poly::Terms& terms() const { return poly_.terms(); }

    friend HomogPoly operator+(const HomogPoly& a, const HomogPoly& b) {
        return HomogPoly(a.poly_ + b.poly_);
    }
    friend HomogPoly operator-(const HomogPoly& a, const HomogPoly& b) {
        return HomogPoly(a.poly_ - b.poly_);
    }
    friend HomogPoly operator*(const HomogPoly& a, const HomogPoly& b) {
        return HomogPoly(a.poly_ * b.poly_);
    }
    friend HomogPoly operator*(const Rational& s, const HomogPoly& a) { return HomogPoly(a.poly_ * s); }
    HomogPoly operator-() const { return HomogPoly(-poly_); }
    HomogPoly pow(unsigned n) const { return HomogPoly(poly_.pow(n)); }
    HomogPoly derivative(int var) const { return HomogPoly(poly_.derivative(var)); }

    Rational evaluate(std::span<const Rational> x) const { return poly_.evaluate(x); }
    Complex evaluate(std::span<const Complex> x) const { return poly_.evaluate(x); }

    /// Composition with homogeneous substitutes of a common degree stays homogeneous.
    HomogPoly compose(std::span<const HomogPoly> subs) const {
        std::vector<Poly> ps;
        ps.reserve(subs.size());
        for (const auto& s : subs) ps.push_back(s.poly());
        return HomogPoly(poly_.compose(ps));
    }

    HomogPoly normalized() const { return HomogPoly(poly_.normalized()); }

    bool divides_into(const HomogPoly& d, HomogPoly& quotient) const {
        Poly q;
        if (!poly_.divides_into(d.poly_, q)) return false;
        quotient = HomogPoly(std::move(q));
        return true;
    }

    /// True when the two forms agree up to a nonzero scalar.
    bool proportional_to(const HomogPoly& o) const { return normalized() == o.normalized(); }

    std::string to_string() const { return poly_.to_string(); }

    friend bool operator==(const HomogPoly& a, const HomogPoly& b) { return a.poly_ == b.poly_; }

    /// Orders normal forms: by degree, then term-by-term.
    friend bool operator<(const HomogPoly& a, const HomogPoly& b) {
        if (a.num_vars() != b.num_vars()) return a.num_vars() < b.num_vars();
        if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
        auto ia = a.terms().begin();
        auto ib = b.terms().begin();
        DegRevLexGreater gt;
        for (; ia != a.terms().end() && ib != b.terms().end(); ++ia, ++ib) {
            if (ia->first != ib->first) return gt(ia->first, ib->first);
            if (ia->second != ib->second) return ia->second < ib->second;
        }
        return ia == a.terms().end() && ib != b.terms().end();
    }

private:
    static void check_vars(int nvars) {
        if (nvars != 2 && nvars != 3) throw Error(ErrorKind::invalid_argument, "forms live in 2 or 3 variables");
    }

    Poly poly_;
    int degree_ = 0;
};

/// Fixed-coefficient form compiled for repeated floating-point evaluation.
class NumericForm {
public:
    NumericForm() = default;

    explicit NumericForm(const HomogPoly& p) : nvars_(p.num_vars()), degree_(p.degree()) {
        for (const auto& [e, c] : p.terms()) terms_.push_back({e, Complex(to_double(c), 0.0)});
    }

    NumericForm(int nvars, int degree, std::vector<std::pair<Exponent, Complex>> terms)
        : nvars_(nvars), degree_(degree), terms_(std::move(terms)) {}

    int num_vars() const { return nvars_; }
    int degree() const { return degree_; }
    const std::vector<std::pair<Exponent, Complex>>& terms() const { return terms_; }

    Complex operator()(std::span<const Complex> x) const {
        std::array<std::array<Complex, 64>, 3> pw{};
        bool small = degree_ < 64;
        if (!small) return slow_eval(x);
        for (int i = 0; i < nvars_; ++i) {
            pw[i][0] = 1.0;
            for (int k = 1; k <= degree_; ++k) pw[i][k] = pw[i][k - 1] * x[i];
        }
        Complex s = 0;
        for (const auto& [e, c] : terms_) {
            Complex m = c;
            for (int i = 0; i < nvars_; ++i) m *= pw[i][e[i]];
            s += m;
        }
        return s;
    }

    NumericForm derivative(int var) const {
        std::vector<std::pair<Exponent, Complex>> out;
        for (const auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            Exponent f = e;
            f[var] -= 1;
            out.push_back({f, c * static_cast<double>(e[var])});
        }
        return NumericForm(nvars_, std::max(0, degree_ - 1), std::move(out));
    }

    double max_abs_coefficient() const {
        double m = 0;
        for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
        return m;
    }

private:
    Complex slow_eval(std::span<const Complex> x) const {
        Complex s = 0;
        for (const auto& [e, c] : terms_) {
            Complex m = c;
            for (int i = 0; i < nvars_; ++i) m *= std::pow(x[i], e[i]);
            s += m;
        }
        return s;
    }

    int nvars_ = 3;
    int degree_ = 0;
    std::vector<std::pair<Exponent, Complex>> terms_;
};

} // namespace critfin
