#pragma once

// Components, algebraic sets, forward images and intersections.

#include "endomorphism.hpp"
#include "error.hpp"
#include "factor.hpp"
#include "linalg.hpp"
#include "point.hpp"
#include "poly.hpp"
#include "resultant.hpp"
#include "upoly.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace critfin {

/// Irreducible piece of an algebraic set.
///
/// `hypersurface` components carry an irreducible form in normal form: a curve on P^2, or on
/// P^1 the Galois orbit of points cut out by an irreducible binary form (a linear form is a
/// single rational point). `point` components carry an explicit ProjPoint (codim 2 on P^2).
class Component {
public:
    enum class Kind { hypersurface, point };

    static Component hypersurface(const HomogPoly& f) {
        if (f.is_zero() || f.degree() == 0) {
            throw Error(ErrorKind::invalid_argument, "component equation must be a nonconstant form");
        }
        Component c;
        c.kind_ = Kind::hypersurface;
        c.form_ = f.normalized();
        c.ambient_ = f.num_vars() - 1;
        return c;
    }

    static Component point(const ProjPoint& p) {
        Component c;
        c.kind_ = Kind::point;
        c.point_ = p;
        c.ambient_ = p.dimension();
        return c;
    }

    Kind kind() const { return kind_; }
    bool is_hypersurface() const { return kind_ == Kind::hypersurface; }
    bool is_point() const { return kind_ == Kind::point; }
    const HomogPoly& form() const { return form_; }
    const ProjPoint& pt() const { return point_; }
    int ambient_dimension() const { return ambient_; }
    int codim() const { return is_hypersurface() ? 1 : ambient_; }
    int degree() const { return is_hypersurface() ? form_.degree() : 1; }
    bool is_exact() const { return is_hypersurface() || point_.is_exact(); }

    /// On P^1 a linear form is a rational point; returns it in that case.
    std::optional<ProjPoint> as_rational_point() const {
        if (is_point()) return point_.is_exact() ? std::optional<ProjPoint>(point_) : std::nullopt;
        if (ambient_ != 1 || form_.degree() != 1) return std::nullopt;
        Rational a = form_.poly().coefficient({1, 0, 0});
        Rational b = form_.poly().coefficient({0, 1, 0});
        return ProjPoint::exact({-b, a});
    }

    std::string to_string() const {
        if (is_point()) return point_.to_string();
        if (auto p = as_rational_point()) return p->to_string();
        return form_.to_string();
    }

    friend bool operator==(const Component& a, const Component& b) {
        if (a.kind_ != b.kind_ || a.ambient_ != b.ambient_) return false;
        return a.is_hypersurface() ? a.form_ == b.form_ : a.point_ == b.point_;
    }

    friend bool operator<(const Component& a, const Component& b) {
        if (a.kind_ != b.kind_) return a.kind_ == Kind::hypersurface;
        if (a.is_hypersurface()) return a.form_ < b.form_;
        return a.point_ < b.point_;
    }

private:
    Kind kind_ = Kind::hypersurface;
    HomogPoly form_;
    ProjPoint point_;
    int ambient_ = 2;
};

/// Finite, duplicate-free, sorted collection of components in one ambient P^k.
class AlgebraicSet {
public:
    AlgebraicSet() = default;

    explicit AlgebraicSet(std::vector<Component> comps) {
        for (auto& c : comps) insert(std::move(c));
    }

    /// Inserts unless already present (exact comparison, or 1e-8 chart distance for inexact points).
    bool insert(Component c) {
        if (!components_.empty() && components_.front().ambient_dimension() != c.ambient_dimension()) {
            throw Error(ErrorKind::invalid_argument, "components from different ambient spaces");
        }
        for (const auto& e : components_) {
            if (same_component(e, c)) return false;
        }
        components_.insert(std::upper_bound(components_.begin(), components_.end(), c), std::move(c));
        return true;
    }

    const std::vector<Component>& components() const { return components_; }
    std::size_t size() const { return components_.size(); }
    bool empty() const { return components_.empty(); }
    auto begin() const { return components_.begin(); }
    auto end() const { return components_.end(); }

    bool has(const Component& c) const {
        return std::any_of(components_.begin(), components_.end(), [&](const Component& e) { return same_component(e, c); });
    }

    static bool same_component(const Component& a, const Component& b, double tol = 1e-8) {
        if (a.kind() != b.kind()) return false;
        if (a.is_hypersurface()) return a.form() == b.form();
        if (a.pt().is_exact() && b.pt().is_exact()) return a.pt() == b.pt();
        return a.pt().chart_distance(b.pt()) < tol;
    }

private:
    std::vector<Component> components_;
};

/// Three-valued membership for tolerance-based tests.
enum class Membership { inside, ambiguous, outside };

namespace detail {

/// |f(p)| / max|coeff f| at the max-norm-1 representative of p.
inline double scaled_residual(const HomogPoly& f, const ProjPoint& p) {
    double scale = 0;
    for (const auto& [e, c] : f.terms()) scale = std::max(scale, std::abs(to_double(c)));
    return std::abs(f.evaluate(std::span<const Complex>(p.numeric()))) / scale;
}

} // namespace detail

/// Membership graded against `tol`: residual < tol inside, [tol, 10 tol] ambiguous.
/// Exact points against exact data are decided exactly.
inline Membership membership(const AlgebraicSet& s, const ProjPoint& p, double tol) {
    bool ambiguous = false;
    for (const auto& c : s) {
        if (c.ambient_dimension() != p.dimension()) {
            throw Error(ErrorKind::invalid_argument, "contains: dimension mismatch");
        }
        if (c.is_hypersurface()) {
            if (p.is_exact()) {
                if (c.form().evaluate(std::span<const Rational>(p.rational())) == 0) return Membership::inside;
            } else {
                double r = detail::scaled_residual(c.form(), p);
                if (r < tol) return Membership::inside;
                if (r <= 10 * tol) ambiguous = true;
            }
        } else {
            if (p.is_exact() && c.pt().is_exact()) {
                if (p == c.pt()) return Membership::inside;
            } else {
                double dist = c.pt().chart_distance(p);
                if (dist < tol) return Membership::inside;
                if (dist <= 10 * tol) ambiguous = true;
            }
        }
    }
    return ambiguous ? Membership::ambiguous : Membership::outside;
}

/// True iff p lies on some component (exactly, or with scaled residual below tol).
inline bool contains(const AlgebraicSet& s, const ProjPoint& p, double tol = 0.0) {
    if (p.is_exact() && tol == 0.0) return membership(s, p, 0.0) == Membership::inside;
    return membership(s, p, tol) == Membership::inside;
}

/// Set equality of exact algebraic sets under normal-form comparison.
inline bool set_equal(const AlgebraicSet& a, const AlgebraicSet& b) {
    for (const auto* s : {&a, &b}) {
        for (const auto& c : *s) {
            if (!c.is_exact()) throw Error(ErrorKind::invalid_argument, "set_equal: inexact component present");
        }
    }
    return a.components() == b.components();
}

// ---------------------------------------------------------------------------
// Images of points and hypersurfaces.

inline ProjPoint point_image(const Endomorphism& f, const ProjPoint& p) {
    if (p.dimension() != f.k()) throw Error(ErrorKind::invalid_argument, "point_image: dimension mismatch");
    if (p.is_exact()) return ProjPoint::exact(f.apply(std::span<const Rational>(p.rational())));
    return ProjPoint::inexact(f.apply(std::span<const Complex>(p.numeric())));
}

namespace detail {

/// Normal form of h modulo the principal ideal (c): no remaining term divisible by LM(c).
inline Poly reduce_mod(Poly h, const Poly& c) {
    const Exponent& lm = c.leading_exponent();
    const Rational& lc = c.leading_coefficient();
    Poly out(h.num_vars());
    while (!h.is_zero()) {
        Exponent e = h.leading_exponent();
        Rational coef = h.leading_coefficient();
        Exponent q{e[0] - lm[0], e[1] - lm[1], e[2] - lm[2]};
        if (q[0] >= 0 && q[1] >= 0 && q[2] >= 0) {
            Rational s = coef / lc;
            for (const auto& [ce, cc] : c.terms()) h.add_term({ce[0] + q[0], ce[1] + q[1], ce[2] + q[2]}, -s * cc);
        } else {
            out.add_term(e, coef);
            h.add_term(e, -coef);
        }
    }
    return out;
}

/// Newton interpolation of a binary form of degree n from its values at (x, 1), x = 0..n.
inline HomogPoly interpolate_binary(const std::vector<Rational>& values, int n) {
    std::vector<Rational> coef = values;
    for (int j = 1; j <= n; ++j) {
        for (int i = n; i >= j; --i) coef[i] = (coef[i] - coef[i - 1]) / Rational(j);
    }
    // expand Newton form sum coef[i] * prod_{j<i} (x - j)
    UPoly acc;
    for (int i = n; i >= 0; --i) {
        acc = acc * UPoly(std::vector<Rational>{Rational(-i), Rational(1)}) + UPoly::constant(coef[i]);
    }
    return upoly_to_binary(acc, n);
}

} // namespace detail

/// Image of an irreducible curve under an endomorphism of P^2.
///
/// Finds the least degree e' dividing d * deg(c) for which some nonzero form P of degree e'
/// satisfies P(f) = 0 modulo c. The kernel at that degree is one-dimensional and spanned by the
/// equation of f(V(c)).
inline Component curve_image(const Endomorphism& f, const Component& c) {
    if (f.k() != 2 || !c.is_hypersurface() || c.ambient_dimension() != 2) {
        throw Error(ErrorKind::invalid_argument, "curve_image: needs a curve on P^2 and an endomorphism of P^2");
    }
    const Poly& cp = c.form().poly();
    const int d = f.degree();
    const int e = c.degree();
    std::vector<Poly> reduced_forms;
    for (const auto& fi : f.forms()) reduced_forms.push_back(detail::reduce_mod(fi.poly(), cp));

    std::map<Exponent, Poly, DegRevLexGreater> memo;
    memo.emplace(Exponent{0, 0, 0}, Poly::constant(3, 1));
    auto normal_form = [&](auto&& self, const Exponent& a) -> const Poly& {
        auto it = memo.find(a);
        if (it != memo.end()) return it->second;
        int i = a[0] > 0 ? 0 : a[1] > 0 ? 1 : 2;
        Exponent lower = a;
        lower[i] -= 1;
        Poly value = detail::reduce_mod(self(self, lower) * reduced_forms[i], cp);
        return memo.emplace(a, std::move(value)).first->second;
    };

    for (int deg = 1; deg <= d * e; ++deg) {
        if ((d * e) % deg != 0) continue;
        auto monos = detail::monomials_of_degree(3, deg);
        std::map<Exponent, std::size_t, DegRevLexGreater> row_of;
        std::vector<const Poly*> columns;
        for (const auto& m : monos) {
            const Poly& nf = normal_form(normal_form, m);
            columns.push_back(&nf);
            for (const auto& [te, tc] : nf.terms()) row_of.emplace(te, row_of.size());
        }
        RatMatrix a(row_of.size(), std::vector<Rational>(monos.size(), Rational(0)));
        for (std::size_t j = 0; j < columns.size(); ++j) {
            for (const auto& [te, tc] : columns[j]->terms()) a[row_of.at(te)][j] = tc;
        }
        auto ker = kernel(std::move(a), monos.size());
        if (ker.empty()) continue;
        if (ker.size() > 1) {
            throw Error(ErrorKind::solver_failure, "curve_image: image equation not unique in degree " + std::to_string(deg));
        }
        Poly image(3);
        for (std::size_t j = 0; j < monos.size(); ++j) image.add_term(monos[j], ker[0][j]);
        HomogPoly hp = HomogPoly(std::move(image)).normalized();
        if ((d * e) % hp.degree() != 0) {
            throw Error(ErrorKind::solver_failure, "curve_image: degree law violated");
        }
        return Component::hypersurface(hp);
    }
    throw Error(ErrorKind::solver_failure, "curve_image: no image equation up to degree d*deg(c)");
}

/// Image of a point orbit on P^1 cut out by an irreducible binary form L:
/// the square-free part of Res_x(L(x), y1 f0(x) - y0 f1(x)).
inline Component orbit_image_p1(const Endomorphism& f, const Component& c) {
    if (f.k() != 1 || !c.is_hypersurface()) throw Error(ErrorKind::invalid_argument, "orbit_image_p1: P^1 data required");
    const int e = c.degree();
    if (auto p = c.as_rational_point()) {
        ProjPoint q = point_image(f, *p);
        std::vector<Rational> lin{q.rational()[1], -q.rational()[0]};
        return Component::hypersurface(HomogPoly(Poly::linear(lin)));
    }
    std::vector<Rational> values;
    UPoly lx = binary_to_upoly(c.form());
    for (int i = 0; i <= e; ++i) {
        // y = (i, 1): 1 * f0(x) - i * f1(x)
        HomogPoly g = f.forms()[0] - Rational(i) * f.forms()[1];
        values.push_back(sylvester_resultant(lx, e, binary_to_upoly(g), f.degree()));
    }
    HomogPoly r = detail::interpolate_binary(values, e);
    if (r.is_zero()) throw Error(ErrorKind::solver_failure, "orbit_image_p1: vanishing elimination");
    auto fac = factor(r);
    if (fac.factors.size() != 1) throw Error(ErrorKind::solver_failure, "orbit_image_p1: image is not irreducible");
    return Component::hypersurface(fac.factors[0].first);
}

/// f applied to one component: curves and P^1 orbits exactly, points by evaluation.
inline Component component_image(const Endomorphism& f, const Component& c) {
    if (c.is_point()) return Component::point(point_image(f, c.pt()));
    if (f.k() == 1) return orbit_image_p1(f, c);
    return curve_image(f, c);
}

// ---------------------------------------------------------------------------
// Curve-curve intersection.

struct IntersectionPoint {
    ProjPoint point;
    int multiplicity = 1;
};

struct IntersectConfig {
    double residual_tol = 1e-10;  ///< scaled residual accepted for inexact points
    double cluster_tol = 1e-8;    ///< two fibre roots closer than this are one point
    int factor_cap = 24;          ///< exact factorization of the eliminant up to this square-free degree
};

namespace detail {

/// (z, w, t) -> (z + a t, w + b t, t); the projection centre [0:0:1] becomes [a:b:1].
inline std::vector<HomogPoly> centre_shift(int a, int b) {
    return {HomogPoly(linear_poly(3, {1, 0, a, 0})), HomogPoly(linear_poly(3, {0, 1, b, 0})),
            HomogPoly(linear_poly(3, {0, 0, 1, 0}))};
}

/// Coefficients in t of F(z0, w0, t).
inline UPoly fibre_poly(const HomogPoly& F, const Rational& z0, const Rational& w0) {
    std::vector<Rational> c(F.degree() + 1, Rational(0));
    for (const auto& [e, v] : F.terms()) c[e[2]] += v * qpow(z0, e[0]) * qpow(w0, e[1]);
    return UPoly(std::move(c));
}

inline std::vector<Complex> fibre_poly(const HomogPoly& F, Complex z0, Complex w0) {
    std::vector<Complex> c(F.degree() + 1, 0.0);
    for (const auto& [e, v] : F.terms()) c[e[2]] += to_double(v) * std::pow(z0, e[0]) * std::pow(w0, e[1]);
    return c;
}

inline Complex eval_c(const std::vector<Complex>& p, Complex x) {
    Complex s = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * x + *it;
    return s;
}

/// Newton iteration on {F = G = 0} with the chart coordinate `fixed` held at 1.
inline std::vector<Complex> polish_common_zero(const NumericForm& F, const NumericForm& G, std::vector<Complex> x, int fixed) {
    std::array<NumericForm, 3> dF{F.derivative(0), F.derivative(1), F.derivative(2)};
    std::array<NumericForm, 3> dG{G.derivative(0), G.derivative(1), G.derivative(2)};
    int u = fixed == 0 ? 1 : 0;
    int v = fixed == 2 ? 1 : 2;
    for (int it = 0; it < 8; ++it) {
        Complex f = F(x), g = G(x);
        Complex a = dF[u](x), b = dF[v](x), c = dG[u](x), d = dG[v](x);
        Complex det = a * d - b * c;
        if (std::abs(det) < 1e-12 * (std::abs(a) + std::abs(b)) * (std::abs(c) + std::abs(d)) || std::abs(det) == 0.0) break;
        Complex du = (d * f - b * g) / det;
        Complex dv = (a * g - c * f) / det;
        x[u] -= du;
        x[v] -= dv;
        if (std::abs(du) + std::abs(dv) < 1e-17) break;
    }
    return x;
}

inline std::vector<Complex> transform_point(const std::vector<Complex>& x, int a, int b) {
    return {x[0] + Complex(a) * x[2], x[1] + Complex(b) * x[2], x[2]};
}

/// Polynomials in t over K = Q[z]/(L): coefficient i is a residue mod L.
using KPoly = std::vector<UPoly>;

inline void ktrim(KPoly& a) {
    while (!a.empty() && a.back().is_zero()) a.pop_back();
}

/// Remainder of a by b over K, b with invertible leading coefficient. Quotient into *q if given.
inline KPoly krem(KPoly a, const KPoly& b, const UPoly& L, KPoly* q = nullptr) {
    UPoly inv = inverse_mod(b.back(), L);
    if (q) q->assign(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, UPoly());
    ktrim(a);
    while (a.size() >= b.size()) {
        UPoly s = divmod(a.back() * inv, L).second;
        std::size_t shift = a.size() - b.size();
        if (q) (*q)[shift] = s;
        for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] = divmod(a[i + shift] - s * b[i], L).second;
        a.back() = UPoly();
        ktrim(a);
    }
    return a;
}

inline KPoly kgcd(KPoly a, KPoly b, const UPoly& L) {
    ktrim(a);
    ktrim(b);
    while (!b.empty()) {
        KPoly r = krem(a, b, L);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

/// Fibre polynomial F(z, 1, t) as a polynomial in t over Q[z]/(L).
inline KPoly fibre_kpoly(const HomogPoly& F, const UPoly& L) {
    KPoly out(F.degree() + 1);
    for (const auto& [e, v] : F.terms()) {
        std::vector<Rational> mono(e[0] + 1, Rational(0));
        mono[e[0]] = v;
        out[e[2]] = out[e[2]] + UPoly(std::move(mono));
    }
    for (auto& c : out) c = divmod(c, L).second;
    ktrim(out);
    return out;
}

/// The common t-root t = phi(z) of A and B over the roots of L, when the reduced gcd of the two
/// fibre polynomials over Q[z]/(L) is linear. Empty when L is not a field modulus for this
/// computation (a zero divisor appeared) or the gcd has several distinct roots.
inline std::optional<UPoly> common_fibre_root(const HomogPoly& A, const HomogPoly& B, const UPoly& L) {
    try {
        KPoly g = kgcd(fibre_kpoly(A, L), fibre_kpoly(B, L), L);
        if (g.size() < 2) return std::nullopt;
        if (g.size() > 2) {
            KPoly dg;
            for (std::size_t i = 1; i < g.size(); ++i) dg.push_back(Rational(static_cast<long>(i)) * g[i]);
            KPoly h = kgcd(g, dg, L);
            KPoly quotient;
            krem(g, h, L, &quotient);
            ktrim(quotient);
            g = std::move(quotient);
            if (g.size() != 2) return std::nullopt;
        }
        UPoly inv = inverse_mod(g[1], L);
        return divmod(UPoly::constant(-1) * g[0] * inv, L).second;
    } catch (const Error&) {
        return std::nullopt;
    }
}

/// Rational p/q with q <= max_den approximating x (continued fractions), if one is within tol.
inline std::optional<Rational> reconstruct_rational(double x, double tol, long max_den = 1000000) {
    if (!std::isfinite(x) || std::abs(x) > 1e15) return std::nullopt;
    Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = x;
    for (int it = 0; it < 40; ++it) {
        double fl = std::floor(r);
        Integer a(fl);
        Integer p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1, q0 = q1, p1 = p2, q1 = q2;
        Rational cand(p1, q1);
        cand.canonicalize();
        if (std::abs(to_double(cand) - x) <= tol * std::max(1.0, std::abs(x))) return cand;
        if (r - fl == 0.0) break;
        r = 1.0 / (r - fl);
    }
    return std::nullopt;
}

/// A batch of roots of a binary form sharing one multiplicity: either one exact linear factor
/// or numeric roots [r : 1].
struct RootGroup {
    std::optional<HomogPoly> linear;
    std::vector<Complex> roots;
    UPoly modulus; ///< polynomial in z (w = 1) vanishing at all `roots`
    int multiplicity = 1;
};

/// Roots of a nonzero binary form. Exact factorization when the square-free degree is within
/// `factor_cap`; beyond that, Yun decomposition with numeric roots and exactly verified rational
/// reconstruction.
inline std::vector<RootGroup> split_binary(const HomogPoly& R, int factor_cap) {
    std::vector<RootGroup> out;
    UPoly u = binary_to_upoly(R);
    auto parts = squarefree_decomposition(u);
    int sqf_degree = R.degree() > u.degree() ? 1 : 0;
    for (const auto& pm : parts) sqf_degree += pm.first.degree();
    if (sqf_degree <= factor_cap) {
        FactorConfig fc;
        fc.degree_cap = std::max(fc.degree_cap, factor_cap);
        for (const auto& [L, mult] : factor(R, fc).factors) {
            RootGroup g;
            g.multiplicity = mult;
            if (L.degree() == 1) {
                g.linear = L;
            } else {
                g.modulus = binary_to_upoly(L);
                g.roots = complex_roots(g.modulus);
            }
            out.push_back(std::move(g));
        }
        return out;
    }
    if (R.degree() > u.degree()) {
        RootGroup g;
        g.linear = HomogPoly(Poly::variable(2, 1));
        g.multiplicity = R.degree() - u.degree();
        out.push_back(std::move(g));
    }
    for (const auto& [part, mult] : parts) {
        RootGroup numeric;
        numeric.multiplicity = mult;
        numeric.modulus = part;
        for (Complex r : complex_roots(part)) {
            if (std::abs(r.imag()) < 1e-7 * std::max(1.0, std::abs(r))) {
                auto q = reconstruct_rational(r.real(), 1e-9);
                if (q && part.evaluate(*q) == 0) {
                    RootGroup g;
                    g.multiplicity = mult;
                    std::vector<Rational> lin{Rational(q->get_den()), Rational(-q->get_num())};
                    g.linear = HomogPoly(Poly::linear(lin));
                    out.push_back(std::move(g));
                    continue;
                }
            }
            numeric.roots.push_back(r);
        }
        if (!numeric.roots.empty()) out.push_back(std::move(numeric));
    }
    return out;
}

} // namespace detail

/// Intersection points of two plane curves without common component, with multiplicities
/// summing to deg(a) * deg(b). Works for any pair of coprime forms (reducible allowed).
inline std::vector<IntersectionPoint> intersect_forms(const HomogPoly& a, const HomogPoly& b,
                                                      const IntersectConfig& cfg = {}) {
    if (a.num_vars() != 3 || b.num_vars() != 3) throw Error(ErrorKind::invalid_argument, "curve_intersect: plane curves only");
    const int m = a.degree(), n = b.degree();
    const int N = m * n;
    std::string last_problem = "no admissible projection";
    std::uint32_t state = 12345;
    for (int attempt = 0; attempt < 16; ++attempt) {
        int sa = 0, sb = 0;
        if (attempt > 0) {
            // deterministic pseudo-random centres, widening with the attempt number
            state = state * 1664525u + 1013904223u;
            const int span = 4 + 6 * attempt;
            sa = static_cast<int>((state >> 8) % (2 * span + 1)) - span;
            state = state * 1664525u + 1013904223u;
            sb = static_cast<int>((state >> 8) % (2 * span + 1)) - span;
        }
        std::array<Rational, 3> centre{Rational(sa), Rational(sb), Rational(1)};
        if (a.evaluate(std::span<const Rational>(centre)) == 0 || b.evaluate(std::span<const Rational>(centre)) == 0) continue;
        auto T = detail::centre_shift(sa, sb);
        HomogPoly A = a.compose(T), B = b.compose(T);

        std::vector<Rational> values;
        for (int i = 0; i <= N; ++i) {
            values.push_back(sylvester_resultant(detail::fibre_poly(A, Rational(i), Rational(1)), m,
                                                 detail::fibre_poly(B, Rational(i), Rational(1)), n));
        }
        HomogPoly R = detail::interpolate_binary(values, N);
        if (R.is_zero()) throw Error(ErrorKind::invalid_argument, "curve_intersect: curves share a component");

        NumericForm An(A), Bn(B);
        std::vector<IntersectionPoint> out;
        bool bad_projection = false;

        auto exact_fibre = [&](const Rational& z0, const Rational& w0, int mult) {
            UPoly g = gcd(detail::fibre_poly(A, z0, w0), detail::fibre_poly(B, z0, w0));
            auto sq = squarefree_decomposition(g);
            if (sq.size() != 1 || sq[0].first.degree() != 1) return false;
            Rational t0 = -sq[0].first.c[0] / sq[0].first.c[1];
            std::vector<Rational> x{z0 + Rational(sa) * t0, w0 + Rational(sb) * t0, t0};
            out.push_back({ProjPoint::exact(std::move(x)), mult});
            return true;
        };

        auto numeric_fibre = [&](Complex r, int mult, const std::optional<UPoly>& phi) {
            Complex t0;
            if (phi) {
                t0 = phi->evaluate(r);
            } else {
                // pair the closest roots of the two fibre polynomials; refuse near ties
                auto ta = complex_roots(detail::fibre_poly(A, r, 1.0));
                auto tb = complex_roots(detail::fibre_poly(B, r, 1.0));
                if (ta.empty() || tb.empty()) return false;
                std::vector<std::pair<double, Complex>> scored;
                for (Complex x : ta) {
                    double best = std::numeric_limits<double>::infinity();
                    for (Complex y : tb) best = std::min(best, std::abs(x - y) / std::max(1.0, std::abs(x)));
                    scored.push_back({best, x});
                }
                std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
                t0 = scored[0].second;
                for (std::size_t j = 1; j < scored.size(); ++j) {
                    if (scored[j].first < 1e-4 && std::abs(scored[j].second - t0) > 1e-5 * std::max(1.0, std::abs(t0))) {
                        return false;
                    }
                }
            }
            std::vector<Complex> x{r, 1.0, t0};
            int fixed = std::abs(r) >= 1.0 && std::abs(r) >= std::abs(t0) ? 0 : (std::abs(t0) > 1.0 ? 2 : 1);
            Complex s = x[fixed];
            for (auto& v : x) v /= s;
            if (mult == 1) x = detail::polish_common_zero(An, Bn, x, fixed);
            ProjPoint p = ProjPoint::inexact(detail::transform_point(x, sa, sb));
            double ra = detail::scaled_residual(a, p), rb = detail::scaled_residual(b, p);
            double tol = mult == 1 ? cfg.residual_tol : std::sqrt(cfg.residual_tol);
            if (ra > tol || rb > tol) {
                throw Error(ErrorKind::solver_failure, "curve_intersect: could not certify point " + p.to_string() +
                                                            " (residuals " + std::to_string(ra) + ", " +
                                                            std::to_string(rb) + ")");
            }
            out.push_back({p, mult});
            return true;
        };

        for (const auto& g : detail::split_binary(R, cfg.factor_cap)) {
            if (g.linear) {
                Rational z0 = -g.linear->poly().coefficient({0, 1, 0});
                Rational w0 = g.linear->poly().coefficient({1, 0, 0});
                bad_projection = !exact_fibre(z0, w0, g.multiplicity);
            } else {
                auto phi = detail::common_fibre_root(A, B, g.modulus);
                for (Complex r : g.roots) {
                    if (!numeric_fibre(r, g.multiplicity, phi)) {
                        bad_projection = true;
                        break;
                    }
                }
            }
            if (bad_projection) break;
        }
        if (bad_projection) {
            last_problem = "two intersection points on one projection line";
            continue;
        }
        int total = 0;
        for (const auto& ip : out) total += ip.multiplicity;
        if (total != N) throw Error(ErrorKind::solver_failure, "curve_intersect: Bezout count mismatch");
        std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.point < y.point; });
        return out;
    }
    throw Error(ErrorKind::degenerate, "curve_intersect: " + last_problem);
}

/// Intersection of two distinct irreducible curves.
inline std::vector<IntersectionPoint> curve_intersect(const Component& a, const Component& b,
                                                      const IntersectConfig& cfg = {}) {
    if (!a.is_hypersurface() || !b.is_hypersurface() || a.ambient_dimension() != 2 || b.ambient_dimension() != 2) {
        throw Error(ErrorKind::invalid_argument, "curve_intersect: two curves on P^2 required");
    }
    if (a == b) throw Error(ErrorKind::invalid_argument, "curve_intersect: the curves are the same component");
    return intersect_forms(a.form(), b.form(), cfg);
}

} // namespace critfin
