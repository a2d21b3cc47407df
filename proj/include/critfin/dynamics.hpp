#pragma once

// Critical sets, iterates, local differentials, periodic points and their
// superattracting certification.

#include "endomorphism.hpp"
#include "error.hpp"
#include "factor.hpp"
#include "geometry.hpp"
#include "point.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace critfin {

/// Unreduced Jacobian determinant of f; its degree is checked to be (k+1)(d-1).
inline HomogPoly critical_equation(const Endomorphism& f) {
    HomogPoly j = f.jacobian_determinant();
    const int expected = (f.k() + 1) * (f.degree() - 1);
    if (j.is_zero() || j.degree() != expected) {
        throw Error(ErrorKind::solver_failure, "Jacobian determinant has degree " + std::to_string(j.degree()) +
                                                   ", expected " + std::to_string(expected));
    }
    return j;
}

/// Irreducible components of {det df = 0}: curves on P^2, Galois orbits of points on P^1.
inline AlgebraicSet critical_set(const Endomorphism& f, const FactorConfig& cfg = {}) {
    Factorization fac = factor(critical_equation(f), cfg);
    AlgebraicSet out;
    for (const auto& [g, m] : fac.factors) out.insert(Component::hypersurface(g));
    return out;
}

/// f^n with content removed. Fails with budget_exceeded when d^n exceeds `max_degree`.
inline Endomorphism iterate(const Endomorphism& f, int n, long max_degree = 256) {
    if (n < 1) throw Error(ErrorKind::invalid_argument, "iterate: n must be positive");
    long deg = 1;
    for (int i = 0; i < n; ++i) {
        deg *= f.degree();
        if (deg > max_degree) {
            throw Error(ErrorKind::budget_exceeded, "iterate: degree " + std::to_string(f.degree()) + "^" +
                                                        std::to_string(n) + " exceeds budget " + std::to_string(max_degree));
        }
    }
    Endomorphism g = f;
    for (int i = 1; i < n; ++i) g = Endomorphism::compose(f, g);
    return g;
}

/// x, f(x), ..., renormalized to max-norm 1 after every step.
inline std::vector<Complex> apply_n(const Endomorphism& f, std::vector<Complex> x, int n) {
    for (int i = 0; i < n; ++i) x = ProjPoint::inexact(f.apply(std::span<const Complex>(x))).numeric();
    return x;
}

/// f^n(p) as a point (exact arithmetic for exact p).
inline ProjPoint orbit_point(const Endomorphism& f, ProjPoint p, int n) {
    for (int i = 0; i < n; ++i) p = point_image(f, p);
    return p;
}

// ---------------------------------------------------------------------------
// Local differentials.

/// k x k differential of the chart representative of f at a point.
struct LocalJacobian {
    std::size_t source_chart = 0;
    std::size_t target_chart = 0;
    ProjPoint point;
    bool exact = false;
    std::vector<std::vector<Rational>> exact_matrix; ///< filled when exact
    std::vector<std::vector<Complex>> matrix;

    bool is_zero() const {
        for (const auto& row : matrix) {
            for (const auto& v : row) {
                if (v != Complex(0.0)) return false;
            }
        }
        return true;
    }
};

namespace detail {

inline std::vector<std::size_t> other_indices(std::size_t n, std::size_t skip) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i != skip) out.push_back(i);
    }
    return out;
}

template <class T, class Eval>
std::vector<std::vector<T>> chart_jacobian(const Endomorphism& f, const std::vector<T>& x, std::size_t s, std::size_t r,
                                           Eval eval) {
    const auto& jac = f.jacobian();
    std::vector<T> F;
    for (const auto& form : f.forms()) F.push_back(eval(form, x));
    if (F[r] == T(0)) throw Error(ErrorKind::invalid_argument, "differential_at: image vanishes in the target chart");
    auto rows = other_indices(x.size(), r);
    auto cols = other_indices(x.size(), s);
    std::vector<std::vector<T>> m;
    for (std::size_t j : rows) {
        std::vector<T> row;
        for (std::size_t l : cols) {
            T dj = eval(jac[j][l], x), dr = eval(jac[r][l], x);
            row.push_back((dj * F[r] - F[j] * dr) / (F[r] * F[r]));
        }
        m.push_back(std::move(row));
    }
    return m;
}

} // namespace detail

/// Differential in explicit charts: source coordinates x_i / x_s (i != s), target F_j / F_r (j != r).
inline LocalJacobian differential_at(const Endomorphism& f, const ProjPoint& p, std::size_t source_chart,
                                     std::size_t target_chart) {
    if (p.dimension() != f.k()) throw Error(ErrorKind::invalid_argument, "differential_at: dimension mismatch");
    LocalJacobian out;
    out.source_chart = source_chart;
    out.target_chart = target_chart;
    out.point = p;
    out.exact = p.is_exact();
    if (p.is_exact()) {
        const Rational& xs = p.rational()[source_chart];
        if (xs == 0) throw Error(ErrorKind::invalid_argument, "differential_at: point not in source chart");
        std::vector<Rational> x;
        for (const auto& c : p.rational()) x.push_back(c / xs);
        out.exact_matrix = detail::chart_jacobian<Rational>(
            f, x, source_chart, target_chart,
            [](const HomogPoly& h, const std::vector<Rational>& v) { return h.evaluate(std::span<const Rational>(v)); });
        for (const auto& row : out.exact_matrix) {
            std::vector<Complex> r;
            for (const auto& v : row) r.emplace_back(to_double(v), 0.0);
            out.matrix.push_back(std::move(r));
        }
    } else {
        Complex xs = p.numeric()[source_chart];
        if (std::abs(xs) == 0.0) throw Error(ErrorKind::invalid_argument, "differential_at: point not in source chart");
        std::vector<Complex> x;
        for (const auto& c : p.numeric()) x.push_back(c / xs);
        out.matrix = detail::chart_jacobian<Complex>(
            f, x, source_chart, target_chart,
            [](const HomogPoly& h, const std::vector<Complex>& v) { return h.evaluate(std::span<const Complex>(v)); });
    }
    return out;
}

/// Differential with both charts chosen at the largest-magnitude coordinate (ties: lowest index).
inline LocalJacobian differential_at(const Endomorphism& f, const ProjPoint& p) {
    return differential_at(f, p, p.chart(), point_image(f, p).chart());
}

// ---------------------------------------------------------------------------
// Periodic points.

enum class CycleClass {
    superattracting_zero_differential,
    superattracting_nilpotent_nonzero,
    attracting,
    other,
    undecided,
};

inline const char* to_string(CycleClass c) {
    switch (c) {
        case CycleClass::superattracting_zero_differential: return "superattracting-zero-differential";
        case CycleClass::superattracting_nilpotent_nonzero: return "superattracting-nilpotent-nonzero";
        case CycleClass::attracting: return "attracting";
        case CycleClass::other: return "other";
        case CycleClass::undecided: return "undecided";
    }
    return "unknown";
}

inline bool is_superattracting(CycleClass c) {
    return c == CycleClass::superattracting_zero_differential || c == CycleClass::superattracting_nilpotent_nonzero;
}

struct PeriodicPoint {
    ProjPoint point;
    int period = 1;
    double residual = 0.0;             ///< chart distance between f^n(p) and p (0 for exact points)
    bool classified = false;
    CycleClass classification = CycleClass::undecided;
    Complex trace = 0.0;               ///< trace of d(f^n)(p), or the derivative when k = 1
    Complex det = 0.0;                 ///< determinant (equal to the derivative when k = 1)
    std::optional<Rational> exact_trace;
    std::optional<Rational> exact_det;
    std::vector<std::vector<Complex>> differential;
    double multiplier_modulus = 0.0;   ///< largest eigenvalue modulus of d(f^n)(p)
};

struct SolverConfig {
    double residual_tol = 1e-10;  ///< fixed-point residual bound for inexact points
    double cluster_tol = 1e-8;    ///< points closer than this are identified
    double classify_tol = 1e-8;   ///< |trace|, |det| below this count as zero (band up to 10x is undecided)
    int max_solver_degree = 9;    ///< largest d^n handed to the elimination solver
    int factor_cap = 24;          ///< exact factorization cap for eliminants
    int grid = 40;                ///< Newton starts per axis in the fallback grid
};

namespace detail {

/// 2x2 (or 1x1) eigenvalue moduli from trace and determinant.
inline double spectral_radius(int k, Complex tr, Complex det) {
    if (k == 1) return std::abs(tr);
    Complex disc = std::sqrt(tr * tr - 4.0 * det);
    return std::max(std::abs((tr + disc) / 2.0), std::abs((tr - disc) / 2.0));
}

template <class T>
std::vector<std::vector<T>> matmul(const std::vector<std::vector<T>>& a, const std::vector<std::vector<T>>& b) {
    std::size_t n = a.size(), m = b[0].size(), inner = b.size();
    std::vector<std::vector<T>> c(n, std::vector<T>(m, T(0)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t l = 0; l < inner; ++l) c[i][j] += a[i][l] * b[l][j];
        }
    }
    return c;
}

inline double max_abs(const std::vector<std::vector<Complex>>& m) {
    double r = 0;
    for (const auto& row : m) {
        for (const auto& v : row) r = std::max(r, std::abs(v));
    }
    return r;
}

} // namespace detail

/// The points p, f(p), ..., f^{n-1}(p).
inline std::vector<ProjPoint> cycle_of(const Endomorphism& f, const ProjPoint& p, int n) {
    std::vector<ProjPoint> out{p};
    for (int i = 1; i < n; ++i) out.push_back(point_image(f, out.back()));
    return out;
}

/// Differential of f^n at the periodic point via the chain rule over the cycle, with the
/// canonical chart at every cycle member. Fills trace, det and the classification.
inline PeriodicPoint certify_superattracting(const Endomorphism& f, PeriodicPoint pp, double tol = 1e-8) {
    auto cycle = cycle_of(f, pp.point, pp.period);
    const std::size_t n = cycle.size();
    const int k = f.k();
    bool exact = pp.point.is_exact();
    std::vector<std::vector<Rational>> qm;
    std::vector<std::vector<Complex>> cm;
    for (std::size_t i = 0; i < n; ++i) {
        auto J = differential_at(f, cycle[i], cycle[i].chart(), cycle[(i + 1) % n].chart());
        if (i == 0) {
            qm = J.exact_matrix;
            cm = J.matrix;
        } else {
            if (exact) qm = detail::matmul(J.exact_matrix, qm);
            cm = detail::matmul(J.matrix, cm);
        }
    }
    pp.classified = true;
    if (exact) {
        Rational tr = k == 1 ? qm[0][0] : qm[0][0] + qm[1][1];
        Rational det = k == 1 ? qm[0][0] : qm[0][0] * qm[1][1] - qm[0][1] * qm[1][0];
        pp.exact_trace = tr;
        pp.exact_det = det;
        pp.trace = to_double(tr);
        pp.det = to_double(det);
        cm.clear();
        bool zero = true;
        for (const auto& row : qm) {
            std::vector<Complex> r;
            for (const auto& v : row) {
                r.emplace_back(to_double(v), 0.0);
                if (v != 0) zero = false;
            }
            cm.push_back(std::move(r));
        }
        pp.differential = cm;
        pp.multiplier_modulus = detail::spectral_radius(k, pp.trace, pp.det);
        if (tr == 0 && det == 0) {
            pp.classification = zero ? CycleClass::superattracting_zero_differential
                                     : CycleClass::superattracting_nilpotent_nonzero;
        } else {
            pp.classification = pp.multiplier_modulus < 1.0 ? CycleClass::attracting : CycleClass::other;
        }
        return pp;
    }
    pp.differential = cm;
    pp.trace = k == 1 ? cm[0][0] : cm[0][0] + cm[1][1];
    pp.det = k == 1 ? cm[0][0] : cm[0][0] * cm[1][1] - cm[0][1] * cm[1][0];
    pp.multiplier_modulus = detail::spectral_radius(k, pp.trace, pp.det);
    double worst = std::max(std::abs(pp.trace), std::abs(pp.det));
    if (worst < tol) {
        pp.classification = detail::max_abs(cm) < tol ? CycleClass::superattracting_zero_differential
                                                       : CycleClass::superattracting_nilpotent_nonzero;
    } else if (worst <= 10 * tol) {
        pp.classification = CycleClass::undecided;
    } else {
        pp.classification = pp.multiplier_modulus < 1.0 ? CycleClass::attracting : CycleClass::other;
    }
    return pp;
}

struct PeriodicSearch {
    std::vector<PeriodicPoint> points; ///< sorted, deduplicated, minimal periods
    int dropped = 0;                   ///< candidates that failed verification or Newton starts that diverged
    int ambiguous_clusters = 0;        ///< pairs of distinct points within 10x the cluster tolerance
    bool used_grid = false;            ///< the Newton grid supplemented elimination
    std::vector<int> incomplete_periods; ///< n for which completeness of Fix(f^n) was not certified
};

namespace detail {

/// Candidate fixed points of g (not yet verified). Sets `degenerate` when elimination failed.
inline std::vector<ProjPoint> fixed_point_candidates_p1(const Endomorphism& g, const SolverConfig& cfg) {
    const auto& G = g.forms();
    HomogPoly h = HomogPoly::variable(2, 0) * G[1] - HomogPoly::variable(2, 1) * G[0];
    std::vector<ProjPoint> out;
    if (h.is_zero()) throw Error(ErrorKind::degenerate, "fixed-point equation vanishes identically");
    for (const auto& grp : split_binary(h, cfg.factor_cap)) {
        if (grp.linear) {
            Rational a = grp.linear->poly().coefficient({1, 0, 0});
            Rational b = grp.linear->poly().coefficient({0, 1, 0});
            out.push_back(ProjPoint::exact(std::vector<Rational>{-b, a}));
        } else {
            for (Complex r : grp.roots) out.push_back(ProjPoint::inexact(std::vector<Complex>{r, 1.0}));
        }
    }
    return out;
}

/// Numeric fixed-point system of g in one affine chart: E_i = x_i G_c - G_i (x_c = 1).
struct FixedPointNewton {
    const Endomorphism& g;
    std::vector<std::vector<NumericForm>> dG;

    explicit FixedPointNewton(const Endomorphism& map) : g(map) {
        const int nv = g.num_vars();
        dG.resize(nv);
        for (int i = 0; i < nv; ++i) {
            for (int j = 0; j < nv; ++j) dG[i].push_back(g.numeric_forms()[i].derivative(j));
        }
    }

    /// Newton from x in the chart of its largest coordinate; empty when it does not converge.
    std::optional<std::vector<Complex>> solve(std::vector<Complex> x, int max_iter = 60) const {
        const int nv = g.num_vars();
        const auto& G = g.numeric_forms();
        std::size_t chart = 0;
        for (int i = 1; i < nv; ++i) {
            if (std::abs(x[i]) > std::abs(x[chart])) chart = i;
        }
        if (std::abs(x[chart]) == 0.0) return std::nullopt;
        Complex s = x[chart];
        for (auto& v : x) v /= s;
        auto local = other_indices(nv, chart);
        const int m = nv - 1;
        for (int it = 0; it < max_iter; ++it) {
            std::vector<Complex> Gx;
            for (const auto& form : G) Gx.push_back(form(x));
            Eigen::MatrixXcd J(m, m);
            Eigen::VectorXcd E(m);
            for (int a = 0; a < m; ++a) {
                std::size_t i = local[a];
                E(a) = x[i] * Gx[chart] - Gx[i];
                for (int b = 0; b < m; ++b) {
                    std::size_t l = local[b];
                    Complex v = x[i] * dG[chart][l](x) - dG[i][l](x);
                    if (l == i) v += Gx[chart];
                    J(a, b) = v;
                }
            }
            Eigen::VectorXcd step = J.fullPivLu().solve(E);
            if (!step.allFinite()) return std::nullopt;
            double norm = 0, big = 1.0;
            for (int a = 0; a < m; ++a) {
                x[local[a]] -= step(a);
                norm = std::max(norm, std::abs(step(a)));
                big = std::max(big, std::abs(x[local[a]]));
            }
            if (big > 1e8) return std::nullopt;
            if (norm <= 1e-15 * big) return x;
        }
        return x; // caller verifies the residual
    }
};

/// Candidate fixed points of g on P^2: roots of an eliminant of the fixed-point system, fibres
/// solved numerically and refined by Newton on the fixed-point equations of g.
inline std::vector<ProjPoint> fixed_point_candidates_p2(const Endomorphism& g, int attempt) {
    static const int tilts[][4] = {{1, 2, 3, -2}, {2, -3, -1, 4}, {-1, 3, 5, 1}, {3, 1, -4, -3}, {-2, 5, 2, 7},
                                   {4, -1, -3, 5}, {-3, -2, 6, -1}, {5, 3, 1, -6}};
    FixedPointNewton newton(g);
    const HomogPoly z = HomogPoly::variable(3, 0), w = HomogPoly::variable(3, 1), t = HomogPoly::variable(3, 2);
    for (int k = attempt; k < 8; ++k) {
        const auto& tl = tilts[k];
        const int a = tl[0], b = tl[1], sa = tl[2], sb = tl[3];
        // x = S(x'): (z, w, t) = (z', w', t' + a z' + b w'); the line t' = 0 is in general position
        std::vector<HomogPoly> S{z, w, HomogPoly(linear_poly(3, {a, b, 1, 0}))};
        std::vector<HomogPoly> Gs;
        for (const auto& form : g.forms()) Gs.push_back(form.compose(S));
        HomogPoly Gt = Gs[2] - Rational(a) * Gs[0] - Rational(b) * Gs[1];
        auto T = centre_shift(sa, sb);
        HomogPoly A = (t * Gs[0] - z * Gt).compose(T);
        HomogPoly B = (t * Gs[1] - w * Gt).compose(T);
        const int n = A.degree();
        std::vector<Rational> values;
        for (int i = 0; i <= n * n; ++i) {
            values.push_back(sylvester_resultant(fibre_poly(A, Rational(i), Rational(1)), n,
                                                 fibre_poly(B, Rational(i), Rational(1)), n));
        }
        HomogPoly R = interpolate_binary(values, n * n);
        if (R.is_zero()) continue;

        std::vector<std::pair<Complex, Complex>> base; // (z', w') on the projection line
        UPoly u = binary_to_upoly(R);
        if (R.degree() > u.degree()) base.push_back({1.0, 0.0});
        for (const auto& [part, mult] : squarefree_decomposition(u)) {
            // high-degree parts have root clusters double precision cannot separate; split them first
            if (part.degree() <= 16) {
                for (Complex r : complex_roots(part)) base.push_back({r, 1.0});
                continue;
            }
            for (const auto& [q, m] : factor(part).factors) {
                for (Complex r : complex_roots(to_upoly(q))) base.push_back({r, 1.0});
            }
        }
        std::vector<ProjPoint> out;
        for (const auto& [zr, wr] : base) {
            for (Complex tr : complex_roots(fibre_poly(A, zr, wr))) {
                std::vector<Complex> x = transform_point({zr, wr, tr}, sa, sb);
                x[2] += Complex(a) * x[0] + Complex(b) * x[1];
                if (auto sol = newton.solve(std::move(x))) out.push_back(ProjPoint::inexact(*sol));
            }
        }
        return out;
    }
    throw Error(ErrorKind::degenerate, "fixed-point elimination degenerate in every tried coordinate system");
}

/// 1 is not an eigenvalue of dg(p): p is an isolated fixed point of multiplicity one.
inline bool is_simple_fixed(const Endomorphism& g, const ProjPoint& p) {
    auto J = differential_at(g, p, p.chart(), p.chart());
    const auto& m = J.matrix;
    Complex det = m.size() == 1 ? 1.0 - m[0][0] : (1.0 - m[0][0]) * (1.0 - m[1][1]) - m[0][1] * m[1][0];
    return std::abs(det) > 1e-6;
}

/// Newton from a grid of starts in every affine chart.
inline std::vector<ProjPoint> fixed_point_grid(const Endomorphism& g, const SolverConfig& cfg, int& dropped) {
    const int nv = g.num_vars();
    FixedPointNewton newton(g);
    std::vector<ProjPoint> out;
    for (int chart = 0; chart < nv; ++chart) {
        auto local = other_indices(nv, chart);
        for (int s = 0; s < cfg.grid * cfg.grid; ++s) {
            int i = s % cfg.grid, j = s / cfg.grid;
            std::vector<Complex> x(nv, 0.0);
            x[chart] = 1.0;
            if (nv == 2) {
                x[local[0]] = Complex(-1.0 + 2.0 * (i + 0.5) / cfg.grid, -1.0 + 2.0 * (j + 0.5) / cfg.grid);
            } else {
                x[local[0]] = Complex(-1.0 + 2.0 * (i + 0.5) / cfg.grid, 0.05 * ((i + j) % 3 - 1));
                x[local[1]] = Complex(-1.0 + 2.0 * (j + 0.5) / cfg.grid, 0.05 * ((i * j) % 3 - 1));
            }
            if (auto sol = newton.solve(std::move(x))) {
                out.push_back(ProjPoint::inexact(*sol));
            } else {
                ++dropped;
            }
        }
    }
    return out;
}

/// Exact rational point equal to p within 1e-9 and fixed by g^n exactly, if there is one.
inline std::optional<ProjPoint> rationalize_fixed(const Endomorphism& f, const ProjPoint& p, int n) {
    std::vector<Rational> q;
    for (const Complex& c : p.numeric()) {
        if (std::abs(c.imag()) > 1e-9) return std::nullopt;
        auto r = reconstruct_rational(c.real(), 1e-9, 10000);
        if (!r) return std::nullopt;
        q.push_back(*r);
    }
    ProjPoint e = ProjPoint::exact(std::move(q));
    if (orbit_point(f, e, n) == e) return e;
    return std::nullopt;
}

inline bool is_fixed(const Endomorphism& f, const ProjPoint& p, int n, double tol, double& residual) {
    if (p.is_exact()) {
        residual = 0.0;
        return orbit_point(f, p, n) == p;
    }
    ProjPoint q = ProjPoint::inexact(apply_n(f, p.numeric(), n));
    residual = p.chart_distance(q);
    return residual < tol;
}

inline bool same_point(const ProjPoint& a, const ProjPoint& b, double tol) {
    if (a.is_exact() && b.is_exact()) return a == b;
    return a.chart_distance(b) < tol;
}

} // namespace detail

/// Periodic points of period <= n_max with minimal periods, verified and classified.
///
/// For each n the fixed points of f^n are collected from eliminations in several coordinate
/// systems until the count reaches d^{2n} + d^n + 1 (resp. d^n + 1 on P^1) with every point simple,
/// which certifies completeness; otherwise a Newton grid is added and the level is reported
/// incomplete.
inline PeriodicSearch find_periodic(const Endomorphism& f, int n_max, const SolverConfig& cfg = {}) {
    if (n_max < 1 || n_max > 6) throw Error(ErrorKind::invalid_argument, "find_periodic: n_max must be in 1..6");
    PeriodicSearch out;
    std::vector<PeriodicPoint> found;
    for (int n = 1; n <= n_max; ++n) {
        long D = 1;
        for (int i = 0; i < n; ++i) D *= f.degree();
        if (D > cfg.max_solver_degree) {
            throw Error(ErrorKind::budget_exceeded, "find_periodic: d^" + std::to_string(n) + " = " + std::to_string(D) +
                                                        " exceeds solver degree budget " +
                                                        std::to_string(cfg.max_solver_degree));
        }
        Endomorphism g = iterate(f, n);
        const long expected = f.k() == 1 ? D + 1 : D * D + D + 1;
        std::vector<ProjPoint> level;
        bool all_simple = true;
        auto absorb = [&](std::vector<ProjPoint> cands) {
            for (auto p : cands) {
                if (!p.is_exact()) {
                    if (auto e = detail::rationalize_fixed(f, p, n)) p = *e;
                }
                double res = 0;
                if (!detail::is_fixed(f, p, n, cfg.residual_tol, res)) {
                    ++out.dropped;
                    continue;
                }
                bool dup = false;
                for (const auto& q : level) {
                    if (detail::same_point(q, p, cfg.cluster_tol)) {
                        dup = true;
                        break;
                    }
                }
                if (!dup) level.push_back(p);
            }
            all_simple = true;
            for (const auto& p : level) {
                if (!detail::is_simple_fixed(g, p)) all_simple = false;
            }
            return static_cast<long>(level.size()) == expected && all_simple;
        };
        bool complete = false;
        if (f.k() == 1) {
            complete = absorb(detail::fixed_point_candidates_p1(g, cfg));
            // P^1 candidates are exhaustive by construction
            if (!complete && !all_simple) complete = static_cast<long>(level.size()) <= expected;
        } else {
            for (int attempt = 0; attempt < 5 && !complete; ++attempt) {
                try {
                    complete = absorb(detail::fixed_point_candidates_p2(g, attempt));
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::degenerate && e.kind() != ErrorKind::solver_failure) throw;
                }
            }
        }
        if (!complete) {
            out.used_grid = true;
            complete = absorb(detail::fixed_point_grid(g, cfg, out.dropped));
        }
        if (!complete) out.incomplete_periods.push_back(n);

        for (const auto& p : level) {
            int minimal = n;
            for (int m = 1; m < n; ++m) {
                double r2 = 0;
                if (n % m == 0 && detail::is_fixed(f, p, m, cfg.residual_tol, r2)) {
                    minimal = m;
                    break;
                }
            }
            bool dup = false;
            for (const auto& q : found) {
                if (detail::same_point(q.point, p, cfg.cluster_tol)) {
                    dup = true;
                    break;
                }
            }
            if (dup) continue;
            PeriodicPoint pp;
            pp.point = p;
            pp.period = minimal;
            detail::is_fixed(f, p, minimal, cfg.residual_tol, pp.residual);
            found.push_back(std::move(pp));
        }
    }
    for (std::size_t i = 0; i < found.size(); ++i) {
        for (std::size_t j = i + 1; j < found.size(); ++j) {
            if (found[i].point.is_exact() && found[j].point.is_exact()) continue;
            if (found[i].point.chart_distance(found[j].point) < 10 * cfg.cluster_tol) ++out.ambiguous_clusters;
        }
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.period != b.period) return a.period < b.period;
        return a.point < b.point;
    });
    for (auto& pp : found) out.points.push_back(certify_superattracting(f, std::move(pp), cfg.classify_tol));
    return out;
}

/// Periodic points grouped into cycles (indices into `points`, in orbit order).
inline std::vector<std::vector<std::size_t>> group_cycles(const Endomorphism& f, const std::vector<PeriodicPoint>& points,
                                                          double tol = 1e-8) {
    std::vector<std::vector<std::size_t>> cycles;
    std::vector<bool> used(points.size(), false);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (used[i]) continue;
        std::vector<std::size_t> cyc{i};
        used[i] = true;
        ProjPoint cur = points[i].point;
        for (int s = 1; s < points[i].period; ++s) {
            cur = point_image(f, cur);
            for (std::size_t j = 0; j < points.size(); ++j) {
                if (!used[j] && points[j].period == points[i].period && detail::same_point(points[j].point, cur, tol * 100)) {
                    used[j] = true;
                    cyc.push_back(j);
                    break;
                }
            }
        }
        cycles.push_back(std::move(cyc));
    }
    return cycles;
}

} // namespace critfin
