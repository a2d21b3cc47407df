#pragma once

#include "postcritical.hpp"

#include <Eigen/Dense>

#include <random>
#include <string>
#include <vector>

namespace critfin {

/// l_1 + ... + l_n from a classification in which orders 1..n succeeded.
inline int ramification_bound(const ClassificationReport& rep, int n) {
    if (n < 1 || n > rep.k) throw Error(ErrorKind::invalid_argument, "ramification_bound: order must be in 1..k");
    int l = 0;
    for (int m = 1; m <= n; ++m) {
        const auto* o = rep.order(m);
        if (!o || !o->omega || o->verdict != OrderReport::Verdict::critically_finite) {
            throw Error(ErrorKind::invalid_argument, "ramification_bound: order " + std::to_string(m) + " data missing");
        }
        l += o->omega->l;
    }
    return l;
}

struct PreimageConfig {
    double residual_tol = 1e-8;  ///< chart distance between f(x) and the parent
    double cluster_tol = 1e-6;   ///< preimages closer than this are one point with multiplicity
    double member_tol = 1e-8;    ///< critical-set membership tolerance
    std::size_t max_nodes = 5000;
    int max_depth = 4;
    std::uint64_t seed = 0;
    IntersectConfig intersect;
};

struct PreimageNode {
    ProjPoint point;
    int multiplicity = 1;
    std::size_t parent = 0;                       ///< index in the previous level
    Membership critical = Membership::outside;    ///< in C_1
    Membership second = Membership::outside;      ///< in C_2 (when supplied)
};

/// Backward orbit tree: levels[0] is the root q, levels[j] the solutions of f(x) = parent.
struct PreimageTree {
    int depth = 0;
    std::vector<std::vector<PreimageNode>> levels;
    const ProjPoint& root() const { return levels[0][0].point; }
};

namespace detail {

/// Numeric system f(x) ~ y, written as y_r f_i(x) - y_i f_r(x) = 0 for i != r.
struct TargetSystem {
    std::vector<NumericForm> f;
    std::vector<std::vector<NumericForm>> df;
    std::vector<Complex> y;
    std::size_t r = 0;
    std::vector<std::size_t> rows;

    TargetSystem(const Endomorphism& map, const ProjPoint& target) : f(map.numeric_forms()), y(target.numeric()) {
        r = target.chart();
        for (std::size_t i = 0; i < f.size(); ++i) {
            std::vector<NumericForm> row;
            for (int j = 0; j < map.num_vars(); ++j) row.push_back(f[i].derivative(j));
            df.push_back(std::move(row));
            if (i != r) rows.push_back(i);
        }
    }

    void eval(const std::vector<Complex>& x, std::vector<Complex>& val, Eigen::MatrixXcd& jac) const {
        const std::size_t n = x.size();
        std::vector<Complex> fx(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) fx[i] = f[i](x);
        val.assign(rows.size(), 0.0);
        jac.setZero(rows.size(), n);
        for (std::size_t a = 0; a < rows.size(); ++a) {
            std::size_t i = rows[a];
            val[a] = y[r] * fx[i] - y[i] * fx[r];
            for (std::size_t j = 0; j < n; ++j) jac(a, j) = y[r] * df[i][j](x) - y[i] * df[r][j](x);
        }
    }
};

/// Total-degree homotopy from x_o^d = x_r^d (o != r) to the target system, tracked on a random
/// affine patch h . x = 1 with the gamma trick. Returns the d^k endpoints (nullopt for failed paths).
inline std::vector<std::optional<std::vector<Complex>>> track_preimages(const Endomorphism& map, const ProjPoint& target,
                                                                        std::mt19937_64& rng) {
    TargetSystem T(map, target);
    const int d = map.degree(), k = map.k();
    const std::size_t n = static_cast<std::size_t>(k) + 1;
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    auto rand_c = [&] { return Complex(U(rng), U(rng)); };
    const Complex gamma = std::polar(1.0, 2 * M_PI * (0.5 + 0.5 * U(rng)));
    std::vector<Complex> h(n);
    for (auto& v : h) v = rand_c();

    const std::size_t r = T.r;
    auto start_eval = [&](const std::vector<Complex>& x, std::vector<Complex>& val, Eigen::MatrixXcd& jac) {
        val.assign(T.rows.size(), 0.0);
        jac.setZero(T.rows.size(), n);
        for (std::size_t a = 0; a < T.rows.size(); ++a) {
            std::size_t o = T.rows[a];
            val[a] = std::pow(x[o], d) - std::pow(x[r], d);
            jac(a, o) = Complex(d) * std::pow(x[o], d - 1);
            jac(a, r) = -Complex(d) * std::pow(x[r], d - 1);
        }
    };
    // full system H(x, s) with patch row; also dH/ds
    auto system = [&](const std::vector<Complex>& x, double s, Eigen::VectorXcd& H, Eigen::MatrixXcd& J,
                      Eigen::VectorXcd* Hs) {
        std::vector<Complex> ve, vg;
        Eigen::MatrixXcd je, jg;
        T.eval(x, ve, je);
        start_eval(x, vg, jg);
        H.resize(n);
        J.resize(n, n);
        for (std::size_t a = 0; a < T.rows.size(); ++a) {
            H(a) = (1 - s) * gamma * vg[a] + s * ve[a];
            for (std::size_t j = 0; j < n; ++j) J(a, j) = (1 - s) * gamma * jg(a, j) + s * je(a, j);
        }
        Complex patch = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            patch += h[j] * x[j];
            J(n - 1, j) = h[j];
        }
        H(n - 1) = patch;
        if (Hs) {
            Hs->resize(n);
            for (std::size_t a = 0; a < T.rows.size(); ++a) (*Hs)(a) = ve[a] - gamma * vg[a];
            (*Hs)(n - 1) = 0.0;
        }
    };
    auto newton = [&](std::vector<Complex>& x, double s, int iters, double tol) {
        Eigen::VectorXcd H, Hs;
        Eigen::MatrixXcd J;
        for (int it = 0; it < iters; ++it) {
            system(x, s, H, J, nullptr);
            Eigen::VectorXcd dx = J.fullPivLu().solve(H);
            double norm = 0, scale = 1;
            for (std::size_t j = 0; j < n; ++j) {
                x[j] -= dx(j);
                norm = std::max(norm, std::abs(dx(j)));
                scale = std::max(scale, std::abs(x[j]));
            }
            if (!std::isfinite(norm)) return false;
            if (norm < tol * scale) return true;
        }
        return false;
    };

    // start solutions: x_r = 1, x_o = d-th roots of unity, rescaled onto the patch
    std::vector<std::vector<Complex>> starts;
    std::size_t total = 1;
    for (int i = 0; i < k; ++i) total *= static_cast<std::size_t>(d);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::vector<Complex> x(n, 0.0);
        x[r] = 1.0;
        std::size_t code = idx;
        for (std::size_t o : T.rows) {
            x[o] = std::polar(1.0, 2 * M_PI * static_cast<double>(code % d) / d);
            code /= d;
        }
        Complex hx = 0;
        for (std::size_t j = 0; j < n; ++j) hx += h[j] * x[j];
        for (auto& v : x) v /= hx;
        starts.push_back(std::move(x));
    }

    std::vector<std::optional<std::vector<Complex>>> out;
    for (auto x : starts) {
        double s = 0, ds = 0.02;
        bool ok = true;
        int streak = 0;
        while (s < 1.0) {
            double step = std::min(ds, 1.0 - s);
            Eigen::VectorXcd H, Hs;
            Eigen::MatrixXcd J;
            system(x, s, H, J, &Hs);
            Eigen::VectorXcd v = J.fullPivLu().solve(-Hs);
            std::vector<Complex> trial = x;
            for (std::size_t j = 0; j < n; ++j) trial[j] += step * v(j);
            bool conv = v.allFinite() && newton(trial, s + step, 4, 1e-10);
            if (conv) {
                x = trial;
                s += step;
                if (++streak >= 3) {
                    ds = std::min(0.1, 2 * ds);
                    streak = 0;
                }
            } else {
                streak = 0;
                ds /= 2;
                if (ds < 1e-12) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) newton(x, 1.0, 30, 1e-15);
        if (ok) {
            for (const auto& v : x) ok &= std::isfinite(std::abs(v));
        }
        out.push_back(ok ? std::optional<std::vector<Complex>>(x) : std::nullopt);
    }
    return out;
}

/// Preimages of an exact target through exact elimination.
inline std::vector<std::pair<ProjPoint, int>> exact_preimages(const Endomorphism& f, const ProjPoint& y,
                                                              const PreimageConfig& cfg) {
    const auto& F = f.forms();
    const auto& q = y.rational();
    std::vector<std::pair<ProjPoint, int>> out;
    if (f.k() == 1) {
        HomogPoly e = q[1] * F[0] - q[0] * F[1];
        for (const auto& g : split_binary(e, cfg.intersect.factor_cap)) {
            if (g.linear) {
                Rational a = g.linear->poly().coefficient({1, 0, 0}), b = g.linear->poly().coefficient({0, 1, 0});
                out.emplace_back(ProjPoint::exact(std::vector<Rational>{-b, a}), g.multiplicity);
            } else {
                for (Complex z : g.roots) out.emplace_back(ProjPoint::inexact({z, 1.0}), g.multiplicity);
            }
        }
        return out;
    }
    std::size_t r = y.chart();
    std::vector<HomogPoly> eqs;
    for (std::size_t i = 0; i < 3; ++i) {
        if (i != r) eqs.push_back(q[r] * F[i] - q[i] * F[r]);
    }
    for (const auto& ip : intersect_forms(eqs[0], eqs[1], cfg.intersect)) out.emplace_back(ip.point, ip.multiplicity);
    return out;
}

inline std::vector<std::pair<ProjPoint, int>> numeric_preimages(const Endomorphism& f, const ProjPoint& y,
                                                                const PreimageConfig& cfg, std::mt19937_64& rng) {
    std::vector<std::pair<ProjPoint, int>> out;
    for (const auto& end : track_preimages(f, y, rng)) {
        if (!end) continue;
        ProjPoint p = ProjPoint::inexact(*end);
        bool merged = false;
        for (auto& [q, m] : out) {
            if (q.chart_distance(p) < cfg.cluster_tol) {
                ++m;
                merged = true;
                break;
            }
        }
        if (!merged) out.emplace_back(p, 1);
    }
    return out;
}

} // namespace detail

/// Full backward tree of q to the given depth. Every parent must receive d^k preimages counted
/// with multiplicity, each mapping onto the parent within the residual tolerance.
inline PreimageTree preimage_tree(const Endomorphism& f, const ProjPoint& q, int depth, const PreimageConfig& cfg = {},
                                  const AlgebraicSet* C1 = nullptr, const AlgebraicSet* C2 = nullptr) {
    if (depth < 1 || depth > cfg.max_depth) {
        throw Error(ErrorKind::invalid_argument, "preimage_tree: depth must be in 1.." + std::to_string(cfg.max_depth));
    }
    if (q.dimension() != f.k()) throw Error(ErrorKind::invalid_argument, "preimage_tree: dimension mismatch");
    std::size_t per = 1, total = 1, level = 1;
    for (int i = 0; i < f.k(); ++i) per *= static_cast<std::size_t>(f.degree());
    for (int j = 0; j < depth; ++j) total += (level *= per);
    if (total > cfg.max_nodes) {
        throw Error(ErrorKind::budget_exceeded, "preimage_tree: " + std::to_string(total) + " nodes exceed budget " +
                                                    std::to_string(cfg.max_nodes));
    }
    std::mt19937_64 rng(cfg.seed);
    auto flag = [&](PreimageNode& nd) {
        if (C1) nd.critical = membership(*C1, nd.point, cfg.member_tol);
        if (C2 && !C2->empty()) nd.second = membership(*C2, nd.point, cfg.member_tol);
    };
    PreimageTree t;
    t.depth = depth;
    PreimageNode root{q, 1, 0};
    flag(root);
    t.levels.push_back({root});
    for (int j = 1; j <= depth; ++j) {
        std::vector<PreimageNode> next;
        for (std::size_t pi = 0; pi < t.levels[j - 1].size(); ++pi) {
            const ProjPoint& y = t.levels[j - 1][pi].point;
            auto pre = y.is_exact() ? detail::exact_preimages(f, y, cfg) : detail::numeric_preimages(f, y, cfg, rng);
            std::size_t count = 0;
            for (const auto& [p, m] : pre) {
                double dist = p.is_exact() && y.is_exact()
                                  ? (point_image(f, p) == y ? 0.0 : 1.0)
                                  : y.chart_distance(ProjPoint::inexact(f.apply(std::span<const Complex>(p.numeric()))));
                if (dist > cfg.residual_tol) continue;
                count += static_cast<std::size_t>(m);
                PreimageNode nd{p, m, pi};
                flag(nd);
                next.push_back(std::move(nd));
            }
            if (count != per) {
                throw Error(ErrorKind::solver_failure, "preimage_tree: " + std::to_string(count) + " of " +
                                                           std::to_string(per) + " preimages certified at level " +
                                                           std::to_string(j) + " for parent " + y.to_string());
            }
        }
        t.levels.push_back(std::move(next));
    }
    return t;
}

struct RamificationPath {
    std::size_t leaf = 0;        ///< index in the deepest level
    int count = 0;               ///< #(I)
    std::vector<int> strata;     ///< #(I_1), ..., #(I_n)
    bool undecided = false;
};

struct RamificationCertificate {
    enum class Verdict { all_within_bound, violation, not_applicable };

    int order = 1;
    int bound = 0;
    int depth = 0;
    Verdict verdict = Verdict::all_within_bound;
    std::string applicability;              ///< why the bound applies (or does not) at the root
    std::vector<std::size_t> level_sizes;   ///< distinct nodes per level
    std::vector<int> level_multiplicities;  ///< per level, preimages counted with multiplicity
    std::vector<RamificationPath> paths;
    int max_count = 0;
    int violations = 0;
    int undecided_paths = 0;
    std::vector<ProjPoint> violation_path;  ///< leaf first, root last
};

inline const char* to_string(RamificationCertificate::Verdict v) {
    switch (v) {
        case RamificationCertificate::Verdict::all_within_bound: return "all-within-bound";
        case RamificationCertificate::Verdict::violation: return "violation";
        case RamificationCertificate::Verdict::not_applicable: return "not-applicable";
    }
    return "unknown";
}

/// Counts critical passages along every backward path of the tree and compares with `bound`.
/// The tree must carry C_1 flags (and C_2 flags for stratified order-2 counts).
inline RamificationCertificate check_bounded_ramification(const PreimageTree& tree, int bound, int order = 1) {
    RamificationCertificate c;
    c.order = order;
    c.bound = bound;
    c.depth = tree.depth;
    for (const auto& lv : tree.levels) {
        c.level_sizes.push_back(lv.size());
        int m = 0;
        for (const auto& nd : lv) m += nd.multiplicity;
        c.level_multiplicities.push_back(m);
    }
    const auto& leaves = tree.levels[tree.depth];
    for (std::size_t li = 0; li < leaves.size(); ++li) {
        RamificationPath p;
        p.leaf = li;
        p.strata.assign(order, 0);
        std::size_t idx = li;
        for (int lev = tree.depth; lev >= 1; --lev) {
            const auto& nd = tree.levels[lev][idx];
            if (nd.critical == Membership::ambiguous || (order >= 2 && nd.second == Membership::ambiguous)) p.undecided = true;
            if (nd.critical == Membership::inside) {
                ++p.count;
                // stratum: C_2 points count toward I_2, the rest of C_1 toward I_1
                if (order >= 2 && nd.second == Membership::inside) {
                    ++p.strata[1];
                } else {
                    ++p.strata[0];
                }
            }
            idx = nd.parent;
        }
        if (p.undecided) {
            ++c.undecided_paths;
        } else {
            c.max_count = std::max(c.max_count, p.count);
            if (p.count > bound) {
                if (c.violations++ == 0) {
                    std::size_t j = li;
                    for (int lev = tree.depth; lev >= 0; --lev) {
                        c.violation_path.push_back(tree.levels[lev][j].point);
                        j = tree.levels[lev][j].parent;
                    }
                }
            }
        }
        c.paths.push_back(std::move(p));
    }
    c.verdict = c.violations ? RamificationCertificate::Verdict::violation
                             : RamificationCertificate::Verdict::all_within_bound;
    return c;
}

/// Which order the bound uses and the exclusion set for roots.
///
/// On P^2 the supplied C_2 consists of the isolated points of C_1 ∩ E_1, so the counting argument
/// covers roots off E_1 (which contains E_2). On P^1 the order-k case applies to roots off F_1.
struct RamificationContext {
    int order = 1;
    int bound = 0;
    AlgebraicSet excluded;
    std::string excluded_name;
    AlgebraicSet E;   ///< E_n, to label roots in E_n \ F_n
    AlgebraicSet C1;
    AlgebraicSet C2;
};

inline RamificationContext ramification_context(const ClassificationReport& rep) {
    RamificationContext ctx;
    ctx.C1 = rep.C1;
    ctx.order = rep.k == 2 && rep.critically_finite(2) ? 2 : 1;
    ctx.bound = ramification_bound(rep, ctx.order);
    const auto& o1 = *rep.order(1)->omega;
    if (rep.k == 1) {
        ctx.excluded = o1.F;
        ctx.excluded_name = "F_1";
    } else {
        ctx.excluded = o1.E;
        ctx.excluded_name = "E_1";
    }
    ctx.E = rep.order(ctx.order)->omega->E;
    if (ctx.order == 2) ctx.C2 = rep.order(2)->C;
    return ctx;
}

/// Full pipeline: applicability of the root, backward tree, and path counts.
inline RamificationCertificate certify_ramification(const Endomorphism& f, const RamificationContext& ctx,
                                                    const ProjPoint& q, int depth, const PreimageConfig& cfg = {}) {
    auto m = membership(ctx.excluded, q, cfg.member_tol);
    if (m != Membership::outside) {
        RamificationCertificate c;
        c.order = ctx.order;
        c.bound = ctx.bound;
        c.depth = depth;
        c.verdict = RamificationCertificate::Verdict::not_applicable;
        c.applicability = std::string(m == Membership::inside ? "root lies in " : "root within tolerance of ") +
                          ctx.excluded_name;
        return c;
    }
    auto tree = preimage_tree(f, q, depth, cfg, &ctx.C1, ctx.order >= 2 ? &ctx.C2 : nullptr);
    auto c = check_bounded_ramification(tree, ctx.bound, ctx.order);
    if (f.k() == 1 && membership(ctx.E, q, cfg.member_tol) != Membership::outside) {
        c.applicability = "order-k case: root in E_1 outside F_1";
    } else {
        c.applicability = "root outside " + ctx.excluded_name;
    }
    return c;
}

} // namespace critfin
