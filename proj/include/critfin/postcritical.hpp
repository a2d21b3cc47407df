#pragma once

#include "dynamics.hpp"
#include "geometry.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace critfin {

/// Forward orbit of a finite set of components under f. Node i maps to node `image`.
struct OrbitGraph {
    enum class Status { complete, budget_exceeded, undecided };

    struct Node {
        Component comp;
        std::size_t image = 0;
        bool origin = false; ///< node is one of the seeds
        int depth = 0;       ///< first iteration at which the node appears
    };

    std::vector<Node> nodes;
    Status status = Status::complete;
    std::vector<std::size_t> frontier; ///< nodes whose image was not computed (truncated graphs)
    std::string diagnostic;

    bool complete() const { return status == Status::complete; }

    std::optional<std::size_t> find(const Component& c, double tol) const {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (AlgebraicSet::same_component(nodes[i].comp, c, tol)) return i;
        }
        return std::nullopt;
    }

    /// Node sets of the periodic cycles, each in orbit order starting from its smallest index.
    std::vector<std::vector<std::size_t>> cycles() const {
        require_complete();
        std::vector<std::vector<std::size_t>> out;
        std::vector<int> state(nodes.size(), 0); // 0 unseen, 1 on current walk, 2 done
        for (std::size_t s = 0; s < nodes.size(); ++s) {
            std::vector<std::size_t> walk;
            std::size_t v = s;
            while (state[v] == 0) {
                state[v] = 1;
                walk.push_back(v);
                v = nodes[v].image;
            }
            if (state[v] == 1) {
                auto it = std::find(walk.begin(), walk.end(), v);
                std::vector<std::size_t> cyc(it, walk.end());
                std::rotate(cyc.begin(), std::min_element(cyc.begin(), cyc.end()), cyc.end());
                out.push_back(std::move(cyc));
            }
            for (auto u : walk) state[u] = 2;
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Nodes in f^{j-1}(D) = union over m >= j of f^m(seeds), for j >= 1.
    std::set<std::size_t> tail_union(int j) const {
        require_complete();
        std::set<std::size_t> out;
        for (std::size_t s = 0; s < nodes.size(); ++s) {
            if (!nodes[s].origin) continue;
            std::size_t v = s;
            for (int m = 0; m < j; ++m) v = nodes[v].image;
            while (out.insert(v).second) v = nodes[v].image;
        }
        return out;
    }

    void require_complete() const {
        if (!complete()) throw Error(ErrorKind::invalid_argument, "orbit graph is truncated: " + diagnostic);
    }
};

inline const char* to_string(OrbitGraph::Status s) {
    switch (s) {
        case OrbitGraph::Status::complete: return "complete";
        case OrbitGraph::Status::budget_exceeded: return "budget_exceeded";
        case OrbitGraph::Status::undecided: return "undecided";
    }
    return "unknown";
}

struct OrbitBudget {
    std::size_t max_nodes = 64;
    int max_depth = 200;        ///< iterations before an unclosed point orbit is undecided
    double point_tol = 1e-8;    ///< identification distance for inexact points
    double reverify_tol = 1e-6; ///< inexact cycles must stay this close during re-verification
    int reverify_iters = 50;
    std::size_t max_coefficient_bits = 4096; ///< curve images with larger coefficients count against the budget
};

namespace detail {

inline std::size_t coefficient_bits(const Component& c) {
    std::size_t bits = 0;
    if (!c.is_hypersurface()) return 0;
    for (const auto& [e, q] : c.form().terms()) bits = std::max(bits, mpz_sizeinbase(q.get_num_mpz_t(), 2));
    return bits;
}

/// Re-runs an inexact cycle for extra iterations; false when the orbit leaves the tolerance.
inline bool reverify_cycle(const Endomorphism& f, const OrbitGraph& g, const std::vector<std::size_t>& cyc,
                           const OrbitBudget& b) {
    bool inexact = false;
    for (auto v : cyc) inexact |= !g.nodes[v].comp.is_exact();
    if (!inexact) return true;
    ProjPoint x = g.nodes[cyc[0]].comp.pt();
    if (x.is_exact()) x = ProjPoint::inexact(x.numeric());
    for (int i = 1; i <= b.reverify_iters; ++i) {
        x = point_image(f, x);
        const ProjPoint& want = g.nodes[cyc[i % cyc.size()]].comp.pt();
        if (want.chart_distance(x) > b.reverify_tol) return false;
    }
    return true;
}

inline std::string list_nodes(const OrbitGraph& g, const std::vector<std::size_t>& idx) {
    std::string s;
    for (auto i : idx) s += (s.empty() ? "" : ", ") + g.nodes[i].comp.to_string();
    return s;
}

} // namespace detail

/// Breadth-first closure of `seeds` under the component image map. Hitting the node budget or the
/// depth cap yields a truncated graph whose status and frontier say why.
inline OrbitGraph build_orbit_graph(const Endomorphism& f, const AlgebraicSet& seeds, const OrbitBudget& budget = {}) {
    if (seeds.empty()) throw Error(ErrorKind::invalid_argument, "build_orbit_graph: no seeds");
    OrbitGraph g;
    for (const auto& c : seeds) {
        if (c.ambient_dimension() != f.k()) throw Error(ErrorKind::invalid_argument, "build_orbit_graph: dimension mismatch");
        g.nodes.push_back({c, 0, true, 0});
    }
    std::size_t next = 0;
    while (next < g.nodes.size()) {
        std::size_t v = next++;
        if (g.nodes[v].depth >= budget.max_depth) {
            g.status = OrbitGraph::Status::undecided;
            for (std::size_t u = v; u < g.nodes.size(); ++u) g.frontier.push_back(u);
            g.diagnostic = "orbit not closed after " + std::to_string(budget.max_depth) + " iterations; frontier: " +
                           detail::list_nodes(g, g.frontier);
            return g;
        }
        Component img = component_image(f, g.nodes[v].comp);
        if (auto hit = g.find(img, budget.point_tol)) {
            g.nodes[v].image = *hit;
            continue;
        }
        const bool too_big = detail::coefficient_bits(img) > budget.max_coefficient_bits;
        if (g.nodes.size() >= budget.max_nodes || too_big) {
            g.status = OrbitGraph::Status::budget_exceeded;
            for (std::size_t u = v; u < g.nodes.size(); ++u) g.frontier.push_back(u);
            g.diagnostic = "not critically finite within budget " +
                           (too_big ? std::to_string(budget.max_coefficient_bits) + " coefficient bits"
                                    : std::to_string(budget.max_nodes) + " nodes") +
                           "; frontier: " + detail::list_nodes(g, g.frontier);
            return g;
        }
        g.nodes[v].image = g.nodes.size();
        g.nodes.push_back({std::move(img), 0, false, g.nodes[v].depth + 1});
    }
    for (const auto& cyc : g.cycles()) {
        if (!detail::reverify_cycle(f, g, cyc, budget)) {
            g.status = OrbitGraph::Status::undecided;
            g.diagnostic = "inexact cycle failed re-verification: " + detail::list_nodes(g, cyc);
            return g;
        }
    }
    return g;
}

/// Eventual image E of the post-critical set, its stabilization index and critical-cycle part.
struct OmegaData {
    AlgebraicSet E;
    int l = 1;
    AlgebraicSet Eprime;
    AlgebraicSet F;
    std::vector<std::vector<std::size_t>> cycles;   ///< graph cycles making up E
    std::vector<bool> critical_cycle;                ///< per cycle: some member lies in the critical set
    int undecided_memberships = 0;                   ///< point members in the membership ambiguity band
};

namespace detail {

inline AlgebraicSet node_set(const OrbitGraph& g, const std::set<std::size_t>& idx) {
    AlgebraicSet s;
    for (auto i : idx) s.insert(g.nodes[i].comp);
    return s;
}

/// Whether a component lies inside the critical set C1 (given as its irreducible components).
inline Membership inside_critical(const Component& c, const AlgebraicSet& C1, double tol) {
    if (c.is_hypersurface()) return C1.has(c) ? Membership::inside : Membership::outside;
    return membership(C1, c.pt(), tol);
}

} // namespace detail

/// E = union of periodic cycles, l = least l >= 1 with f^{l-1}(D) = f^l(D), F = cycles meeting C1.
inline OmegaData omega_limit(const OrbitGraph& g, const AlgebraicSet& C1, double tol = 1e-8) {
    g.require_complete();
    OmegaData out;
    out.cycles = g.cycles();
    std::set<std::size_t> e_nodes;
    for (const auto& cyc : out.cycles) e_nodes.insert(cyc.begin(), cyc.end());
    out.E = detail::node_set(g, e_nodes);

    bool exact = std::all_of(g.nodes.begin(), g.nodes.end(), [](const auto& n) { return n.comp.is_exact(); });
    for (int l = 1;; ++l) {
        auto a = g.tail_union(l), b = g.tail_union(l + 1);
        bool equal = exact ? set_equal(detail::node_set(g, a), detail::node_set(g, b)) : a == b;
        if (equal) {
            out.l = l;
            break;
        }
        if (l > static_cast<int>(g.nodes.size()) + 1) throw Error(ErrorKind::solver_failure, "omega_limit: no stabilization");
    }

    for (const auto& cyc : out.cycles) {
        bool critical = false;
        for (auto v : cyc) {
            auto m = detail::inside_critical(g.nodes[v].comp, C1, tol);
            if (m == Membership::inside) critical = true;
            if (m == Membership::ambiguous) ++out.undecided_memberships;
        }
        out.critical_cycle.push_back(critical);
        for (auto v : cyc) (critical ? out.F : out.Eprime).insert(g.nodes[v].comp);
    }
    return out;
}

struct ClassifyConfig {
    std::size_t max_curve_nodes = 64;
    std::size_t max_point_nodes = 512;
    int orbit_cap = 200;
    double point_tol = 1e-8;
    double reverify_tol = 1e-6;
    int reverify_iters = 50;
    std::size_t max_coefficient_bits = 4096;
    int max_order = 2;
    IntersectConfig intersect;
    FactorConfig factor;
};

/// Data for one order n of the inductive definition.
struct OrderReport {
    enum class Verdict { critically_finite, not_critically_finite_within_budget, undecided };

    int order = 1;
    Verdict verdict = Verdict::undecided;
    AlgebraicSet C;                  ///< C_n
    OrbitGraph graph;
    std::optional<OmegaData> omega;
    std::optional<bool> n_critically_finite;
    std::optional<bool> direct_check; ///< no E_n component inside C_1, tested by divisibility / membership
    std::string diagnostic;
};

inline const char* to_string(OrderReport::Verdict v) {
    switch (v) {
        case OrderReport::Verdict::critically_finite: return "critically_finite";
        case OrderReport::Verdict::not_critically_finite_within_budget: return "not_critically_finite_within_budget";
        case OrderReport::Verdict::undecided: return "undecided";
    }
    return "unknown";
}

struct ClassificationReport {
    int k = 2;
    AlgebraicSet C1;
    HomogPoly critical_equation;
    std::vector<OrderReport> orders; ///< order n at index n-1; order 2 only after order 1 succeeded

    const OrderReport* order(int n) const {
        return n >= 1 && n <= static_cast<int>(orders.size()) ? &orders[n - 1] : nullptr;
    }
    bool critically_finite(int n) const {
        auto o = order(n);
        return o && o->verdict == OrderReport::Verdict::critically_finite;
    }
    bool n_critically_finite(int n) const {
        auto o = order(n);
        return o && o->n_critically_finite.value_or(false);
    }
    bool budget_exhausted() const {
        return std::any_of(orders.begin(), orders.end(), [](const auto& o) {
            return o.verdict == OrderReport::Verdict::not_critically_finite_within_budget;
        });
    }
};

namespace detail {

/// Direct test that no component of E lies in the critical set: divisibility of the critical
/// equation for hypersurfaces, evaluation for points.
inline bool no_component_in_critical(const AlgebraicSet& E, const HomogPoly& crit, double tol) {
    for (const auto& c : E) {
        if (c.is_hypersurface()) {
            HomogPoly q;
            if (crit.divides_into(c.form(), q)) return false;
        } else if (c.pt().is_exact()) {
            if (crit.evaluate(std::span<const Rational>(c.pt().rational())) == 0) return false;
        } else if (scaled_residual(crit, c.pt()) < tol) {
            return false;
        }
    }
    return true;
}

inline OrderReport analyze_order(const Endomorphism& f, int n, AlgebraicSet seeds, const AlgebraicSet& C1,
                                 const HomogPoly& crit, std::size_t max_nodes, const ClassifyConfig& cfg) {
    OrderReport r;
    r.order = n;
    r.C = std::move(seeds);
    if (r.C.empty()) {
        // empty C_n: D_n and E_n are empty, trivially algebraic
        r.verdict = OrderReport::Verdict::critically_finite;
        r.omega = OmegaData{};
        r.omega->l = 1;
        r.n_critically_finite = true;
        r.direct_check = true;
        r.graph.status = OrbitGraph::Status::complete;
        return r;
    }
    OrbitBudget b{max_nodes, cfg.orbit_cap, cfg.point_tol, cfg.reverify_tol, cfg.reverify_iters, cfg.max_coefficient_bits};
    r.graph = build_orbit_graph(f, r.C, b);
    if (!r.graph.complete()) {
        r.verdict = r.graph.status == OrbitGraph::Status::budget_exceeded
                        ? OrderReport::Verdict::not_critically_finite_within_budget
                        : OrderReport::Verdict::undecided;
        r.diagnostic = r.graph.diagnostic;
        return r;
    }
    r.omega = omega_limit(r.graph, C1, cfg.point_tol);
    if (r.omega->undecided_memberships > 0) {
        r.verdict = OrderReport::Verdict::undecided;
        r.diagnostic = "critical-set membership of a cycle point is within the ambiguity band";
        return r;
    }
    r.verdict = OrderReport::Verdict::critically_finite;
    r.n_critically_finite = r.omega->F.empty();
    r.direct_check = no_component_in_critical(r.omega->E, crit, cfg.point_tol);
    if (*r.direct_check != *r.n_critically_finite) {
        throw Error(ErrorKind::solver_failure, "critical-cycle analysis disagrees with the direct containment test");
    }
    return r;
}

/// C_2 = C_1 ∩ E_1 as a point set: pairwise intersections of distinct components.
inline AlgebraicSet second_critical_set(const AlgebraicSet& C1, const AlgebraicSet& E1, const IntersectConfig& cfg) {
    AlgebraicSet out;
    for (const auto& a : C1) {
        for (const auto& b : E1) {
            if (a == b) continue;
            for (const auto& ip : curve_intersect(a, b, cfg)) out.insert(Component::point(ip.point));
        }
    }
    return out;
}

} // namespace detail

/// Orders 1 and (on P^2) 2 of the inductive critical-finiteness classification.
inline ClassificationReport classify(const Endomorphism& f, const ClassifyConfig& cfg = {}) {
    ClassificationReport rep;
    rep.k = f.k();
    rep.critical_equation = critical_equation(f);
    rep.C1 = critical_set(f, cfg.factor);
    rep.orders.push_back(
        detail::analyze_order(f, 1, rep.C1, rep.C1, rep.critical_equation, cfg.max_curve_nodes, cfg));
    if (rep.k == 2 && cfg.max_order >= 2 && rep.critically_finite(1)) {
        auto C2 = detail::second_critical_set(rep.C1, rep.orders[0].omega->E, cfg.intersect);
        rep.orders.push_back(
            detail::analyze_order(f, 2, std::move(C2), rep.C1, rep.critical_equation, cfg.max_point_nodes, cfg));
    }
    return rep;
}

} // namespace critfin
