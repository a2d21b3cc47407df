#include "test_util.hpp"

using namespace critfin;
using testutil::P;

namespace {

Component curve(const char* s) { return Component::hypersurface(P(s)); }
Component p1(const char* s) { return Component::hypersurface(P(s, 2)); }
Component vertex(long a, long b, long c) { return Component::point(ProjPoint::exact({a, b, c})); }

/// Image of every component, as a set.
AlgebraicSet image_set(const Endomorphism& f, const AlgebraicSet& s) {
    AlgebraicSet out;
    for (const auto& c : s) out.insert(component_image(f, c));
    return out;
}

void expect_invariant(const Endomorphism& f, const OrderReport& o, const char* what) {
    ASSERT_TRUE(o.omega.has_value()) << what;
    EXPECT_TRUE(set_equal(image_set(f, o.omega->E), o.omega->E)) << what;
    EXPECT_TRUE(set_equal(image_set(f, o.omega->F), o.omega->F)) << what;
    EXPECT_TRUE(set_equal(image_set(f, o.omega->Eprime), o.omega->Eprime)) << what;
}

} // namespace

TEST(Classify, SkewProductOrderOne) {
    auto f = testutil::fixture("f");
    auto rep = classify(f);
    EXPECT_TRUE(set_equal(rep.C1, AlgebraicSet({curve("z"), curve("w"), curve("t")})));
    ASSERT_TRUE(rep.critically_finite(1));
    const auto& o = *rep.order(1);
    ASSERT_TRUE(o.graph.complete());
    // z <-> z^2 - w t, w and t fixed
    auto node = [&](const char* s) { return *o.graph.find(curve(s), 1e-8); };
    EXPECT_EQ(o.graph.nodes.size(), 4u);
    EXPECT_EQ(o.graph.nodes[node("z")].image, node("z^2 - w*t"));
    EXPECT_EQ(o.graph.nodes[node("z^2 - w*t")].image, node("z"));
    EXPECT_EQ(o.graph.nodes[node("w")].image, node("w"));
    EXPECT_EQ(o.graph.nodes[node("t")].image, node("t"));
    EXPECT_EQ(o.omega->l, 1);
    EXPECT_EQ(o.omega->E.size(), 4u);
    EXPECT_TRUE(set_equal(o.omega->F, o.omega->E));
    EXPECT_TRUE(o.omega->Eprime.empty());
    EXPECT_FALSE(rep.n_critically_finite(1));
    EXPECT_EQ(o.direct_check, false);
    expect_invariant(f, o, "f order 1");
}

TEST(Classify, PowerMapOrdersOneAndTwo) {
    auto f = testutil::fixture("power");
    auto rep = classify(f);
    AlgebraicSet lines({curve("z"), curve("w"), curve("t")});
    ASSERT_TRUE(rep.critically_finite(1));
    ASSERT_TRUE(rep.critically_finite(2));
    EXPECT_EQ(rep.order(1)->omega->l, 1);
    EXPECT_EQ(rep.order(2)->omega->l, 1);
    EXPECT_TRUE(set_equal(rep.order(1)->omega->F, lines));
    AlgebraicSet vertices({vertex(1, 0, 0), vertex(0, 1, 0), vertex(0, 0, 1)});
    EXPECT_TRUE(set_equal(rep.order(2)->C, vertices));
    for (const auto& v : vertices) EXPECT_EQ(component_image(f, v), v);
    EXPECT_FALSE(rep.order(2)->omega->F.empty());
    EXPECT_FALSE(rep.n_critically_finite(1));
    EXPECT_FALSE(rep.n_critically_finite(2));
    expect_invariant(f, *rep.order(1), "power order 1");
    expect_invariant(f, *rep.order(2), "power order 2");
}

TEST(Classify, SkewProductOrderTwoInvariance) {
    auto f = testutil::fixture("f");
    auto rep = classify(f);
    ASSERT_GE(rep.orders.size(), 2u);
    if (rep.order(2)->omega) expect_invariant(f, *rep.order(2), "f order 2");
}

TEST(Classify, QuadraticPolynomial) {
    auto f = testutil::fixture("quadratic");
    auto rep = classify(f);
    ASSERT_EQ(rep.orders.size(), 1u);
    ASSERT_TRUE(rep.critically_finite(1));
    const auto& om = *rep.order(1)->omega;
    // 0 -> -2 -> 2 -> 2, infinity fixed
    EXPECT_TRUE(set_equal(om.E, AlgebraicSet({p1("z - 2*w"), p1("w")})));
    EXPECT_TRUE(set_equal(om.F, AlgebraicSet({p1("w")})));
    EXPECT_EQ(om.l, 2);
    EXPECT_FALSE(rep.n_critically_finite(1));
    expect_invariant(f, *rep.order(1), "quadratic");
}

TEST(Classify, LattesIsOneCriticallyFinite) {
    auto f = testutil::fixture("lattes");
    auto rep = classify(f);
    ASSERT_TRUE(rep.critically_finite(1));
    EXPECT_TRUE(rep.n_critically_finite(1));
    EXPECT_TRUE(rep.order(1)->omega->F.empty());
    EXPECT_EQ(rep.order(1)->direct_check, true);
    expect_invariant(f, *rep.order(1), "lattes");
}

TEST(Classify, CuspidalFamilyIterateHasFixedCriticalComponent) {
    for (int d : {3, 4}) {
        auto g = testutil::fixture("g" + std::to_string(d));
        auto g2 = iterate(g, 2);
        std::string cusp = "z^" + std::to_string(d) + " - w^" + std::to_string(d - 1) + "*t";
        Component c = curve(cusp.c_str());
        EXPECT_TRUE(critical_set(g2).has(c)) << d;
        EXPECT_EQ(curve_image(g2, c), c) << d;
        auto rep = classify(g);
        EXPECT_TRUE(rep.critically_finite(1)) << d;
    }
}

TEST(Classify, NodeBudgetGivesBudgetVerdict) {
    auto g = testutil::fixture("g3");
    ClassifyConfig cfg;
    cfg.max_curve_nodes = 2;
    auto rep = classify(g, cfg);
    EXPECT_EQ(rep.order(1)->verdict, OrderReport::Verdict::not_critically_finite_within_budget);
    EXPECT_TRUE(rep.budget_exhausted());
    EXPECT_FALSE(rep.order(1)->graph.complete());
    EXPECT_FALSE(rep.order(1)->graph.frontier.empty());
    EXPECT_THROW(rep.order(1)->graph.cycles(), Error);
    EXPECT_THROW(omega_limit(rep.order(1)->graph, rep.C1), Error);
}

TEST(OrbitGraphOps, TailUnionsShrinkToCycles) {
    auto f = testutil::fixture("quadratic");
    AlgebraicSet seeds({p1("z")});
    auto g = build_orbit_graph(f, seeds);
    ASSERT_TRUE(g.complete());
    EXPECT_EQ(g.nodes.size(), 3u); // 0, -2, 2
    EXPECT_EQ(g.tail_union(1).size(), 2u);
    EXPECT_EQ(g.tail_union(2).size(), 1u);
    EXPECT_EQ(g.tail_union(3).size(), 1u);
    auto cyc = g.cycles();
    ASSERT_EQ(cyc.size(), 1u);
    EXPECT_EQ(g.nodes[cyc[0][0]].comp, p1("z - 2*w"));
}
