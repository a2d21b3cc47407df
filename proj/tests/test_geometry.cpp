#include "test_util.hpp"

using namespace critfin;
using testutil::P;
using testutil::Q;

namespace {

Component curve(const char* s) { return Component::hypersurface(P(s)); }

/// Points on the curve F = 0 over the lines z = a, w = b (complex fibre roots in t).
std::vector<ProjPoint> sample_curve(const HomogPoly& F, std::mt19937_64& rng, int fibres) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<ProjPoint> out;
    for (int i = 0; i < fibres; ++i) {
        Complex z0(u(rng), u(rng)), w0(u(rng), u(rng));
        auto c = detail::fibre_poly(F, z0, w0);
        while (c.size() > 1 && std::abs(c.back()) < 1e-12) c.pop_back();
        if (c.size() < 2) continue;
        for (Complex t : complex_roots(c)) out.push_back(ProjPoint::inexact({z0, w0, t}));
    }
    return out;
}

} // namespace

TEST(CriticalSet, QuadraticSkewProductHasThreeLines) {
    auto f = testutil::fixture("f");
    EXPECT_EQ(critical_equation(f).degree(), 3);
    AlgebraicSet expected({curve("z"), curve("w"), curve("t")});
    EXPECT_TRUE(set_equal(critical_set(f), expected));
}

TEST(CriticalSet, PowerMapAndP1) {
    EXPECT_TRUE(set_equal(critical_set(testutil::fixture("power")), AlgebraicSet({curve("z"), curve("w"), curve("t")})));
    auto q = testutil::fixture("quadratic");
    AlgebraicSet c = critical_set(q);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_TRUE(contains(c, ProjPoint::exact({0, 1})));
    EXPECT_TRUE(contains(c, ProjPoint::exact({1, 0})));
}

TEST(CurveImage, CuspidalFamilySwapsTwoCurves) {
    for (int d : {3, 4}) {
        auto g = testutil::fixture("g" + std::to_string(d));
        std::string cusp = "z^" + std::to_string(d) + " - w^" + std::to_string(d - 1) + "*t";
        Component line = curve("z");
        Component c = curve(cusp.c_str());
        EXPECT_EQ(curve_image(g, line), c) << d;
        EXPECT_EQ(curve_image(g, c), line) << d;
    }
}

TEST(CurveImage, LinesUnderPowerMap) {
    auto f = testutil::fixture("power");
    EXPECT_EQ(curve_image(f, curve("z")), curve("z"));
    EXPECT_EQ(curve_image(f, curve("z - w")), curve("z - w"));
    // z = w + t squared: (X - Y - Z)^2 = 4 Y Z
    EXPECT_EQ(curve_image(f, curve("z - w - t")), curve("(z - w - t)^2 - 4*w*t"));
}

TEST(PushforwardProperty, ImagePointsSatisfyImageEquation) {
    std::mt19937_64 rng(7);
    const char* maps[] = {"f", "power", "g3"};
    const char* curves[] = {"z - w - t", "z^2 - w*t + t^2", "z + 2*w - 3*t", "w^2 - z*t"};
    for (const char* m : maps) {
        auto f = testutil::fixture(m);
        for (const char* cs : curves) {
            Component c = curve(cs);
            Component img = curve_image(f, c);
            EXPECT_EQ((f.degree() * c.degree()) % img.degree(), 0) << m << " " << cs;
            for (const auto& p : sample_curve(c.form(), rng, 3)) {
                ProjPoint q = point_image(f, p);
                EXPECT_LT(detail::scaled_residual(img.form(), q), 1e-8) << m << " " << cs << " at " << p.to_string();
            }
        }
    }
}

TEST(PushforwardProperty, P1OrbitImages) {
    auto q = testutil::fixture("quadratic");
    // +-sqrt(2) both map to 0
    Component orbit = Component::hypersurface(P("z^2 - 2*w^2", 2));
    Component img = component_image(q, orbit);
    EXPECT_EQ(img, Component::hypersurface(P("z", 2)));
    Component pt = Component::hypersurface(P("z - 2*w", 2));
    EXPECT_EQ(component_image(q, pt), pt);
}

TEST(Membership, ExactAndToleranceGrading) {
    AlgebraicSet s({curve("z^2 - w*t")});
    EXPECT_EQ(membership(s, ProjPoint::exact({1, 1, 1}), 0.0), Membership::inside);
    EXPECT_EQ(membership(s, ProjPoint::exact({1, 2, 1}), 0.0), Membership::outside);
    EXPECT_EQ(membership(s, ProjPoint::inexact({1.0, 1.0, 1.0 + 1e-12}), 1e-9), Membership::inside);
    EXPECT_EQ(membership(s, ProjPoint::inexact({1.0, 1.0, 1.0 + 5e-9}), 1e-9), Membership::ambiguous);
    EXPECT_EQ(membership(s, ProjPoint::inexact({1.0, 1.0, 1.5}), 1e-9), Membership::outside);
    AlgebraicSet pts({Component::point(ProjPoint::exact({0, 0, 1}))});
    EXPECT_TRUE(contains(pts, ProjPoint::exact({0, 0, 5})));
    EXPECT_FALSE(contains(pts, ProjPoint::exact({0, 1, 5})));
}

TEST(AlgebraicSetOps, InsertDeduplicatesAndRejectsMixedAmbient) {
    AlgebraicSet s;
    EXPECT_TRUE(s.insert(curve("z - w")));
    EXPECT_FALSE(s.insert(curve("2*z - 2*w")));
    EXPECT_EQ(s.size(), 1u);
    EXPECT_THROW(s.insert(Component::point(ProjPoint::exact({1, 0}))), Error);
}

TEST(BezoutProperty, MultiplicitiesSumToDegreeProduct) {
    std::mt19937_64 rng(11);
    struct Case {
        const char* a;
        const char* b;
    };
    const Case fixed[] = {{"z", "w"},
                          {"z^2 - w*t", "z"},
                          {"z^2 - w*t", "w"}, // tangency
                          {"z^3 - w^2*t", "z^2 - w*t"},
                          {"z*w - t^2", "z^2 + w^2 - 2*t^2"},
                          {"w^2*t - z^3 - z*t^2", "z"}};
    for (const auto& c : fixed) {
        HomogPoly a = P(c.a), b = P(c.b);
        auto pts = intersect_forms(a, b);
        int total = 0;
        for (const auto& ip : pts) {
            total += ip.multiplicity;
            EXPECT_LT(detail::scaled_residual(a, ip.point), 1e-8) << c.a << " / " << c.b;
            EXPECT_LT(detail::scaled_residual(b, ip.point), 1e-8) << c.a << " / " << c.b;
        }
        EXPECT_EQ(total, a.degree() * b.degree()) << c.a << " / " << c.b;
    }
    for (int trial = 0; trial < 6; ++trial) {
        int m = 1 + trial % 3, n = 1 + (trial + 1) % 3;
        HomogPoly a = testutil::random_form(rng, 3, m, 4), b = testutil::random_form(rng, 3, n, 4);
        auto pts = intersect_forms(a, b);
        int total = 0;
        for (const auto& ip : pts) {
            total += ip.multiplicity;
            EXPECT_LT(detail::scaled_residual(a, ip.point), 1e-7);
            EXPECT_LT(detail::scaled_residual(b, ip.point), 1e-7);
        }
        EXPECT_EQ(total, m * n) << "random trial " << trial;
    }
}

TEST(BezoutProperty, TangencyMultiplicity) {
    auto pts = intersect_forms(P("z^2 - w*t"), P("w"));
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_EQ(pts[0].multiplicity, 2);
    EXPECT_EQ(pts[0].point, ProjPoint::exact({0, 0, 1}));
    EXPECT_THROW(curve_intersect(curve("z"), curve("z")), Error);
}
