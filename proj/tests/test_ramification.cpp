#include "test_util.hpp"

using namespace critfin;
using testutil::P;

namespace {

std::vector<ProjPoint> random_roots_off(const AlgebraicSet& excluded, std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
    std::vector<ProjPoint> out;
    while (static_cast<int>(out.size()) < count) {
        std::vector<Rational> x{testutil::Q(num(rng), den(rng)), testutil::Q(num(rng), den(rng)), Rational(1)};
        ProjPoint p = ProjPoint::exact(x);
        if (membership(excluded, p, 0.0) == Membership::outside) out.push_back(p);
    }
    return out;
}

std::size_t per_parent(const Endomorphism& f) {
    std::size_t n = 1;
    for (int i = 0; i < f.k(); ++i) n *= static_cast<std::size_t>(f.degree());
    return n;
}

} // namespace

TEST(RamificationBound, SumsStabilizationIndices) {
    auto rep = classify(testutil::fixture("power"));
    EXPECT_EQ(ramification_bound(rep, 1), 1);
    EXPECT_EQ(ramification_bound(rep, 2), 2);
    auto ctx = ramification_context(rep);
    EXPECT_EQ(ctx.order, 2);
    EXPECT_EQ(ctx.bound, 2);
    auto q = classify(testutil::fixture("quadratic"));
    EXPECT_EQ(ramification_bound(q, 1), 2);
    EXPECT_THROW(ramification_bound(q, 2), Error);
}

TEST(RamificationSampling, RandomRootsStayWithinBound) {
    for (const char* name : {"f", "power"}) {
        auto f = testutil::fixture(name);
        auto rep = classify(f);
        auto ctx = ramification_context(rep);
        for (const auto& q : random_roots_off(ctx.excluded, 17, 5)) {
            PreimageConfig cfg;
            cfg.seed = 3;
            auto c = certify_ramification(f, ctx, q, 3, cfg);
            EXPECT_EQ(c.verdict, RamificationCertificate::Verdict::all_within_bound) << name << " " << q.to_string();
            EXPECT_EQ(c.violations, 0);
            EXPECT_EQ(c.undecided_paths, 0);
            EXPECT_LE(c.max_count, ctx.bound);
            ASSERT_EQ(c.level_multiplicities.size(), 4u);
            std::size_t expected = 1;
            for (int j = 0; j <= 3; ++j) {
                EXPECT_EQ(static_cast<std::size_t>(c.level_multiplicities[static_cast<std::size_t>(j)]), expected);
                expected *= per_parent(f);
            }
        }
    }
}

TEST(PreimageTreeProperty, ChildrenMapOntoParentsAndFillEachFibre) {
    auto f = testutil::fixture("f");
    auto rep = classify(f);
    for (const auto& q : random_roots_off(rep.order(1)->omega->E, 99, 2)) {
        auto t = preimage_tree(f, q, 2, {}, &rep.C1);
        for (std::size_t lev = 1; lev < t.levels.size(); ++lev) {
            std::vector<int> per(t.levels[lev - 1].size(), 0);
            for (const auto& nd : t.levels[lev]) {
                const auto& parent = t.levels[lev - 1][nd.parent].point;
                ProjPoint img = ProjPoint::inexact(f.apply(std::span<const Complex>(nd.point.numeric())));
                EXPECT_LT(parent.chart_distance(img), 1e-8);
                per[nd.parent] += nd.multiplicity;
            }
            for (int m : per) EXPECT_EQ(m, 4);
        }
    }
}

TEST(PreimageTreeProperty, PathCountsGrowWithDepth) {
    auto f = testutil::fixture("power");
    auto rep = classify(f);
    auto ctx = ramification_context(rep);
    ProjPoint q = ProjPoint::exact({2, 3, 5});
    int previous = 0;
    for (int depth = 1; depth <= 3; ++depth) {
        auto c = certify_ramification(f, ctx, q, depth);
        EXPECT_GE(c.max_count, previous);
        previous = c.max_count;
    }
}

TEST(BoundedRamification, CriticalPassageViolatesZeroBound) {
    auto f = testutil::fixture("power");
    auto C1 = critical_set(f);
    // [0:1:4] = f([0:1:2]), whose fibre meets the line z = 0 with multiplicity 2
    auto t = preimage_tree(f, ProjPoint::exact({0, 1, 4}), 1, {}, &C1);
    auto c = check_bounded_ramification(t, 0);
    EXPECT_EQ(c.verdict, RamificationCertificate::Verdict::violation);
    EXPECT_GT(c.violations, 0);
    ASSERT_EQ(c.violation_path.size(), 2u);
    EXPECT_EQ(c.violation_path.back(), ProjPoint::exact({0, 1, 4}));
    EXPECT_EQ(check_bounded_ramification(t, 1).verdict, RamificationCertificate::Verdict::all_within_bound);
    int total = 0;
    for (const auto& nd : t.levels[1]) {
        total += nd.multiplicity;
        EXPECT_EQ(nd.critical, Membership::inside);
        EXPECT_EQ(nd.multiplicity, 2);
    }
    EXPECT_EQ(total, 4);
}

TEST(BoundedRamification, ApplicabilityOfRoots) {
    auto f = testutil::fixture("f");
    auto ctx = ramification_context(classify(f));
    auto c = certify_ramification(f, ctx, ProjPoint::exact({0, 1, 1}), 2);
    EXPECT_EQ(c.verdict, RamificationCertificate::Verdict::not_applicable);

    auto q = testutil::fixture("quadratic");
    auto qctx = ramification_context(classify(q));
    EXPECT_EQ(certify_ramification(q, qctx, ProjPoint::exact({1, 0}), 2).verdict,
              RamificationCertificate::Verdict::not_applicable);
    auto inside_e = certify_ramification(q, qctx, ProjPoint::exact({2, 1}), 4);
    EXPECT_EQ(inside_e.verdict, RamificationCertificate::Verdict::all_within_bound);
    EXPECT_NE(inside_e.applicability.find("order-k"), std::string::npos);
    EXPECT_LE(inside_e.max_count, qctx.bound);
}

TEST(PreimageTreeLimits, DepthAndNodeBudget) {
    auto f = testutil::fixture("f");
    ProjPoint q = ProjPoint::exact({2, 3, 5});
    PreimageConfig cfg;
    EXPECT_THROW(preimage_tree(f, q, 0, cfg), Error);
    cfg.max_nodes = 10;
    try {
        preimage_tree(f, q, 2, cfg);
        FAIL() << "expected a budget error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::budget_exceeded);
    }
}
