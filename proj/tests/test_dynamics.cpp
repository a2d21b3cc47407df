#include "test_util.hpp"

using namespace critfin;
using testutil::P;
using testutil::Q;

namespace {

using RMat = std::vector<std::vector<Rational>>;

RMat rmul(const RMat& a, const RMat& b) {
    RMat c(a.size(), std::vector<Rational>(b[0].size(), Rational(0)));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b[0].size(); ++j) {
            for (std::size_t l = 0; l < b.size(); ++l) c[i][j] += a[i][l] * b[l][j];
        }
    }
    return c;
}

std::vector<std::size_t> charts_of(const ProjPoint& p) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < p.numeric().size(); ++i) {
        if (std::abs(p.numeric()[i]) > 1e-3) out.push_back(i);
    }
    return out;
}

/// Differential of f^n along the cycle of p with chart i_j at the j-th member (closing at i_0).
std::vector<std::vector<Complex>> cycle_differential(const Endomorphism& f, const ProjPoint& p, int n,
                                                     const std::vector<std::size_t>& charts) {
    auto cyc = cycle_of(f, p, n);
    std::vector<std::vector<Complex>> m;
    for (int j = 0; j < n; ++j) {
        auto J = differential_at(f, cyc[static_cast<std::size_t>(j)], charts[static_cast<std::size_t>(j)],
                                 charts[static_cast<std::size_t>((j + 1) % n)]);
        m = j == 0 ? J.matrix : detail::matmul(J.matrix, m);
    }
    return m;
}

} // namespace

TEST(Differential, SkewProductOriginIsNilpotentNonzero) {
    auto f = testutil::fixture("f");
    auto J = differential_at(f, ProjPoint::exact({0, 0, 1}));
    ASSERT_TRUE(J.exact);
    RMat expected{{Q(0), Q(-1)}, {Q(0), Q(0)}};
    EXPECT_EQ(J.exact_matrix, expected);
    auto search = find_periodic(f, 1);
    bool seen = false;
    for (const auto& pp : search.points) {
        if (pp.point == ProjPoint::exact({0, 0, 1})) {
            seen = true;
            EXPECT_EQ(pp.classification, CycleClass::superattracting_nilpotent_nonzero);
            EXPECT_EQ(*pp.exact_trace, 0);
            EXPECT_EQ(*pp.exact_det, 0);
        }
    }
    EXPECT_TRUE(seen);
}

TEST(Differential, ChartErrors) {
    auto f = testutil::fixture("f");
    EXPECT_THROW(differential_at(f, ProjPoint::exact({0, 0, 1}), 0, 2), Error);
    EXPECT_THROW(differential_at(f, ProjPoint::exact({0, 1}), 0, 0), Error);
}

TEST(ChainRuleProperty, ExactCompositionDifferential) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> c(-4, 4);
    const char* names[] = {"f", "power", "g3"};
    int checked = 0;
    for (const char* fa : names) {
        for (const char* ga : names) {
            auto f = testutil::fixture(fa), g = testutil::fixture(ga);
            if (f.degree() * g.degree() > 9) continue;
            Endomorphism fg = Endomorphism::compose(f, g);
            for (int trial = 0; trial < 4; ++trial) {
                ProjPoint p = ProjPoint::exact({c(rng), c(rng), c(rng) == 0 ? 1 : 2 + trial});
                ProjPoint gp = point_image(g, p);
                ProjPoint fgp = point_image(f, gp);
                for (std::size_t s : charts_of(p)) {
                    for (std::size_t mid : charts_of(gp)) {
                        for (std::size_t r : charts_of(fgp)) {
                            auto lhs = differential_at(fg, p, s, r).exact_matrix;
                            auto rhs = rmul(differential_at(f, gp, mid, r).exact_matrix,
                                            differential_at(g, p, s, mid).exact_matrix);
                            EXPECT_EQ(lhs, rhs) << fa << " o " << ga << " at " << p.to_string();
                            ++checked;
                        }
                    }
                }
            }
        }
    }
    EXPECT_GT(checked, 50);
}

TEST(ChartIndependence, TraceDeterminantAndNilpotency) {
    std::mt19937_64 rng(3);
    for (const char* name : {"f", "power", "g3"}) {
        auto f = testutil::fixture(name);
        auto search = find_periodic(f, f.degree() == 2 ? 2 : 1);
        for (const auto& pp : search.points) {
            const int n = pp.period;
            auto cyc = cycle_of(f, pp.point, n);
            for (int trial = 0; trial < 4; ++trial) {
                std::vector<std::size_t> charts;
                for (const auto& q : cyc) {
                    auto ok = charts_of(q);
                    charts.push_back(ok[std::uniform_int_distribution<std::size_t>(0, ok.size() - 1)(rng)]);
                }
                auto m = cycle_differential(f, pp.point, n, charts);
                Complex tr = m[0][0] + m[1][1];
                Complex det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                double scale = 1.0 + std::abs(pp.trace) + std::abs(pp.det);
                EXPECT_LT(std::abs(tr - pp.trace), 1e-7 * scale) << name << " " << pp.point.to_string();
                EXPECT_LT(std::abs(det - pp.det), 1e-7 * scale) << name << " " << pp.point.to_string();
                if (is_superattracting(pp.classification)) {
                    auto m2 = detail::matmul(m, m);
                    EXPECT_LT(detail::max_abs(m2), 1e-8) << name << " " << pp.point.to_string();
                }
            }
        }
    }
}

TEST(PeriodicPoints, PowerMapCountsAndVertices) {
    auto f = testutil::fixture("power");
    auto s = find_periodic(f, 2);
    EXPECT_TRUE(s.incomplete_periods.empty());
    ASSERT_EQ(s.points.size(), 21u);
    int period1 = 0, superattracting = 0;
    for (const auto& pp : s.points) {
        if (pp.period == 1) ++period1;
        if (is_superattracting(pp.classification)) {
            ++superattracting;
            EXPECT_EQ(pp.classification, CycleClass::superattracting_zero_differential);
        }
    }
    EXPECT_EQ(period1, 7);
    EXPECT_EQ(superattracting, 3);
    for (auto v : {ProjPoint::exact({1, 0, 0}), ProjPoint::exact({0, 1, 0}), ProjPoint::exact({0, 0, 1})}) {
        EXPECT_TRUE(differential_at(f, v).is_zero());
    }
}

TEST(PeriodicPoints, QuadraticMultipliers) {
    auto f = testutil::fixture("quadratic");
    auto s = find_periodic(f, 1);
    ASSERT_EQ(s.points.size(), 3u);
    // fixed points of z^2 - 2: 2 (multiplier 4), -1 (multiplier -2), infinity (0)
    for (const auto& pp : s.points) {
        ASSERT_TRUE(pp.point.is_exact());
        ASSERT_TRUE(pp.exact_det.has_value());
        const auto& x = pp.point.rational();
        if (x[1] == 0) {
            EXPECT_EQ(*pp.exact_det, 0);
        } else if (x[0] / x[1] == 2) {
            EXPECT_EQ(*pp.exact_det, 4);
        } else {
            EXPECT_EQ(x[0] / x[1], -1);
            EXPECT_EQ(*pp.exact_det, -2);
        }
    }
}

TEST(PeriodicPoints, LattesCyclesRepel) {
    auto f = testutil::fixture("lattes");
    auto s = find_periodic(f, 1);
    EXPECT_EQ(s.points.size(), 5u);
    for (const auto& pp : s.points) EXPECT_GT(pp.multiplier_modulus, 1.0) << pp.point.to_string();
}

TEST(PeriodicPoints, SolverDegreeBudget) {
    auto g = testutil::fixture("g3");
    try {
        find_periodic(g, 3);
        FAIL() << "expected a budget error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::budget_exceeded);
    }
    EXPECT_THROW(iterate(g, 6, 100), Error);
}

TEST(Iterate, MatchesRepeatedEvaluation) {
    auto f = testutil::fixture("f");
    auto f3 = iterate(f, 3);
    EXPECT_EQ(f3.degree(), 8);
    ProjPoint p = ProjPoint::exact({3, -2, 7});
    EXPECT_EQ(point_image(f3, p), orbit_point(f, p, 3));
}
