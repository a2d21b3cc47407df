#include "test_util.hpp"

using namespace critfin;
using testutil::P;
using testutil::Q;

namespace {

UPoly from_roots(const std::vector<Rational>& roots) {
    UPoly p = UPoly::constant(1);
    for (const auto& r : roots) p = p * UPoly(std::vector<Rational>{-r, Rational(1)});
    return p;
}

} // namespace

TEST(Parse, CanonicalRenderingRoundTrips) {
    for (const char* s : {"z^2 - w*t", "-w^3", "(z^2 + w^2)^2", "3/4*z^2*t - 7*w^3 + t^3", "z - 2*w + 1/3*t"}) {
        HomogPoly p = P(s);
        EXPECT_EQ(poly_parse(p.to_string()), p) << s;
    }
    EXPECT_EQ(P("(z+w)^2"), P("z^2 + 2*z*w + w^2"));
}

TEST(Parse, RejectsMalformedInput) {
    auto kind = [](const char* s, int nvars) {
        try {
            poly_parse(s, nvars);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::invalid_argument;
    };
    EXPECT_EQ(kind("z^2 -", 3), ErrorKind::syntax);
    EXPECT_EQ(kind("2z", 3), ErrorKind::syntax);
    EXPECT_EQ(kind("z^2 + x", 3), ErrorKind::syntax);
    EXPECT_EQ(kind("z*t", 2), ErrorKind::syntax);
    EXPECT_EQ(kind("(z + w", 3), ErrorKind::syntax);
    EXPECT_EQ(kind("z^2 + w", 3), ErrorKind::inhomogeneous);
}

TEST(Endomorphism, RejectsCommonZero) {
    EXPECT_THROW(
        {
            try {
                testutil::map_of({"z^2", "z*w", "t^2"});
            } catch (const Error& e) {
                EXPECT_EQ(e.kind(), ErrorKind::not_a_morphism);
                throw;
            }
        },
        Error);
    EXPECT_NO_THROW(testutil::map_of({"z^2 - w*t", "w^2", "t^2"}));
}

TEST(UPolyGcd, ModularAgreesWithEuclid) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> c(-20, 20);
    for (int trial = 0; trial < 25; ++trial) {
        auto rnd = [&](int deg) {
            std::vector<Rational> v;
            for (int i = 0; i <= deg; ++i) v.emplace_back(c(rng));
            if (v.back() == 0) v.back() = 1;
            return UPoly(v);
        };
        UPoly common = rnd(trial % 6);
        UPoly a = rnd(5 + trial % 4) * common, b = rnd(3 + trial % 5) * common;
        UPoly g = gcd(a, b);
        EXPECT_EQ(g, gcd_euclid(a, b));
        EXPECT_TRUE(divmod(g, common.monic()).second.is_zero() || common.degree() == 0);
    }
}

TEST(UPolyFactor, SquarefreeDecompositionMultiplicities) {
    // (x - 1)^3 (x + 2) (x^2 + 1)^2
    UPoly q = UPoly(std::vector<Rational>{1, 0, 1});
    UPoly f = from_roots({1, 1, 1, -2}) * q * q;
    auto parts = squarefree_decomposition(f);
    UPoly rebuilt = UPoly::constant(1);
    for (const auto& [p, m] : parts) {
        for (int i = 0; i < m; ++i) rebuilt = rebuilt * p;
    }
    EXPECT_EQ(rebuilt, f.monic());
    ASSERT_EQ(parts.size(), 3u);
    EXPECT_EQ(parts[0].first, from_roots({-2}));
    EXPECT_EQ(parts[1].first, q);
    EXPECT_EQ(parts[2].first, from_roots({1}));
}

TEST(UPolyRoots, ClusteredHighDegreeRootsAreSeparated) {
    // 30 rational roots k/7 + 1/k^2: close together near the small ones
    std::vector<Rational> roots;
    for (int k = 1; k <= 30; ++k) roots.push_back(Q(k, 7) + Q(1, k * k));
    auto found = complex_roots(from_roots(roots));
    ASSERT_EQ(found.size(), roots.size());
    for (const auto& r : roots) {
        double best = 1e9;
        for (auto z : found) best = std::min(best, std::abs(z - Complex(to_double(r), 0)));
        EXPECT_LT(best, 1e-9) << r.get_str();
    }
}

// factor reassembly: unit * prod(factor^m) equals the input, every factor irreducible and dividing it
TEST(FactorProperty, Reassembly) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<HomogPoly> planted;
        int pieces = 2 + trial % 3;
        HomogPoly prod = P("1");
        for (int i = 0; i < pieces; ++i) {
            HomogPoly g = testutil::random_form(rng, 3, 1 + (trial + i) % 2, 4);
            planted.push_back(g);
            prod = prod * g;
        }
        if (trial % 4 == 0) prod = prod * planted[0];
        prod = Q(3, 2) * prod;
        auto fac = factor(prod);
        EXPECT_EQ(fac.expand(3), prod) << prod.to_string();
        int total = 0;
        for (const auto& [g, m] : fac.factors) {
            HomogPoly q;
            EXPECT_TRUE(prod.divides_into(g, q));
            EXPECT_TRUE(is_irreducible(g));
            total += m * g.degree();
        }
        EXPECT_EQ(total, prod.degree());
        for (const auto& g : planted) {
            // each planted factor is a product of reported factors; degree 1 ones appear verbatim
            if (g.degree() == 1) {
                bool seen = false;
                for (const auto& [h, m] : fac.factors) seen = seen || h.proportional_to(g);
                EXPECT_TRUE(seen) << g.to_string();
            }
        }
    }
}

TEST(FactorProperty, BinaryFormsSplitIntoRoots) {
    // (z - 2w)^2 (3z + w) (z^2 + w^2)
    HomogPoly f = P("(z - 2*w)^2*(3*z + w)*(z^2 + w^2)", 2);
    auto fac = factor(f);
    EXPECT_EQ(fac.expand(2), f);
    std::map<std::string, int> got;
    for (const auto& [g, m] : fac.factors) got[g.normalized().to_string()] = m;
    EXPECT_EQ(got[P("z - 2*w", 2).normalized().to_string()], 2);
    EXPECT_EQ(got[P("3*z + w", 2).normalized().to_string()], 1);
    EXPECT_EQ(got[P("z^2 + w^2", 2).normalized().to_string()], 1);
}

TEST(Resultant, BinaryMatchesRootProductFormula) {
    // Res(a, b) = lc(a)^deg b lc(b)^deg a prod (alpha_i - beta_j) for a, b split over Q
    std::vector<Rational> ra{1, -2, Q(1, 3)}, rb{5, Q(-1, 2)};
    UPoly a = Rational(2) * from_roots(ra), b = Rational(-3) * from_roots(rb);
    Rational expected = Rational(2 * 2) * Rational(-27);
    for (const auto& x : ra) {
        for (const auto& y : rb) expected *= x - y;
    }
    EXPECT_EQ(sylvester_resultant(a, 3, b, 2), expected);
    HomogPoly A = upoly_to_binary(a, 3), B = upoly_to_binary(b, 2);
    EXPECT_EQ(resultant({A, B}), expected);
}

TEST(Resultant, DiagonalFormsAndHomogeneity) {
    auto z = P("z"), w = P("w"), t = P("t");
    EXPECT_EQ(resultant({z.pow(2), w.pow(3), t.pow(2)}), 1);
    // Res(c F0, F1, F2) = c^(d1 d2) Res(F0, F1, F2)
    std::vector<HomogPoly> F{P("z^2 - w*t + 3*t^2"), P("w^2 + z*t"), P("t^2 - 2*z*w + z^2")};
    Rational r = resultant(std::span<const HomogPoly>(F));
    ASSERT_NE(r, 0);
    EXPECT_EQ(resultant({Rational(3) * F[0], F[1], F[2]}), Rational(81) * r);
}

// 20 constructed cases: 10 with a planted common zero (resultant 0), 10 images of diagonal
// monomial systems under invertible substitutions (no common zero, resultant nonzero)
TEST(ResultantProperty, VanishesIffCommonZero) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> small(-3, 3);
    for (int trial = 0; trial < 10; ++trial) {
        const int nvars = trial < 4 ? 2 : 3;
        std::vector<Rational> p;
        for (int i = 0; i < nvars; ++i) p.emplace_back(small(rng));
        if (std::all_of(p.begin(), p.end(), [](const Rational& v) { return v == 0; })) p[0] = 1;
        // linear forms vanishing at p, multiplied by random forms
        std::vector<HomogPoly> through;
        for (int i = 0; i < nvars; ++i) {
            for (int j = i + 1; j < nvars; ++j) {
                Poly l(nvars);
                Exponent ei{0, 0, 0}, ej{0, 0, 0};
                ei[static_cast<std::size_t>(i)] = 1;
                ej[static_cast<std::size_t>(j)] = 1;
                l.add_term(ei, p[static_cast<std::size_t>(j)]);
                l.add_term(ej, -p[static_cast<std::size_t>(i)]);
                if (!l.is_zero()) through.push_back(HomogPoly(std::move(l)));
            }
        }
        std::vector<HomogPoly> forms;
        for (int k = 0; k < nvars; ++k) {
            int d = 1 + (trial + k) % 3;
            HomogPoly acc(nvars);
            for (const auto& l : through) acc = acc + l * testutil::random_form(rng, nvars, d - 1, 3);
            if (acc.is_zero()) acc = through[0].pow(static_cast<unsigned>(d));
            forms.push_back(acc);
        }
        for (const auto& F : forms) ASSERT_EQ(F.evaluate(std::span<const Rational>(p)), 0);
        EXPECT_EQ(resultant(std::span<const HomogPoly>(forms)), 0) << "planted zero, trial " << trial;
        if (nvars == 3) {
            EXPECT_FALSE(resultant_nonzero_modular(std::span<const HomogPoly>(forms)));
        }
    }
    for (int trial = 0; trial < 10; ++trial) {
        const int nvars = trial < 4 ? 2 : 3;
        auto subs = testutil::random_substitution(rng, nvars);
        std::vector<HomogPoly> forms;
        for (int k = 0; k < nvars; ++k) {
            HomogPoly x = HomogPoly::variable(nvars, k);
            forms.push_back(x.pow(static_cast<unsigned>(1 + (trial + k) % 3)).compose(subs));
        }
        EXPECT_NE(resultant(std::span<const HomogPoly>(forms)), 0) << "no common zero, trial " << trial;
        // the modular certificate may abstain but must never certify a vanishing resultant
        if (resultant_nonzero_modular(std::span<const HomogPoly>(forms))) SUCCEED();
    }
}
