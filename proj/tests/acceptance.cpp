// One pass/fail line per acceptance criterion; exit status 1 when any fails.

#include "critfin/io.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace critfin;

namespace {

Endomorphism fixture(const std::string& name) {
    return endomorphism_from_map(read_map_file(std::string(CRITFIN_SOURCE_DIR) + "/fixtures/" + name + ".json"));
}

Component curve(const char* s) { return Component::hypersurface(poly_parse(s, 3)); }
Component p1(const char* s) { return Component::hypersurface(poly_parse(s, 2)); }

/// Collects failed conditions for one criterion.
struct Checks {
    std::vector<std::string> failed;
    void operator()(bool ok, const std::string& what) {
        if (!ok) failed.push_back(what);
    }
};

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Outcome finish(Checks& c, const std::string& detail) {
    Outcome o;
    o.pass = c.failed.empty();
    o.detail = detail;
    for (const auto& f : c.failed) o.detail += "; FAILED: " + f;
    return o;
}

Outcome criterion_skew_product() {
    Checks ok;
    auto t0 = Clock::now();
    auto f = fixture("f");
    ok(critical_equation(f).degree() == 3, "Jacobian degree 3");
    auto rep = classify(f);
    ok(set_equal(rep.C1, AlgebraicSet({curve("z"), curve("w"), curve("t")})), "critical set {z, w, t}");
    ok(rep.critically_finite(1), "critically finite of order 1");
    if (rep.critically_finite(1)) {
        const auto& o = *rep.order(1);
        auto node = [&](const char* s) { return o.graph.find(curve(s), 1e-8); };
        auto z = node("z"), q = node("z^2 - w*t"), w = node("w"), t = node("t");
        bool shape = o.graph.nodes.size() == 4 && z && q && w && t;
        if (shape) {
            shape = o.graph.nodes[*z].image == *q && o.graph.nodes[*q].image == *z && o.graph.nodes[*w].image == *w &&
                    o.graph.nodes[*t].image == *t;
        }
        ok(shape, "orbit graph z <-> z^2 - wt, w and t fixed");
        ok(o.omega->l == 1, "l_1 = 1");
    }
    ok(!rep.n_critically_finite(1), "not 1-critically finite");
    auto J = differential_at(f, ProjPoint::exact({0, 0, 1}));
    std::vector<std::vector<Rational>> expected{{Rational(0), Rational(-1)}, {Rational(0), Rational(0)}};
    ok(J.exact && J.exact_matrix == expected, "exact differential [[0,-1],[0,0]] at [0:0:1]");
    double secs = seconds_since(t0);
    ok(secs < 10.0, "runtime under 10 s");
    std::ostringstream d;
    d << "skew product f: classification and differential in " << secs << " s";
    return finish(ok, d.str());
}

Outcome criterion_cuspidal_family() {
    Checks ok;
    std::ostringstream d;
    d << "g_d family:";
    for (int deg : {3, 4}) {
        auto t0 = Clock::now();
        auto g = fixture("g" + std::to_string(deg));
        std::string cusp_s = "z^" + std::to_string(deg) + " - w^" + std::to_string(deg - 1) + "*t";
        Component line = curve("z"), cusp = curve(cusp_s.c_str());
        ok(curve_image(g, line) == cusp, "g" + std::to_string(deg) + "({z=0}) = {" + cusp_s + "}");
        ok(curve_image(g, cusp) == line, "g" + std::to_string(deg) + "({" + cusp_s + "}) = {z=0}");
        auto g2 = iterate(g, 2);
        ok(critical_set(g2).has(cusp) && curve_image(g2, cusp) == cusp,
           "critical set of g" + std::to_string(deg) + "^2 has the fixed component " + cusp_s);
        double secs = seconds_since(t0);
        if (deg == 4) ok(secs < 60.0, "d = 4 runtime under 60 s");
        d << " d=" << deg << " in " << secs << " s";
    }
    return finish(ok, d.str());
}

Outcome criterion_power_map() {
    Checks ok;
    auto t0 = Clock::now();
    auto f = fixture("power");
    auto rep = classify(f);
    ok(rep.critically_finite(1) && rep.critically_finite(2), "critically finite of orders 1 and 2");
    AlgebraicSet lines({curve("z"), curve("w"), curve("t")});
    AlgebraicSet vertices({Component::point(ProjPoint::exact({1, 0, 0})), Component::point(ProjPoint::exact({0, 1, 0})),
                           Component::point(ProjPoint::exact({0, 0, 1}))});
    if (rep.critically_finite(1) && rep.critically_finite(2)) {
        ok(rep.order(1)->omega->l == 1 && rep.order(2)->omega->l == 1, "l_1 = l_2 = 1");
        ok(set_equal(rep.order(1)->omega->F, lines), "F_1 = the three lines");
        ok(set_equal(rep.order(2)->C, vertices), "C_2 = the three vertices");
        ok(!rep.order(2)->omega->F.empty(), "F_2 nonempty");
    }
    for (const auto& v : vertices) ok(component_image(f, v) == v, "vertex " + v.to_string() + " fixed");
    ok(!rep.n_critically_finite(1) && !rep.n_critically_finite(2), "not 1- or 2-critically finite");
    auto search = find_periodic(f, 1);
    int certified = 0;
    for (const auto& pp : search.points) {
        for (const auto& v : vertices) {
            if (pp.point == v.pt() && pp.classification == CycleClass::superattracting_zero_differential &&
                differential_at(f, pp.point).is_zero()) {
                ++certified;
            }
        }
    }
    ok(certified == 3, "three vertices certified superattracting with zero differential");
    std::ostringstream d;
    d << "power map: orders 1-2 and vertex certificates in " << seconds_since(t0) << " s";
    return finish(ok, d.str());
}

Outcome criterion_p1() {
    Checks ok;
    auto q = fixture("quadratic");
    auto rep = classify(q);
    ok(rep.critically_finite(1), "z^2 - 2 critically finite of order 1");
    if (rep.critically_finite(1)) {
        const auto& om = *rep.order(1)->omega;
        ok(set_equal(om.E, AlgebraicSet({p1("z - 2*w"), p1("w")})), "E_1 = {2, infinity}");
        ok(set_equal(om.F, AlgebraicSet({p1("w")})), "F_1 = {infinity}");
        ok(om.l == 2, "l_1 = 2");
    }
    ok(!rep.n_critically_finite(1), "z^2 - 2 not 1-critically finite");

    auto t0 = Clock::now();
    auto lattes = fixture("lattes");
    auto lrep = classify(lattes);
    ok(lrep.n_critically_finite(1), "Lattes map 1-critically finite");
    auto targets = make_targets(lattes, find_periodic(lattes, 1));
    OrbitConfig cfg;
    cfg.max_iter = 500;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    int attracted = 0;
    for (int i = 0; i < 1000; ++i) {
        auto v = sample_orbit(lattes, ProjPoint::inexact({Complex(u(rng), u(rng)), 1.0}), targets, cfg);
        if (v.outcome == OrbitVerdict::Outcome::converged &&
            targets.cycles[static_cast<std::size_t>(v.cycle)].multiplier_modulus < 1.0) {
            ++attracted;
        }
    }
    ok(attracted == 0, "no Lattes orbit converges to an attracting cycle");
    double secs = seconds_since(t0);
    ok(secs < 30.0, "Lattes runtime under 30 s");
    std::ostringstream d;
    d << "P^1: z^2 - 2 omega data; Lattes " << attracted << "/1000 attracted in " << secs << " s";
    return finish(ok, d.str());
}

Outcome criterion_ramification() {
    Checks ok;
    auto t0 = Clock::now();
    int roots = 0, max_count = 0;
    for (const char* name : {"f", "power"}) {
        auto f = fixture(name);
        auto rep = classify(f);
        auto ctx = ramification_context(rep);
        std::mt19937_64 rng(77);
        std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
        std::size_t per = static_cast<std::size_t>(f.degree() * f.degree());
        int taken = 0;
        while (taken < 5) {
            ProjPoint q = ProjPoint::exact({Rational(num(rng), den(rng)), Rational(num(rng), den(rng)), Rational(1)});
            if (membership(ctx.E, q, 0.0) != Membership::outside || membership(ctx.excluded, q, 0.0) != Membership::outside) {
                continue;
            }
            ++taken;
            ++roots;
            PreimageConfig cfg;
            cfg.seed = 77;
            auto c = certify_ramification(f, ctx, q, 3, cfg);
            std::string tag = std::string(name) + " root " + q.to_string();
            ok(c.verdict == RamificationCertificate::Verdict::all_within_bound, tag + " within bound");
            ok(c.violations == 0 && c.undecided_paths == 0, tag + " no violations or undecided paths");
            ok(c.max_count <= ctx.bound, tag + " #(I) <= sum of l_m");
            std::size_t expect = 1;
            bool levels = c.level_multiplicities.size() == 4;
            for (std::size_t j = 0; levels && j < 4; ++j, expect *= per) {
                levels = static_cast<std::size_t>(c.level_multiplicities[j]) == expect;
            }
            ok(levels, tag + " d^k preimages per parent");
            max_count = std::max(max_count, c.max_count);
        }
    }
    double secs = seconds_since(t0);
    ok(secs < 120.0, "runtime under 120 s");
    std::ostringstream d;
    d << "ramification: " << roots << " roots at depth 3, max #(I) " << max_count << ", " << secs << " s";
    return finish(ok, d.str());
}

Outcome criterion_render() {
    Checks ok;
    auto t0 = Clock::now();
    auto f = fixture("f");
    auto rep = classify(f);
    AlgebraicSet E;
    for (const auto& o : rep.orders) {
        if (o.omega) {
            for (const auto& c : o.omega->E) E.insert(c);
        }
    }
    auto targets = make_targets(f, find_periodic(f, 2), E);
    auto img = render_slice(f, SliceSpec::standard(2, 128, 128), targets);
    const auto& s = img.summary;
    double of_decided = s.decided() ? static_cast<double>(s.converged_superattracting) / s.decided() : 0.0;
    ok(s.decided() > 0 && of_decided >= 0.99, "at least 99% of decided pixels superattracting");
    ok(s.converged == s.converged_superattracting, "every converged pixel targets a superattracting cycle");
    std::ostringstream d;
    d << "render f 128x128: " << s.converged_superattracting << "/" << s.decided() << " decided pixels superattracting, "
      << s.undecided << " undecided, " << seconds_since(t0) << " s";
    return finish(ok, d.str());
}

int run_suite(const std::string& binary, const std::string& filter) {
    std::string cmd = std::string(CRITFIN_TEST_DIR) + "/" + binary + " --gtest_filter='" + filter + "' > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome criterion_properties() {
    Checks ok;
    auto t0 = Clock::now();
    const std::pair<const char*, const char*> suites[] = {
        {"test_algebra", "FactorProperty.*:ResultantProperty.*"},
        {"test_geometry", "PushforwardProperty.*:BezoutProperty.*"},
        {"test_dynamics", "ChainRuleProperty.*:ChartIndependence.*"},
        {"test_postcritical", "Classify.*"},
        {"test_fatou", "ProjectiveInvariance.*:Render.DeterministicBytesAndSizes"},
    };
    for (const auto& [bin, filter] : suites) ok(run_suite(bin, filter) == 0, std::string(bin) + " " + filter);
    std::ostringstream d;
    d << "property suites: " << std::size(suites) - ok.failed.size() << "/" << std::size(suites) << " binaries green in "
      << seconds_since(t0) << " s";
    return finish(ok, d.str());
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"1", criterion_skew_product}, {"2", criterion_cuspidal_family}, {"3", criterion_power_map},
        {"4", criterion_p1},           {"5", criterion_ramification},    {"6", criterion_render},
        {"7", criterion_properties}};
    bool all = true;
    for (const auto& [id, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.detail = std::string("exception: ") + e.what();
        }
        all = all && o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail << std::endl;
    }
    return all ? 0 : 1;
}
