// critfin: classify, certify and render polynomial endomorphisms of P^1 and P^2.
//
// Exit codes: 0 ok, 2 invalid input, 3 budget exhausted, 4 solver shortfall, 5 unwritable output.

#include "critfin/io.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace critfin;

namespace {

enum Exit { ok = 0, invalid = 2, budget = 3, shortfall = 4, unwritable = 5 };

int exit_for(ErrorKind k) {
    switch (k) {
        case ErrorKind::budget_exceeded: return budget;
        case ErrorKind::solver_failure:
        case ErrorKind::degenerate: return shortfall;
        default: return invalid;
    }
}

struct Unwritable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Loaded {
    MapFile file;
    Endomorphism f;
};

Loaded load_map(const std::string& path) {
    auto m = read_map_file(path);
    auto f = endomorphism_from_map(m);
    return {std::move(m), std::move(f)};
}

/// Config file values, then flags that were given explicitly.
AnalysisConfig load_config(const std::string& path, std::optional<std::uint64_t> seed) {
    AnalysisConfig c;
    if (!path.empty()) {
        try {
            c = config_from_json(read_json_file(path));
        } catch (const json::exception& e) {
            throw Error(ErrorKind::invalid_argument, "config: " + std::string(e.what()));
        }
    }
    if (seed) c.seed = *seed;
    c.propagate();
    return c;
}

void emit(const json& j, const std::string& path) {
    auto text = j.dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
    } else if (!write_text(path, text)) {
        throw Unwritable("cannot write " + path);
    }
}

json envelope(const Loaded& m, const AnalysisConfig& cfg) {
    json j;
    j["schema_version"] = schema_version;
    j["tool"] = "critfin";
    j["version"] = tool_version;
    j["map"] = map_to_json(m.f, m.file.name, m.file.notes);
    j["config"] = config_to_json(cfg);
    return j;
}

/// Largest period n <= wanted whose iterate stays within the solver degree budget.
int usable_periods(const Endomorphism& f, const AnalysisConfig& cfg) {
    int n = 0;
    long deg = 1;
    for (int i = 1; i <= cfg.periods; ++i) {
        deg *= f.degree();
        if (deg > cfg.solver.max_solver_degree) break;
        n = i;
    }
    return n;
}

Rational parse_rational(const std::string& s) {
    std::string t;
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    }
    if (t.empty()) throw Error(ErrorKind::syntax, "empty coordinate");
    for (std::size_t i = 0; i < t.size(); ++i) {
        char c = t[i];
        bool sign = (c == '-' || c == '+') && i == 0;
        if (!std::isdigit(static_cast<unsigned char>(c)) && c != '/' && !sign) {
            throw Error(ErrorKind::syntax, "coordinate '" + s + "' is not a rational number");
        }
    }
    if (t[0] == '+') t.erase(0, 1);
    Rational q;
    if (q.set_str(t, 10) != 0) throw Error(ErrorKind::syntax, "coordinate '" + s + "' is not a rational number");
    if (q.get_den() == 0) throw Error(ErrorKind::syntax, "zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

ProjPoint parse_point(const std::string& s, int k) {
    auto parts = split(s, ',');
    if (static_cast<int>(parts.size()) != k + 1) {
        throw Error(ErrorKind::invalid_argument, "--point needs " + std::to_string(k + 1) + " coordinates");
    }
    std::vector<Rational> q;
    for (const auto& p : parts) q.push_back(parse_rational(p));
    bool zero = true;
    for (const auto& x : q) zero = zero && x == 0;
    if (zero) throw Error(ErrorKind::invalid_argument, "--point must not be the zero vector");
    return ProjPoint::exact(std::move(q));
}

/// "1.5", "-2i", "0.5+1e-3i".
Complex parse_complex(const std::string& raw) {
    std::string s;
    for (char c : raw) {
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    }
    auto num = [&](const std::string& t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != t.size()) throw Error(ErrorKind::syntax, "bad number '" + raw + "'");
        return v;
    };
    if (s.empty()) throw Error(ErrorKind::syntax, "empty number");
    if (s.back() != 'i') return num(s);
    s.pop_back();
    std::size_t cut = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            cut = i;
            break;
        }
    }
    if (cut == std::string::npos) return {0.0, num(s)};
    return {num(s.substr(0, cut)), num(s.substr(cut))};
}

std::vector<Complex> parse_vector(const std::string& s) {
    std::vector<Complex> v;
    for (const auto& p : split(s, ',')) v.push_back(parse_complex(p));
    return v;
}

/// "chart=2;base=0,0;u=1,0;v=0,1;center=0,0;extent=2"; omitted keys keep the standard slice.
SliceSpec parse_slice(const std::string& text, int k, int w, int h) {
    SliceSpec s = SliceSpec::standard(k, w, h);
    if (text.empty()) return s;
    for (const auto& field : split(text, ';')) {
        if (field.empty()) continue;
        auto eq = field.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::syntax, "slice field '" + field + "' lacks '='");
        std::string key = field.substr(0, eq), val = field.substr(eq + 1);
        if (key == "chart") {
            auto c = parse_complex(val).real();
            if (c < 0 || c > k || c != std::floor(c)) throw Error(ErrorKind::invalid_argument, "slice: bad chart");
            s.chart = static_cast<std::size_t>(c);
        } else if (key == "base") {
            s.base = parse_vector(val);
        } else if (key == "u") {
            s.dir_u = parse_vector(val);
        } else if (key == "v") {
            s.dir_v = parse_vector(val);
        } else if (key == "center") {
            auto c = parse_vector(val);
            if (c.size() != 2) throw Error(ErrorKind::invalid_argument, "slice: center needs two real numbers");
            s.center_u = c[0].real();
            s.center_v = c[1].real();
        } else if (key == "extent") {
            s.extent = parse_complex(val).real();
        } else {
            throw Error(ErrorKind::invalid_argument, "slice: unknown key '" + key + "'");
        }
    }
    s.validate(k);
    return s;
}

std::pair<int, int> parse_res(const std::string& s) {
    auto x = s.find_first_of("xX");
    auto bad = [&] { return Error(ErrorKind::invalid_argument, "--res must look like WxH, got '" + s + "'"); };
    if (x == std::string::npos) throw bad();
    std::string a = s.substr(0, x), b = s.substr(x + 1);
    auto digits = [](const std::string& t) {
        return !t.empty() && t.size() < 6 &&
               std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    };
    if (!digits(a) || !digits(b)) throw bad();
    int w = std::stoi(a), h = std::stoi(b);
    if (w < 1 || h < 1 || w > 4096 || h > 4096) throw bad();
    return {w, h};
}

AlgebraicSet union_E(const ClassificationReport& rep) {
    AlgebraicSet E;
    for (const auto& o : rep.orders) {
        if (!o.omega) continue;
        for (const auto& c : o.omega->E) E.insert(c);
    }
    return E;
}

// ---------------------------------------------------------------------------

struct CommonOpts {
    std::string map;
    std::string config;
    std::optional<std::uint64_t> seed;
};

int run_analyze(const CommonOpts& co, std::optional<int> order, const std::string& report, std::optional<std::size_t> node_budget,
                const std::vector<std::string>& points, int depth) {
    auto m = load_map(co.map);
    auto cfg = load_config(co.config, co.seed);
    if (order) {
        if (*order < 1 || *order > 2) throw Error(ErrorKind::invalid_argument, "--order must be 1 or 2");
        cfg.classify.max_order = m.f.k() == 1 ? 1 : *order;
    }
    if (node_budget) {
        cfg.classify.max_curve_nodes = *node_budget;
        cfg.classify.max_point_nodes = *node_budget;
    }
    std::vector<ProjPoint> roots;
    for (const auto& p : points) roots.push_back(parse_point(p, m.f.k()));
    if (depth < 1 || depth > cfg.preimage.max_depth) {
        throw Error(ErrorKind::invalid_argument, "--depth must be in 1.." + std::to_string(cfg.preimage.max_depth));
    }

    json j = envelope(m, cfg);
    auto rep = classify(m.f, cfg.classify);
    j["classification"] = classification_json(rep, cfg.classify);

    int periods = usable_periods(m.f, cfg);
    j["periods_searched"] = periods;
    if (periods > 0) {
        j["periodic_points"] = periodic_json(find_periodic(m.f, periods, cfg.solver), cfg.solver);
    } else {
        j["periodic_points"] = nullptr;
    }

    j["ramification"] = json::array();
    if (!roots.empty()) {
        if (rep.budget_exhausted()) {
            std::cerr << "critfin: ramification skipped, classification budget exhausted\n";
        } else {
            auto ctx = ramification_context(rep);
            for (const auto& q : roots) {
                auto c = certify_ramification(m.f, ctx, q, depth, cfg.preimage);
                j["ramification"].push_back(certificate_json(c, q, cfg.preimage.cluster_tol));
            }
        }
    }
    j["renders"] = json::array();
    emit(j, report);

    if (rep.budget_exhausted()) {
        for (const auto& o : rep.orders) {
            if (!o.diagnostic.empty()) std::cerr << "critfin: order " << o.order << ": " << o.diagnostic << "\n";
        }
        return budget;
    }
    return ok;
}

int run_certify(const CommonOpts& co, const std::string& point, int depth, const std::string& out) {
    auto m = load_map(co.map);
    auto cfg = load_config(co.config, co.seed);
    auto q = parse_point(point, m.f.k());
    if (depth < 1 || depth > cfg.preimage.max_depth) {
        throw Error(ErrorKind::invalid_argument, "--depth must be in 1.." + std::to_string(cfg.preimage.max_depth));
    }
    auto rep = classify(m.f, cfg.classify);
    if (rep.budget_exhausted()) {
        throw Error(ErrorKind::budget_exceeded, "classification budget exhausted; no ramification bound available");
    }
    auto ctx = ramification_context(rep);
    auto c = certify_ramification(m.f, ctx, q, depth, cfg.preimage);
    json j = envelope(m, cfg);
    j["certificate"] = certificate_json(c, q, cfg.preimage.cluster_tol);
    emit(j, out);
    return ok;
}

int run_render(const CommonOpts& co, const std::string& slice, const std::string& res, std::optional<int> iter,
               const std::string& out, const std::string& legend) {
    auto m = load_map(co.map);
    auto cfg = load_config(co.config, co.seed);
    auto [w, h] = parse_res(res);
    if (iter) {
        if (*iter < 1) throw Error(ErrorKind::invalid_argument, "--iter must be positive");
        cfg.orbit.max_iter = *iter;
    }
    auto spec = parse_slice(slice, m.f.k(), w, h);

    // probe the output path before the expensive part
    {
        std::ofstream probe(out, std::ios::binary | std::ios::app);
        if (!probe) throw Unwritable("cannot write " + out);
    }

    int periods = usable_periods(m.f, cfg);
    if (periods == 0) throw Error(ErrorKind::budget_exceeded, "degree exceeds the periodic-point solver budget");
    auto search = find_periodic(m.f, periods, cfg.solver);
    AlgebraicSet E;
    auto rep = classify(m.f, cfg.classify);
    if (!rep.budget_exhausted()) E = union_E(rep);
    auto targets = make_targets(m.f, search, E, cfg.solver.classify_tol);
    auto img = render_slice(m.f, spec, targets, cfg.orbit);
    try {
        write_ppm(img, out);
    } catch (const Error&) {
        throw Unwritable("cannot write " + out);
    }

    json j = legend_json(img, targets, cfg.orbit);
    j["image"] = out;
    j["slice"] = {{"chart", spec.chart},
                  {"base", [&] {
                       json a = json::array();
                       for (auto z : spec.base) a.push_back(complex_json(z));
                       return a;
                   }()},
                  {"u", [&] {
                       json a = json::array();
                       for (auto z : spec.dir_u) a.push_back(complex_json(z));
                       return a;
                   }()},
                  {"v", [&] {
                       json a = json::array();
                       for (auto z : spec.dir_v) a.push_back(complex_json(z));
                       return a;
                   }()},
                  {"center", {spec.center_u, spec.center_v}},
                  {"extent", spec.extent}};
    j["config"] = config_to_json(cfg);
    if (!legend.empty() && !write_text(legend, j.dump(2) + "\n")) throw Unwritable("cannot write " + legend);
    std::cout << j.dump(2) << "\n";
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Critical finiteness, ramification certificates and basin renders for maps of P^1 and P^2"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    CommonOpts co;
    auto common = [&](CLI::App* sub) {
        sub->add_option("map", co.map, "map file (JSON)")->required();
        sub->add_option("--config", co.config, "JSON file overriding tolerances and budgets");
        sub->add_option("--seed", co.seed, "seed for every randomized step (default 0)");
    };

    std::optional<int> order;
    std::string report;
    std::optional<std::size_t> node_budget;
    std::vector<std::string> an_points;
    int an_depth = 3;
    auto* analyze = app.add_subcommand("analyze", "classify the map and certify its periodic points");
    common(analyze);
    analyze->add_option("--order", order, "highest order n to classify (1 or 2; default 2)");
    analyze->add_option("--report", report, "report path ('-' or omitted: standard output)");
    analyze->add_option("--budget", node_budget, "node budget for orbit graphs");
    analyze->add_option("--point", an_points, "ramification root a,b[,c] (repeatable)");
    analyze->add_option("--depth", an_depth, "backward depth for --point")->default_val(3);

    std::string point, cert_out;
    int depth = 3;
    auto* certify = app.add_subcommand("certify-ramification", "count critical passages along backward orbits");
    common(certify);
    certify->add_option("--point", point, "rational root a,b[,c]")->required();
    certify->add_option("--depth", depth, "backward depth (1..4)")->default_val(3);
    certify->add_option("--out", cert_out, "certificate path ('-' or omitted: standard output)");

    std::string slice, res = "128x128", img_out, legend;
    std::optional<int> iter;
    auto* render = app.add_subcommand("render", "label a real 2-plane slice by orbit fate");
    common(render);
    render->add_option("--slice", slice, "chart=..;base=..;u=..;v=..;center=..;extent=..");
    render->add_option("--res", res, "resolution WxH")->default_val("128x128");
    render->add_option("--iter", iter, "iteration cap per pixel (default 500)");
    render->add_option("--out", img_out, "PPM output path")->required();
    render->add_option("--legend", legend, "also write the legend JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return invalid;
    }

    try {
        if (*analyze) return run_analyze(co, order, report, node_budget, an_points, an_depth);
        if (*certify) return run_certify(co, point, depth, cert_out);
        if (*render) return run_render(co, slice, res, iter, img_out, legend);
    } catch (const Unwritable& e) {
        std::cerr << "critfin: " << e.what() << "\n";
        return unwritable;
    } catch (const Error& e) {
        std::cerr << "critfin: " << to_string(e.kind()) << ": " << e.what() << "\n";
        return exit_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "critfin: " << e.what() << "\n";
        return invalid;
    }
    return invalid;
}
