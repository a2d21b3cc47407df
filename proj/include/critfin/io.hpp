#pragma once

#include "fatou.hpp"
#include "parse.hpp"
#include "postcritical.hpp"
#include "ramification.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace critfin {

using json = nlohmann::ordered_json;

inline constexpr const char* tool_version = "0.1.0";
inline constexpr int schema_version = 1;

// ---------------------------------------------------------------------------
// Map files.

struct MapFile {
    int k = 2;
    int d = 2;
    std::vector<std::string> components;
    std::string name;
    std::string notes;
};

inline MapFile map_file_from_json(const json& j) {
    auto bad = [](const std::string& m) { return Error(ErrorKind::invalid_argument, "map file: " + m); };
    if (!j.is_object()) throw bad("top level must be an object");
    if (j.contains("schema_version") && j["schema_version"] != schema_version) throw bad("unsupported schema_version");
    for (const char* key : {"dimension", "degree", "components"}) {
        if (!j.contains(key)) throw bad(std::string("missing field '") + key + "'");
    }
    MapFile m;
    if (!j["dimension"].is_number_integer() || !j["degree"].is_number_integer()) {
        throw bad("dimension and degree must be integers");
    }
    m.k = j["dimension"].get<int>();
    m.d = j["degree"].get<int>();
    if (m.k != 1 && m.k != 2) throw bad("dimension must be 1 or 2");
    if (!j["components"].is_array()) throw bad("components must be an array of strings");
    for (const auto& c : j["components"]) {
        if (!c.is_string()) throw bad("components must be an array of strings");
        m.components.push_back(c.get<std::string>());
    }
    if (static_cast<int>(m.components.size()) != m.k + 1) {
        throw bad("dimension " + std::to_string(m.k) + " needs " + std::to_string(m.k + 1) + " components");
    }
    if (j.contains("name")) m.name = j["name"].get<std::string>();
    if (j.contains("notes")) m.notes = j["notes"].get<std::string>();
    return m;
}

inline Endomorphism endomorphism_from_map(const MapFile& m) {
    std::vector<HomogPoly> forms;
    for (const auto& s : m.components) forms.push_back(poly_parse(s, m.k + 1));
    auto f = Endomorphism::create(std::move(forms));
    if (f.degree() != m.d) {
        throw Error(ErrorKind::invalid_argument, "map file: declared degree " + std::to_string(m.d) +
                                                     " but the components have degree " + std::to_string(f.degree()));
    }
    return f;
}

inline json map_to_json(const Endomorphism& f, const std::string& name = "", const std::string& notes = "") {
    json j;
    j["schema_version"] = schema_version;
    if (!name.empty()) j["name"] = name;
    j["dimension"] = f.k();
    j["degree"] = f.degree();
    j["components"] = f.to_strings();
    if (!notes.empty()) j["notes"] = notes;
    return j;
}

inline json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::invalid_argument, "cannot read " + path);
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::syntax, path + ": " + e.what());
    }
}

inline MapFile read_map_file(const std::string& path) {
    try {
        return map_file_from_json(read_json_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::invalid_argument, path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Configuration echo.

/// Every tolerance and budget consulted by the analysis pipelines.
struct AnalysisConfig {
    ClassifyConfig classify;
    SolverConfig solver;
    PreimageConfig preimage;
    OrbitConfig orbit;
    int periods = 2;         ///< periodic points up to this period (capped by the solver degree budget)
    std::uint64_t seed = 0;  ///< single seed for every randomized step

    /// Copies the shared knobs into the per-module configurations.
    void propagate() {
        preimage.seed = seed;
        preimage.intersect = classify.intersect;
        preimage.member_tol = classify.point_tol;
    }
};

inline json config_to_json(const AnalysisConfig& c) {
    const auto& cl = c.classify;
    const auto& s = c.solver;
    const auto& p = c.preimage;
    const auto& o = c.orbit;
    json j;
    j["seed"] = c.seed;
    j["periods"] = c.periods;
    j["classify"] = {{"max_curve_nodes", cl.max_curve_nodes},
                     {"max_point_nodes", cl.max_point_nodes},
                     {"orbit_cap", cl.orbit_cap},
                     {"point_tol", cl.point_tol},
                     {"reverify_tol", cl.reverify_tol},
                     {"reverify_iters", cl.reverify_iters},
                     {"max_coefficient_bits", cl.max_coefficient_bits},
                     {"max_order", cl.max_order},
                     {"factor_degree_cap", cl.factor.degree_cap},
                     {"intersect_residual_tol", cl.intersect.residual_tol},
                     {"intersect_cluster_tol", cl.intersect.cluster_tol},
                     {"intersect_factor_cap", cl.intersect.factor_cap}};
    j["solver"] = {{"residual_tol", s.residual_tol},         {"cluster_tol", s.cluster_tol},
                   {"classify_tol", s.classify_tol},         {"max_solver_degree", s.max_solver_degree},
                   {"factor_cap", s.factor_cap},             {"grid", s.grid}};
    j["preimage"] = {{"residual_tol", p.residual_tol},
                     {"cluster_tol", p.cluster_tol},
                     {"max_nodes", p.max_nodes},
                     {"max_depth", p.max_depth}};
    j["orbit"] = {{"max_iter", o.max_iter},
                  {"converge_tol", o.converge_tol},
                  {"confirm", o.confirm},
                  {"accumulate_tol", o.accumulate_tol},
                  {"tail", o.tail}};
    return j;
}

/// Reads the keys present in `j` on top of `base`; unknown keys are rejected.
inline AnalysisConfig config_from_json(const json& j, AnalysisConfig base = {}) {
    auto unknown = [](const std::string& k) { return Error(ErrorKind::invalid_argument, "config: unknown key '" + k + "'"); };
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const json& v = it.value();
        if (key == "seed") {
            base.seed = v.get<std::uint64_t>();
        } else if (key == "periods") {
            base.periods = v.get<int>();
        } else if (key == "classify") {
            auto& cl = base.classify;
            for (auto e = v.begin(); e != v.end(); ++e) {
                const auto& k = e.key();
                const auto& x = e.value();
                if (k == "max_curve_nodes") cl.max_curve_nodes = x.get<std::size_t>();
                else if (k == "max_point_nodes") cl.max_point_nodes = x.get<std::size_t>();
                else if (k == "orbit_cap") cl.orbit_cap = x.get<int>();
                else if (k == "point_tol") cl.point_tol = x.get<double>();
                else if (k == "reverify_tol") cl.reverify_tol = x.get<double>();
                else if (k == "reverify_iters") cl.reverify_iters = x.get<int>();
                else if (k == "max_coefficient_bits") cl.max_coefficient_bits = x.get<std::size_t>();
                else if (k == "max_order") cl.max_order = x.get<int>();
                else if (k == "factor_degree_cap") cl.factor.degree_cap = x.get<int>();
                else if (k == "intersect_residual_tol") cl.intersect.residual_tol = x.get<double>();
                else if (k == "intersect_cluster_tol") cl.intersect.cluster_tol = x.get<double>();
                else if (k == "intersect_factor_cap") cl.intersect.factor_cap = x.get<int>();
                else throw unknown("classify." + k);
            }
        } else if (key == "solver") {
            auto& s = base.solver;
            for (auto e = v.begin(); e != v.end(); ++e) {
                const auto& k = e.key();
                const auto& x = e.value();
                if (k == "residual_tol") s.residual_tol = x.get<double>();
                else if (k == "cluster_tol") s.cluster_tol = x.get<double>();
                else if (k == "classify_tol") s.classify_tol = x.get<double>();
                else if (k == "max_solver_degree") s.max_solver_degree = x.get<int>();
                else if (k == "factor_cap") s.factor_cap = x.get<int>();
                else if (k == "grid") s.grid = x.get<int>();
                else throw unknown("solver." + k);
            }
        } else if (key == "preimage") {
            auto& p = base.preimage;
            for (auto e = v.begin(); e != v.end(); ++e) {
                const auto& k = e.key();
                const auto& x = e.value();
                if (k == "residual_tol") p.residual_tol = x.get<double>();
                else if (k == "cluster_tol") p.cluster_tol = x.get<double>();
                else if (k == "max_nodes") p.max_nodes = x.get<std::size_t>();
                else if (k == "max_depth") p.max_depth = x.get<int>();
                else throw unknown("preimage." + k);
            }
        } else if (key == "orbit") {
            auto& o = base.orbit;
            for (auto e = v.begin(); e != v.end(); ++e) {
                const auto& k = e.key();
                const auto& x = e.value();
                if (k == "max_iter") o.max_iter = x.get<int>();
                else if (k == "converge_tol") o.converge_tol = x.get<double>();
                else if (k == "confirm") o.confirm = x.get<int>();
                else if (k == "accumulate_tol") o.accumulate_tol = x.get<double>();
                else if (k == "tail") o.tail = x.get<int>();
                else throw unknown("orbit." + k);
            }
        } else {
            throw unknown(key);
        }
    }
    base.propagate();
    return base;
}

// ---------------------------------------------------------------------------
// Report pieces.

inline json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json point_json(const ProjPoint& p) {
    json j;
    j["exact"] = p.is_exact();
    json coords = json::array();
    if (p.is_exact()) {
        for (const auto& q : p.rational()) coords.push_back(q.get_str());
    } else {
        for (const auto& z : p.numeric()) coords.push_back(complex_json(z));
    }
    j["coordinates"] = coords;
    j["text"] = p.to_string();
    return j;
}

inline json component_json(const Component& c) {
    json j;
    if (c.is_hypersurface()) {
        j["kind"] = "hypersurface";
        j["equation"] = c.form().to_string();
        j["degree"] = c.degree();
        if (auto p = c.as_rational_point()) j["point"] = point_json(*p);
    } else {
        j["kind"] = "point";
        j["point"] = point_json(c.pt());
    }
    return j;
}

inline json set_json(const AlgebraicSet& s) {
    json a = json::array();
    for (const auto& c : s) a.push_back(component_json(c));
    return a;
}

inline json order_json(const OrderReport& o, double tol) {
    json j;
    j["order"] = o.order;
    j["verdict"] = to_string(o.verdict);
    j["critically_finite"] = o.verdict == OrderReport::Verdict::critically_finite;
    j["n_critically_finite"] = o.n_critically_finite ? json(*o.n_critically_finite) : json(nullptr);
    j["direct_containment_check"] = o.direct_check ? json(*o.direct_check) : json(nullptr);
    j["tolerance"] = tol;
    j["C"] = set_json(o.C);
    json nodes = json::array();
    for (const auto& n : o.graph.nodes) {
        nodes.push_back({{"component", component_json(n.comp)},
                         {"image", n.image},
                         {"origin", n.origin},
                         {"depth", n.depth}});
    }
    j["graph"] = {{"status", to_string(o.graph.status)}, {"nodes", nodes}, {"frontier", o.graph.frontier}};
    if (o.omega) {
        j["omega"] = {{"E", set_json(o.omega->E)},
                      {"l", o.omega->l},
                      {"Eprime", set_json(o.omega->Eprime)},
                      {"F", set_json(o.omega->F)},
                      {"cycles", o.omega->cycles},
                      {"critical_cycles", o.omega->critical_cycle}};
    } else {
        j["omega"] = nullptr;
    }
    j["diagnostic"] = o.diagnostic;
    return j;
}

inline json classification_json(const ClassificationReport& r, const ClassifyConfig& cfg) {
    json j;
    j["k"] = r.k;
    j["critical_equation"] = r.critical_equation.to_string();
    j["critical_equation_degree"] = r.critical_equation.degree();
    j["critical_set"] = set_json(r.C1);
    json orders = json::array();
    for (const auto& o : r.orders) orders.push_back(order_json(o, cfg.point_tol));
    j["orders"] = orders;
    j["critically_finite_order_1"] = r.critically_finite(1);
    j["one_critically_finite"] = r.n_critically_finite(1);
    if (r.k == 2) {
        j["critically_finite_order_2"] = r.order(2) ? json(r.critically_finite(2)) : json(nullptr);
        j["two_critically_finite"] = r.order(2) ? json(r.n_critically_finite(2)) : json(nullptr);
    }
    j["budget_exhausted"] = r.budget_exhausted();
    return j;
}

inline json matrix_json(const std::vector<std::vector<Complex>>& m) {
    json a = json::array();
    for (const auto& row : m) {
        json r = json::array();
        for (const auto& v : row) r.push_back(complex_json(v));
        a.push_back(r);
    }
    return a;
}

inline json periodic_json(const PeriodicSearch& s, const SolverConfig& cfg) {
    json pts = json::array();
    for (const auto& p : s.points) {
        pts.push_back({{"point", point_json(p.point)},
                       {"period", p.period},
                       {"residual", p.residual},
                       {"classification", to_string(p.classification)},
                       {"superattracting", is_superattracting(p.classification)},
                       {"tolerance", cfg.classify_tol},
                       {"trace", complex_json(p.trace)},
                       {"det", complex_json(p.det)},
                       {"exact_trace", p.exact_trace ? json(p.exact_trace->get_str()) : json(nullptr)},
                       {"exact_det", p.exact_det ? json(p.exact_det->get_str()) : json(nullptr)},
                       {"differential", matrix_json(p.differential)},
                       {"multiplier_modulus", p.multiplier_modulus}});
    }
    return {{"points", pts},
            {"dropped", s.dropped},
            {"ambiguous_clusters", s.ambiguous_clusters},
            {"used_grid", s.used_grid},
            {"incomplete_periods", s.incomplete_periods}};
}

inline json certificate_json(const RamificationCertificate& c, const ProjPoint& root, double tol) {
    json j;
    j["root"] = point_json(root);
    j["order"] = c.order;
    j["bound"] = c.bound;
    j["depth"] = c.depth;
    j["verdict"] = to_string(c.verdict);
    j["applicability"] = c.applicability;
    j["tolerance"] = tol;
    j["level_sizes"] = c.level_sizes;
    j["level_multiplicities"] = c.level_multiplicities;
    j["paths"] = c.paths.size();
    j["max_count"] = c.max_count;
    j["violations"] = c.violations;
    j["undecided_paths"] = c.undecided_paths;
    json hist = json::object();
    std::map<int, int> h;
    for (const auto& p : c.paths) {
        if (!p.undecided) ++h[p.count];
    }
    for (const auto& [k, v] : h) hist[std::to_string(k)] = v;
    j["count_histogram"] = hist;
    json strata = json::array();
    for (int m = 0; m < c.order; ++m) {
        int mx = 0;
        for (const auto& p : c.paths) mx = std::max(mx, p.strata[static_cast<std::size_t>(m)]);
        strata.push_back(mx);
    }
    j["max_strata"] = strata;
    json vp = json::array();
    for (const auto& p : c.violation_path) vp.push_back(point_json(p));
    j["violation_path"] = vp;
    return j;
}

inline std::string label_name(int label, const FatouTargets& t) {
    if (label == BasinImage::escape_label) return "accumulates near E";
    if (label == BasinImage::undecided_label) return "undecided";
    const auto& c = t.cycles[static_cast<std::size_t>(label)];
    return "cycle " + std::to_string(label) + " " + c.points[0].to_string() + " period " +
           std::to_string(c.points.size()) + " " + to_string(c.classification);
}

inline json legend_json(const BasinImage& img, const FatouTargets& t, const OrbitConfig& cfg) {
    json labels = json::array();
    for (const auto& [label, count] : img.summary.per_label) {
        auto c = label_color(label);
        json e = {{"label", label}, {"name", label_name(label, t)}, {"color", {c[0], c[1], c[2]}}, {"pixels", count}};
        if (label >= 0) {
            e["superattracting"] = is_superattracting(t.cycles[static_cast<std::size_t>(label)].classification);
        }
        labels.push_back(e);
    }
    const auto& s = img.summary;
    double decided = static_cast<double>(s.decided());
    return {{"schema_version", schema_version},
            {"width", img.width},
            {"height", img.height},
            {"labels", labels},
            {"summary",
             {{"pixels", s.pixels},
              {"converged", s.converged},
              {"converged_superattracting", s.converged_superattracting},
              {"accumulates_near_E", s.escape},
              {"undecided", s.undecided},
              {"decided", s.decided()},
              {"fraction_superattracting_of_decided", decided > 0 ? s.converged_superattracting / decided : 0.0},
              {"fraction_superattracting_of_converged",
               s.converged ? static_cast<double>(s.converged_superattracting) / s.converged : 0.0},
              {"tolerance", cfg.converge_tol},
              {"max_iter", cfg.max_iter}}}};
}

/// Writes text to a file; false when the path cannot be written.
inline bool write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) return false;
    os << text;
    return static_cast<bool>(os);
}

} // namespace critfin
