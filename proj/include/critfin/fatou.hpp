#pragma once

#include "dynamics.hpp"
#include "geometry.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace critfin {

/// A periodic cycle that orbits may converge to.
struct CycleTarget {
    int id = 0;
    std::vector<ProjPoint> points;
    CycleClass classification = CycleClass::undecided;
    double multiplier_modulus = 0.0;
};

struct FatouTargets {
    std::vector<CycleTarget> cycles;
    AlgebraicSet E; ///< union of the omega-limit sets E_n (accumulation reference)
};

/// Targets from a periodic-point search: one entry per cycle, classified by its first member.
inline FatouTargets make_targets(const Endomorphism& f, const PeriodicSearch& search, AlgebraicSet E = {},
                                 double tol = 1e-8) {
    FatouTargets t;
    t.E = std::move(E);
    for (const auto& cyc : group_cycles(f, search.points, tol)) {
        CycleTarget c;
        c.id = static_cast<int>(t.cycles.size());
        for (auto i : cyc) c.points.push_back(search.points[i].point);
        c.classification = search.points[cyc[0]].classification;
        c.multiplier_modulus = search.points[cyc[0]].multiplier_modulus;
        t.cycles.push_back(std::move(c));
    }
    return t;
}

struct OrbitConfig {
    int max_iter = 500;
    double converge_tol = 1e-8;   ///< distance to a cycle counted as "at" the cycle
    int confirm = 10;             ///< consecutive iterations required at the cycle
    double accumulate_tol = 1e-3; ///< tail residual against an E component for accumulates-near
    int tail = 10;                ///< iterates examined for accumulation
};

struct OrbitVerdict {
    enum class Outcome { converged, accumulates_near, undecided };

    ProjPoint start;
    Outcome outcome = Outcome::undecided;
    int cycle = -1;        ///< converged: target cycle id
    int component = -1;    ///< accumulates_near: index into targets.E
    int iterations = 0;
    double distance = 0.0; ///< final distance to the cycle or residual against the component
    std::string diagnostic;
};

inline const char* to_string(OrbitVerdict::Outcome o) {
    switch (o) {
        case OrbitVerdict::Outcome::converged: return "converged";
        case OrbitVerdict::Outcome::accumulates_near: return "accumulates-near";
        case OrbitVerdict::Outcome::undecided: return "undecided";
    }
    return "unknown";
}

namespace detail {

/// Rescales to max-norm 1 (the chart of the largest coordinate); false on zero or overflow.
inline bool renormalize(std::vector<Complex>& x, double* norm = nullptr) {
    double m = 0;
    for (const auto& v : x) m = std::max(m, std::abs(v));
    if (!(m > 0) || !std::isfinite(m)) return false;
    for (auto& v : x) v /= m;
    if (norm) *norm = m;
    return true;
}

/// Chart distance from x (max-norm 1) to the nearest member of the cycle.
inline double cycle_distance(const CycleTarget& c, const ProjPoint& x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : c.points) best = std::min(best, p.chart_distance(x));
    return best;
}

inline double component_residual(const Component& c, const ProjPoint& x) {
    if (c.is_point()) return c.pt().chart_distance(x);
    return scaled_residual(c.form(), x);
}

} // namespace detail

/// Iterates x with max-norm renormalization every step (the chart follows the largest coordinate)
/// and classifies the orbit against the target cycles and the components of E.
inline OrbitVerdict sample_orbit(const Endomorphism& f, const ProjPoint& x, const FatouTargets& targets,
                                 const OrbitConfig& cfg = {}) {
    OrbitVerdict v;
    v.start = x;
    std::vector<Complex> cur = x.numeric();
    int streak = 0, streak_cycle = -1;
    std::vector<ProjPoint> tail;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        cur = f.apply(std::span<const Complex>(cur));
        if (!detail::renormalize(cur)) {
            v.iterations = it;
            v.diagnostic = "orbit left floating-point range";
            return v;
        }
        ProjPoint p = ProjPoint::inexact(cur);
        int near = -1;
        double dist = std::numeric_limits<double>::infinity();
        for (const auto& c : targets.cycles) {
            double dd = detail::cycle_distance(c, p);
            if (dd < dist) {
                dist = dd;
                near = c.id;
            }
        }
        if (near >= 0 && dist < cfg.converge_tol) {
            streak = near == streak_cycle ? streak + 1 : 1;
            streak_cycle = near;
            if (streak >= cfg.confirm) {
                v.outcome = OrbitVerdict::Outcome::converged;
                v.cycle = near;
                v.iterations = it;
                v.distance = dist;
                return v;
            }
        } else {
            streak = 0;
            streak_cycle = -1;
        }
        if (it > cfg.max_iter - cfg.tail) tail.push_back(std::move(p));
    }
    v.iterations = cfg.max_iter;
    double best = std::numeric_limits<double>::infinity();
    int idx = 0;
    for (const auto& c : targets.E) {
        double worst = 0;
        for (const auto& p : tail) worst = std::max(worst, detail::component_residual(c, p));
        if (!tail.empty() && worst < best) {
            best = worst;
            v.component = idx;
        }
        ++idx;
    }
    if (v.component >= 0 && best < cfg.accumulate_tol) {
        v.outcome = OrbitVerdict::Outcome::accumulates_near;
        v.distance = best;
    } else {
        v.component = -1;
        v.distance = best;
    }
    return v;
}

/// d^{-n} log ||F^n(lift)||_max, accumulated over renormalized iterates. Depends on the lift:
/// replacing it by lambda * lift adds log|lambda|.
inline double escape_rate(const Endomorphism& f, std::vector<Complex> lift, int n) {
    if (n < 1) throw Error(ErrorKind::invalid_argument, "escape_rate: n must be positive");
    double norm = 0;
    if (!detail::renormalize(lift, &norm)) throw Error(ErrorKind::invalid_argument, "escape_rate: zero lift");
    double g = std::log(norm), w = 1.0;
    for (int i = 0; i < n; ++i) {
        lift = f.apply(std::span<const Complex>(lift));
        if (!detail::renormalize(lift, &norm)) throw Error(ErrorKind::solver_failure, "escape_rate: orbit degenerated");
        w /= f.degree();
        g += w * std::log(norm);
    }
    return g;
}

/// Escape rate at the canonical lift: the primitive integer vector for exact points, the max-norm-1
/// vector otherwise.
inline double escape_rate(const Endomorphism& f, const ProjPoint& x, int n) {
    if (!x.is_exact()) return escape_rate(f, x.numeric(), n);
    std::vector<Complex> lift;
    for (const auto& q : x.rational()) lift.emplace_back(to_double(q), 0.0);
    return escape_rate(f, lift, n);
}

/// Real 2-plane base + u * dir_u + v * dir_v in the affine chart x_chart = 1, sampled on a
/// width x height grid of pixel centres over [cu - extent, cu + extent] x [cv - extent, cv + extent].
struct SliceSpec {
    std::size_t chart = 2;
    std::vector<Complex> base;   ///< k affine coordinates
    std::vector<Complex> dir_u;
    std::vector<Complex> dir_v;
    double center_u = 0.0, center_v = 0.0;
    double extent = 2.0;         ///< half-width of the window
    int width = 128, height = 128;

    /// Coordinate plane of the chart (k = 2) or the complex chart plane (k = 1).
    static SliceSpec standard(int k, int width = 128, int height = 128, double extent = 2.0) {
        SliceSpec s;
        s.chart = static_cast<std::size_t>(k);
        s.width = width;
        s.height = height;
        s.extent = extent;
        if (k == 1) {
            s.base = {0.0};
            s.dir_u = {1.0};
            s.dir_v = {Complex(0.0, 1.0)};
        } else {
            s.base = {0.0, 0.0};
            s.dir_u = {1.0, 0.0};
            s.dir_v = {0.0, 1.0};
        }
        return s;
    }

    void validate(int k) const {
        const std::size_t n = static_cast<std::size_t>(k);
        if (chart > n || base.size() != n || dir_u.size() != n || dir_v.size() != n) {
            throw Error(ErrorKind::invalid_argument, "slice: chart or vector sizes do not match the dimension");
        }
        if (width < 1 || height < 1) throw Error(ErrorKind::invalid_argument, "slice: resolution must be at least 1x1");
        if (!(extent > 0)) throw Error(ErrorKind::invalid_argument, "slice: extent must be positive");
        // real linear independence of dir_u, dir_v in R^{2k}
        std::vector<double> a, b;
        for (std::size_t i = 0; i < n; ++i) {
            a.insert(a.end(), {dir_u[i].real(), dir_u[i].imag()});
            b.insert(b.end(), {dir_v[i].real(), dir_v[i].imag()});
        }
        double aa = 0, bb = 0, ab = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            aa += a[i] * a[i];
            bb += b[i] * b[i];
            ab += a[i] * b[i];
        }
        if (aa * bb - ab * ab <= 1e-12 * aa * bb || aa == 0 || bb == 0) {
            throw Error(ErrorKind::invalid_argument, "slice: direction vectors are linearly dependent");
        }
    }

    /// Slice coordinates of the centre of pixel (col, row); row 0 is the top edge.
    std::pair<double, double> pixel_coords(int col, int row) const {
        double u = center_u - extent + (2 * extent) * (col + 0.5) / width;
        double v = center_v + extent - (2 * extent) * (row + 0.5) / height;
        return {u, v};
    }

    ProjPoint point_at(double u, double v) const {
        std::vector<Complex> x;
        std::size_t j = 0;
        for (std::size_t i = 0; i <= base.size(); ++i) {
            if (i == chart) {
                x.emplace_back(1.0);
            } else {
                x.push_back(base[j] + u * dir_u[j] + v * dir_v[j]);
                ++j;
            }
        }
        return ProjPoint::inexact(std::move(x));
    }
};

/// Per-pixel labels: cycle id (>= 0), escape-to-E, or undecided.
struct BasinImage {
    static constexpr int escape_label = -1;
    static constexpr int undecided_label = -2;

    int width = 0, height = 0;
    std::vector<int> labels;     ///< row-major
    std::vector<int> iterations; ///< row-major

    struct Summary {
        std::size_t pixels = 0;
        std::size_t converged = 0;
        std::size_t converged_superattracting = 0;
        std::size_t escape = 0;
        std::size_t undecided = 0;
        std::map<int, std::size_t> per_label;
        std::size_t decided() const { return pixels - undecided; }
    };
    Summary summary;
};

/// Colour of a label; cycles cycle through a fixed palette.
inline std::array<std::uint8_t, 3> label_color(int label) {
    static const std::array<std::array<std::uint8_t, 3>, 10> palette{{{230, 25, 75},
                                                                       {60, 180, 75},
                                                                       {0, 130, 200},
                                                                       {245, 130, 48},
                                                                       {145, 30, 180},
                                                                       {70, 240, 240},
                                                                       {240, 50, 230},
                                                                       {210, 245, 60},
                                                                       {250, 190, 212},
                                                                       {0, 128, 128}}};
    if (label == BasinImage::escape_label) return {255, 255, 255};
    if (label == BasinImage::undecided_label) return {0, 0, 0};
    return palette[static_cast<std::size_t>(label) % palette.size()];
}

inline BasinImage render_slice(const Endomorphism& f, const SliceSpec& spec, const FatouTargets& targets,
                               const OrbitConfig& cfg = {}) {
    spec.validate(f.k());
    BasinImage img;
    img.width = spec.width;
    img.height = spec.height;
    const std::size_t n = static_cast<std::size_t>(spec.width) * static_cast<std::size_t>(spec.height);
    img.labels.resize(n);
    img.iterations.resize(n);
    auto& s = img.summary;
    s.pixels = n;
    for (int row = 0; row < spec.height; ++row) {
        for (int col = 0; col < spec.width; ++col) {
            auto [u, v] = spec.pixel_coords(col, row);
            auto verdict = sample_orbit(f, spec.point_at(u, v), targets, cfg);
            const std::size_t i = static_cast<std::size_t>(row) * spec.width + col;
            int label = BasinImage::undecided_label;
            switch (verdict.outcome) {
                case OrbitVerdict::Outcome::converged:
                    label = verdict.cycle;
                    ++s.converged;
                    if (is_superattracting(targets.cycles[static_cast<std::size_t>(verdict.cycle)].classification)) {
                        ++s.converged_superattracting;
                    }
                    break;
                case OrbitVerdict::Outcome::accumulates_near:
                    label = BasinImage::escape_label;
                    ++s.escape;
                    break;
                case OrbitVerdict::Outcome::undecided: ++s.undecided; break;
            }
            img.labels[i] = label;
            img.iterations[i] = verdict.iterations;
            ++s.per_label[label];
        }
    }
    return img;
}

/// Binary PPM (P6, RGB8, row-major, no comments).
inline std::string ppm_bytes(const BasinImage& img) {
    std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    out.reserve(out.size() + img.labels.size() * 3);
    for (int label : img.labels) {
        auto c = label_color(label);
        out.append(reinterpret_cast<const char*>(c.data()), 3);
    }
    return out;
}

/// Writes the PPM; throws invalid_argument when the path cannot be written.
inline void write_ppm(const BasinImage& img, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::invalid_argument, "cannot open " + path + " for writing");
    auto bytes = ppm_bytes(img);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error(ErrorKind::invalid_argument, "failed writing " + path);
}

} // namespace critfin
