#pragma once

#include "error.hpp"
#include "rational.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace critfin {

/// Point of P^k. Exact points hold a primitive integer vector whose first nonzero entry is
/// positive; inexact points hold complex coordinates scaled so the largest-magnitude one is 1.
class ProjPoint {
public:
    ProjPoint() = default;

    static ProjPoint exact(std::vector<Rational> coords) {
        if (std::all_of(coords.begin(), coords.end(), [](const Rational& r) { return r == 0; })) {
            throw Error(ErrorKind::invalid_argument, "projective point with all coordinates zero");
        }
        Integer den = 1, num = 0;
        for (const auto& c : coords) {
            den = lcm(den, c.get_den());
            num = gcd(num, c.get_num());
        }
        Rational s(den, num);
        s.canonicalize();
        for (const auto& c : coords) {
            if (c != 0) {
                if (c < 0) s = -s;
                break;
            }
        }
        ProjPoint p;
        p.exact_ = true;
        for (auto& c : coords) p.q_.push_back(c * s);
        p.refresh_numeric();
        return p;
    }

    static ProjPoint exact(std::initializer_list<long> coords) {
        std::vector<Rational> v;
        for (long c : coords) v.emplace_back(c);
        return exact(std::move(v));
    }

    static ProjPoint inexact(std::vector<Complex> coords) {
        std::size_t big = largest_index(coords);
        if (std::abs(coords[big]) == 0.0 || !std::isfinite(std::abs(coords[big]))) {
            throw Error(ErrorKind::invalid_argument, "projective point with all coordinates zero or non-finite");
        }
        Complex s = coords[big];
        ProjPoint p;
        p.exact_ = false;
        for (auto& c : coords) p.c_.push_back(c / s);
        p.c_[big] = 1.0;
        return p;
    }

    bool is_exact() const { return exact_; }
    int dimension() const { return static_cast<int>(exact_ ? q_.size() : c_.size()) - 1; }
    std::size_t size() const { return exact_ ? q_.size() : c_.size(); }
    const std::vector<Rational>& rational() const { return q_; }

    /// Complex coordinates scaled to max-norm 1 (largest coordinate exactly 1).
    const std::vector<Complex>& numeric() const { return c_; }

    /// Index of the largest-magnitude coordinate; ties go to the lowest index.
    std::size_t chart() const {
        if (exact_) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < q_.size(); ++i) {
                if (critfin::abs(q_[i]) > critfin::abs(q_[best])) best = i;
            }
            return best;
        }
        return largest_index(c_);
    }

    /// Max-norm distance in the chart of `*this` (the other point rescaled to match that coordinate).
    double chart_distance(const ProjPoint& o) const {
        std::size_t ch = chart();
        Complex a = c_[ch], b = o.c_[ch];
        if (std::abs(b) < 1e-300) return std::numeric_limits<double>::infinity();
        double d = 0;
        for (std::size_t i = 0; i < c_.size(); ++i) d = std::max(d, std::abs(c_[i] / a - o.c_[i] / b));
        return d;
    }

    friend bool operator==(const ProjPoint& a, const ProjPoint& b) {
        if (a.exact_ != b.exact_) return false;
        return a.exact_ ? a.q_ == b.q_ : a.c_ == b.c_;
    }

    /// Total order for sorting: exact before inexact, then coordinatewise.
    friend bool operator<(const ProjPoint& a, const ProjPoint& b) {
        if (a.exact_ != b.exact_) return a.exact_;
        if (a.size() != b.size()) return a.size() < b.size();
        if (a.exact_) return a.q_ < b.q_;
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i].real() != b.c_[i].real()) return a.c_[i].real() < b.c_[i].real();
            if (a.c_[i].imag() != b.c_[i].imag()) return a.c_[i].imag() < b.c_[i].imag();
        }
        return false;
    }

    std::string to_string() const {
        std::ostringstream os;
        os << "[";
        for (std::size_t i = 0; i < size(); ++i) {
            if (i) os << ":";
            if (exact_) {
                os << q_[i].get_str();
            } else {
                os.precision(12);
                Complex z = c_[i];
                if (std::abs(z.real()) < 1e-14) z.real(0.0);
                if (std::abs(z.imag()) < 1e-14) z.imag(0.0);
                if (z.imag() == 0.0) {
                    os << z.real();
                } else {
                    os << "(" << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i)";
                }
            }
        }
        os << "]";
        return os.str();
    }

private:
    static std::size_t largest_index(const std::vector<Complex>& v) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (std::abs(v[i]) > std::abs(v[best])) best = i;
        }
        return best;
    }

    void refresh_numeric() {
        std::vector<Complex> v;
        for (const auto& r : q_) v.emplace_back(to_double(r), 0.0);
        std::size_t big = largest_index(v);
        Complex s = v[big];
        c_.clear();
        for (auto& x : v) c_.push_back(x / s);
    }

    bool exact_ = true;
    std::vector<Rational> q_;
    std::vector<Complex> c_;
};

} // namespace critfin
