#pragma once

#include "error.hpp"
#include "rational.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

namespace critfin {

using IntMatrix = std::vector<std::vector<Integer>>;
using RatMatrix = std::vector<std::vector<Rational>>;

/// Fraction-free Gaussian elimination (Bareiss) with row pivoting.
inline Integer det_bareiss(IntMatrix m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    Integer prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t swap = k + 1;
            while (swap < n && m[swap][k] == 0) ++swap;
            if (swap == n) return 0;
            std::swap(m[k], m[swap]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                m[i][j] = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev.get_mpz_t());
            }
        }
        prev = m[k][k];
    }
    Integer d = m[n - 1][n - 1];
    return sign > 0 ? d : Integer(-d);
}

/// Exact determinant over Q: rows are cleared of denominators, then Bareiss.
inline Rational determinant(const RatMatrix& m) {
    IntMatrix im(m.size());
    Rational scale = 1;
    for (std::size_t i = 0; i < m.size(); ++i) {
        Integer l = denominator_lcm(m[i]);
        scale *= l;
        im[i].reserve(m[i].size());
        for (const auto& v : m[i]) {
            Rational s = v * l;
            im[i].push_back(s.get_num());
        }
    }
    Rational d(det_bareiss(std::move(im)));
    return d / scale;
}

/// Determinant of an integer matrix modulo a prime p < 2^31.
inline std::uint64_t det_mod_p(const IntMatrix& m, std::uint64_t p) {
    const std::size_t n = m.size();
    std::vector<std::vector<std::uint64_t>> a(n, std::vector<std::uint64_t>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = mpz_fdiv_ui(m[i][j].get_mpz_t(), static_cast<unsigned long>(p));
    }
    auto inv = [p](std::uint64_t x) {
        std::uint64_t r = 1, e = p - 2;
        x %= p;
        while (e) {
            if (e & 1) r = r * x % p;
            x = x * x % p;
            e >>= 1;
        }
        return r;
    };
    std::uint64_t det = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && a[piv][k] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != k) {
            std::swap(a[piv], a[k]);
            det = (p - det) % p;
        }
        det = det * a[k][k] % p;
        std::uint64_t ik = inv(a[k][k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a[i][k] == 0) continue;
            std::uint64_t f = a[i][k] * ik % p;
            for (std::size_t j = k; j < n; ++j) a[i][j] = (a[i][j] + p - f * a[k][j] % p) % p;
        }
    }
    return det;
}

/// Basis of the right null space of `a` (rows x cols), exact over Q.
inline std::vector<std::vector<Rational>> kernel(RatMatrix a, std::size_t cols) {
    std::vector<int> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < a.size(); ++col) {
        std::size_t piv = row;
        while (piv < a.size() && a[piv][col] == 0) ++piv;
        if (piv == a.size()) continue;
        std::swap(a[piv], a[row]);
        Rational inv = 1 / a[row][col];
        for (std::size_t j = col; j < cols; ++j) a[row][j] *= inv;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i == row || a[i][col] == 0) continue;
            Rational f = a[i][col];
            for (std::size_t j = col; j < cols; ++j) {
                if (a[row][j] != 0) a[i][j] -= f * a[row][j];
            }
        }
        pivot_col.push_back(static_cast<int>(col));
        ++row;
    }
    std::vector<bool> is_pivot(cols, false);
    for (int c : pivot_col) is_pivot[c] = true;
    std::vector<std::vector<Rational>> basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rational> v(cols, Rational(0));
        v[free] = 1;
        for (std::size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = -a[r][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Floating-point complex determinant (partial-pivot LU).
inline Complex determinant(const Eigen::MatrixXcd& m) {
    if (m.rows() == 0) return 1.0;
    return m.partialPivLu().determinant();
}

} // namespace critfin
