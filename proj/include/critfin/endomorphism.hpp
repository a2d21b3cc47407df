#pragma once

#include "error.hpp"
#include "linalg.hpp"
#include "poly.hpp"
#include "resultant.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace critfin {

/// How the nonvanishing of Res(f_0, ..., f_k) was established.
enum class MorphismCertificate {
    exact_resultant,   ///< resultant computed exactly and nonzero
    modular_resultant, ///< Macaulay determinant nonzero modulo a prime
    composition,       ///< iterate of a validated morphism
};

inline const char* to_string(MorphismCertificate c) {
    switch (c) {
        case MorphismCertificate::exact_resultant: return "exact_resultant";
        case MorphismCertificate::modular_resultant: return "modular_resultant";
        case MorphismCertificate::composition: return "composition";
    }
    return "unknown";
}

/// Holomorphic self-map of P^k (k = 1, 2) given by k+1 forms of common degree d > 1
/// without a common projective zero.
class Endomorphism {
public:
    /// Largest Macaulay matrix for which the exact resultant is computed eagerly.
    static constexpr std::size_t exact_resultant_rows = 300;

    /// Validates forms and caches the resultant.
    static Endomorphism create(std::vector<HomogPoly> forms) {
        if (forms.size() != 2 && forms.size() != 3) {
            throw Error(ErrorKind::invalid_argument, "an endomorphism of P^1 or P^2 needs 2 or 3 forms");
        }
        const int nv = static_cast<int>(forms.size());
        int d = -1;
        for (const auto& f : forms) {
            if (f.num_vars() != nv) {
                throw Error(ErrorKind::invalid_argument,
                            "form has " + std::to_string(f.num_vars()) + " variables, expected " + std::to_string(nv));
            }
            if (f.is_zero()) throw Error(ErrorKind::not_a_morphism, "zero form: every point is a common zero");
            if (d < 0) d = f.degree();
            if (f.degree() != d) {
                throw Error(ErrorKind::invalid_argument, "degree mismatch among forms: " + std::to_string(d) + " vs " +
                                                             std::to_string(f.degree()));
            }
        }
        if (d <= 1) throw Error(ErrorKind::invalid_argument, "degree must exceed 1, got " + std::to_string(d));

        Endomorphism e(std::move(forms));
        if (nv == 2 || macaulay_size(d, d, d) <= exact_resultant_rows) {
            Rational r = critfin::resultant(std::span<const HomogPoly>(e.forms_));
            if (r == 0) throw Error(ErrorKind::not_a_morphism, "forms share a common projective zero (resultant 0)");
            e.resultant_ = r;
            e.certificate_ = MorphismCertificate::exact_resultant;
        } else if (resultant_nonzero_modular(std::span<const HomogPoly>(e.forms_))) {
            e.certificate_ = MorphismCertificate::modular_resultant;
        } else {
            Rational r = critfin::resultant(std::span<const HomogPoly>(e.forms_));
            if (r == 0) throw Error(ErrorKind::not_a_morphism, "forms share a common projective zero (resultant 0)");
            e.resultant_ = r;
            e.certificate_ = MorphismCertificate::exact_resultant;
        }
        return e;
    }

    /// Composition f o g of validated morphisms, with common content removed. No revalidation.
    static Endomorphism compose(const Endomorphism& f, const Endomorphism& g) {
        if (f.k() != g.k()) throw Error(ErrorKind::invalid_argument, "compose: dimension mismatch");
        std::vector<HomogPoly> out;
        for (const auto& fi : f.forms_) out.push_back(fi.compose(g.forms_));
        Rational s = content_scalar(out);
        for (auto& h : out) h = s * h;
        Endomorphism e(std::move(out));
        e.certificate_ = MorphismCertificate::composition;
        return e;
    }

    int k() const { return static_cast<int>(forms_.size()) - 1; }
    int num_vars() const { return static_cast<int>(forms_.size()); }
    int degree() const { return forms_[0].degree(); }
    const std::vector<HomogPoly>& forms() const { return forms_; }
    const std::vector<NumericForm>& numeric_forms() const { return numeric_; }
    const std::optional<Rational>& resultant() const { return resultant_; }
    MorphismCertificate certificate() const { return certificate_; }

    std::vector<Rational> apply(std::span<const Rational> x) const {
        std::vector<Rational> y;
        y.reserve(forms_.size());
        for (const auto& f : forms_) y.push_back(f.evaluate(x));
        return y;
    }

    std::vector<Complex> apply(std::span<const Complex> x) const {
        std::vector<Complex> y;
        y.reserve(numeric_.size());
        for (const auto& f : numeric_) y.push_back(f(x));
        return y;
    }

    /// Jacobian matrix of the forms, entry (i, j) = d f_i / d x_j.
    std::vector<std::vector<HomogPoly>> jacobian() const {
        std::vector<std::vector<HomogPoly>> jac;
        for (const auto& f : forms_) {
            std::vector<HomogPoly> row;
            for (int j = 0; j < num_vars(); ++j) row.push_back(f.derivative(j));
            jac.push_back(std::move(row));
        }
        return jac;
    }

    /// det of the homogeneous (k+1)x(k+1) Jacobian, degree (k+1)(d-1) before reduction.
    HomogPoly jacobian_determinant() const {
        auto j = jacobian();
        if (num_vars() == 2) return j[0][0] * j[1][1] - j[0][1] * j[1][0];
        return j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
               j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    }

    /// Componentwise equality of normalized tuples (same map on P^k up to one common scalar).
    bool same_map(const Endomorphism& o) const {
        if (o.forms_.size() != forms_.size()) return false;
        Rational a = content_scalar(forms_), b = content_scalar(o.forms_);
        for (std::size_t i = 0; i < forms_.size(); ++i) {
            if (!(a * forms_[i] == b * o.forms_[i])) return false;
        }
        return true;
    }

    std::vector<std::string> to_strings() const {
        std::vector<std::string> out;
        for (const auto& f : forms_) out.push_back(f.to_string());
        return out;
    }

private:
    explicit Endomorphism(std::vector<HomogPoly> forms) : forms_(std::move(forms)) {
        for (const auto& f : forms_) numeric_.emplace_back(f);
    }

    /// Scalar making the whole tuple primitive integral with the first nonzero leading coefficient positive.
    static Rational content_scalar(const std::vector<HomogPoly>& forms) {
        Integer den = 1, num = 0;
        for (const auto& f : forms) {
            for (const auto& [e, c] : f.terms()) {
                den = lcm(den, c.get_den());
                num = gcd(num, c.get_num());
            }
        }
        Rational s(den, num);
        s.canonicalize();
        for (const auto& f : forms) {
            if (!f.is_zero()) {
                if (f.terms().begin()->second < 0) s = -s;
                break;
            }
        }
        return s;
    }

    std::vector<HomogPoly> forms_;
    std::vector<NumericForm> numeric_;
    std::optional<Rational> resultant_;
    MorphismCertificate certificate_ = MorphismCertificate::exact_resultant;
};

} // namespace critfin
