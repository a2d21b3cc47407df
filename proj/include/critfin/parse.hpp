#pragma once

// Polynomial expression grammar (whitespace ignored):
//
//   expr    = term { ("+" | "-") term } ;
//   term    = unary { "*" unary } ;
//   unary   = ("+" | "-") unary | power ;
//   power   = primary [ "^" integer ] ;
//   primary = integer [ "/" integer ] | variable | "(" expr ")" ;
//   variable = "z" | "w" | "t" ;
//
// `t` is only legal for forms on P^2. The canonical rendering produced by
// Poly::to_string() is accepted by this grammar.

#include "error.hpp"
#include "poly.hpp"

#include <cctype>
#include <string>
#include <string_view>

namespace critfin {

namespace detail {

class PolyParser {
public:
    PolyParser(std::string_view text, int nvars) : text_(text), nvars_(nvars) {}

    Poly parse() {
        Poly p = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorKind::syntax, "parse error at position " + std::to_string(pos_) + ": " + msg);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Poly expr() {
        Poly acc = term();
        for (;;) {
            if (accept('+')) {
                acc += term();
            } else if (accept('-')) {
                acc -= term();
            } else {
                return acc;
            }
        }
    }

    Poly term() {
        Poly acc = unary();
        while (accept('*')) acc *= unary();
        return acc;
    }

    Poly unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Poly power() {
        Poly base = primary();
        if (accept('^')) {
            skip_ws();
            Integer e = integer();
            if (e > 4096) fail("exponent too large");
            return base.pow(static_cast<unsigned>(e.get_ui()));
        }
        return base;
    }

    Integer integer() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail("expected integer");
        return Integer(std::string(text_.substr(start, pos_ - start)));
    }

    Poly primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Integer num = integer();
            Integer den = 1;
            if (accept('/')) {
                den = integer();
                if (den == 0) fail("zero denominator");
            }
            Rational r(num, den);
            r.canonicalize();
            return Poly::constant(nvars_, r);
        }
        if (c == '(') {
            ++pos_;
            Poly inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        int var = c == 'z' ? 0 : c == 'w' ? 1 : c == 't' ? 2 : -1;
        if (var < 0) fail("unexpected character '" + std::string(1, c) + "'");
        if (var >= nvars_) fail("variable t is not available on P^1");
        ++pos_;
        return Poly::variable(nvars_, var);
    }

    std::string_view text_;
    int nvars_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses and expands `text`; throws ErrorKind::syntax or ErrorKind::inhomogeneous.
inline HomogPoly poly_parse(std::string_view text, int nvars = 3) {
    return HomogPoly(detail::PolyParser(text, nvars).parse());
}

/// Parses an arbitrary (possibly inhomogeneous) expression.
inline Poly poly_parse_affine(std::string_view text, int nvars = 3) {
    return detail::PolyParser(text, nvars).parse();
}

} // namespace critfin
