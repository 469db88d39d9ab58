#pragma once
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <string>

#include "exterior.hpp"

namespace g2forge {

using Vars = std::map<std::string, double>;

namespace detail {

// A parsed value is a scalar or, in form mode, a form.
struct Value {
    bool is_form = false;
    double s = 0.0;
    Form f;
};

class Parser {
public:
    Parser(const std::string& text, const Vars& vars, int form_dim)
        : src_(text), vars_(vars), n_(form_dim) {}

    Value parse() {
        Value v = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("expression: " + msg + " at offset " + std::to_string(pos_) + " in \"" + src_ + "\"");
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    Value add(Value a, const Value& b, double sign) {
        if (!a.is_form && !b.is_form) {
            a.s += sign * b.s;
            return a;
        }
        if (a.is_form && b.is_form) {
            if (a.f.grade() != b.f.grade()) fail("adding forms of different grades");
            if (sign > 0) a.f += b.f;
            else a.f -= b.f;
            return a;
        }
        // scalar literal 0 is the additive identity for forms
        if (!a.is_form && a.s == 0.0) {
            Value r = b;
            if (sign < 0) r.f *= -1.0;
            return r;
        }
        if (!b.is_form && b.s == 0.0) return a;
        fail("adding a scalar to a form");
    }

    Value mul(const Value& a, const Value& b) {
        Value r;
        if (!a.is_form && !b.is_form) {
            r.s = a.s * b.s;
        } else if (a.is_form && b.is_form) {
            r.is_form = true;
            r.f = wedge(a.f, b.f);
        } else {
            r.is_form = true;
            r.f = a.is_form ? a.f * b.s : b.f * a.s;
        }
        return r;
    }

    Value expr() {
        Value v = term();
        for (;;) {
            if (accept('+')) v = add(v, term(), 1.0);
            else if (accept('-')) v = add(v, term(), -1.0);
            else return v;
        }
    }

    Value term() {
        Value v = unary();
        for (;;) {
            if (accept('*')) {
                v = mul(v, unary());
            } else if (accept('/')) {
                Value d = unary();
                if (d.is_form) fail("division by a form");
                if (d.s == 0.0) fail("division by zero");
                if (v.is_form) v.f *= 1.0 / d.s;
                else v.s /= d.s;
            } else {
                return v;
            }
        }
    }

    Value unary() {
        if (accept('-')) {
            Value v = unary();
            if (v.is_form) v.f *= -1.0;
            else v.s = -v.s;
            return v;
        }
        if (accept('+')) return unary();
        return power();
    }

    Value power() {
        Value base = primary();
        if (accept('^')) {
            Value ex = unary();
            if (base.is_form || ex.is_form) fail("'^' applies to scalars only");
            base.s = std::pow(base.s, ex.s);
        }
        return base;
    }

    Value primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Value v = expr();
            expect(')');
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail(std::string("unexpected '") + c + "'");
    }

    Value number() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            // exponent only if followed by a digit or sign+digit; otherwise 'e' starts a basis form
            std::size_t q = pos_ + 1;
            if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
            if (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q])) && n_ < 0) {
                pos_ = q;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        Value v;
        try {
            v.s = std::stod(src_.substr(start, pos_ - start));
        } catch (...) {
            fail("malformed number");
        }
        return v;
    }

    Value identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        std::string name = src_.substr(start, pos_ - start);
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '(') {
            ++pos_;
            Value arg = expr();
            expect(')');
            if (arg.is_form) fail("function of a form");
            Value r;
            if (name == "sqrt") {
                if (arg.s < 0) fail("sqrt of a negative number");
                r.s = std::sqrt(arg.s);
            } else if (name == "abs") {
                r.s = std::abs(arg.s);
            } else {
                fail("unknown function " + name);
            }
            return r;
        }
        auto it = vars_.find(name);
        if (it != vars_.end()) {
            Value r;
            r.s = it->second;
            return r;
        }
        if (n_ > 0 && name == "e" && pos_ < src_.size() && src_[pos_] == '{') return brace_form();
        if (n_ > 0 && name.size() >= 2 && name[0] == 'e') {
            std::vector<int> idx;
            for (std::size_t k = 1; k < name.size(); ++k) {
                if (!std::isdigit(static_cast<unsigned char>(name[k]))) fail("unknown identifier " + name);
                idx.push_back(name[k] - '0');
            }
            return basis_form(idx);
        }
        fail("unknown identifier " + name);
    }

    Value basis_form(const std::vector<int>& idx) {
        for (int i : idx)
            if (i < 1 || i > n_) fail("basis index out of range 1.." + std::to_string(n_));
        Value r;
        r.is_form = true;
        r.f = Form::basis(n_, idx);
        return r;
    }

    Value brace_form() {
        expect('{');
        std::vector<int> idx;
        skip_ws();
        if (!accept('}')) {
            for (;;) {
                skip_ws();
                std::size_t start = pos_;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
                if (start == pos_) fail("expected an index");
                idx.push_back(std::stoi(src_.substr(start, pos_ - start)));
                if (accept('}')) break;
                expect(',');
            }
        }
        return basis_form(idx);
    }

    std::string src_;
    const Vars& vars_;
    int n_;  // < 0: scalar-only mode
    std::size_t pos_ = 0;
};

inline std::string strip_comments(const std::string& text) {
    std::string out;
    bool skip = false;
    for (char c : text) {
        if (c == '#') skip = true;
        if (c == '\n') skip = false;
        if (!skip) out += c;
    }
    return out;
}

}  // namespace detail

inline double eval_scalar(const std::string& text, const Vars& vars = {}) {
    detail::Parser p(text, vars, -1);
    return p.parse().s;
}

// grade < 0: take the grade of the parsed expression
inline Form parse_form(const std::string& text, int n, int grade = -1, const Vars& vars = {}) {
    if (n < 1 || n > kMaxDim) throw DimensionError("parse_form: dimension must be in 1..7");
    std::string clean = detail::strip_comments(text);
    detail::Parser p(clean, vars, n);
    detail::Value v = p.parse();
    if (!v.is_form) {
        if (v.s == 0.0 && grade >= 0) return Form(n, grade);
        if (grade == 0) return Form::scalar(n, v.s);
        throw ParseError("parse_form: expression is a scalar, not a form");
    }
    if (grade >= 0 && v.f.grade() != grade)
        throw ParseError("parse_form: expected grade " + std::to_string(grade) + ", got " +
                         std::to_string(v.f.grade()));
    return v.f;
}

// vectors use the same syntax with e1..en as basis vectors
inline Vector parse_vector(const std::string& text, int n, const Vars& vars = {}) {
    return parse_form(text, n, 1, vars).to_vector();
}

}  // namespace g2forge
