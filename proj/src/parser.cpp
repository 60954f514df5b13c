#include "ffdyn/parser.hpp"

#include <cctype>

namespace ffdyn {

namespace {

struct Parser {
    const std::string& s;
    size_t pos = 0;
    ConstantField field;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("parse error at position " + std::to_string(pos) + ": " + what);
    }

    long integer() {
        skip();
        size_t start = pos;
        if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) fail("expected integer");
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        return std::stol(s.substr(start, pos - start));
    }

    RatFunc expr() {
        RatFunc r = term();
        for (;;) {
            skip();
            if (eat('+'))
                r = r + term();
            else if (eat('-'))
                r = r - term();
            else
                return r;
        }
    }

    RatFunc term() {
        RatFunc r = factor();
        for (;;) {
            skip();
            if (eat('*'))
                r = r * factor();
            else if (eat('/')) {
                RatFunc d = factor();
                if (d.is_zero()) throw std::invalid_argument("division by zero polynomial");
                r = r / d;
            } else
                return r;
        }
    }

    RatFunc factor() {
        skip();
        if (eat('-')) return -factor();
        if (eat('+')) return factor();
        RatFunc b = base();
        skip();
        if (eat('^')) {
            long e = integer();
            return b.pow(e);
        }
        return b;
    }

    RatFunc base() {
        skip();
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (c == '(') {
            ++pos;
            RatFunc r = expr();
            if (!eat(')')) fail("expected ')'");
            return r;
        }
        if (c == 't') {
            ++pos;
            return RatFunc::variable(field);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            Rat v(Int(s.substr(start, pos - start)));
            return RatFunc::constant(field, v);
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

} // namespace

RatFunc parse_rat_func(const std::string& text, const ConstantField& field) {
    Parser p{text, 0, field};
    RatFunc r = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing input");
    return r;
}

Place parse_place(const std::string& text, const ConstantField& field) {
    std::string trimmed;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
    if (trimmed == "inf" || trimmed == "infinity" || trimmed == "oo")
        return Place::infinity(field);
    RatFunc f = parse_rat_func(text, field);
    if (!f.den().is_one()) throw std::invalid_argument("place must be a polynomial: " + text);
    return Place::finite(f.num().monic());
}

} // namespace ffdyn
