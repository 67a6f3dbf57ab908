#include "probstrat/value.hpp"

#include "probstrat/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace probstrat {

namespace {

bool all_digits(const std::string& s, size_t from, size_t to) {
    if (from >= to) return false;
    for (size_t i = from; i < to; ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

} // namespace

Rational parse_rational(const std::string& text) {
    std::string s = text;
    bool neg = false;
    size_t start = 0;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) { neg = s[0] == '-'; start = 1; }
    Rational q;
    if (auto slash = s.find('/'); slash != std::string::npos) {
        if (!all_digits(s, start, slash) || !all_digits(s, slash + 1, s.size()))
            throw FormatError("rational", "bad fraction '" + text + "'");
        mpz_class num(s.substr(start, slash - start), 10), den(s.substr(slash + 1), 10);
        if (den == 0) throw FormatError("rational", "zero denominator in '" + text + "'");
        q = Rational(num, den);
        q.canonicalize();
    } else if (auto dot = s.find('.'); dot != std::string::npos) {
        bool int_ok = dot == start || all_digits(s, start, dot);
        if (!int_ok || !all_digits(s, dot + 1, s.size()))
            throw FormatError("rational", "bad decimal '" + text + "'");
        std::string digits = s.substr(start, dot - start) + s.substr(dot + 1);
        mpz_class num(digits.empty() ? "0" : digits, 10); // base 10: "025" is not octal
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, s.size() - dot - 1);
        q = Rational(num, den);
        q.canonicalize();
    } else {
        if (!all_digits(s, start, s.size()))
            throw FormatError("rational", "bad number '" + text + "'");
        q = Rational(mpz_class(s.substr(start), 10));
    }
    return neg ? Rational(-q) : q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

double Prob::to_double() const {
    if (exact()) return rational().get_d();
    return std::get<double>(v_);
}

bool Prob::is_zero() const { return exact() ? rational() == 0 : std::get<double>(v_) == 0.0; }
bool Prob::is_one() const { return exact() ? rational() == 1 : std::get<double>(v_) == 1.0; }

Prob& Prob::operator+=(const Prob& o) {
    if (exact() && o.exact()) v_ = Rational(rational() + o.rational());
    else v_ = to_double() + o.to_double();
    return *this;
}

Prob& Prob::operator-=(const Prob& o) {
    if (exact() && o.exact()) v_ = Rational(rational() - o.rational());
    else v_ = to_double() - o.to_double();
    return *this;
}

Prob& Prob::operator*=(const Prob& o) {
    // exact zero annihilates even approximate factors
    if ((exact() && rational() == 0) || (o.exact() && o.rational() == 0)) { v_ = Rational(0); return *this; }
    if (exact() && o.exact()) v_ = Rational(rational() * o.rational());
    else v_ = to_double() * o.to_double();
    return *this;
}

Prob& Prob::operator/=(const Prob& o) {
    if (o.is_zero()) throw Error("prob", "DivisionByZero", "");
    if (exact() && o.exact()) v_ = Rational(rational() / o.rational());
    else v_ = to_double() / o.to_double();
    return *this;
}

bool operator==(const Prob& a, const Prob& b) {
    if (a.exact() && b.exact()) return a.rational() == b.rational();
    return a.to_double() == b.to_double();
}

bool operator<(const Prob& a, const Prob& b) {
    if (a.exact() && b.exact()) return a.rational() < b.rational();
    return a.to_double() < b.to_double();
}

std::string Prob::str() const {
    if (exact()) return rational().get_str();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", to_double());
    return std::string(buf) + " approx";
}

std::string Prob::serialize() const {
    if (exact()) return rational().get_str();
    char buf[64];
    std::snprintf(buf, sizeof buf, "~%.17g", to_double());
    return buf;
}

Prob parse_prob(const std::string& text) {
    if (!text.empty() && text[0] == '~') {
        char* end = nullptr;
        double d = std::strtod(text.c_str() + 1, &end);
        if (end == text.c_str() + 1 || *end != '\0')
            throw FormatError("probability", "bad approximate value '" + text + "'");
        return Prob::approx(d);
    }
    return Prob(parse_rational(text));
}

bool approx_equal(const Prob& a, const Prob& b, double tol) {
    if (a.exact() && b.exact()) return a.rational() == b.rational() || std::fabs((a - b).to_double()) <= tol;
    return std::fabs(a.to_double() - b.to_double()) <= tol;
}

} // namespace probstrat
