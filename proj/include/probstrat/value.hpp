#pragma once

#include <gmpxx.h>

#include <string>
#include <variant>

namespace probstrat {

using Rational = mpq_class;

// Parses "p/q", an integer, or a decimal literal such as "0.25" into an
// exact rational. Throws FormatError on anything else.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);

// A probability or weight that stays an exact rational until an
// approximate (floating) operand enters the computation.
class Prob {
public:
    Prob() : v_(Rational(0)) {}
    Prob(const Rational& q) : v_(q) { std::get<Rational>(v_).canonicalize(); }
    Prob(long n) : v_(Rational(n)) {}
    static Prob approx(double d) { Prob p; p.v_ = d; return p; }

    bool exact() const { return std::holds_alternative<Rational>(v_); }
    const Rational& rational() const { return std::get<Rational>(v_); }
    double to_double() const;

    bool is_zero() const;
    bool is_one() const;

    Prob& operator+=(const Prob& o);
    Prob& operator-=(const Prob& o);
    Prob& operator*=(const Prob& o);
    Prob& operator/=(const Prob& o);

    friend Prob operator+(Prob a, const Prob& b) { return a += b; }
    friend Prob operator-(Prob a, const Prob& b) { return a -= b; }
    friend Prob operator*(Prob a, const Prob& b) { return a *= b; }
    friend Prob operator/(Prob a, const Prob& b) { return a /= b; }

    // Exact comparison when both sides are exact, plain double comparison otherwise.
    friend bool operator==(const Prob& a, const Prob& b);
    friend bool operator<(const Prob& a, const Prob& b);
    friend bool operator<=(const Prob& a, const Prob& b) { return !(b < a); }

    // "p/q" when exact, otherwise 12 significant digits followed by " approx".
    std::string str() const;
    // Lossless text form for files: "p/q", or "~" plus a 17-digit decimal.
    std::string serialize() const;

private:
    std::variant<Rational, double> v_;
};

// Parses what Prob::serialize writes. Plain decimals are read exactly
// ("0.5" is 1/2); a leading "~" marks an approximate value.
Prob parse_prob(const std::string& text);

bool approx_equal(const Prob& a, const Prob& b, double tol);

} // namespace probstrat
