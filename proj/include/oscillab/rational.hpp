#ifndef OSCILLAB_RATIONAL_HPP
#define OSCILLAB_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace oscillab {

/// Exact rational numbers used for coefficients and polytope arithmetic.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline BigInt numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// "p/q", or "p" when the denominator is 1.
inline std::string to_string(const Rational& q)
{
    const BigInt den = denominator_of(q);
    if (den == 1) return numerator_of(q).str();
    return numerator_of(q).str() + "/" + den.str();
}

/// Decimal integer literal; leading zeros are not treated as an octal prefix.
inline BigInt parse_integer(std::string text)
{
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.erase(0, 1);
    }
    if (text.empty()) throw std::invalid_argument("empty integer literal");
    for (char c : text)
        if (c < '0' || c > '9') throw std::invalid_argument("bad integer literal '" + text + "'");
    const auto first = text.find_first_not_of('0');
    BigInt value = first == std::string::npos ? BigInt(0) : BigInt(text.substr(first));
    return negative ? BigInt(-value) : value;
}

/// Parses "p/q", "p", or a finite decimal such as "-0.125" exactly.
inline Rational parse_rational(const std::string& text)
{
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const BigInt p = parse_integer(text.substr(0, slash));
        const BigInt q = parse_integer(text.substr(slash + 1));
        if (q == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
        return Rational(p, q);
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(parse_integer(text));
    const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    const std::size_t frac = text.size() - dot - 1;
    BigInt scale = 1;
    for (std::size_t i = 0; i < frac; ++i) scale *= 10;
    return Rational(parse_integer(digits), scale);
}

inline BigInt lcm_of_denominators(const std::vector<Rational>& values)
{
    BigInt acc = 1;
    for (const auto& v : values) acc = boost::multiprecision::lcm(acc, denominator_of(v));
    return acc;
}

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

} // namespace oscillab

#endif // OSCILLAB_RATIONAL_HPP
