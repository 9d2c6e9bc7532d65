#include "coalnet/rational.hpp"
#include "coalnet/errors.hpp"

#include <cctype>
#include <sstream>

namespace coalnet {

namespace {

BigInt pow10(long e) {
    BigInt r = 1;
    for (long i = 0; i < e; ++i) r *= 10;
    return r;
}

Rational parse_decimal(const std::string& s) {
    // [+-]? digits [. digits] [eE [+-] digits]
    size_t pos = 0;
    bool neg = false;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
        neg = s[pos] == '-';
        ++pos;
    }
    std::string int_part, frac_part;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) int_part += s[pos++];
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) frac_part += s[pos++];
    }
    long exp10 = 0;
    if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
        ++pos;
        bool eneg = false;
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
            eneg = s[pos] == '-';
            ++pos;
        }
        std::string digits;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) digits += s[pos++];
        if (digits.empty()) throw ParseError("malformed exponent in number '" + s + "'");
        exp10 = std::stol(digits);
        if (eneg) exp10 = -exp10;
    }
    if (pos != s.size() || (int_part.empty() && frac_part.empty()))
        throw ParseError("malformed number '" + s + "'");

    BigInt mantissa = 0;
    for (char c : int_part + frac_part) mantissa = mantissa * 10 + (c - '0');
    if (neg) mantissa = -mantissa;
    long shift = exp10 - static_cast<long>(frac_part.size());
    Rational r(mantissa);
    if (shift > 0)
        r *= Rational(pow10(shift));
    else if (shift < 0)
        r /= Rational(pow10(-shift));
    return r;
}

} // namespace

Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw ParseError("empty number");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rational num = parse_decimal(s.substr(0, slash));
        Rational den = parse_decimal(s.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator in '" + text + "'");
        return num / den;
    }
    return parse_decimal(s);
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::string rat_to_string(const Rational& q) {
    std::ostringstream os;
    if (denominator(q) == 1)
        os << numerator(q);
    else
        os << numerator(q) << "/" << denominator(q);
    return os.str();
}

std::string ratvec_to_string(const RatVec& v) {
    std::string out = "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += rat_to_string(v[i]);
    }
    return out + ")";
}

} // namespace coalnet
