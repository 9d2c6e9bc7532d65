#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

namespace coalnet {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

using RatVec = std::vector<Rational>;

/// Parse "42", "-0.125", "1e-3" or "2/7" into an exact rational.
Rational parse_rational(const std::string& text);

double to_double(const Rational& q);

/// Compact rendering: integers as-is, otherwise "p/q".
std::string rat_to_string(const Rational& q);

std::string ratvec_to_string(const RatVec& v);

} // namespace coalnet
