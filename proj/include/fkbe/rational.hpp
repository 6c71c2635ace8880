#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <string>

namespace fkbe {

using Rational = boost::multiprecision::cpp_rational;

// Exact value of a binary double.
inline Rational to_rational(double v) { return Rational(v); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// "p", "-p" or "p/q"; throws std::invalid_argument otherwise.
Rational parse_rational(const std::string& text);

// Shortest exact decimal if one exists with <= 17 digits, else p/q.
std::string format_rational(const Rational& r);

inline bool is_zero(const Rational& r) { return r == 0; }
inline bool is_zero(double v) { return std::abs(v) <= 1e-10; }

}  // namespace fkbe
