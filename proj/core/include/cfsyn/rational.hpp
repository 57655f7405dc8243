#pragma once

#include <gmpxx.h>

#include <string>

namespace cfsyn {

/// Exact rational scalar used throughout the synthesis stage. All controller
/// data is constructed in this type and only frozen to double at the end.
using Rational = mpq_class;

namespace rat {

/// Rational from an integer pair, reduced to canonical form. Throws
/// std::invalid_argument on a zero denominator.
Rational make(long num, long den = 1);

/// Parses "p/q", an integer, or a decimal string such as "-3.25" or
/// "1.5e-3" into an exact rational. Throws std::invalid_argument on
/// malformed input.
Rational from_string(const std::string& text);

/// Correctly rounded (nearest-even) conversion to double. GMP's own
/// mpq_get_d truncates, which would break bit-exact serialization
/// round-trips, so the conversion goes through a decimal string and strtod.
double to_double(const Rational& q);

/// Decimal expansion with the given number of significant digits, in
/// scientific notation for extreme magnitudes. Deterministic.
std::string to_decimal_string(const Rational& q, int significant_digits = 40);

/// Factorial as an exact integer-valued rational.
Rational factorial(unsigned k);

}  // namespace rat
}  // namespace cfsyn
