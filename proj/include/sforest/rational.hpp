#pragma once

#include <gmpxx.h>

#include <string>

#include "sforest/cost.hpp"

namespace sforest {

using Rational = mpq_class;

// "num/den" with den > 0, always including the denominator.
std::string to_string(const Rational& q);

// Accepts "p/q", integers and plain decimals such as "0.25".
Rational parse_rational(const std::string& text);

inline Rational to_rational(Length v) { return Rational(mpz_class(std::to_string(v), 10)); }

}  // namespace sforest
