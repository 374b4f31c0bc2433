#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace maj3 {

using big_int = boost::multiprecision::mpz_int;
using rational = boost::multiprecision::mpq_rational;

// Raised when a request exceeds a hard resource limit (height caps, enumeration guards).
class resource_cap_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Accepts "p/q", an integer, or a finite decimal literal such as "2.64944"
// (converted exactly, so 2.64944 == 66236/25000).
rational parse_rational(std::string_view text);

// Always "num/den", den >= 1.
std::string to_string(const rational& value);

// Decimal expansion truncated toward -infinity after `digits` fractional digits.
// The true value lies in [result, result + 10^-digits].
std::string to_decimal_floor(const rational& value, int digits);

big_int pow_int(const big_int& base, unsigned exponent);
rational pow_rational(const rational& base, unsigned exponent);
big_int binomial(unsigned n, unsigned k);

}  // namespace maj3
