#include "maj3/rational.hpp"

#include <cctype>

namespace maj3 {

namespace {

big_int parse_integer(std::string_view digits, std::string_view whole) {
    if (digits.empty()) {
        throw std::invalid_argument("malformed number: '" + std::string(whole) + "'");
    }
    for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw std::invalid_argument("malformed number: '" + std::string(whole) + "'");
        }
    }
    return big_int(std::string(digits));
}

}  // namespace

rational parse_rational(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);

    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }

    rational result;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        big_int num = parse_integer(s.substr(0, slash), text);
        big_int den = parse_integer(s.substr(slash + 1), text);
        if (den == 0) throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
        result = rational(num, den);
    } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view int_part = s.substr(0, dot);
        std::string_view frac_part = s.substr(dot + 1);
        big_int whole = int_part.empty() ? big_int(0) : parse_integer(int_part, text);
        big_int frac = frac_part.empty() ? big_int(0) : parse_integer(frac_part, text);
        big_int scale = pow_int(10, static_cast<unsigned>(frac_part.size()));
        result = rational(whole * scale + frac, scale);
    } else {
        result = rational(parse_integer(s, text));
    }
    return negative ? rational(-result) : result;
}

std::string to_string(const rational& value) {
    return boost::multiprecision::numerator(value).str() + "/" +
           boost::multiprecision::denominator(value).str();
}

std::string to_decimal_floor(const rational& value, int digits) {
    if (digits < 0) throw std::invalid_argument("negative digit count");
    big_int scale = pow_int(10, static_cast<unsigned>(digits));
    big_int num = boost::multiprecision::numerator(value) * scale;
    big_int den = boost::multiprecision::denominator(value);
    big_int q = num / den;
    if (num < 0 && q * den != num) q -= 1;  // floor, not truncation

    bool negative = q < 0;
    std::string mag = (negative ? big_int(-q) : q).str();
    if (digits > 0) {
        if (mag.size() <= static_cast<std::size_t>(digits)) {
            mag.insert(0, static_cast<std::size_t>(digits) + 1 - mag.size(), '0');
        }
        mag.insert(mag.size() - static_cast<std::size_t>(digits), 1, '.');
    }
    return negative ? "-" + mag : mag;
}

big_int pow_int(const big_int& base, unsigned exponent) {
    return boost::multiprecision::pow(base, exponent);
}

rational pow_rational(const rational& base, unsigned exponent) {
    return rational(pow_int(boost::multiprecision::numerator(base), exponent),
                    pow_int(boost::multiprecision::denominator(base), exponent));
}

big_int binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    big_int result = 1;
    for (unsigned i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

}  // namespace maj3
