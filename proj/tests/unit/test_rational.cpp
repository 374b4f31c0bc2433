#include <doctest.h>

#include "maj3/rational.hpp"

using namespace maj3;

TEST_SUITE("rational") {
    TEST_CASE("parse accepts fractions, integers and decimals") {
        CHECK(parse_rational("3/6") == rational(1, 2));
        CHECK(parse_rational("-7") == rational(-7));
        CHECK(parse_rational("2.64944") == rational(66236, 25000));
        CHECK(parse_rational("0.559576") == rational(559576, 1000000));
        CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
        CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
        CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
    }

    TEST_CASE("canonical string") {
        CHECK(to_string(rational(2)) == "2/1");
        CHECK(to_string(rational(-6, 4)) == "-3/2");
    }

    TEST_CASE("decimal floor truncates toward minus infinity") {
        CHECK(to_decimal_floor(rational(8, 3), 3) == "2.666");
        CHECK(to_decimal_floor(rational(-1, 3), 3) == "-0.334");
        CHECK(to_decimal_floor(rational(5), 0) == "5");
    }

    TEST_CASE("integer helpers") {
        CHECK(binomial(5, 2) == 10);
        CHECK(binomial(3, 5) == 0);
        CHECK(pow_int(3, 4) == 81);
        CHECK(pow_rational(rational(2, 3), 3) == rational(8, 27));
    }
}
