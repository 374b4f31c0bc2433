#include <doctest.h>

#include "maj3/recurrence.hpp"

using namespace maj3;

TEST_SUITE("recurrence") {
    TEST_CASE("base cases and the first substitution") {
        const auto table = solve(3);
        CHECK(table.at(0).t == 1);
        CHECK_FALSE(table.at(0).s_major.has_value());
        CHECK(table.at(1).t == rational(8, 3));
        CHECK(*table.at(1).s_major == rational(3, 2));
        CHECK(*table.at(1).s_minor == 2);
        CHECK(table.at(2).t == rational(571, 81));
        CHECK_THROWS_AS(table.at(4), std::out_of_range);
        CHECK_THROWS_AS(solve(0), std::invalid_argument);
    }

    TEST_CASE("ordering and growth up to height 40") {
        const auto table = solve(40);
        CHECK(ordering_violations(table).empty());
        const auto ratio = growth_ratio(table, 40);
        CHECK(ratio >= parse_rational("2.64"));
        CHECK(ratio <= parse_rational("2.64944"));
        rational bound = parse_rational("1.007");
        for (int h = 0; h <= 40; ++h) {
            CHECK(table.at(h).t <= bound);
            bound *= parse_rational("2.64944");
        }
    }

    TEST_CASE("standard ansatz") {
        const auto ans = ansatz::standard();
        CHECK(ans.alpha == parse_rational("2.64944"));
        CHECK(ans.b == parse_rational("0.559576") * ans.a);
        const auto report = verify_ansatz(ans);
        CHECK(report.checks.size() == 7);
        CHECK(report.ok());
        CHECK(report.violations().empty());
    }

    TEST_CASE("a smaller growth rate breaks the ansatz") {
        auto ans = ansatz::standard();
        ans.alpha = parse_rational("2.6");
        CHECK_FALSE(verify_ansatz(ans).ok());
        ans = ansatz::standard();
        ans.a = parse_rational("0.99");
        CHECK_FALSE(verify_ansatz(ans).ok());
    }

    TEST_CASE("binomial bound closed forms") {
        for (int h = 0; h <= 20; ++h) {
            for (int q : {2, 3}) {
                std::vector<rational> p;
                for (int i = 0; i <= h; ++i) p.push_back(pow_rational(rational(1, q), i));
                CHECK(jks_bound(p, h) == pow_rational(2 + rational(1, q), h));
            }
        }
        CHECK_THROWS_AS(jks_bound({1}, 2), std::invalid_argument);
    }

    TEST_CASE("integer roots") {
        CHECK(floor_root(27, 3) == 3);
        CHECK(floor_root(26, 3) == 2);
        CHECK(floor_root(0, 5) == 0);
        const auto exact = kth_root(rational(16, 81), 4, 6);
        CHECK(exact.exact());
        CHECK(exact.low == rational(2, 3));
        const auto two = kth_root(rational(2), 2, 12);
        CHECK(two.low * two.low <= 2);
        CHECK(two.high * two.high >= 2);
        CHECK(two.width() <= pow_rational(rational(1, 10), 12));
    }

    TEST_CASE("lower-bound enclosures") {
        const auto k1 = lower_bound(1, 2, 0, 3, 6);
        CHECK(k1.base.exact());
        CHECK(k1.base.low == rational(5, 2));
        CHECK(k1.value.low == pow_rational(rational(5, 2), 3));

        const auto k2 = lower_bound(2, rational(24, 7), 0, 1, 8);
        CHECK(k2.base.low > parse_rational("2.54006"));
        CHECK(k2.base.width() <= pow_rational(rational(1, 10), 8));

        const auto k4 = lower_bound(4, rational(2027349, 216164), rational(1, 4), 2, 9);
        CHECK(k4.base.low > parse_rational("2.57143"));
        CHECK(k4.value.low <= k4.value.high);

        CHECK_THROWS_AS(lower_bound(1, 0, 0, 1, 6), std::invalid_argument);
        CHECK_THROWS_AS(lower_bound(1, 2, rational(1, 2), 1, 6), std::invalid_argument);
    }
}
