#include <doctest.h>

#include <algorithm>

#include "maj3/alphadp.hpp"
#include "maj3/oracles.hpp"

using namespace maj3;

TEST_SUITE("oracles") {
    TEST_CASE("tree counts") {
        CHECK(count_trees(0) == 1);
        CHECK(count_trees(1) == 2);
        CHECK(count_trees(2) == 9);
        CHECK(count_trees(3) == 244);
        const auto trees = enumerate_trees_k1();
        CHECK(trees.size() == 244);
        CHECK(trees.front().is_stop());
        const auto equality = explicit_tree::parse("(q 1 STOP (q 2 STOP STOP))");
        CHECK(std::find(trees.begin(), trees.end(), equality) != trees.end());
    }

    TEST_CASE("s-expression round trip and validation") {
        const auto t = explicit_tree::parse("(q 1 (q 2 STOP STOP) STOP)");
        CHECK(t.to_sexpr() == "(q 1 (q 2 STOP STOP) STOP)");
        CHECK(t.size() == 2);
        CHECK(t.leaf() == 1);
        CHECK(t.next(0).leaf() == 2);
        CHECK(t.next(1).is_stop());
        CHECK_NOTHROW(t.validate(3));
        CHECK_THROWS_AS(explicit_tree::parse("(q 1 STOP (q 4 STOP STOP))").validate(3), std::invalid_argument);
        CHECK_THROWS_AS(explicit_tree::parse("(q 1 STOP (q 1 STOP STOP))").validate(3), std::invalid_argument);
        CHECK_THROWS_AS(explicit_tree::parse("(q 1 STOP"), std::invalid_argument);
    }

    TEST_CASE("hard input enumeration") {
        CHECK(enumerate_hard(0).size() == 2);
        CHECK(enumerate_hard(1).size() == 6);
        CHECK(enumerate_hard(2).size() == 162);
        CHECK(enumerate_hard(2, 0).size() == 81);
        for (const auto& x : enumerate_hard(2, 1)) CHECK(x.root_value() == 1);
        CHECK_THROWS_AS(enumerate_hard(3), resource_cap_error);
    }

    TEST_CASE("rho of small trees") {
        const auto stop = rho_exhaustive(explicit_tree::stop(), 1, 5);
        CHECK(stop.rho == 0);
        CHECK(stop.pi_q == 0);
        CHECK(stop.pi_m == 0);
        // x1 is sensitive on two of the three 0-hard inputs and the minority on one.
        const auto one = explicit_tree::parse("(q 1 STOP STOP)");
        for (const auto& a : {rational(0), rational(1), rational(7, 2)}) {
            const auto r = rho_exhaustive(one, 1, a);
            CHECK(r.pi_q == rational(2, 3));
            CHECK(r.pi_m == rational(1, 3));
            CHECK(r.rho == (1 - a) / 3);
        }
        CHECK(alpha_of_tree(one, 1) == rational(1));
        CHECK_FALSE(alpha_of_tree(explicit_tree::stop(), 1).has_value());
        CHECK_THROWS_AS(rho_exhaustive(explicit_tree::parse("(q 4 STOP STOP)"), 1, 0), std::invalid_argument);
        CHECK_THROWS_AS(rho_exhaustive(one, 3, 0), resource_cap_error);
    }

    TEST_CASE("one-level inequality") {
        CHECK(one_level_gadget(0, 1) == std::array<int, 3>{0, 0, 1});
        CHECK(one_level_gadget(1, 2) == std::array<int, 3>{1, 1, 0});
        CHECK(one_level_gadget(0, 3) == std::array<int, 3>{0, 1, 0});
        const auto report = verify_one_level_inequality();
        CHECK(report.all_hold);
        CHECK(report.trees == 244);
        CHECK(report.max_ratio == 2);
        CHECK(report.equality_trees >= 1);
        CHECK(report.worst == explicit_tree::parse("(q 1 STOP (q 2 STOP STOP))"));
    }

    TEST_CASE("tree enumeration agrees with the program at k = 1") {
        alpha_dp dp(1);
        for (const auto& a : {rational(0), rational(1), rational(3, 2), rational(2), rational(3), rational(9, 4)}) {
            CHECK(max_rho_k1(a) == dp.optimize(a).rho);
        }
    }

    TEST_CASE("C' anchor") {
        const auto c = build_c_prime();
        CHECK(c.leaf() == 1);
        CHECK_NOTHROW(c.validate(9));
        CHECK(explicit_tree::parse(c.to_sexpr()) == c);
        for (const auto& a : {rational(0), rational(3), rational(24, 7), rational(4)}) {
            CHECK(rho_exhaustive(c, 2, a).rho == (48 - 14 * a) / 81);
        }
        CHECK(rho_exhaustive(c, 2, 3).rho == rational(2, 27));
        CHECK(alpha_of_tree(c, 2) == rational(24, 7));
        CHECK(alpha_of_tree(build_c_zero(), 2) == rational(3));

        alpha_dp dp(2);
        for (const auto& a : {rational(0), rational(2), rational(3), rational(10, 3), rational(24, 7), rational(5)}) {
            const auto best = dp.optimize(a).rho;
            const auto anchor = rho_exhaustive(c, 2, a).rho;
            CHECK(best >= anchor);
            if (a >= 3 && a <= rational(24, 7)) CHECK(best == anchor);
        }
    }

    TEST_CASE("brute-force stable orbits agree with the class enumeration") {
        CHECK(tree_automorphisms(1).size() == 6);
        CHECK(tree_automorphisms(2).size() == 1296);
        for (int k = 1; k <= 2; ++k) {
            const auto orbits = stable_orbits_bruteforce(k);
            const stable_space space(k);
            CHECK(orbits.size() == space.size(k));
            big_int total = 0;
            for (const auto& o : orbits) {
                CHECK(is_stable_raw(o.representative, k));
                total += o.members;
            }
            big_int expected = 0;
            for (std::uint32_t id = 0; id < space.size(k); ++id) expected += space.members(k, id);
            CHECK(total == expected);
        }
        // A queried 1 is the absolute minority of a 0-hard input, so stopping is forced.
        CHECK(is_stable_raw(raw_config{0, -1, -1}, 1));
        CHECK_FALSE(is_stable_raw(raw_config{1, -1, -1}, 1));
    }
}
