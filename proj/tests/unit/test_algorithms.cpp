#include <doctest.h>

#include "maj3/algorithms.hpp"
#include "maj3/oracles.hpp"
#include "maj3/recurrence.hpp"

using namespace maj3;

namespace {

input from_code(int h, std::uint64_t code) {
    const auto n = pow3(h);
    std::vector<bool> bits(n);
    for (std::uint64_t i = 0; i < n; ++i) bits[i] = (code >> i) & 1;
    return input(h, bits);
}

}  // namespace

TEST_SUITE("algorithms") {
    TEST_CASE("algorithm names") {
        CHECK(parse_algorithm("full") == algorithm_id::full_read);
        CHECK(parse_algorithm("full_read") == algorithm_id::full_read);
        CHECK(parse_algorithm("naive") == algorithm_id::naive);
        CHECK(parse_algorithm("depth2") == algorithm_id::depth2);
        CHECK(to_string(algorithm_id::depth2) == "depth2");
        CHECK_THROWS_AS(parse_algorithm("alphabeta"), std::invalid_argument);
    }

    TEST_CASE("full read queries every leaf once") {
        const auto x = parse_line("110100010");
        query_oracle oracle(x);
        CHECK(full_read(oracle) == 0);
        CHECK(oracle.count() == 9);
        CHECK(oracle.log().front() == 1);
        CHECK(oracle.log().back() == 9);
    }

    TEST_CASE("every algorithm is correct on every input of height <= 2") {
        for (int h = 0; h <= 2; ++h) {
            for (std::uint64_t code = 0; code < (std::uint64_t{1} << pow3(h)); ++code) {
                const auto x = from_code(h, code);
                for (auto alg : {algorithm_id::full_read, algorithm_id::naive, algorithm_id::depth2}) {
                    for (std::uint64_t seed = 0; seed < 8; ++seed) {
                        rng gen(seed, code);
                        query_oracle oracle(x, false);
                        CHECK(run_algorithm(alg, oracle, gen) == eval(x));
                        CHECK(oracle.count() <= pow3(h));
                    }
                }
            }
        }
    }

    TEST_CASE("Evaluate never queries a leaf twice") {
        rng gen(3);
        for (int t = 0; t < 200; ++t) {
            const auto x = sample_hard(4, std::nullopt, gen).value();
            query_oracle oracle(x);
            CHECK(evaluate(tree_addr::root(), oracle, gen) == eval(x));
            auto log = oracle.log();
            std::sort(log.begin(), log.end());
            CHECK(std::adjacent_find(log.begin(), log.end()) == log.end());
        }
    }

    TEST_CASE("Complete stays out of the known child") {
        rng gen(4);
        for (int t = 0; t < 200; ++t) {
            const auto x = sample_hard(3, std::nullopt, gen).value();
            const tree_addr known({static_cast<std::uint8_t>(gen.below(3))});
            query_oracle oracle(x);
            CHECK(complete(tree_addr::root(), known, eval_at(x, known), oracle, gen) == eval(x));
            const auto lo = known.first_offset(3) + 1, hi = lo + pow3(2);
            for (auto leaf : oracle.log()) CHECK((leaf < lo || leaf >= hi));
        }
        const auto x = parse_line("001001011");
        query_oracle oracle(x);
        CHECK_THROWS_AS(complete(tree_addr::root(), tree_addr({0, 1}), 0, oracle, gen), std::invalid_argument);
    }

    TEST_CASE("exact expectations at height one") {
        CHECK(exact_expected_queries(algorithm_id::full_read, parse_line("001")) == 3);
        // Two of the six orders read the two zeros first.
        CHECK(exact_expected_queries(algorithm_id::naive, parse_line("001")) == rational(8, 3));
        CHECK(exact_expected_queries(algorithm_id::naive, parse_line("000")) == 2);
        CHECK(exact_expected_queries(algorithm_id::depth2, parse_line("001")) == rational(8, 3));
    }

    TEST_CASE("Complete at height one matches the base cases") {
        rational major = 0, minor = 0;
        for (const auto& hx : enumerate_hard(1)) {
            const auto& x = hx.value();
            for (std::uint8_t c = 0; c < 3; ++c) {
                const auto e = exact_expected_complete(x, tree_addr::root(), tree_addr({c}));
                const bool is_minor = x.bit(c) != hx.root_value();
                (is_minor ? minor : major) = std::max(is_minor ? minor : major, e);
            }
        }
        const auto row = solve(1).at(1);
        CHECK(major == *row.s_major);
        CHECK(minor == *row.s_minor);
    }

    TEST_CASE("worst input at height two attains T(2)") {
        rational best = 0;
        for (std::uint64_t code = 0; code < 512; ++code) {
            best = std::max(best, exact_expected_queries(algorithm_id::depth2, from_code(2, code)));
        }
        CHECK(best == solve(2).at(2).t);
        CHECK(best == rational(571, 81));
    }

    TEST_CASE("exact expectation guards") {
        rng gen(1);
        const auto x4 = sample_hard(4, std::nullopt, gen).value();
        CHECK_THROWS_AS(exact_expected_queries(algorithm_id::depth2, x4), resource_cap_error);
        CHECK_NOTHROW(exact_expected_queries(algorithm_id::naive, x4));
        const auto x5 = sample_hard(5, std::nullopt, gen).value();
        CHECK_THROWS_AS(exact_expected_queries(algorithm_id::naive, x5), resource_cap_error);
    }

    TEST_CASE("naive expectation on hard inputs") {
        rational power = 1;
        for (int h = 0; h <= 8; ++h) {
            CHECK(naive_hard_expectation(h) == power);
            power *= rational(8, 3);
        }
        for (int h = 0; h <= 2; ++h) {
            rational total = 0;
            const auto hard = enumerate_hard(h);
            for (const auto& x : hard) total += exact_expected_queries(algorithm_id::naive, x.value());
            CHECK(total / hard.size() == naive_hard_expectation(h));
        }
    }

    TEST_CASE("Monte Carlo is reproducible and independent of threads") {
        monte_carlo_config config;
        config.alg = algorithm_id::depth2;
        config.height = 3;
        config.trials = 5000;
        config.seed = 9;
        const auto one = monte_carlo(config);
        config.threads = 4;
        const auto four = monte_carlo(config);
        CHECK(one.mean == four.mean);
        CHECK(one.stddev == four.stddev);
        CHECK(one.errors == 0);
        CHECK(one.ci99_low <= one.ci99_high);
    }

    TEST_CASE("Monte Carlo on the full read") {
        monte_carlo_config config;
        config.alg = algorithm_id::full_read;
        config.height = 3;
        config.trials = 10;
        const auto res = monte_carlo(config);
        CHECK(res.mean == 27);
        CHECK(res.stddev == 0);
    }

    TEST_CASE("Monte Carlo of the naive algorithm near (8/3)^h") {
        monte_carlo_config config;
        config.alg = algorithm_id::naive;
        config.height = 4;
        config.trials = 20000;
        config.seed = 3;
        const auto res = monte_carlo(config);
        const double expected = naive_hard_expectation(4).convert_to<double>();
        CHECK(std::abs(res.mean.convert_to<double>() - expected) <= 4 * res.standard_error);
    }
}
