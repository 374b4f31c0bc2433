#pragma once

// Query-counting evaluation of 3-MAJ_h: the deterministic full read, the naive
// directional algorithm, and the depth-two Evaluate/Complete pair.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maj3/formula.hpp"
#include "maj3/rational.hpp"
#include "maj3/rng.hpp"

namespace maj3 {

// Wraps an input and counts every query. The wrapped input must outlive the oracle.
class query_oracle {
public:
    explicit query_oracle(const input& x, bool keep_log = true) : x_(&x), keep_log_(keep_log) {}

    // Queries the leaf at a 0-based offset.
    int query(std::uint64_t offset) {
        ++count_;
        if (keep_log_) log_.push_back(offset + 1);
        return x_->bit(offset);
    }

    std::uint64_t count() const { return count_; }
    // 1-based leaf indices in query order (empty when logging is off).
    const std::vector<std::uint64_t>& log() const { return log_; }
    const input& source() const { return *x_; }
    int height() const { return x_->height(); }

private:
    const input* x_;
    bool keep_log_;
    std::uint64_t count_ = 0;
    std::vector<std::uint64_t> log_;
};

enum class algorithm_id { full_read, naive, depth2 };

std::string_view to_string(algorithm_id alg);
// Accepts "full", "full_read", "naive", "depth2".
algorithm_id parse_algorithm(std::string_view name);

int full_read(query_oracle& oracle);
int naive_evaluate(const tree_addr& node, query_oracle& oracle, rng& gen);

// Algorithm Evaluate: zero-error depth-two evaluation of the subformula at `node`.
int evaluate(const tree_addr& node, query_oracle& oracle, rng& gen);

// Algorithm Complete: finishes `node` when its child `known_child` is already
// known to have value `known_value`. Never queries below `known_child`.
int complete(const tree_addr& node, const tree_addr& known_child, int known_value,
             query_oracle& oracle, rng& gen);

// Evaluates the root with the chosen algorithm.
int run_algorithm(algorithm_id alg, query_oracle& oracle, rng& gen);

// Exact expected query counts on a fixed input, averaging over every random
// choice the algorithm makes. Height guards: depth2 <= 3, naive <= 4.
rational exact_expected_queries(algorithm_id alg, const input& x);
// Expected additional queries of Complete(node, known_child) with the child's
// true value supplied (depth2 only, same height guard).
rational exact_expected_complete(const input& x, const tree_addr& node,
                                 const tree_addr& known_child);

// Exact expectation of the naive algorithm over the uniform distribution on
// H_h, by recursion on (height, node value): children of a hard node are
// independent hard subtrees whose values follow a uniform minority position.
rational naive_hard_expectation(int height);

struct monte_carlo_config {
    algorithm_id alg = algorithm_id::depth2;
    int height = 0;
    // Uniform over H_h when empty.
    std::optional<input> fixed_input;
    std::uint64_t trials = 1;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct monte_carlo_result {
    std::uint64_t trials = 0;
    rational mean;             // exact sample mean
    double stddev = 0;         // sample standard deviation
    double standard_error = 0;
    double ci99_low = 0;
    double ci99_high = 0;
    std::uint64_t errors = 0;  // runs whose output differed from eval()
};

// Deterministic for a given (config minus threads): trials are split into
// fixed blocks with their own streams and reduced in block order.
monte_carlo_result monte_carlo(const monte_carlo_config& config);

}  // namespace maj3
