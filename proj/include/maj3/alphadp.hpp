#pragma once

// Stable configurations of decision trees on 3^k variables under the uniform
// 0-hard distribution, and the dynamic program maximizing
//   rho_alpha(C) = 2^-k pi_q(C) - alpha pi_m(C)
// whose fixed point is alpha_k.
//
// Values are tracked in the negated-majority view: the local value of a node
// at depth d is its actual value xor (d mod 2), and a node's local value is the
// minority of its children's local values. On 0-hard inputs every node on the
// minority path then has local value 0, and the restriction of a stable
// configuration to an undetermined child is again a stable configuration.

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "maj3/rational.hpp"

namespace maj3 {

using u128 = unsigned __int128;

inline constexpr int max_dp_height = 4;

big_int to_big(u128 value);

// N_0 = 1, N_k = C(N_{k-1}+1, 2) + C(N_{k-1}+2, 3).
big_int stable_count_recurrence(int k);

// Count-weighted statistics of a subtree over its hard completions, split by
// the subtree's local value v: n[v] completions, q[v] summed number of queried
// sensitive leaves, m[v] number of completions whose absolute minority is queried.
struct subtree_counts {
    u128 n[2] = {0, 0};
    u128 q[2] = {0, 0};
    u128 m[2] = {0, 0};

    static subtree_counts unqueried_leaf();
    // A fully queried subtree of height j with local value v.
    static subtree_counts full(int j, int v);
    bool operator==(const subtree_counts&) const = default;
};

// What is known about a subtree after the forced queries have been made.
struct subtree_state {
    bool determined = false;
    std::uint32_t id = 0;  // stable class, when undetermined
    int value = 0;         // local value, when determined
    bool full = false;     // every leaf queried
    subtree_counts counts;
};

// A state together with the number of hard completions of the forced queries
// that lead to it.
struct weighted_state {
    subtree_state state;
    u128 weight = 1;
};

// Raw configuration of a height-k instance: per leaf -1 (unqueried), 0 or 1
// (actual values).
using raw_config = std::vector<int>;

class stable_space {
public:
    // Classes of every height 0..k. Throws resource_cap_error for k > 4.
    explicit stable_space(int k);

    int max_height() const { return k_; }
    std::uint32_t size(int j) const;
    // Children of a class at height j >= 1; entries equal to size(j-1) are the
    // marker for a fully queried child of local value 1.
    const std::array<std::uint32_t, 3>& children(int j, std::uint32_t id) const;
    std::uint32_t marker(int j) const { return size(j - 1); }
    std::uint32_t all_unqueried(int j) const;
    const subtree_counts& counts(int j, std::uint32_t id) const;
    // Lookup of a sorted child triple; nullopt when it is not stable.
    std::optional<std::uint32_t> find(int j, std::array<std::uint32_t, 3> sorted) const;

    // Canonical key: "U" at height 0, "D" for the marker, "(a b c)" otherwise.
    std::string key(int j, std::uint32_t id) const;
    // Number of raw configurations in the orbit of the class.
    big_int members(int j, std::uint32_t id) const;
    // Number of queried leaves.
    std::uint64_t queried(int j, std::uint32_t id) const;
    // A raw configuration of the class (actual values, class at depth 0).
    raw_config representative(int j, std::uint32_t id) const;

    // One leaf per orbit of unqueried leaves under the automorphisms fixing the
    // class, as 0-based offsets in the representative, in lexicographic order.
    std::vector<std::uint32_t> orbits(int j, std::uint32_t id) const;

    // Query the leaf at `offset` of the representative and observe local value
    // `outcome`, then apply the forced rules at every ancestor.
    std::vector<weighted_state> query(int j, std::uint32_t id, std::uint32_t offset, int outcome) const;

    // Applies the forced rules bottom-up to an arbitrary raw configuration of
    // height max_height(). Configurations inconsistent with hardness yield
    // an empty list.
    std::vector<weighted_state> resolve(const raw_config& config) const;

    // Applies the forced rules at a node whose children are in the given
    // states. Exposed for tests.
    std::vector<weighted_state> apply_rules(int j, std::array<subtree_state, 3> children) const;

    subtree_counts compose(const std::array<subtree_counts, 3>& children) const;

private:
    subtree_state stable_state(int j, std::uint32_t child_id) const;
    std::vector<weighted_state> resolve_node(const raw_config& config, int height, std::uint64_t offset,
                                             int depth) const;
    std::vector<weighted_state> query_uncached(int j, std::uint32_t id, std::uint32_t offset,
                                               int outcome) const;

    int k_;
    std::vector<std::vector<std::array<std::uint32_t, 3>>> classes_;
    std::vector<std::vector<std::uint32_t>> index_;
    std::vector<std::vector<subtree_counts>> counts_;
    std::vector<std::vector<std::vector<std::uint32_t>>> orbits_;
    // Memoized query results below the top height, keyed by (id, offset, outcome).
    std::vector<std::vector<std::vector<weighted_state>>> query_memo_;
    std::vector<std::vector<std::uint32_t>> memo_slot_;
};

// Optimal action and statistics of one stable top-level class.
struct dp_entry {
    int action = -1;  // -1 stop, otherwise an index into stable_space::orbits
    rational p_q;     // expected number of sensitive leaves queried
    rational p_m;     // probability that the absolute minority is queried
    rational rho;     // 2^-k p_q - alpha p_m
};

struct dp_solution {
    rational alpha;
    // Best querying tree from the empty configuration.
    rational rho;
    rational p_q;
    rational p_m;
    // alpha_C of that tree: p_q / (2^k p_m).
    std::optional<rational> alpha_tree;
};

using progress_fn = std::function<void(const std::string&)>;

class alpha_dp {
public:
    // Enumerates the classes and the transition structure for height k (0..4).
    alpha_dp(int k, int threads = 1, progress_fn progress = {});

    int k() const { return k_; }
    const stable_space& space() const { return space_; }
    std::uint64_t transition_count() const { return succ_id_.size(); }

    // Runs the dynamic program for alpha.
    dp_solution optimize(const rational& alpha);
    // Entry for a top-level class from the last optimize() call.
    dp_entry entry(std::uint32_t id) const;

private:
    struct action {
        u128 q = 0, m = 0;  // terminal contributions
        std::uint64_t succ_begin = 0, succ_end = 0;
    };

    int k_;
    stable_space space_;
    progress_fn progress_;
    std::vector<std::uint32_t> order_;
    std::vector<std::uint64_t> action_begin_;
    std::vector<action> actions_;
    std::vector<std::uint32_t> succ_id_;
    std::vector<std::uint64_t> succ_weight_;

    rational alpha_;
    std::vector<u128> best_q_, best_m_;
    std::vector<int> best_action_;
    bool solved_ = false;
};

struct alpha_result {
    int k = 0;
    rational alpha;
    std::vector<rational> trace;  // alpha estimates, starting from 0
    std::uint64_t n_k = 0;
    double elapsed_s = 0;
    // Set when more than ten iterations were needed.
    bool many_iterations = false;
};

// Iterates alpha <- alpha_C* from alpha = 0 until the optimum of rho is 0.
alpha_result compute_alpha(int k, int threads = 1, progress_fn progress = {});

}  // namespace maj3
