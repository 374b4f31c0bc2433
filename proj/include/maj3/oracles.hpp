#pragma once

// Brute-force cross-checks: explicit decision trees evaluated over every
// 0-hard input, exhaustive enumeration of trees on three variables and of hard
// inputs, and an orbit partition of raw configurations at small heights.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maj3/alphadp.hpp"
#include "maj3/formula.hpp"
#include "maj3/rational.hpp"

namespace maj3 {

// Deterministic decision tree without output labels.
class explicit_tree {
public:
    static explicit_tree stop() { return explicit_tree(); }
    // Queries the 1-based leaf and continues with the subtree for the answer.
    static explicit_tree query(int leaf, explicit_tree on_zero, explicit_tree on_one);

    bool is_stop() const { return !node_; }
    int leaf() const;
    const explicit_tree& next(int bit) const;

    // Number of query nodes.
    std::size_t size() const;
    // Throws std::invalid_argument if a leaf is outside 1..leaves or repeated on a path.
    void validate(std::uint64_t leaves) const;

    // "(q 1 (q 2 STOP STOP) STOP)"
    std::string to_sexpr() const;
    static explicit_tree parse(std::string_view text);

    bool operator==(const explicit_tree& other) const;

private:
    struct node;
    std::shared_ptr<const node> node_;
};

struct explicit_tree::node {
    int leaf;
    explicit_tree on_zero, on_one;
};

// trees(S) = 1 + sum_v trees(S \ {v})^2 for |S| = variables.
big_int count_trees(int variables);

// Every decision tree on x1, x2, x3 (the stop tree first).
std::vector<explicit_tree> enumerate_trees_k1();

// Every hard input of height h by scanning all 2^(3^h) assignments (h <= 2),
// optionally restricted to one root value, in increasing binary order.
std::vector<hard_input> enumerate_hard(int h, std::optional<int> root_value = std::nullopt);

struct rho_value {
    rational pi_q;  // expected number of sensitive leaves queried
    rational pi_m;  // probability that the absolute minority is queried
    rational rho;   // 2^-k pi_q - alpha pi_m
};

// Runs the tree on every input of H_k^0 (k <= 2).
rho_value rho_exhaustive(const explicit_tree& tree, int k, const rational& alpha);

// alpha_C = 2^-k pi_q / pi_m; nullopt when pi_m = 0.
std::optional<rational> alpha_of_tree(const explicit_tree& tree, int k);

// Maximum of rho over the trees on three variables that make a query.
rational max_rho_k1(const rational& alpha);

// One-level gadget c(y,1) = y01, c(y,2) = 1y0, c(y,3) = 01y.
std::array<int, 3> one_level_gadget(int y, int r);

struct one_level_report {
    bool all_hold = true;         // lhs <= 2 rhs for every tree
    rational max_ratio;           // over trees with both sides nonzero
    explicit_tree worst;          // first tree attaining max_ratio
    std::size_t trees = 0;
    std::size_t equality_trees = 0;  // trees with lhs == 2 rhs
};

// Pr[C queries x_{r1} where psi(0, r1) = x] <= 2 Pr[C queries x_{m(x)}] over x in H_1^0.
one_level_report verify_one_level_inequality();

// The height-2 tree obtained from the forced rules and the stable-case
// actions, choosing the smallest index whenever symmetry allows.
explicit_tree build_c_prime();

// Query x1; on 1 stop; on 0 read x2, x3; stop if that clause is 0, else read everything.
explicit_tree build_c_zero();

// Raw configurations of height k <= 2 that are stable, grouped into orbits
// under the automorphisms of the ternary tree.
struct raw_orbit {
    raw_config representative;  // lexicographically least member
    std::uint64_t members = 0;
};
std::vector<raw_orbit> stable_orbits_bruteforce(int k);

// Stability of a raw configuration judged directly from node determinations.
bool is_stable_raw(const raw_config& config, int k);

// Leaf permutations induced by all automorphisms of the height-k tree.
std::vector<std::vector<std::uint32_t>> tree_automorphisms(int k);

}  // namespace maj3
