#pragma once

// The complete ternary majority formula of height h, its inputs, the hard
// distribution, minority structure and the uniform k-level encodings.
//
// Leaves are numbered 1..3^h from left to right in every serialized form.
// In-memory accessors take 0-based offsets.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maj3/rng.hpp"

namespace maj3 {

inline constexpr int max_height = 18;

std::uint64_t pow3(int exponent);

// Throws resource_cap_error for h > max_height, std::invalid_argument for h < 0.
void check_height(int height);

// Node of the ternary tree, addressed by child indices from the root.
class tree_addr {
public:
    tree_addr() = default;
    explicit tree_addr(std::vector<std::uint8_t> path);

    static tree_addr root() { return {}; }
    // Address of the leaf with 1-based index `leaf` in a tree of height h.
    static tree_addr leaf(int height, std::uint64_t leaf);

    int depth() const { return static_cast<int>(path_.size()); }
    const std::vector<std::uint8_t>& path() const { return path_; }
    tree_addr child(int index) const;
    tree_addr parent() const;
    bool is_child_of(const tree_addr& other) const;

    // First leaf under this node as a 0-based offset, in a tree of height h.
    std::uint64_t first_offset(int height) const;
    // 1-based leaf index of a depth-h address.
    std::uint64_t leaf_index(int height) const;

    bool operator==(const tree_addr&) const = default;
    auto operator<=>(const tree_addr&) const = default;

private:
    std::vector<std::uint8_t> path_;
};

class input {
public:
    input() = default;
    input(int height, std::vector<bool> bits);
    // All-zero input of the given height.
    explicit input(int height);

    int height() const { return height_; }
    std::uint64_t size() const { return bits_.size(); }
    int bit(std::uint64_t offset) const { return bits_[offset] ? 1 : 0; }
    void set(std::uint64_t offset, int value) { bits_[offset] = value != 0; }
    const std::vector<bool>& bits() const { return bits_; }

    bool operator==(const input&) const = default;

private:
    int height_ = 0;
    std::vector<bool> bits_{false};
};

// 3-MAJ_h(x).
int eval(const input& x);
// Value of the subformula rooted at `node`.
int eval_at(const input& x, const tree_addr& node);
// Values of every node, level by level: levels[d] has 3^d entries (levels[h] are the leaves).
std::vector<std::vector<std::uint8_t>> node_values(const input& x);

bool is_hard(const input& x);

class hard_input {
public:
    // Throws std::invalid_argument if x is not hard.
    explicit hard_input(input x);

    const input& value() const { return x_; }
    int height() const { return x_.height(); }
    int root_value() const { return root_value_; }
    // Root to absolute minority, h+1 nodes.
    const std::vector<tree_addr>& minority_path() const { return path_; }
    // 1-based leaf index of the absolute minority.
    std::uint64_t absolute_minority() const { return minority_leaf_; }

private:
    input x_;
    int root_value_ = 0;
    std::vector<tree_addr> path_;
    std::uint64_t minority_leaf_ = 1;
};

// Uniform over H_h, or over H_h^b when root_value is given.
hard_input sample_hard(int height, std::optional<int> root_value, rng& gen);

// 1-based indices of the 2^h leaves whose flip flips the root, ascending.
std::vector<std::uint64_t> sensitive_bits(const hard_input& x);

// Fixture line: 3^h characters over {0,1}.
std::string to_line(const input& x);
input parse_line(std::string_view line);
// "h=<int> root=<bit> m=<leaf>"
std::string fixture_header(const hard_input& x);

// ---------------------------------------------------------------------------
// Uniform k-level encoding

// One symbol of R = {0,1} x {1,2,3}.
struct gadget {
    int b = 0;
    int s = 1;
    bool operator==(const gadget&) const = default;
};

// c(y, (b,s)): the three bits of the gadget, y placed at position s.
std::array<int, 3> gadget_bits(int y, gadget g);

// Randomness of psi^(k) for a height-h output. levels[l] holds 3^(h-1-l)
// symbols; levels[k-1] acts first on the height-(h-k) source.
struct encoding_randomness {
    int height = 0;
    std::vector<std::vector<gadget>> levels;

    int level_count() const { return static_cast<int>(levels.size()); }
    // Throws std::invalid_argument unless level sizes match R^(k)_h.
    void validate() const;
};

encoding_randomness random_encoding(int height, int levels, rng& gen);

// psi^(k)(y, r). y must be hard with height r.height - k.
input encode(const input& y, const encoding_randomness& r);

// q_i(r) for i = 1..3^(h-k), as 1-based leaf indices.
std::vector<std::uint64_t> q_positions(const encoding_randomness& r);

}  // namespace maj3
