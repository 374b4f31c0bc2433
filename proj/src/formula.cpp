#include "maj3/formula.hpp"

#include <algorithm>
#include <stdexcept>

#include "maj3/rational.hpp"

namespace maj3 {

namespace {

constexpr auto pow3_table = [] {
    std::array<std::uint64_t, 41> t{};
    t[0] = 1;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = 3 * t[i - 1];
    return t;
}();

}  // namespace

std::uint64_t pow3(int exponent) {
    if (exponent < 0 || exponent >= static_cast<int>(pow3_table.size())) throw std::out_of_range("pow3 exponent");
    return pow3_table[static_cast<std::size_t>(exponent)];
}

void check_height(int height) {
    if (height < 0) throw std::invalid_argument("negative height");
    if (height > max_height) {
        throw resource_cap_error("height " + std::to_string(height) + " exceeds the cap of " +
                                 std::to_string(max_height));
    }
}

// ---------------------------------------------------------------------------
// tree_addr

tree_addr::tree_addr(std::vector<std::uint8_t> path) : path_(std::move(path)) {
    for (auto c : path_) {
        if (c > 2) throw std::invalid_argument("child index outside {0,1,2}");
    }
}

tree_addr tree_addr::leaf(int height, std::uint64_t leaf) {
    check_height(height);
    if (leaf < 1 || leaf > pow3(height)) throw std::out_of_range("leaf index out of range");
    std::vector<std::uint8_t> path(static_cast<std::size_t>(height));
    std::uint64_t offset = leaf - 1;
    for (int d = height - 1; d >= 0; --d) {
        path[static_cast<std::size_t>(d)] = static_cast<std::uint8_t>(offset % 3);
        offset /= 3;
    }
    return tree_addr(std::move(path));
}

tree_addr tree_addr::child(int index) const {
    if (index < 0 || index > 2) throw std::invalid_argument("child index outside {0,1,2}");
    auto path = path_;
    path.push_back(static_cast<std::uint8_t>(index));
    return tree_addr(std::move(path));
}

tree_addr tree_addr::parent() const {
    if (path_.empty()) throw std::logic_error("the root has no parent");
    return tree_addr(std::vector<std::uint8_t>(path_.begin(), path_.end() - 1));
}

bool tree_addr::is_child_of(const tree_addr& other) const {
    return path_.size() == other.path_.size() + 1 &&
           std::equal(other.path_.begin(), other.path_.end(), path_.begin());
}

std::uint64_t tree_addr::first_offset(int height) const {
    if (depth() > height) throw std::out_of_range("address deeper than the formula");
    std::uint64_t offset = 0;
    for (auto c : path_) offset = offset * 3 + c;
    return offset * pow3(height - depth());
}

std::uint64_t tree_addr::leaf_index(int height) const {
    if (depth() != height) throw std::invalid_argument("not a leaf address");
    return first_offset(height) + 1;
}

// ---------------------------------------------------------------------------
// input

input::input(int height, std::vector<bool> bits) : height_(height), bits_(std::move(bits)) {
    check_height(height);
    if (bits_.size() != pow3(height)) {
        throw std::invalid_argument("input of height " + std::to_string(height) + " needs " +
                                    std::to_string(pow3(height)) + " bits, got " +
                                    std::to_string(bits_.size()));
    }
}

input::input(int height) : height_(height) {
    check_height(height);
    bits_.assign(pow3(height), false);
}

std::vector<std::vector<std::uint8_t>> node_values(const input& x) {
    const int h = x.height();
    std::vector<std::vector<std::uint8_t>> levels(static_cast<std::size_t>(h) + 1);
    auto& leaves = levels[static_cast<std::size_t>(h)];
    leaves.resize(x.size());
    for (std::uint64_t i = 0; i < x.size(); ++i) leaves[i] = static_cast<std::uint8_t>(x.bit(i));
    for (int d = h - 1; d >= 0; --d) {
        const auto& below = levels[static_cast<std::size_t>(d) + 1];
        auto& level = levels[static_cast<std::size_t>(d)];
        level.resize(below.size() / 3);
        for (std::size_t i = 0; i < level.size(); ++i) {
            level[i] = (below[3 * i] + below[3 * i + 1] + below[3 * i + 2]) >= 2 ? 1 : 0;
        }
    }
    return levels;
}

int eval(const input& x) { return node_values(x)[0][0]; }

int eval_at(const input& x, const tree_addr& node) {
    const std::uint64_t first = node.first_offset(x.height());
    const std::uint64_t count = pow3(x.height() - node.depth());
    std::vector<std::uint8_t> level(count);
    for (std::uint64_t i = 0; i < count; ++i) level[i] = static_cast<std::uint8_t>(x.bit(first + i));
    while (level.size() > 1) {
        std::vector<std::uint8_t> up(level.size() / 3);
        for (std::size_t i = 0; i < up.size(); ++i) {
            up[i] = (level[3 * i] + level[3 * i + 1] + level[3 * i + 2]) >= 2 ? 1 : 0;
        }
        level = std::move(up);
    }
    return level[0];
}

bool is_hard(const input& x) {
    auto levels = node_values(x);
    for (std::size_t d = 1; d < levels.size(); ++d) {
        const auto& level = levels[d];
        for (std::size_t i = 0; i < level.size(); i += 3) {
            if (level[i] == level[i + 1] && level[i + 1] == level[i + 2]) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// hard_input

hard_input::hard_input(input x) : x_(std::move(x)) {
    auto levels = node_values(x_);
    for (std::size_t d = 1; d < levels.size(); ++d) {
        const auto& level = levels[d];
        for (std::size_t i = 0; i < level.size(); i += 3) {
            if (level[i] == level[i + 1] && level[i + 1] == level[i + 2]) {
                throw std::invalid_argument("input is not hard");
            }
        }
    }
    root_value_ = levels[0][0];
    tree_addr node = tree_addr::root();
    std::uint64_t index = 0;
    path_.push_back(node);
    for (int d = 0; d < x_.height(); ++d) {
        const int value = levels[static_cast<std::size_t>(d)][index];
        const auto& below = levels[static_cast<std::size_t>(d) + 1];
        int minority = 0;
        while (below[3 * index + static_cast<std::uint64_t>(minority)] == value) ++minority;
        index = 3 * index + static_cast<std::uint64_t>(minority);
        node = node.child(minority);
        path_.push_back(node);
    }
    minority_leaf_ = index + 1;
}

namespace {

void fill_hard(std::vector<bool>& bits, std::uint64_t offset, int height, int value, rng& gen) {
    if (height == 0) {
        bits[offset] = value != 0;
        return;
    }
    const auto minority = gen.below(3);
    const std::uint64_t stride = pow3(height - 1);
    for (std::uint64_t c = 0; c < 3; ++c) {
        fill_hard(bits, offset + c * stride, height - 1, c == minority ? 1 - value : value, gen);
    }
}

void collect_sensitive(const std::vector<std::vector<std::uint8_t>>& levels, int depth,
                       std::uint64_t index, int root_value, std::vector<std::uint64_t>& out) {
    if (static_cast<std::size_t>(depth) + 1 == levels.size()) {
        out.push_back(index + 1);
        return;
    }
    const auto& below = levels[static_cast<std::size_t>(depth) + 1];
    for (std::uint64_t c = 0; c < 3; ++c) {
        if (below[3 * index + c] == root_value) {
            collect_sensitive(levels, depth + 1, 3 * index + c, root_value, out);
        }
    }
}

}  // namespace

hard_input sample_hard(int height, std::optional<int> root_value, rng& gen) {
    check_height(height);
    if (root_value && *root_value != 0 && *root_value != 1) {
        throw std::invalid_argument("root value must be 0 or 1");
    }
    const int root = root_value ? *root_value : gen.bit();
    std::vector<bool> bits(pow3(height));
    fill_hard(bits, 0, height, root, gen);
    return hard_input(input(height, std::move(bits)));
}

std::vector<std::uint64_t> sensitive_bits(const hard_input& x) {
    auto levels = node_values(x.value());
    std::vector<std::uint64_t> out;
    collect_sensitive(levels, 0, 0, x.root_value(), out);
    return out;
}

// ---------------------------------------------------------------------------
// serialization

std::string to_line(const input& x) {
    std::string line(x.size(), '0');
    for (std::uint64_t i = 0; i < x.size(); ++i) {
        if (x.bit(i)) line[i] = '1';
    }
    return line;
}

input parse_line(std::string_view line) {
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r' || line.back() == ' ')) {
        line.remove_suffix(1);
    }
    int height = 0;
    while (pow3(height) < line.size() && height <= max_height) ++height;
    if (pow3(height) != line.size()) {
        throw std::invalid_argument("line length " + std::to_string(line.size()) +
                                    " is not a power of 3");
    }
    std::vector<bool> bits(line.size());
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] != '0' && line[i] != '1') {
            throw std::invalid_argument(std::string("unexpected character '") + line[i] + "'");
        }
        bits[i] = line[i] == '1';
    }
    return input(height, std::move(bits));
}

std::string fixture_header(const hard_input& x) {
    return "h=" + std::to_string(x.height()) + " root=" + std::to_string(x.root_value()) +
           " m=" + std::to_string(x.absolute_minority());
}

// ---------------------------------------------------------------------------
// encoding

std::array<int, 3> gadget_bits(int y, gadget g) {
    const int b = g.b;
    switch (g.s) {
        case 1: return {y, b, 1 - b};
        case 2: return {1 - b, y, b};
        case 3: return {b, 1 - b, y};
        default: throw std::invalid_argument("gadget position outside {1,2,3}");
    }
}

void encoding_randomness::validate() const {
    const int k = level_count();
    if (k < 1) throw std::invalid_argument("encoding needs at least one level");
    if (height < k) throw std::invalid_argument("encoding with more levels than the height");
    check_height(height);
    for (int l = 0; l < k; ++l) {
        const auto& level = levels[static_cast<std::size_t>(l)];
        if (level.size() != pow3(height - 1 - l)) {
            throw std::invalid_argument("encoding level " + std::to_string(l) + " has " +
                                        std::to_string(level.size()) + " symbols, expected " +
                                        std::to_string(pow3(height - 1 - l)));
        }
        for (const auto& g : level) {
            if ((g.b != 0 && g.b != 1) || g.s < 1 || g.s > 3) {
                throw std::invalid_argument("encoding symbol outside {0,1}x{1,2,3}");
            }
        }
    }
}

encoding_randomness random_encoding(int height, int levels, rng& gen) {
    encoding_randomness r;
    r.height = height;
    for (int l = 0; l < levels; ++l) {
        std::vector<gadget> level(pow3(height - 1 - l));
        for (auto& g : level) {
            const auto draw = gen.below(6);
            g = gadget{static_cast<int>(draw / 3), static_cast<int>(draw % 3) + 1};
        }
        r.levels.push_back(std::move(level));
    }
    r.validate();
    return r;
}

input encode(const input& y, const encoding_randomness& r) {
    r.validate();
    const int k = r.level_count();
    if (y.height() != r.height - k) {
        throw std::invalid_argument("source height " + std::to_string(y.height()) +
                                    " does not match encoding of height " +
                                    std::to_string(r.height) + " with " + std::to_string(k) +
                                    " levels");
    }
    if (!is_hard(y)) throw std::invalid_argument("source input is not hard");

    input current = y;
    for (int l = k - 1; l >= 0; --l) {
        const auto& level = r.levels[static_cast<std::size_t>(l)];
        std::vector<bool> bits(3 * current.size());
        for (std::uint64_t i = 0; i < current.size(); ++i) {
            const auto triple = gadget_bits(current.bit(i), level[i]);
            for (int j = 0; j < 3; ++j) bits[3 * i + static_cast<std::uint64_t>(j)] = triple[j] != 0;
        }
        current = input(current.height() + 1, std::move(bits));
    }
    return current;
}

std::vector<std::uint64_t> q_positions(const encoding_randomness& r) {
    r.validate();
    const int k = r.level_count();
    std::vector<std::uint64_t> positions(pow3(r.height - k));
    for (std::uint64_t i = 0; i < positions.size(); ++i) positions[i] = i;
    for (int l = k - 1; l >= 0; --l) {
        const auto& level = r.levels[static_cast<std::size_t>(l)];
        for (auto& p : positions) p = 3 * p + static_cast<std::uint64_t>(level[p].s - 1);
    }
    for (auto& p : positions) ++p;
    return positions;
}

}  // namespace maj3
