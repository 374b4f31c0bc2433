#include "maj3/oracles.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>

namespace maj3 {

// ---------------------------------------------------------------------------
// explicit_tree

explicit_tree explicit_tree::query(int leaf, explicit_tree on_zero, explicit_tree on_one) {
    if (leaf < 1) throw std::invalid_argument("leaf indices start at 1");
    explicit_tree t;
    t.node_ = std::make_shared<const node>(node{leaf, std::move(on_zero), std::move(on_one)});
    return t;
}

int explicit_tree::leaf() const {
    if (!node_) throw std::logic_error("the stop tree queries nothing");
    return node_->leaf;
}

const explicit_tree& explicit_tree::next(int bit) const {
    if (!node_) throw std::logic_error("the stop tree has no subtrees");
    return bit ? node_->on_one : node_->on_zero;
}

std::size_t explicit_tree::size() const {
    if (!node_) return 0;
    return 1 + node_->on_zero.size() + node_->on_one.size();
}

namespace {

void validate_path(const explicit_tree& t, std::uint64_t leaves, std::vector<bool>& used) {
    if (t.is_stop()) return;
    const int leaf = t.leaf();
    if (static_cast<std::uint64_t>(leaf) > leaves) {
        throw std::invalid_argument("tree queries leaf " + std::to_string(leaf) + " outside 1.." +
                                    std::to_string(leaves));
    }
    if (used[static_cast<std::size_t>(leaf)]) {
        throw std::invalid_argument("tree queries leaf " + std::to_string(leaf) + " twice on a path");
    }
    used[static_cast<std::size_t>(leaf)] = true;
    validate_path(t.next(0), leaves, used);
    validate_path(t.next(1), leaves, used);
    used[static_cast<std::size_t>(leaf)] = false;
}

}  // namespace

void explicit_tree::validate(std::uint64_t leaves) const {
    std::vector<bool> used(leaves + 1, false);
    validate_path(*this, leaves, used);
}

std::string explicit_tree::to_sexpr() const {
    if (!node_) return "STOP";
    return "(q " + std::to_string(node_->leaf) + " " + node_->on_zero.to_sexpr() + " " +
           node_->on_one.to_sexpr() + ")";
}

namespace {

class sexpr_parser {
public:
    explicit sexpr_parser(std::string_view text) : text_(text) {}

    explicit_tree parse_all() {
        auto t = parse_tree();
        skip_space();
        if (pos_ != text_.size()) fail("trailing characters");
        return t;
    }

private:
    explicit_tree parse_tree() {
        skip_space();
        if (text_.substr(pos_, 4) == "STOP") {
            pos_ += 4;
            return explicit_tree::stop();
        }
        expect('(');
        skip_space();
        expect('q');
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail("expected a leaf index");
        const int leaf = std::stoi(std::string(text_.substr(start, pos_ - start)));
        auto zero = parse_tree();
        auto one = parse_tree();
        skip_space();
        expect(')');
        return explicit_tree::query(leaf, std::move(zero), std::move(one));
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    void expect(char c) {
        if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("tree syntax error at offset " + std::to_string(pos_) + ": " + what);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

explicit_tree explicit_tree::parse(std::string_view text) { return sexpr_parser(text).parse_all(); }

bool explicit_tree::operator==(const explicit_tree& other) const {
    if (is_stop() || other.is_stop()) return is_stop() && other.is_stop();
    return leaf() == other.leaf() && next(0) == other.next(0) && next(1) == other.next(1);
}

// ---------------------------------------------------------------------------
// enumerations

big_int count_trees(int variables) {
    if (variables < 0) throw std::invalid_argument("negative variable count");
    big_int t = 1;  // trees on the empty set: only stop
    for (int n = 1; n <= variables; ++n) t = 1 + n * t * t;
    return t;
}

namespace {

std::vector<explicit_tree> trees_over(const std::vector<int>& available) {
    std::vector<explicit_tree> out{explicit_tree::stop()};
    for (std::size_t i = 0; i < available.size(); ++i) {
        std::vector<int> rest = available;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
        const auto subtrees = trees_over(rest);
        for (const auto& zero : subtrees) {
            for (const auto& one : subtrees) out.push_back(explicit_tree::query(available[i], zero, one));
        }
    }
    return out;
}

}  // namespace

std::vector<explicit_tree> enumerate_trees_k1() { return trees_over({1, 2, 3}); }

std::vector<hard_input> enumerate_hard(int h, std::optional<int> root_value) {
    if (h < 0) throw std::invalid_argument("negative height");
    if (h > 2) throw resource_cap_error("exhaustive scan of hard inputs is limited to height 2");
    const std::uint64_t n = pow3(h);
    std::vector<hard_input> out;
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
        std::vector<bool> bits(n);
        for (std::uint64_t j = 0; j < n; ++j) bits[j] = (code >> (n - 1 - j)) & 1;
        input x(h, std::move(bits));
        if (!is_hard(x)) continue;
        if (root_value && eval(x) != *root_value) continue;
        out.emplace_back(std::move(x));
    }
    return out;
}

// ---------------------------------------------------------------------------
// rho

namespace {

// Leaves queried by the tree on x, as a 1-based membership vector.
std::vector<bool> queried_leaves(const explicit_tree& tree, const input& x) {
    std::vector<bool> queried(x.size() + 1, false);
    const explicit_tree* t = &tree;
    while (!t->is_stop()) {
        const int leaf = t->leaf();
        queried[static_cast<std::size_t>(leaf)] = true;
        t = &t->next(x.bit(static_cast<std::uint64_t>(leaf) - 1));
    }
    return queried;
}

}  // namespace

rho_value rho_exhaustive(const explicit_tree& tree, int k, const rational& alpha) {
    if (k < 0) throw std::invalid_argument("negative height");
    if (k > 2) throw resource_cap_error("exhaustive rho is limited to k <= 2");
    tree.validate(pow3(k));
    const auto inputs = enumerate_hard(k, 0);
    std::uint64_t sensitive = 0, minority = 0;
    for (const auto& x : inputs) {
        const auto queried = queried_leaves(tree, x.value());
        for (auto leaf : sensitive_bits(x)) sensitive += queried[leaf] ? 1 : 0;
        minority += queried[x.absolute_minority()] ? 1 : 0;
    }
    rho_value r;
    const big_int count = inputs.size();
    r.pi_q = rational(big_int(sensitive), count);
    r.pi_m = rational(big_int(minority), count);
    r.rho = r.pi_q / rational(pow_int(2, static_cast<unsigned>(k))) - alpha * r.pi_m;
    return r;
}

std::optional<rational> alpha_of_tree(const explicit_tree& tree, int k) {
    const auto r = rho_exhaustive(tree, k, 0);
    if (r.pi_m == 0) return std::nullopt;
    return r.pi_q / (rational(pow_int(2, static_cast<unsigned>(k))) * r.pi_m);
}

rational max_rho_k1(const rational& alpha) {
    std::optional<rational> best;
    for (const auto& t : enumerate_trees_k1()) {
        if (t.is_stop()) continue;
        const rational rho = rho_exhaustive(t, 1, alpha).rho;
        if (!best || rho > *best) best = rho;
    }
    return *best;
}

std::array<int, 3> one_level_gadget(int y, int r) {
    switch (r) {
        case 1: return {y, 0, 1};
        case 2: return {1, y, 0};
        case 3: return {0, 1, y};
        default: throw std::invalid_argument("gadget index outside {1,2,3}");
    }
}

one_level_report verify_one_level_inequality() {
    const auto inputs = enumerate_hard(1, 0);
    // r1 with psi(0, r1) = x, unique for the one-level gadget.
    std::vector<int> r1;
    for (const auto& x : inputs) {
        int found = 0;
        for (int r = 1; r <= 3; ++r) {
            const auto g = one_level_gadget(0, r);
            if (g[0] == x.value().bit(0) && g[1] == x.value().bit(1) && g[2] == x.value().bit(2)) {
                if (found) throw std::logic_error("one-level gadget is not injective");
                found = r;
            }
        }
        if (!found) throw std::logic_error("0-hard input outside the gadget image");
        r1.push_back(found);
    }

    one_level_report report;
    bool have_ratio = false;
    for (const auto& tree : enumerate_trees_k1()) {
        ++report.trees;
        int lhs = 0, rhs = 0;  // counts over the three inputs
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            const auto queried = queried_leaves(tree, inputs[i].value());
            lhs += queried[static_cast<std::size_t>(r1[i])] ? 1 : 0;
            rhs += queried[inputs[i].absolute_minority()] ? 1 : 0;
        }
        if (lhs > 2 * rhs) report.all_hold = false;
        if (lhs == 2 * rhs) ++report.equality_trees;
        if (lhs > 0 && rhs > 0) {
            const rational ratio(lhs, rhs);
            if (!have_ratio || ratio > report.max_ratio) {
                have_ratio = true;
                report.max_ratio = ratio;
                report.worst = tree;
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// C' and C0

namespace {

class c_prime_builder {
public:
    c_prime_builder() : inputs_(enumerate_hard(2, 0)) {}

    explicit_tree build(raw_config queried) {
        std::vector<const input*> consistent;
        for (const auto& x : inputs_) {
            bool ok = true;
            for (std::uint64_t i = 0; i < 9 && ok; ++i) {
                if (queried[i] >= 0 && x.value().bit(i) != queried[i]) ok = false;
            }
            if (ok) consistent.push_back(&x.value());
        }
        if (consistent.empty()) return explicit_tree::stop();  // unreachable branch

        // Within a clause two equal bits fix the third (clauses are never constant)
        // and decide the clause; nothing is inferred across clauses.
        raw_config known = queried;
        auto clause_value = [&](int c) -> int {
            int ones = 0, zeros = 0;
            for (int i = 0; i < 3; ++i) {
                const int b = queried[static_cast<std::size_t>(3 * c + i)];
                ones += b == 1 ? 1 : 0;
                zeros += b == 0 ? 1 : 0;
            }
            return ones >= 2 ? 1 : zeros >= 2 ? 0 : -1;
        };
        for (int c = 0; c < 3; ++c) {
            const int v = clause_value(c);
            if (v < 0) continue;
            for (int i = 0; i < 3; ++i) {
                auto& b = known[static_cast<std::size_t>(3 * c + i)];
                if (b < 0) b = 1 - v;
            }
        }
        auto count = [&](int c, int v) {
            int n = 0;
            for (int i = 0; i < 3; ++i) n += known[static_cast<std::size_t>(3 * c + i)] == v ? 1 : 0;
            return n;
        };
        auto first_unknown = [&](int c) -> int {
            for (int i = 0; i < 3; ++i) {
                if (known[static_cast<std::size_t>(3 * c + i)] < 0) return 3 * c + i;
            }
            return -1;
        };

        // Two clauses evaluated to 0: the root is decided.
        int zero_clauses = 0;
        for (int c = 0; c < 3; ++c) zero_clauses += clause_value(c) == 0 ? 1 : 0;
        if (zero_clauses >= 2) return explicit_tree::stop();

        // A 0 in a clause: read the rest of that clause.
        for (int c = 0; c < 3; ++c) {
            if (count(c, 0) > 0 && first_unknown(c) >= 0) return branch(queried, first_unknown(c));
        }
        // Two 1s in a clause (the minority clause): read the other clauses.
        for (int c = 0; c < 3; ++c) {
            if (count(c, 1) < 2) continue;
            for (int o = 0; o < 3; ++o) {
                if (o != c && first_unknown(o) >= 0) return branch(queried, first_unknown(o));
            }
        }

        // Stable configurations: a fully read majority clause means stop.
        if (zero_clauses == 1) return explicit_tree::stop();
        for (int c = 0; c < 3; ++c) {
            if (count(c, 0) > 0 || count(c, 1) > 1) throw std::logic_error("unexpected configuration");
        }
        // Otherwise single 1s only: open the first untouched clause, or read
        // the smallest unqueried bit when every clause holds a 1.
        for (int c = 0; c < 3; ++c) {
            if (count(c, 1) == 0) return branch(queried, 3 * c);
        }
        for (int i = 0; i < 9; ++i) {
            if (known[static_cast<std::size_t>(i)] < 0) return branch(queried, i);
        }
        throw std::logic_error("no unqueried bit left");
    }

private:
    explicit_tree branch(const raw_config& queried, int offset) {
        auto zero = queried, one = queried;
        zero[static_cast<std::size_t>(offset)] = 0;
        one[static_cast<std::size_t>(offset)] = 1;
        return explicit_tree::query(offset + 1, build(zero), build(one));
    }

    std::vector<hard_input> inputs_;
};

explicit_tree read_all(const std::vector<int>& leaves, std::size_t from = 0) {
    if (from == leaves.size()) return explicit_tree::stop();
    auto rest = read_all(leaves, from + 1);
    return explicit_tree::query(leaves[from], rest, rest);
}

}  // namespace

explicit_tree build_c_prime() { return c_prime_builder().build(raw_config(9, -1)); }

explicit_tree build_c_zero() {
    const auto all = read_all({4, 5, 6, 7, 8, 9});
    // x1 = 0 here, so the clause is 1 only when x2 = x3 = 1.
    const auto after_x2_zero = explicit_tree::query(3, explicit_tree::stop(), explicit_tree::stop());
    const auto after_x2_one = explicit_tree::query(3, explicit_tree::stop(), all);
    return explicit_tree::query(1, explicit_tree::query(2, after_x2_zero, after_x2_one), explicit_tree::stop());
}

// ---------------------------------------------------------------------------
// brute-force stable orbits

std::vector<std::vector<std::uint32_t>> tree_automorphisms(int k) {
    if (k < 0) throw std::invalid_argument("negative height");
    if (k > 2) throw resource_cap_error("automorphism listing is limited to height 2");
    std::vector<std::vector<std::uint32_t>> autos{{0}};
    static constexpr std::array<std::array<std::uint32_t, 3>, 6> perms{{
        {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
    }};
    for (int j = 1; j <= k; ++j) {
        const auto stride = static_cast<std::uint32_t>(pow3(j - 1));
        std::vector<std::vector<std::uint32_t>> next;
        for (const auto& sigma : perms) {
            for (const auto& a0 : autos) {
                for (const auto& a1 : autos) {
                    for (const auto& a2 : autos) {
                        const std::vector<std::uint32_t>* sub[3] = {&a0, &a1, &a2};
                        std::vector<std::uint32_t> map(3 * stride);
                        for (std::uint32_t p = 0; p < 3; ++p) {
                            for (std::uint32_t o = 0; o < stride; ++o) {
                                map[p * stride + o] = sigma[p] * stride + (*sub[p])[o];
                            }
                        }
                        next.push_back(std::move(map));
                    }
                }
            }
        }
        autos = std::move(next);
    }
    return autos;
}

bool is_stable_raw(const raw_config& config, int k) {
    const std::uint64_t n = pow3(k);
    if (config.size() != n) throw std::invalid_argument("configuration size does not match the height");
    // masks[d][i]: bit v set when node i at depth d can take value v in some
    // hard completion of its own subtree.
    std::vector<std::vector<int>> masks(static_cast<std::size_t>(k) + 1);
    masks[static_cast<std::size_t>(k)].resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        masks[static_cast<std::size_t>(k)][i] = config[i] < 0 ? 3 : 1 << config[i];
    }
    for (int d = k - 1; d >= 0; --d) {
        const auto& below = masks[static_cast<std::size_t>(d) + 1];
        auto& level = masks[static_cast<std::size_t>(d)];
        level.resize(pow3(d));
        for (std::uint64_t i = 0; i < level.size(); ++i) {
            int mask = 0;
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    for (int c = 0; c < 2; ++c) {
                        if (!(below[3 * i] >> a & 1) || !(below[3 * i + 1] >> b & 1) || !(below[3 * i + 2] >> c & 1)) {
                            continue;
                        }
                        if (a == b && b == c) continue;
                        mask |= 1 << (a + b + c >= 2 ? 1 : 0);
                    }
                }
            }
            level[i] = mask;
        }
    }
    // The root must stay open (which also requires consistency).
    if (masks[0][0] != 3) return false;

    auto all_queried = [&](int depth, std::uint64_t index) {
        const std::uint64_t width = pow3(k - depth);
        for (std::uint64_t i = index * width; i < (index + 1) * width; ++i) {
            if (config[i] < 0) return false;
        }
        return true;
    };
    for (int d = 1; d <= k; ++d) {
        const auto& level = masks[static_cast<std::size_t>(d)];
        for (std::uint64_t i = 0; i < level.size(); ++i) {
            if (level[i] == 3) continue;
            const int v = level[i] == 1 ? 0 : 1;
            if (v != d % 2) {
                // Off the minority path: its own subtree must be read.
                if (!all_queried(d, i)) return false;
            } else {
                // On the path if anything is: the siblings are off it.
                const std::uint64_t first = i - i % 3;
                for (std::uint64_t s = first; s < first + 3; ++s) {
                    if (s != i && !all_queried(d, s)) return false;
                }
            }
        }
    }
    return true;
}

std::vector<raw_orbit> stable_orbits_bruteforce(int k) {
    const auto autos = tree_automorphisms(k);
    const std::uint64_t n = pow3(k);
    std::uint64_t total = 1;
    for (std::uint64_t i = 0; i < n; ++i) total *= 3;
    std::map<raw_config, std::uint64_t> orbits;
    raw_config config(n);
    for (std::uint64_t code = 0; code < total; ++code) {
        std::uint64_t c = code;
        for (std::uint64_t i = 0; i < n; ++i) {
            config[n - 1 - i] = static_cast<int>(c % 3) - 1;
            c /= 3;
        }
        if (!is_stable_raw(config, k)) continue;
        raw_config best = config;
        raw_config image(n);
        for (const auto& map : autos) {
            for (std::uint64_t i = 0; i < n; ++i) image[map[i]] = config[i];
            if (image < best) best = image;
        }
        ++orbits[best];
    }
    std::vector<raw_orbit> out;
    for (const auto& [rep, count] : orbits) out.push_back({rep, count});
    return out;
}

}  // namespace maj3
