#include "maj3/algorithms.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace maj3 {

namespace {

constexpr std::array<std::array<int, 3>, 6> permutations{{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

// Subtree handle: height above the leaves, 0-based offset of its first leaf
// and the number of leaves under each child.
struct node {
    int height;
    std::uint64_t offset;
    std::uint64_t stride;

    node child(int i) const {
        return {height - 1, offset + static_cast<std::uint64_t>(i) * stride, stride / 3};
    }
};

node make_node(int height, std::uint64_t offset) {
    return {height, offset, height > 0 ? pow3(height - 1) : 0};
}

node to_node(const tree_addr& addr, int formula_height) {
    if (addr.depth() > formula_height) throw std::out_of_range("address deeper than the formula");
    return make_node(formula_height - addr.depth(), addr.first_offset(formula_height));
}

// The algorithms are written once against a context that supplies queries,
// uniform choices and recursive calls. The sampling context follows one
// branch with the rng; the expectation context averages over all of them.

template <class Ctx>
int naive_body(Ctx& ctx, node v) {
    if (v.height == 0) return ctx.query(v);
    return ctx.choose(6, [&](int p) {
        const auto& y = permutations[static_cast<std::size_t>(p)];
        const int a = ctx.naive(v.child(y[0]));
        const int b = ctx.naive(v.child(y[1]));
        if (a == b) return a;
        return ctx.naive(v.child(y[2]));
    });
}

template <class Ctx>
int evaluate_body(Ctx& ctx, node v) {
    if (v.height == 0) return ctx.query(v);
    if (v.height == 1) {
        return ctx.choose(6, [&](int p) {
            const auto& y = permutations[static_cast<std::size_t>(p)];
            const int a = ctx.evaluate(v.child(y[0]));
            const int b = ctx.evaluate(v.child(y[1]));
            if (a == b) return a;
            return ctx.evaluate(v.child(y[2]));
        });
    }
    return ctx.choose(6, [&](int p) {
        const auto& perm = permutations[static_cast<std::size_t>(p)];
        const node y[3] = {v.child(perm[0]), v.child(perm[1]), v.child(perm[2])};
        return ctx.choose(3, [&](int i1) {
            return ctx.choose(3, [&](int i2) {
                const int xi[2] = {i1, i2};
                const int x[2] = {ctx.evaluate(y[0].child(i1)), ctx.evaluate(y[1].child(i2))};
                if (x[0] != x[1]) {
                    const int y3 = ctx.evaluate(y[2]);
                    // Exactly one of x1, x2 agrees with y3.
                    const int b = x[0] == y3 ? 0 : 1;
                    const int yb = ctx.complete(y[b], xi[b], x[b]);
                    if (yb == y3) return yb;
                    return ctx.complete(y[1 - b], xi[1 - b], x[1 - b]);
                }
                const int y1 = ctx.complete(y[0], i1, x[0]);
                if (y1 == x[0]) {
                    const int y2 = ctx.complete(y[1], i2, x[1]);
                    if (y2 == y1) return y1;
                    return ctx.evaluate(y[2]);
                }
                const int y3 = ctx.evaluate(y[2]);
                if (y3 == y1) return y1;
                return ctx.complete(y[1], i2, x[1]);
            });
        });
    });
}

template <class Ctx>
int complete_body(Ctx& ctx, node v, int known, int known_value) {
    int others[2];
    for (int i = 0, n = 0; i < 3; ++i) {
        if (i != known) others[n++] = i;
    }
    return ctx.choose(2, [&](int swap) {
        const node y2 = v.child(others[swap]);
        const node y3 = v.child(others[1 - swap]);
        if (v.height == 1) {
            if (ctx.evaluate(y2) == known_value) return known_value;
            return ctx.evaluate(y3);
        }
        return ctx.choose(3, [&](int i2) {
            const int x2 = ctx.evaluate(y2.child(i2));
            if (known_value != x2) {
                if (ctx.evaluate(y3) == known_value) return known_value;
                return ctx.complete(y2, i2, x2);
            }
            if (ctx.complete(y2, i2, x2) == known_value) return known_value;
            return ctx.evaluate(y3);
        });
    });
}

class sampling_context {
public:
    sampling_context(query_oracle& oracle, rng& gen) : oracle_(oracle), gen_(gen) {}

    int query(node v) { return oracle_.query(v.offset); }

    template <class F>
    int choose(int n, F&& body) {
        return body(static_cast<int>(gen_.below(static_cast<std::uint64_t>(n))));
    }

    int naive(node v) { return naive_body(*this, v); }
    int evaluate(node v) { return evaluate_body(*this, v); }
    int complete(node v, int known, int known_value) {
        return complete_body(*this, v, known, known_value);
    }

private:
    query_oracle& oracle_;
    rng& gen_;
};

// Expected cost on a fixed input. Every recursive call is replaced by its
// memoized expected cost, weighted by the probability of reaching it; since
// the sub-algorithms are zero-error (checked here on every branch), the value
// a call returns is the true node value.
class expectation_context {
public:
    explicit expectation_context(const input& x) : height_(x.height()), values_(node_values(x)) {}

    int value(node v) const {
        return values_[static_cast<std::size_t>(height_ - v.height)][v.offset / pow3(v.height)];
    }

    int query(node v) {
        total_ += weight_;
        return value(v);
    }

    template <class F>
    int choose(int n, F&& body) {
        const rational saved = weight_;
        const rational branch = saved / n;
        int result = -1;
        for (int i = 0; i < n; ++i) {
            weight_ = branch;
            const int r = body(i);
            if (result >= 0 && r != result) throw std::logic_error("branches disagree on a node value");
            result = r;
        }
        weight_ = saved;
        return result;
    }

    int naive(node v) {
        total_ += weight_ * cached(naive_memo_, key(v), v, [&] { return naive_body(*this, v); });
        return value(v);
    }

    int evaluate(node v) {
        total_ += weight_ * cached(evaluate_memo_, key(v), v, [&] { return evaluate_body(*this, v); });
        return value(v);
    }

    int complete(node v, int known, int known_value) {
        if (known_value != value(v.child(known))) throw std::logic_error("wrong known child value");
        const auto k = key(v) * 4 + static_cast<std::uint64_t>(known);
        total_ += weight_ *
                  cached(complete_memo_, k, v, [&] { return complete_body(*this, v, known, known_value); });
        return value(v);
    }

    // Expected cost of one top-level call.
    template <class F>
    rational measure(node v, F&& run) {
        total_ = 0;
        weight_ = 1;
        const int r = run();
        if (r != value(v)) throw std::logic_error("algorithm returned a wrong value");
        return total_;
    }

private:
    static std::uint64_t key(node v) { return v.offset * 32 + static_cast<std::uint64_t>(v.height); }

    template <class F>
    rational cached(std::unordered_map<std::uint64_t, rational>& memo, std::uint64_t k, node v, F&& run) {
        if (auto it = memo.find(k); it != memo.end()) return it->second;
        const rational saved_weight = weight_;
        const rational saved_total = total_;
        weight_ = 1;
        total_ = 0;
        const int r = run();
        if (r != value(v)) throw std::logic_error("algorithm returned a wrong value");
        rational cost = total_;
        weight_ = saved_weight;
        total_ = saved_total;
        memo.emplace(k, cost);
        return cost;
    }

    int height_;
    std::vector<std::vector<std::uint8_t>> values_;
    rational weight_ = 1;
    rational total_ = 0;
    std::unordered_map<std::uint64_t, rational> naive_memo_, evaluate_memo_, complete_memo_;
};

void check_exact_guard(algorithm_id alg, int height) {
    const int cap = alg == algorithm_id::depth2 ? 3 : alg == algorithm_id::naive ? 4 : max_height;
    if (height > cap) {
        throw resource_cap_error("exact expectation of " + std::string(to_string(alg)) +
                                 " is limited to height " + std::to_string(cap));
    }
}

}  // namespace

std::string_view to_string(algorithm_id alg) {
    switch (alg) {
        case algorithm_id::full_read: return "full";
        case algorithm_id::naive: return "naive";
        case algorithm_id::depth2: return "depth2";
    }
    return "?";
}

algorithm_id parse_algorithm(std::string_view name) {
    if (name == "full" || name == "full_read") return algorithm_id::full_read;
    if (name == "naive") return algorithm_id::naive;
    if (name == "depth2") return algorithm_id::depth2;
    throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

int full_read(query_oracle& oracle) {
    const input& x = oracle.source();
    for (std::uint64_t i = 0; i < x.size(); ++i) oracle.query(i);
    return eval(x);
}

int naive_evaluate(const tree_addr& addr, query_oracle& oracle, rng& gen) {
    sampling_context ctx(oracle, gen);
    return ctx.naive(to_node(addr, oracle.height()));
}

int evaluate(const tree_addr& addr, query_oracle& oracle, rng& gen) {
    sampling_context ctx(oracle, gen);
    return ctx.evaluate(to_node(addr, oracle.height()));
}

int complete(const tree_addr& addr, const tree_addr& known_child, int known_value,
             query_oracle& oracle, rng& gen) {
    if (!known_child.is_child_of(addr)) {
        throw std::invalid_argument("the known node is not a child of the completed node");
    }
    if (known_value != 0 && known_value != 1) throw std::invalid_argument("known value must be a bit");
    const node v = to_node(addr, oracle.height());
    sampling_context ctx(oracle, gen);
    return ctx.complete(v, known_child.path().back(), known_value);
}

int run_algorithm(algorithm_id alg, query_oracle& oracle, rng& gen) {
    switch (alg) {
        case algorithm_id::full_read: return full_read(oracle);
        case algorithm_id::naive: return naive_evaluate(tree_addr::root(), oracle, gen);
        case algorithm_id::depth2: return evaluate(tree_addr::root(), oracle, gen);
    }
    throw std::invalid_argument("unknown algorithm");
}

rational exact_expected_queries(algorithm_id alg, const input& x) {
    check_exact_guard(alg, x.height());
    if (alg == algorithm_id::full_read) return rational(big_int(x.size()));
    expectation_context ctx(x);
    const node root = make_node(x.height(), 0);
    if (alg == algorithm_id::naive) return ctx.measure(root, [&] { return ctx.naive(root); });
    return ctx.measure(root, [&] { return ctx.evaluate(root); });
}

rational exact_expected_complete(const input& x, const tree_addr& addr, const tree_addr& known_child) {
    check_exact_guard(algorithm_id::depth2, x.height());
    if (!known_child.is_child_of(addr)) {
        throw std::invalid_argument("the known node is not a child of the completed node");
    }
    const node v = to_node(addr, x.height());
    if (v.height < 1) throw std::invalid_argument("cannot complete a leaf");
    expectation_context ctx(x);
    const int known = known_child.path().back();
    const int known_value = ctx.value(v.child(known));
    return ctx.measure(v, [&] { return ctx.complete(v, known, known_value); });
}

rational naive_hard_expectation(int height) {
    check_height(height);
    // cost[b] for a subtree of the current height with value b.
    rational cost[2] = {1, 1};
    for (int h = 1; h <= height; ++h) {
        rational next[2];
        for (int b = 0; b < 2; ++b) {
            rational total = 0;
            for (int minority = 0; minority < 3; ++minority) {
                int values[3];
                for (int i = 0; i < 3; ++i) values[i] = i == minority ? 1 - b : b;
                for (const auto& y : permutations) {
                    total += cost[values[y[0]]] + cost[values[y[1]]];
                    if (values[y[0]] != values[y[1]]) total += cost[values[y[2]]];
                }
            }
            next[b] = total / 18;
        }
        cost[0] = next[0];
        cost[1] = next[1];
    }
    return (cost[0] + cost[1]) / 2;
}

monte_carlo_result monte_carlo(const monte_carlo_config& config) {
    if (config.trials < 1) throw std::invalid_argument("at least one trial is required");
    check_height(config.height);
    if (config.fixed_input && config.fixed_input->height() != config.height) {
        throw std::invalid_argument("fixed input height does not match");
    }

    constexpr std::uint64_t block = 1024;
    const std::uint64_t blocks = (config.trials + block - 1) / block;

    struct partial {
        std::uint64_t sum = 0;
        unsigned __int128 sum_sq = 0;
        std::uint64_t errors = 0;
    };
    std::vector<partial> partials(blocks);
    const int fixed_value = config.fixed_input ? eval(*config.fixed_input) : 0;

    auto run_block = [&](std::uint64_t b) {
        rng gen(config.seed, b);
        partial& out = partials[b];
        const std::uint64_t end = std::min(config.trials, (b + 1) * block);
        for (std::uint64_t t = b * block; t < end; ++t) {
            std::optional<hard_input> sampled;
            if (!config.fixed_input) sampled.emplace(sample_hard(config.height, std::nullopt, gen));
            const input& x = config.fixed_input ? *config.fixed_input : sampled->value();
            const int expected = config.fixed_input ? fixed_value : sampled->root_value();
            query_oracle oracle(x, false);
            const int got = run_algorithm(config.alg, oracle, gen);
            if (got != expected) ++out.errors;
            out.sum += oracle.count();
            out.sum_sq += static_cast<unsigned __int128>(oracle.count()) * oracle.count();
        }
    };

    const auto threads = static_cast<std::uint64_t>(std::max(1, config.threads));
    if (threads == 1 || blocks == 1) {
        for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        for (std::uint64_t t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::uint64_t b = t; b < blocks; b += threads) run_block(b);
            });
        }
        for (auto& th : pool) th.join();
    }

    big_int sum = 0, sum_sq = 0;
    monte_carlo_result result;
    result.trials = config.trials;
    for (const auto& p : partials) {
        sum += p.sum;
        big_int sq = static_cast<std::uint64_t>(p.sum_sq >> 64);
        sq <<= 64;
        sq += static_cast<std::uint64_t>(p.sum_sq);
        sum_sq += sq;
        result.errors += p.errors;
    }
    const big_int n = config.trials;
    result.mean = rational(sum, n);
    if (config.trials > 1) {
        const rational variance = rational(sum_sq * n - sum * sum, n * (n - 1));
        result.stddev = std::sqrt(variance.convert_to<double>());
    }
    result.standard_error = result.stddev / std::sqrt(static_cast<double>(config.trials));
    const double mean = result.mean.convert_to<double>();
    constexpr double z99 = 2.5758293035489004;
    result.ci99_low = mean - z99 * result.standard_error;
    result.ci99_high = mean + z99 * result.standard_error;
    return result;
}

}  // namespace maj3
