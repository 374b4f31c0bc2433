#include "maj3/alphadp.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <thread>

#include <boost/multiprecision/cpp_int.hpp>

#include "maj3/formula.hpp"

namespace maj3 {

namespace {

constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();

u128 mul(u128 a, u128 b) {
    u128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("128-bit overflow in completion counts");
    return r;
}

u128 add(u128 a, u128 b) {
    u128 r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("128-bit overflow in completion counts");
    return r;
}

using score_t = boost::multiprecision::int256_t;

score_t to_score(u128 v) {
    score_t s = static_cast<std::uint64_t>(v >> 64);
    s <<= 64;
    s += static_cast<std::uint64_t>(v);
    return s;
}

score_t to_score(const big_int& v) {
    if (v != 0 && boost::multiprecision::msb(v) >= 120) {
        throw resource_cap_error("alpha has a numerator or denominator above 2^120");
    }
    return score_t(v.str());
}

}  // namespace

big_int to_big(u128 value) {
    big_int r = static_cast<std::uint64_t>(value >> 64);
    r <<= 64;
    r += static_cast<std::uint64_t>(value);
    return r;
}

big_int stable_count_recurrence(int k) {
    if (k < 0) throw std::invalid_argument("negative height");
    big_int n = 1;
    for (int j = 1; j <= k; ++j) {
        // C(n+1, 2) + C(n+2, 3)
        n = (n + 1) * n / 2 + (n + 2) * (n + 1) * n / 6;
    }
    return n;
}

subtree_counts subtree_counts::unqueried_leaf() {
    subtree_counts c;
    c.n[0] = c.n[1] = 1;
    return c;
}

subtree_counts subtree_counts::full(int j, int v) {
    subtree_counts c;
    c.n[v] = 1;
    c.q[v] = u128{1} << j;
    c.m[v] = 1;
    return c;
}

// ---------------------------------------------------------------------------
// stable_space

stable_space::stable_space(int k) : k_(k) {
    if (k < 0) throw std::invalid_argument("negative height");
    if (k > max_dp_height) {
        throw resource_cap_error("stable classes are only enumerated up to height " +
                                 std::to_string(max_dp_height));
    }
    classes_.resize(static_cast<std::size_t>(k) + 1);
    index_.resize(static_cast<std::size_t>(k) + 1);
    counts_.resize(static_cast<std::size_t>(k) + 1);
    orbits_.resize(static_cast<std::size_t>(k) + 1);
    query_memo_.resize(static_cast<std::size_t>(k) + 1);
    memo_slot_.resize(static_cast<std::size_t>(k) + 1);

    classes_[0].push_back({0, 0, 0});
    counts_[0].push_back(subtree_counts::unqueried_leaf());

    for (int j = 1; j <= k; ++j) {
        const std::uint32_t n = size(j - 1);
        auto& list = classes_[static_cast<std::size_t>(j)];
        auto& index = index_[static_cast<std::size_t>(j)];
        const std::size_t side = static_cast<std::size_t>(n) + 1;
        index.assign(side * side * side, none);
        // Sorted triples over ids 0..n, where n is the marker, used at most once.
        for (std::uint32_t a = 0; a < n; ++a) {
            for (std::uint32_t b = a; b < n; ++b) {
                for (std::uint32_t c = b; c <= n; ++c) {
                    index[(a * side + b) * side + c] = static_cast<std::uint32_t>(list.size());
                    list.push_back({a, b, c});
                }
            }
        }
        auto& counts = counts_[static_cast<std::size_t>(j)];
        counts.reserve(list.size());
        for (const auto& t : list) {
            counts.push_back(compose({stable_state(j, t[0]).counts, stable_state(j, t[1]).counts,
                                      stable_state(j, t[2]).counts}));
        }
    }

    // Orbits and query results below the top height are shared by every class
    // above them, so they are computed once here.
    for (int j = 0; j < k; ++j) {
        std::vector<std::vector<std::uint32_t>> level(size(j));
        for (std::uint32_t id = 0; id < size(j); ++id) level[id] = this->orbits(j, id);
        auto& orbits = orbits_[static_cast<std::size_t>(j)];
        orbits = std::move(level);
        const std::uint64_t leaves = pow3(j);
        auto& slots = memo_slot_[static_cast<std::size_t>(j)];
        slots.assign(size(j) * leaves * 2, none);
        auto& memo = query_memo_[static_cast<std::size_t>(j)];
        for (std::uint32_t id = 0; id < size(j); ++id) {
            for (auto offset : orbits[id]) {
                for (int b = 0; b < 2; ++b) {
                    slots[(id * leaves + offset) * 2 + static_cast<std::uint64_t>(b)] =
                        static_cast<std::uint32_t>(memo.size());
                    memo.push_back(query_uncached(j, id, offset, b));
                }
            }
        }
    }
}

std::uint32_t stable_space::size(int j) const {
    if (j < 0 || j > k_) throw std::out_of_range("height outside the enumerated range");
    return static_cast<std::uint32_t>(classes_[static_cast<std::size_t>(j)].size());
}

const std::array<std::uint32_t, 3>& stable_space::children(int j, std::uint32_t id) const {
    if (j < 1) throw std::invalid_argument("height-0 classes have no children");
    return classes_.at(static_cast<std::size_t>(j)).at(id);
}

std::uint32_t stable_space::all_unqueried(int j) const {
    std::uint32_t id = 0;
    for (int i = 1; i <= j; ++i) id = *find(i, {id, id, id});
    return id;
}

const subtree_counts& stable_space::counts(int j, std::uint32_t id) const {
    return counts_.at(static_cast<std::size_t>(j)).at(id);
}

std::optional<std::uint32_t> stable_space::find(int j, std::array<std::uint32_t, 3> t) const {
    const std::size_t side = static_cast<std::size_t>(size(j - 1)) + 1;
    if (t[0] > t[1] || t[1] > t[2] || t[2] >= side) return std::nullopt;
    const auto id = index_[static_cast<std::size_t>(j)][(t[0] * side + t[1]) * side + t[2]];
    if (id == none) return std::nullopt;
    return id;
}

subtree_state stable_space::stable_state(int j, std::uint32_t child) const {
    subtree_state s;
    if (child == size(j - 1)) {
        s.determined = true;
        s.value = 1;
        s.full = true;
        s.counts = subtree_counts::full(j - 1, 1);
    } else {
        s.id = child;
        s.counts = counts_[static_cast<std::size_t>(j) - 1][child];
    }
    return s;
}

std::string stable_space::key(int j, std::uint32_t id) const {
    if (j == 0) return "U";
    std::string out = "(";
    const auto& t = children(j, id);
    for (int i = 0; i < 3; ++i) {
        if (i) out += ' ';
        out += t[static_cast<std::size_t>(i)] == marker(j) ? "D" : key(j - 1, t[static_cast<std::size_t>(i)]);
    }
    return out + ")";
}

big_int stable_space::members(int j, std::uint32_t id) const {
    if (j == 0) return 1;
    const auto& t = children(j, id);
    big_int result = (t[0] == t[1] && t[1] == t[2]) ? 1 : (t[0] == t[1] || t[1] == t[2]) ? 3 : 6;
    for (auto c : t) {
        if (c == marker(j)) {
            // Every hard assignment of the child with local value 1.
            result *= pow_int(3, static_cast<unsigned>((pow3(j - 1) - 1) / 2));
        } else {
            result *= members(j - 1, c);
        }
    }
    return result;
}

std::uint64_t stable_space::queried(int j, std::uint32_t id) const {
    if (j == 0) return 0;
    std::uint64_t total = 0;
    for (auto c : children(j, id)) total += c == marker(j) ? pow3(j - 1) : queried(j - 1, c);
    return total;
}

namespace {

// Hard full assignment of height h with root value v (minority first).
void fill_full(raw_config& out, std::uint64_t offset, int h, int v) {
    if (h == 0) {
        out[offset] = v;
        return;
    }
    const std::uint64_t stride = pow3(h - 1);
    fill_full(out, offset, h - 1, 1 - v);
    fill_full(out, offset + stride, h - 1, v);
    fill_full(out, offset + 2 * stride, h - 1, v);
}

}  // namespace

raw_config stable_space::representative(int j, std::uint32_t id) const {
    raw_config out(pow3(j), -1);
    if (j == 0) return out;
    const std::uint64_t stride = pow3(j - 1);
    const auto& t = children(j, id);
    for (std::uint64_t p = 0; p < 3; ++p) {
        raw_config child(stride, -1);
        if (t[p] == marker(j)) {
            fill_full(child, 0, j - 1, 1);
        } else {
            child = representative(j - 1, t[p]);
        }
        // Moving a subtree one level down flips its local values: use the dual.
        for (std::uint64_t i = 0; i < stride; ++i) out[p * stride + i] = child[i] < 0 ? -1 : 1 - child[i];
    }
    return out;
}

std::vector<std::uint32_t> stable_space::orbits(int j, std::uint32_t id) const {
    if (j < k_ && !orbits_[static_cast<std::size_t>(j)].empty()) return orbits_[static_cast<std::size_t>(j)][id];
    if (j == 0) return {0};
    std::vector<std::uint32_t> out;
    const auto& t = children(j, id);
    const auto stride = static_cast<std::uint32_t>(pow3(j - 1));
    for (std::uint32_t p = 0; p < 3; ++p) {
        if (t[p] == marker(j)) continue;
        if (p > 0 && t[p] == t[p - 1]) continue;  // same class as its left sibling
        for (auto o : orbits(j - 1, t[p])) out.push_back(p * stride + o);
    }
    return out;
}

subtree_counts stable_space::compose(const std::array<subtree_counts, 3>& ch) const {
    subtree_counts r;
    for (int v = 0; v < 2; ++v) {
        const int w = 1 - v;
        for (int t = 0; t < 3; ++t) {
            const auto& a = ch[static_cast<std::size_t>((t + 1) % 3)];
            const auto& b = ch[static_cast<std::size_t>((t + 2) % 3)];
            const auto& c = ch[static_cast<std::size_t>(t)];
            // Child t carries the node's local value, the two others the opposite one.
            const u128 others = mul(a.n[w], b.n[w]);
            r.n[v] = add(r.n[v], mul(c.n[v], others));
            r.m[v] = add(r.m[v], mul(c.m[v], others));
            r.q[v] = add(r.q[v], mul(c.n[v], add(mul(a.q[w], b.n[w]), mul(b.q[w], a.n[w]))));
        }
    }
    return r;
}

std::vector<weighted_state> stable_space::apply_rules(int j, std::array<subtree_state, 3> ch) const {
    u128 weight = 1;
    // A child known to have local value 1 is off the minority path: read it all.
    for (auto& c : ch) {
        if (c.determined && c.value == 1 && !c.full) {
            weight = mul(weight, c.counts.n[1]);
            c.counts = subtree_counts::full(j - 1, 1);
            c.full = true;
        }
    }

    // A child with local value 0 puts its siblings off the path; two of them
    // decide the node, and then nothing below it can be the minority.
    std::vector<int> zeros;
    for (int i = 0; i < 3; ++i) {
        if (ch[static_cast<std::size_t>(i)].determined && ch[static_cast<std::size_t>(i)].value == 0) zeros.push_back(i);
    }
    std::vector<std::pair<std::array<subtree_state, 3>, u128>> combos{{ch, weight}};
    if (!zeros.empty()) {
        for (int i = 0; i < 3; ++i) {
            const auto& c = ch[static_cast<std::size_t>(i)];
            if (zeros.size() == 1 && i == zeros[0]) continue;
            if (c.full) continue;
            std::vector<std::pair<std::array<subtree_state, 3>, u128>> next;
            for (auto& [states, w] : combos) {
                for (int v = 0; v < 2; ++v) {
                    if (c.counts.n[v] == 0) continue;
                    auto s = states;
                    auto& target = s[static_cast<std::size_t>(i)];
                    target.determined = true;
                    target.value = v;
                    target.full = true;
                    target.counts = subtree_counts::full(j - 1, v);
                    next.emplace_back(s, mul(w, c.counts.n[v]));
                }
            }
            combos = std::move(next);
        }
    }

    std::vector<weighted_state> out;
    for (const auto& [states, w] : combos) {
        int determined = 0;
        for (const auto& c : states) determined += c.determined ? 1 : 0;
        weighted_state ws;
        ws.weight = w;
        if (determined >= 2) {
            if (determined == 2) {
                for (const auto& c : states) {
                    if (c.determined && c.value != 1) throw std::logic_error("unresolved zero child");
                }
            }
            ws.state.determined = true;
            ws.state.counts = compose({states[0].counts, states[1].counts, states[2].counts});
            if (ws.state.counts.n[0] == 0 && ws.state.counts.n[1] == 0) continue;
            ws.state.value = ws.state.counts.n[0] > 0 ? 0 : 1;
            ws.state.full = determined == 3 && states[0].full && states[1].full && states[2].full;
        } else {
            std::array<std::uint32_t, 3> ids{};
            for (int i = 0; i < 3; ++i) {
                const auto& c = states[static_cast<std::size_t>(i)];
                ids[static_cast<std::size_t>(i)] = c.determined ? marker(j) : c.id;
            }
            std::sort(ids.begin(), ids.end());
            const auto id = find(j, ids);
            if (!id) throw std::logic_error("closure produced a configuration outside the stable classes");
            ws.state.id = *id;
            ws.state.counts = counts_[static_cast<std::size_t>(j)][*id];
        }
        out.push_back(ws);
    }
    return out;
}

std::vector<weighted_state> stable_space::query_uncached(int j, std::uint32_t id, std::uint32_t offset,
                                                         int outcome) const {
    if (j == 0) {
        weighted_state ws;
        ws.state.determined = true;
        ws.state.value = outcome;
        ws.state.full = true;
        ws.state.counts = subtree_counts::full(0, outcome);
        return {ws};
    }
    const auto stride = static_cast<std::uint32_t>(pow3(j - 1));
    const auto& t = children(j, id);
    const std::uint32_t p = offset / stride;
    if (p > 2 || t[p] == marker(j)) throw std::invalid_argument("query of an already queried leaf");
    std::array<subtree_state, 3> base{stable_state(j, t[0]), stable_state(j, t[1]), stable_state(j, t[2])};
    std::vector<weighted_state> out;
    for (const auto& sub : query(j - 1, t[p], offset % stride, outcome)) {
        auto ch = base;
        ch[p] = sub.state;
        for (auto& r : apply_rules(j, ch)) {
            r.weight = mul(r.weight, sub.weight);
            out.push_back(r);
        }
    }
    return out;
}

std::vector<weighted_state> stable_space::query(int j, std::uint32_t id, std::uint32_t offset, int outcome) const {
    if (j < k_) {
        const auto& slots = memo_slot_[static_cast<std::size_t>(j)];
        const std::uint64_t slot = (id * pow3(j) + offset) * 2 + static_cast<std::uint64_t>(outcome);
        if (slot < slots.size() && slots[slot] != none) return query_memo_[static_cast<std::size_t>(j)][slots[slot]];
    }
    return query_uncached(j, id, offset, outcome);
}

std::vector<weighted_state> stable_space::resolve_node(const raw_config& config, int height,
                                                       std::uint64_t offset, int depth) const {
    if (height == 0) {
        weighted_state ws;
        const int a = config[offset];
        if (a < 0) {
            ws.state.counts = subtree_counts::unqueried_leaf();
        } else {
            const int local = a ^ (depth & 1);
            ws.state.determined = true;
            ws.state.value = local;
            ws.state.full = true;
            ws.state.counts = subtree_counts::full(0, local);
        }
        return {ws};
    }
    const std::uint64_t stride = pow3(height - 1);
    std::array<std::vector<weighted_state>, 3> kids;
    for (std::uint64_t p = 0; p < 3; ++p) kids[p] = resolve_node(config, height - 1, offset + p * stride, depth + 1);
    std::vector<weighted_state> out;
    for (const auto& a : kids[0]) {
        for (const auto& b : kids[1]) {
            for (const auto& c : kids[2]) {
                const u128 w = mul(mul(a.weight, b.weight), c.weight);
                for (auto& r : apply_rules(height, {a.state, b.state, c.state})) {
                    r.weight = mul(r.weight, w);
                    out.push_back(r);
                }
            }
        }
    }
    return out;
}

std::vector<weighted_state> stable_space::resolve(const raw_config& config) const {
    if (config.size() != pow3(k_)) throw std::invalid_argument("configuration size does not match the height");
    for (int a : config) {
        if (a < -1 || a > 1) throw std::invalid_argument("leaf state outside {-1, 0, 1}");
    }
    return resolve_node(config, k_, 0, 0);
}

// ---------------------------------------------------------------------------
// alpha_dp

alpha_dp::alpha_dp(int k, int threads, progress_fn progress)
    : k_(k), space_(k), progress_(std::move(progress)) {
    const std::uint32_t n = space_.size(k);
    if (progress_) progress_("height " + std::to_string(k) + ": " + std::to_string(n) + " stable classes");

    // Successors always have more queried leaves, so this order is topological.
    std::vector<std::uint64_t> queried(n);
    for (std::uint32_t s = 0; s < n; ++s) queried[s] = space_.queried(k, s);
    order_.resize(n);
    for (std::uint32_t s = 0; s < n; ++s) order_[s] = s;
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return queried[a] > queried[b]; });

    struct segment {
        std::vector<std::uint64_t> action_count;
        std::vector<action> actions;
        std::vector<std::uint32_t> succ_id;
        std::vector<std::uint64_t> succ_weight;
    };
    const auto parts = static_cast<std::uint32_t>(std::max(1, std::min<int>(threads, 64)));
    std::vector<segment> segments(parts);

    auto build = [&](std::uint32_t part) {
        const std::uint32_t begin = static_cast<std::uint32_t>(std::uint64_t{n} * part / parts);
        const std::uint32_t end = static_cast<std::uint32_t>(std::uint64_t{n} * (part + 1) / parts);
        auto& seg = segments[part];
        for (std::uint32_t s = begin; s < end; ++s) {
            const auto offsets = space_.orbits(k, s);
            seg.action_count.push_back(offsets.size());
            for (auto offset : offsets) {
                action a;
                a.succ_begin = seg.succ_id.size();
                for (int b = 0; b < 2; ++b) {
                    for (const auto& r : space_.query(k, s, offset, b)) {
                        if (r.state.determined) {
                            a.q = add(a.q, mul(r.weight, r.state.counts.q[0]));
                            a.m = add(a.m, mul(r.weight, r.state.counts.m[0]));
                        } else {
                            if (r.weight > std::numeric_limits<std::uint64_t>::max()) {
                                throw std::overflow_error("transition weight above 2^64");
                            }
                            seg.succ_id.push_back(r.state.id);
                            seg.succ_weight.push_back(static_cast<std::uint64_t>(r.weight));
                        }
                    }
                }
                a.succ_end = seg.succ_id.size();
                seg.actions.push_back(a);
            }
            if (progress_ && parts == 1 && (s + 1) % 50000 == 0) {
                progress_("transitions: " + std::to_string(s + 1) + "/" + std::to_string(n) + " classes");
            }
        }
    };
    if (parts == 1) {
        build(0);
    } else {
        std::vector<std::thread> pool;
        for (std::uint32_t p = 0; p < parts; ++p) pool.emplace_back(build, p);
        for (auto& t : pool) t.join();
    }

    action_begin_.reserve(static_cast<std::size_t>(n) + 1);
    for (auto& seg : segments) {
        const std::uint64_t action_base = actions_.size();
        const std::uint64_t succ_base = succ_id_.size();
        std::uint64_t local = 0;
        for (auto count : seg.action_count) {
            action_begin_.push_back(action_base + local);
            local += count;
        }
        for (auto a : seg.actions) {
            a.succ_begin += succ_base;
            a.succ_end += succ_base;
            actions_.push_back(a);
        }
        succ_id_.insert(succ_id_.end(), seg.succ_id.begin(), seg.succ_id.end());
        succ_weight_.insert(succ_weight_.end(), seg.succ_weight.begin(), seg.succ_weight.end());
        seg = segment{};
    }
    action_begin_.push_back(actions_.size());
    if (progress_) {
        progress_("transitions: " + std::to_string(actions_.size()) + " actions, " +
                  std::to_string(succ_id_.size()) + " successor links");
    }
}

dp_solution alpha_dp::optimize(const rational& alpha) {
    const std::uint32_t n = space_.size(k_);
    const std::uint32_t root = space_.all_unqueried(k_);
    const score_t p = to_score(boost::multiprecision::numerator(alpha));
    const score_t q = to_score(boost::multiprecision::denominator(alpha));
    const score_t p_scaled = p * (score_t(1) << k_);
    // Comparing rho = 2^-k Q - alpha M (both count-weighted) via q Q - p 2^k M.
    auto score = [&](u128 qv, u128 mv) { return q * to_score(qv) - p_scaled * to_score(mv); };

    best_q_.assign(n, 0);
    best_m_.assign(n, 0);
    best_action_.assign(n, -1);
    for (std::uint32_t s : order_) {
        const auto& counts = space_.counts(k_, s);
        bool have = false;
        score_t best = 0;
        u128 bq = 0, bm = 0;
        int chosen = -1;
        if (s != root) {
            bq = counts.q[0];
            bm = counts.m[0];
            best = score(bq, bm);
            have = true;
        }
        for (std::uint64_t a = action_begin_[s]; a < action_begin_[s + 1]; ++a) {
            const auto& act = actions_[a];
            u128 tq = act.q, tm = act.m;
            for (std::uint64_t e = act.succ_begin; e < act.succ_end; ++e) {
                tq = add(tq, mul(succ_weight_[e], best_q_[succ_id_[e]]));
                tm = add(tm, mul(succ_weight_[e], best_m_[succ_id_[e]]));
            }
            const score_t sc = score(tq, tm);
            if (!have || sc > best) {
                have = true;
                best = sc;
                bq = tq;
                bm = tm;
                chosen = static_cast<int>(a - action_begin_[s]);
            }
        }
        best_q_[s] = bq;
        best_m_[s] = bm;
        best_action_[s] = chosen;
    }
    alpha_ = alpha;
    solved_ = true;

    const dp_entry root_entry = entry(root);
    dp_solution sol;
    sol.alpha = alpha;
    sol.rho = root_entry.rho;
    sol.p_q = root_entry.p_q;
    sol.p_m = root_entry.p_m;
    if (best_m_[root] != 0) {
        sol.alpha_tree = rational(to_big(best_q_[root]), to_big(best_m_[root]) << k_);
    }
    return sol;
}

dp_entry alpha_dp::entry(std::uint32_t id) const {
    if (!solved_) throw std::logic_error("optimize() has not been run");
    if (id >= space_.size(k_)) throw std::out_of_range("class id out of range");
    dp_entry e;
    e.action = best_action_[id];
    const u128 n0 = space_.counts(k_, id).n[0];
    if (n0 != 0) {
        e.p_q = rational(to_big(best_q_[id]), to_big(n0));
        e.p_m = rational(to_big(best_m_[id]), to_big(n0));
    }
    e.rho = e.p_q / rational(pow_int(2, static_cast<unsigned>(k_))) - alpha_ * e.p_m;
    return e;
}

alpha_result compute_alpha(int k, int threads, progress_fn progress) {
    if (k < 1) throw std::invalid_argument("alpha_k needs k >= 1");
    if (k > max_dp_height) {
        throw resource_cap_error("alpha_k is computed for 1 <= k <= " + std::to_string(max_dp_height));
    }
    const auto start = std::chrono::steady_clock::now();
    alpha_dp dp(k, threads, progress);
    alpha_result result;
    result.k = k;
    result.n_k = dp.space().size(k);
    rational alpha = 0;
    for (int iteration = 1;; ++iteration) {
        result.trace.push_back(alpha);
        const dp_solution sol = dp.optimize(alpha);
        if (progress) progress("iteration " + std::to_string(iteration) + ": alpha " + to_string(alpha));
        if (sol.rho == 0) break;
        if (sol.rho < 0) throw std::logic_error("optimum of rho fell below zero");
        if (!sol.alpha_tree) throw std::logic_error("optimal tree never queries the minority");
        if (iteration > 10) result.many_iterations = true;
        if (iteration >= 100) throw std::runtime_error("alpha iteration did not converge");
        alpha = *sol.alpha_tree;
    }
    result.alpha = alpha;
    result.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace maj3
