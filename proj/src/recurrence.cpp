#include "maj3/recurrence.hpp"

#include <stdexcept>

namespace maj3 {

const complexity_row& complexity_table::at(int h) const {
    if (h < 0 || h > max_height()) {
        throw std::out_of_range("height " + std::to_string(h) + " is outside the table");
    }
    return rows_[static_cast<std::size_t>(h)];
}

complexity_table solve(int max_h) {
    if (max_h < 1) throw std::invalid_argument("the table needs at least heights 0 and 1");
    std::vector<complexity_row> rows;
    rows.push_back({0, rational(1), std::nullopt, std::nullopt});
    rows.push_back({1, rational(8, 3), rational(3, 2), rational(2)});
    for (int h = 2; h <= max_h; ++h) {
        const auto& p2 = rows[static_cast<std::size_t>(h) - 2];
        const auto& p1 = rows[static_cast<std::size_t>(h) - 1];
        const rational& sM = *p1.s_major;
        const rational& sm = *p1.s_minor;
        complexity_row row;
        row.h = h;
        row.s_minor = p2.t + p1.t + rational(2, 3) * sM + rational(1, 3) * sm;
        row.s_major = p2.t + rational(2, 3) * p1.t + rational(1, 3) * sM + rational(1, 3) * sm;
        row.t = 2 * p2.t + rational(23, 27) * p1.t + rational(26, 27) * sM + rational(18, 27) * sm;
        rows.push_back(std::move(row));
    }
    return complexity_table(std::move(rows));
}

rational growth_ratio(const complexity_table& table, int h) {
    if (h < 1) throw std::out_of_range("growth ratio needs h >= 1");
    return table.at(h).t / table.at(h - 1).t;
}

std::vector<int> ordering_violations(const complexity_table& table) {
    std::vector<int> bad;
    for (const auto& row : table.rows()) {
        if (row.h == 0) continue;
        if (!(*row.s_major <= *row.s_minor && *row.s_major <= row.t)) bad.push_back(row.h);
    }
    return bad;
}

ansatz ansatz::standard() {
    ansatz ans;
    ans.alpha = parse_rational("2.64944");
    ans.a = parse_rational("1.02");
    ans.b = parse_rational("0.559576") * ans.a;
    ans.c = parse_rational("0.755791") * ans.a;
    return ans;
}

bool ansatz_report::ok() const {
    for (const auto& c : checks) {
        if (!c.holds()) return false;
    }
    return true;
}

std::vector<std::string> ansatz_report::violations() const {
    std::vector<std::string> out;
    for (const auto& c : checks) {
        if (!c.holds()) out.push_back(c.name + ": " + to_string(c.lhs) + " > " + to_string(c.rhs));
    }
    return out;
}

ansatz_report verify_ansatz(const ansatz& s) {
    const rational& al = s.alpha;
    const rational al2 = al * al;
    ansatz_report r;
    // Base cases S^m(1) <= c alpha, S^M(1) <= b alpha, T(0) <= a, T(1) <= a alpha.
    r.checks.push_back({"2 <= c*alpha", rational(2), s.c * al});
    r.checks.push_back({"3/2 <= b*alpha", rational(3, 2), s.b * al});
    r.checks.push_back({"1 <= a", rational(1), s.a});
    r.checks.push_back({"8/3 <= a*alpha", rational(8, 3), s.a * al});
    // Inductive steps for S^m, S^M and T.
    r.checks.push_back({"a + ((3a+2b+c)/3)alpha <= c*alpha^2",
                        s.a + (3 * s.a + 2 * s.b + s.c) / 3 * al, s.c * al2});
    r.checks.push_back({"a + ((2a+b+c)/3)alpha <= b*alpha^2",
                        s.a + (2 * s.a + s.b + s.c) / 3 * al, s.b * al2});
    r.checks.push_back({"2a + ((23a+26b+18c)/27)alpha <= a*alpha^2",
                        2 * s.a + (23 * s.a + 26 * s.b + 18 * s.c) / 27 * al, s.a * al2});
    return r;
}

rational jks_bound(const std::vector<rational>& p, int h) {
    if (h < 0) throw std::invalid_argument("negative height");
    if (p.size() != static_cast<std::size_t>(h) + 1) {
        throw std::invalid_argument("expected " + std::to_string(h + 1) + " probabilities, got " +
                                    std::to_string(p.size()));
    }
    rational sum = 0;
    for (int i = 0; i <= h; ++i) {
        sum += rational(binomial(static_cast<unsigned>(h), static_cast<unsigned>(i)) *
                        pow_int(2, static_cast<unsigned>(h - i))) *
               p[static_cast<std::size_t>(i)];
    }
    return sum;
}

big_int floor_root(const big_int& x, unsigned k) {
    if (x < 0) throw std::invalid_argument("root of a negative number");
    if (k == 0) throw std::invalid_argument("zeroth root");
    if (k == 1 || x < 2) return x;
    // x < 2^bits, so the root is below 2^(bits/k + 1).
    const auto bits = static_cast<unsigned>(boost::multiprecision::msb(x)) + 1;
    big_int lo = 0;
    big_int hi = big_int(1) << (bits / k + 1);
    while (hi - lo > 1) {
        big_int mid = (lo + hi) / 2;
        if (pow_int(mid, k) <= x) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

interval kth_root(const rational& x, unsigned k, int digits) {
    if (x < 0) throw std::invalid_argument("root of a negative number");
    if (digits < 0) throw std::invalid_argument("negative precision");
    const big_int num = boost::multiprecision::numerator(x);
    const big_int den = boost::multiprecision::denominator(x);
    // Exact when numerator and denominator are perfect kth powers.
    const big_int rn = floor_root(num, k), rd = floor_root(den, k);
    if (pow_int(rn, k) == num && pow_int(rd, k) == den) {
        rational r(rn, rd);
        return {r, r};
    }
    const big_int scale = pow_int(10, static_cast<unsigned>(digits));
    const big_int scaled = num * pow_int(scale, k) / den;  // floor(x * 10^(k digits))
    const big_int r = floor_root(scaled, k);
    // r^k <= scaled <= x 10^(k digits) < (r+1)^k.
    return {rational(r, scale), rational(r + 1, scale)};
}

lower_bound_result lower_bound(int k, const rational& alpha, const rational& delta, int h, int digits) {
    if (k < 1) throw std::invalid_argument("k must be positive");
    if (h < 0) throw std::invalid_argument("negative height");
    if (alpha <= 0) throw std::invalid_argument("alpha must be positive");
    if (delta < 0 || delta >= rational(1, 2)) throw std::invalid_argument("delta must lie in [0, 1/2)");
    const rational limit(1, pow_int(10, static_cast<unsigned>(digits)));
    const rational factor = (1 - 2 * delta) * alpha / rational(pow_int(2, static_cast<unsigned>(k)));
    for (int extra = 0;; extra += 2) {
        const interval root = kth_root(1 / alpha, static_cast<unsigned>(k), digits + extra);
        lower_bound_result out;
        out.base = {2 + root.low, 2 + root.high};
        out.value = {factor * pow_rational(out.base.low, static_cast<unsigned>(h)),
                     factor * pow_rational(out.base.high, static_cast<unsigned>(h))};
        if (out.value.width() <= limit && out.base.width() <= limit) return out;
    }
}

}  // namespace maj3
