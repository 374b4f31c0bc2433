#pragma once

// Worst-case complexity recurrences of Evaluate/Complete, the ansatz check
// behind the 2.64944^h upper bound, and the lower-bound calculators.

#include <optional>
#include <string>
#include <vector>

#include "maj3/rational.hpp"

namespace maj3 {

struct complexity_row {
    int h = 0;
    rational t;
    // Complete is undefined at height 0.
    std::optional<rational> s_major;
    std::optional<rational> s_minor;
};

class complexity_table {
public:
    explicit complexity_table(std::vector<complexity_row> rows) : rows_(std::move(rows)) {}

    int max_height() const { return static_cast<int>(rows_.size()) - 1; }
    const complexity_row& at(int h) const;
    const std::vector<complexity_row>& rows() const { return rows_; }

private:
    std::vector<complexity_row> rows_;
};

// Rows 0..max_h. Throws std::invalid_argument for max_h < 1.
complexity_table solve(int max_h);

// T(h)/T(h-1).
rational growth_ratio(const complexity_table& table, int h);

// Rows h >= 1 violating S^M <= S^m or S^M <= T (empty when the ordering holds).
std::vector<int> ordering_violations(const complexity_table& table);

struct ansatz {
    rational alpha, a, b, c;
    // alpha = 2.64944, a = 1.02, b = 0.559576 a, c = 0.755791 a.
    static ansatz standard();
};

struct inequality_check {
    std::string name;
    rational lhs, rhs;  // holds iff lhs <= rhs
    bool holds() const { return lhs <= rhs; }
};

struct ansatz_report {
    std::vector<inequality_check> checks;
    bool ok() const;
    std::vector<std::string> violations() const;
};

// The three base-case inequalities, a >= 1, and the three inductive ones.
ansatz_report verify_ansatz(const ansatz& ans);

// sum_i C(h,i) 2^(h-i) p_i. Requires p.size() == h+1.
rational jks_bound(const std::vector<rational>& p, int h);

// Closed interval [low, high] of rationals.
struct interval {
    rational low, high;
    bool exact() const { return low == high; }
    rational width() const { return high - low; }
};

// floor(x^(1/k)) for x >= 0.
big_int floor_root(const big_int& x, unsigned k);

// Certified enclosure of x^(1/k) with width <= 10^-digits (a point when exact).
interval kth_root(const rational& x, unsigned k, int digits);

struct lower_bound_result {
    interval base;   // 2 + alpha^(-1/k)
    interval value;  // (1-2 delta)(alpha/2^k) base^h
};

// Enclosures of the base and of the bound, each of width <= 10^-digits.
// Throws std::invalid_argument unless alpha > 0 and 0 <= delta < 1/2.
lower_bound_result lower_bound(int k, const rational& alpha, const rational& delta, int h, int digits);

}  // namespace maj3
