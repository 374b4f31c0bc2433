#pragma once

// Self-check suites run by `maj3 verify`.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "maj3/alphadp.hpp"

namespace maj3 {

struct check_result {
    std::string suite;
    std::string name;
    bool ok = false;
    std::string detail;
};

struct verify_options {
    // alpha_k and N_k are recomputed for k = 1..max_k (k = 4 takes seconds, not milliseconds).
    int max_k = 3;
    int threads = 1;
    std::uint64_t seed = 1;
    // Expected constants; the built-in table is used for anything it leaves out.
    // Shape: {"alpha": {"k": "p/q"}, "n_k": {"k": n}, "T": {"h": "p/q"}}.
    std::optional<nlohmann::json> fixture;
    progress_fn progress;
};

// Built-in expected constants in fixture form.
nlohmann::json reference_constants();

// Suites: "oracles", "ansatz", "encodings", "alpha", "all".
// Throws std::invalid_argument for an unknown suite.
std::vector<check_result> run_suite(std::string_view suite, const verify_options& options);

std::vector<std::string> suite_names();

}  // namespace maj3
