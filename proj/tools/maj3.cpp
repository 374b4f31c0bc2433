// maj3: command-line front end.
//
// Every subcommand writes its result to --out (or stdout) and a run manifest
// to --manifest (default <out>.manifest.json, or stderr when writing to stdout).
// Exit codes: 0 ok, 2 verification failure, 3 usage error, 4 resource cap.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "maj3/algorithms.hpp"
#include "maj3/alphadp.hpp"
#include "maj3/formula.hpp"
#include "maj3/oracles.hpp"
#include "maj3/recurrence.hpp"
#include "maj3/verify.hpp"

using json = nlohmann::json;
using namespace maj3;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verify = 2;
constexpr int exit_usage = 3;
constexpr int exit_cap = 4;

struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string decimal_ceil(const rational& value, int digits) {
    // ceil(v) = -floor(-v)
    const std::string s = to_decimal_floor(-value, digits);
    if (s.front() == '-') return s.substr(1);
    return s.find_first_not_of("0.") == std::string::npos ? s : "-" + s;
}

std::string width_tag(int digits) { return "1e-" + std::to_string(digits); }

// Decimal rendering of an exact value, tagged with the truncation width.
json decimal(const rational& value, int digits) {
    return {{"floor", to_decimal_floor(value, digits)}, {"width", width_tag(digits)}};
}

json interval_json(const interval& iv, int digits) {
    json j{{"low", to_decimal_floor(iv.low, digits)},
           {"high", decimal_ceil(iv.high, digits)},
           {"width", width_tag(digits)}};
    if (iv.exact()) j["exact"] = to_string(iv.low);
    return j;
}

struct run_output {
    std::string text;
    int code = exit_ok;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Accepts "H" or "A..B".
std::pair<int, int> parse_height_range(const std::string& text) {
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            const int h = std::stoi(text);
            return {h, h};
        }
        const int a = std::stoi(text.substr(0, dots));
        const int b = std::stoi(text.substr(dots + 2));
        if (a > b) throw usage_error("empty height range '" + text + "'");
        return {a, b};
    } catch (const std::logic_error&) {
        throw usage_error("bad height '" + text + "'");
    }
}

rational parse_rational_arg(const std::string& text, const std::string& what) {
    try {
        return parse_rational(text);
    } catch (const std::invalid_argument&) {
        throw usage_error("bad " + what + " '" + text + "'");
    }
}

std::vector<input> read_inputs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<input> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("h=", 0) == 0) continue;
        out.push_back(parse_line(line));
    }
    return out;
}

progress_fn stderr_progress(bool quiet) {
    if (quiet) return {};
    return [](const std::string& msg) { std::cerr << msg << std::endl; };
}

// ---------------------------------------------------------------------------
// subcommands

struct sample_args {
    int h = 0;
    std::uint64_t count = 1;
    std::optional<int> root;
};

run_output cmd_sample(const sample_args& a, std::uint64_t seed) {
    check_height(a.h);
    rng gen(seed, 0);
    std::string text;
    for (std::uint64_t i = 0; i < a.count; ++i) {
        const auto x = sample_hard(a.h, a.root, gen);
        text += fixture_header(x) + "\n" + to_line(x.value()) + "\n";
    }
    return {text};
}

struct estimate_args {
    std::string alg = "depth2";
    std::string heights = "2";
    std::uint64_t trials = 10000;
    std::string input_path;
};

run_output cmd_estimate(const estimate_args& a, std::uint64_t seed, int threads) {
    const auto alg = parse_algorithm(a.alg);
    const auto [lo, hi] = parse_height_range(a.heights);
    std::optional<input> fixed;
    if (!a.input_path.empty()) {
        const auto inputs = read_inputs(a.input_path);
        if (inputs.size() != 1) throw usage_error("--input must hold exactly one input");
        fixed = inputs[0];
        if (lo != hi || fixed->height() != lo) throw usage_error("--input height differs from --h");
    }
    if (a.trials == 0) throw usage_error("--trials must be positive");

    json out{{"alg", std::string(to_string(alg))}, {"trials", a.trials}, {"seed", seed},
             {"distribution", fixed ? "fixed" : "uniform hard"}};
    json rows = json::array();
    std::optional<rational> previous;
    json ratios = json::array();
    std::uint64_t errors = 0;
    for (int h = lo; h <= hi; ++h) {
        check_height(h);
        monte_carlo_config config;
        config.alg = alg;
        config.height = h;
        config.fixed_input = fixed;
        config.trials = a.trials;
        config.seed = seed;
        config.threads = threads;
        const auto res = monte_carlo(config);
        errors += res.errors;
        rows.push_back({{"h", h},
                        {"mean", to_string(res.mean)},
                        {"mean_decimal", decimal(res.mean, 6)},
                        {"stddev", res.stddev},
                        {"standard_error", res.standard_error},
                        {"ci99", {res.ci99_low, res.ci99_high}},
                        {"errors", res.errors}});
        if (previous && *previous != 0) {
            const rational ratio = res.mean / *previous;
            ratios.push_back({{"h", h}, {"ratio", to_string(ratio)}, {"ratio_decimal", decimal(ratio, 6)}});
        }
        previous = res.mean;
    }
    out["results"] = rows;
    if (hi > lo) out["growth_ratios"] = ratios;
    return {dump(out), errors == 0 ? exit_ok : exit_verify};
}

struct expect_args {
    std::string alg = "depth2";
    std::string line;
    std::string input_path;
    std::optional<int> all_h;
    std::optional<int> hard_h;
};

run_output cmd_expect(const expect_args& a) {
    const auto alg = parse_algorithm(a.alg);
    const int modes = (!a.line.empty() || !a.input_path.empty()) + a.all_h.has_value() + a.hard_h.has_value();
    if (modes != 1) throw usage_error("give exactly one of --line/--input, --all-inputs or --hard");
    json out{{"alg", std::string(to_string(alg))}};
    int code = exit_ok;

    if (a.hard_h) {
        const int h = *a.hard_h;
        check_height(h);
        rational mean;
        if (alg == algorithm_id::naive) {
            mean = naive_hard_expectation(h);
        } else if (alg == algorithm_id::full_read) {
            mean = rational(pow3(h));
        } else {
            if (h > 2) throw resource_cap_error("exact hard-distribution average of depth2 is limited to h <= 2");
            const auto hard = enumerate_hard(h);
            for (const auto& x : hard) mean += exact_expected_queries(alg, x.value());
            mean /= hard.size();
        }
        out["h"] = h;
        out["hard_average"] = to_string(mean);
        out["hard_average_decimal"] = decimal(mean, 6);
        return {dump(out)};
    }

    if (a.all_h) {
        const int h = *a.all_h;
        check_height(h);
        if (h > 2) throw resource_cap_error("--all-inputs enumerates 2^(3^h) inputs and is limited to h <= 2");
        const std::uint64_t n = pow3(h);
        rational best = -1;
        std::string argmax;
        std::uint64_t attaining = 0;
        for (std::uint64_t code_bits = 0; code_bits < (std::uint64_t{1} << n); ++code_bits) {
            std::vector<bool> bits(n);
            for (std::uint64_t i = 0; i < n; ++i) bits[i] = (code_bits >> (n - 1 - i)) & 1;
            const input x(h, bits);
            const auto e = exact_expected_queries(alg, x);
            if (e > best) {
                best = e;
                argmax = to_line(x);
                attaining = 0;
            }
            if (e == best) ++attaining;
        }
        out["h"] = h;
        out["inputs"] = std::uint64_t{1} << n;
        out["max"] = to_string(best);
        out["max_decimal"] = decimal(best, 6);
        out["argmax"] = argmax;
        out["attaining"] = attaining;
        if (alg == algorithm_id::depth2) {
            const auto t = solve(std::max(h, 1)).at(h).t;
            out["T"] = to_string(t);
            out["max_le_T"] = best <= t;
            out["max_equals_T"] = best == t;
            if (best > t) code = exit_verify;
        }
        return {dump(out), code};
    }

    std::vector<input> inputs;
    if (!a.line.empty()) inputs.push_back(parse_line(a.line));
    else inputs = read_inputs(a.input_path);
    json rows = json::array();
    for (const auto& x : inputs) {
        const auto e = exact_expected_queries(alg, x);
        rows.push_back({{"input", to_line(x)}, {"h", x.height()}, {"value", eval(x)},
                        {"expected", to_string(e)}, {"expected_decimal", decimal(e, 6)}});
    }
    out["results"] = rows;
    return {dump(out)};
}

struct recurrences_args {
    int max_h = 10;
    int precision = 6;
};

run_output cmd_recurrences(const recurrences_args& a) {
    if (a.precision < 0) throw usage_error("--precision must be non-negative");
    const auto table = solve(a.max_h);
    std::ostringstream csv;
    csv << "h,T,S_M,S_m,T_decimal_floor_" << width_tag(a.precision) << "\n";
    for (const auto& row : table.rows()) {
        csv << row.h << "," << to_string(row.t) << "," << (row.s_major ? to_string(*row.s_major) : "") << ","
            << (row.s_minor ? to_string(*row.s_minor) : "") << "," << to_decimal_floor(row.t, a.precision)
            << "\n";
    }
    const auto bad = ordering_violations(table);
    for (int h : bad) std::cerr << "ordering violated at h=" << h << "\n";
    return {csv.str(), bad.empty() ? exit_ok : exit_verify};
}

json class_dump(const stable_space& space) {
    json levels = json::array();
    for (int j = 0; j <= space.max_height(); ++j) {
        json rows = json::array();
        for (std::uint32_t id = 0; id < space.size(j); ++id) {
            const auto& c = space.counts(j, id);
            rows.push_back({{"key", space.key(j, id)},
                            {"members", space.members(j, id).str()},
                            {"completions", to_big(c.n[0] + c.n[1]).str()}});
        }
        levels.push_back({{"height", j}, {"classes", rows}});
    }
    return levels;
}

struct alpha_args {
    int k = 1;
    bool dump_classes = false;
    bool quiet = false;
};

run_output cmd_alpha(const alpha_args& a, int threads) {
    if (a.k < 1) throw usage_error("--k must be at least 1");
    if (a.dump_classes && a.k > 2) throw usage_error("--dump-classes is limited to k <= 2");
    const auto res = compute_alpha(a.k, threads, stderr_progress(a.quiet));
    json iterations = json::array();
    for (const auto& v : res.trace) iterations.push_back(to_string(v));
    json out{{"k", res.k},
             {"alpha", to_string(res.alpha)},
             {"alpha_decimal", decimal(res.alpha, 6)},
             {"n_k", res.n_k},
             {"iterations", iterations},
             {"many_iterations", res.many_iterations},
             {"elapsed_s", res.elapsed_s}};
    if (res.many_iterations) std::cerr << "warning: more than ten iterations were needed\n";
    if (a.dump_classes) out["classes"] = class_dump(stable_space(a.k));
    return {dump(out)};
}

struct dump_args {
    int k = 1;
};

// Fixture lines "<key> <members> <completions>" grouped by height.
run_output cmd_dump_classes(const dump_args& a) {
    if (a.k < 0 || a.k > 2) throw usage_error("dump-classes supports k in 0..2");
    const stable_space space(a.k);
    std::string text;
    for (int j = 0; j <= a.k; ++j) {
        text += "# height " + std::to_string(j) + "\n";
        for (std::uint32_t id = 0; id < space.size(j); ++id) {
            const auto& c = space.counts(j, id);
            text += space.key(j, id) + " " + space.members(j, id).str() + " " + to_big(c.n[0] + c.n[1]).str() + "\n";
        }
    }
    return {text};
}

struct bounds_args {
    int k = 1;
    std::string alpha;
    std::string delta = "0";
    int h = 1;
    int precision = 6;
    std::string above;
};

run_output cmd_bounds(const bounds_args& a) {
    if (a.precision < 0 || a.precision > 200) throw usage_error("--precision must lie in 0..200");
    if (a.k < 1) throw usage_error("--k must be at least 1");
    rational alpha;
    if (!a.alpha.empty()) {
        alpha = parse_rational_arg(a.alpha, "alpha");
    } else {
        const auto table = reference_constants()["alpha"];
        const auto key = std::to_string(a.k);
        if (!table.contains(key)) throw usage_error("no built-in alpha for k=" + key + "; pass --alpha");
        alpha = parse_rational(table[key].get<std::string>());
    }
    const auto delta = parse_rational_arg(a.delta, "delta");
    std::optional<rational> threshold;
    if (!a.above.empty()) threshold = parse_rational_arg(a.above, "threshold");
    // With a threshold the enclosure is narrowed until it decides the comparison
    // (the base can sit closer to the threshold than 10^-precision).
    int digits = a.precision;
    auto res = lower_bound(a.k, alpha, delta, a.h, digits);
    while (threshold && res.base.low <= *threshold && res.base.high > *threshold && digits < 30) {
        digits += 3;
        res = lower_bound(a.k, alpha, delta, a.h, digits);
    }
    json out{{"k", a.k}, {"alpha", to_string(alpha)}, {"delta", to_string(delta)}, {"h", a.h},
             {"base", interval_json(res.base, digits)}, {"bound", interval_json(res.value, digits)}};
    int code = exit_ok;
    if (threshold) {
        const bool ok = res.base.low > *threshold;
        out["base_above"] = {{"threshold", a.above}, {"certified", ok}};
        if (!ok) code = exit_verify;
    }
    return {dump(out), code};
}

struct verify_args {
    std::string suite = "all";
    int max_k = 3;
    std::string fixture;
    bool quiet = false;
};

run_output cmd_verify(const verify_args& a, std::uint64_t seed, int threads) {
    verify_options options;
    options.max_k = a.max_k;
    options.threads = threads;
    options.seed = seed;
    options.progress = stderr_progress(a.quiet);
    if (!a.fixture.empty()) {
        std::ifstream in(a.fixture);
        if (!in) throw std::runtime_error("cannot read " + a.fixture);
        try {
            options.fixture = json::parse(in);
        } catch (const json::exception& e) {
            throw usage_error(std::string("bad fixture: ") + e.what());
        }
    }
    const auto results = run_suite(a.suite, options);
    std::string text;
    std::size_t failed = 0;
    for (const auto& r : results) {
        text += std::string(r.ok ? "PASS" : "FAIL") + " [" + r.suite + "] " + r.name;
        if (!r.detail.empty()) text += " -- " + r.detail;
        text += "\n";
        if (!r.ok) ++failed;
    }
    text += std::to_string(results.size() - failed) + "/" + std::to_string(results.size()) + " checks passed\n";
    return {text, failed == 0 ? exit_ok : exit_verify};
}

json collect_flags(const CLI::App* sub) {
    json flags = json::object();
    for (const auto* opt : sub->get_options()) {
        if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
        if (opt->count() == 0) continue;
        const auto& res = opt->results();
        flags[opt->get_name()] = res.size() == 1 ? json(res[0]) : json(res);
    }
    return flags;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized query complexity of recursive 3-majority: algorithms, recurrences and the alpha_k program"};
    app.set_version_flag("--version", std::string(MAJ3_VERSION));
    // "-h" would collide with the --h height option.
    app.set_help_flag("--help", "print this help message and exit");
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_path, manifest_path;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "random seed")->envname("MAJ3_SEED")->capture_default_str();
        sub->add_option("--threads", threads, "worker threads (results do not depend on it)")
            ->check(CLI::Range(1, 256))
            ->capture_default_str();
        sub->add_option("--out", out_path, "result file (default stdout)");
        sub->add_option("--manifest", manifest_path, "manifest file (default <out>.manifest.json, or stderr)");
    };

    sample_args sa;
    auto* sample = app.add_subcommand("sample", "draw hard inputs in fixture format");
    sample->add_option("--h", sa.h, "height")->required();
    sample->add_option("--count", sa.count, "number of inputs")->capture_default_str();
    sample->add_option("--root", sa.root, "restrict to this root value")->check(CLI::Range(0, 1));
    common(sample);

    estimate_args ea;
    auto* estimate = app.add_subcommand("estimate", "Monte Carlo estimate of the expected query count");
    estimate->add_option("--alg", ea.alg, "full | naive | depth2")->capture_default_str();
    estimate->add_option("--h", ea.heights, "height or range A..B")->capture_default_str();
    estimate->add_option("--trials", ea.trials, "trials per height")->capture_default_str();
    estimate->add_option("--input", ea.input_path, "fixed input file (fixture format)");
    common(estimate);

    expect_args xa;
    auto* expect = app.add_subcommand("expect", "exact expected query count");
    expect->add_option("--alg", xa.alg, "full | naive | depth2")->capture_default_str();
    expect->add_option("--line", xa.line, "input as a 0/1 line");
    expect->add_option("--input", xa.input_path, "input file (fixture format)");
    expect->add_option("--all-inputs", xa.all_h, "maximum over every input of this height (h <= 2)");
    expect->add_option("--hard", xa.hard_h, "average over the hard inputs of this height");
    common(expect);

    recurrences_args ra;
    auto* recurrences = app.add_subcommand("recurrences", "T, S^M, S^m as CSV");
    recurrences->add_option("--H", ra.max_h, "last height")->check(CLI::Range(1, 100000))->capture_default_str();
    recurrences->add_option("--precision", ra.precision, "digits of the decimal column")->capture_default_str();
    common(recurrences);

    alpha_args aa;
    auto* alpha = app.add_subcommand("alpha", "alpha_k by the stable-configuration program");
    alpha->add_option("--k", aa.k, "height k (1..4)")->required();
    alpha->add_flag("--dump-classes", aa.dump_classes, "include every stable class (k <= 2)");
    alpha->add_flag("--quiet", aa.quiet, "no progress on stderr");
    common(alpha);

    bounds_args ba;
    auto* bounds = app.add_subcommand("bounds", "certified lower-bound enclosures");
    bounds->add_option("--k", ba.k, "encoding height")->required();
    bounds->add_option("--alpha", ba.alpha, "alpha_k (default: built-in value for k <= 4)");
    bounds->add_option("--delta", ba.delta, "error probability")->capture_default_str();
    bounds->add_option("--h", ba.h, "formula height")->capture_default_str();
    bounds->add_option("--precision", ba.precision, "enclosure width 10^-precision")->capture_default_str();
    bounds->add_option("--above", ba.above, "exit 2 unless the base is certified above this value");
    common(bounds);

    verify_args va;
    auto* verify = app.add_subcommand("verify", "self-check suites");
    verify->add_option("--suite", va.suite, "oracles | ansatz | encodings | alpha | all")
        ->check(CLI::IsMember(suite_names()))
        ->capture_default_str();
    verify->add_option("--max-k", va.max_k, "largest k recomputed by the alpha suite")
        ->check(CLI::Range(1, max_dp_height))
        ->capture_default_str();
    verify->add_option("--fixture", va.fixture, "JSON file of expected constants");
    verify->add_flag("--quiet", va.quiet, "no progress on stderr");
    common(verify);

    dump_args da;
    auto* dump_cls = app.add_subcommand("dump-classes", "stable classes with member and completion counts");
    dump_cls->add_option("--k", da.k, "height (0..2)")->required();
    common(dump_cls);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    const CLI::App* sub = app.get_subcommands().front();
    const std::string started = utc_now();
    run_output result;
    try {
        const auto name = sub->get_name();
        if (name == "sample") result = cmd_sample(sa, seed);
        else if (name == "estimate") result = cmd_estimate(ea, seed, threads);
        else if (name == "expect") result = cmd_expect(xa);
        else if (name == "recurrences") result = cmd_recurrences(ra);
        else if (name == "alpha") result = cmd_alpha(aa, threads);
        else if (name == "bounds") result = cmd_bounds(ba);
        else if (name == "verify") result = cmd_verify(va, seed, threads);
        else result = cmd_dump_classes(da);
    } catch (const resource_cap_error& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return exit_cap;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    if (out_path.empty()) {
        std::cout << result.text << std::flush;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out || !(out << result.text)) {
            std::cerr << "error: cannot write " << out_path << "\n";
            return 1;
        }
    }

    json manifest{{"subcommand", sub->get_name()},
                  {"flags", collect_flags(sub)},
                  {"seed", seed},
                  {"threads", threads},
                  {"version", MAJ3_VERSION},
                  {"started", started},
                  {"finished", utc_now()},
                  {"exit_code", result.code},
                  {"outputs", json::array({{{"path", out_path.empty() ? "-" : out_path},
                                            {"sha256", sha256_hex(result.text)},
                                            {"bytes", result.text.size()}}})}};
    if (manifest_path.empty() && !out_path.empty()) manifest_path = out_path + ".manifest.json";
    if (manifest_path.empty()) {
        std::cerr << manifest.dump() << "\n";
    } else {
        std::ofstream m(manifest_path);
        if (!m || !(m << manifest.dump(2) << "\n")) {
            std::cerr << "error: cannot write " << manifest_path << "\n";
            return 1;
        }
    }
    return result.code;
}
