#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "seqdet/experiment.hpp"

using namespace seqdet;

namespace {

ExperimentConfig small_config() {
    return parse_config(
        "k = 2\n"
        "alpha = 0.1\n"
        "beta = 0.1\n"
        "models = gaussian_mean_shift(1.0), gaussian_mean_shift(1.0)\n"
        "strategy = one_bit\n"
        "deltas = 1.0, 1.0\n"
        "n_trials = 400\n"
        "base_seed = 5\n");
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

long count_fields(const std::string& line) {
    long n = 1;
    for (char c : line)
        if (c == ',') ++n;
    return n;
}

}  // namespace

TEST_CASE("run_experiment emits the fixed CSV schema, byte-identical across runs") {
    const auto cfg = small_config();
    std::ostringstream a, b;
    run_experiment(cfg, a);
    run_experiment(cfg, b);
    CHECK(a.str() == b.str());

    const auto rows = lines_of(a.str());
    REQUIRE(rows.size() == 5);  // header + h0 + default subsets {1}, {2}, {1-2}
    CHECK(rows[0] ==
          "hypothesis,subset,strategy,n_trials,error_rate,ci_low,ci_high,mean_stop,"
          "mean_stop_ci_low,mean_stop_ci_high,theoretical_bound,mean_messages_per_trial,censored");
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(count_fields(rows[i]) == 13);
    CHECK(rows[1].rfind("h0,none,one_bit,400,", 0) == 0);
    CHECK(rows[2].rfind("h1,1,one_bit,400,", 0) == 0);
}

TEST_CASE("sweep_delta prefixes a delta column and reruns per value") {
    const auto cfg = small_config();
    std::ostringstream out;
    sweep_delta(cfg, {0.5, 2.0}, out);
    const auto rows = lines_of(out.str());
    REQUIRE(rows.size() == 1 + 2 * 4);
    CHECK(rows[0].rfind("delta,hypothesis,", 0) == 0);
    CHECK(rows[1].rfind("0.5,h0,", 0) == 0);
    CHECK(rows[5].rfind("2,h0,", 0) == 0);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(count_fields(rows[i]) == 14);
}
