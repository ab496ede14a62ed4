// Command-line front end: threshold calibration, single experiments, and
// delta sweeps. Results go to a CSV file or stdout; diagnostics to stderr.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqdet/calibration.hpp"
#include "seqdet/experiment.hpp"
#include "seqdet/experiment_config.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

seqdet::ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return seqdet::parse_config(ss.str());
}

// Runs body with `out` bound to the file at `path`, or stdout when empty.
template <class F>
int with_output(const std::string& path, F&& body) {
    if (path.empty()) {
        body(std::cout);
        return std::cout.good() ? kExitOk : kExitRuntime;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open output file: " << path << "\n";
        return kExitRuntime;
    }
    body(out);
    out.flush();
    if (!out.good()) {
        std::cerr << "error: write failed: " << path << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scalable sequential detection of a signal in an unknown subset of sensors"};
    app.require_subcommand(1);

    double alpha = 0.0, beta = 0.0;
    int k = 0;
    auto* cal = app.add_subcommand("calibrate", "Compute thresholds (A, B) from (alpha, beta, K)");
    cal->add_option("--alpha", alpha, "type-I error level")->required();
    cal->add_option("--beta", beta, "type-II error level")->required();
    cal->add_option("--k", k, "number of sensors")->required();

    std::string config_path, out_path;
    auto* run = app.add_subcommand("run", "Run a Monte Carlo experiment from a config file");
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_option("--out", out_path, "output CSV path (default: stdout)");

    std::vector<double> sweep_deltas;
    auto* sweep = app.add_subcommand("sweep-delta",
                                     "Repeat an experiment over a list of communication steps");
    sweep->add_option("--config", config_path, "experiment config file")->required();
    sweep->add_option("--deltas", sweep_deltas, "delta values to sweep")
        ->required()
        ->delimiter(',');
    sweep->add_option("--out", out_path, "output CSV path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cal->parsed()) {
            const seqdet::Thresholds thr = seqdet::calibrate(alpha, beta, k);
            std::printf("A=%.10g B=%.10g\n", thr.a, thr.b);
            return kExitOk;
        }
        if (run->parsed()) {
            const auto cfg = load_config(config_path);
            return with_output(out_path, [&](std::ostream& out) { seqdet::run_experiment(cfg, out); });
        }
        const auto cfg = load_config(config_path);
        return with_output(out_path,
                           [&](std::ostream& out) { seqdet::sweep_delta(cfg, sweep_deltas, out); });
    } catch (const seqdet::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
