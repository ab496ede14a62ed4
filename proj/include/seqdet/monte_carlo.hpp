#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "seqdet/calibration.hpp"
#include "seqdet/experiment_config.hpp"
#include "seqdet/fusion_center.hpp"
#include "seqdet/observation_model.hpp"
#include "seqdet/rng.hpp"
#include "seqdet/sensor_node.hpp"
#include "seqdet/strategy.hpp"

namespace seqdet {

struct GroundTruth {
    bool is_h1;
    SensorSet affected;  // non-empty iff is_h1

    static GroundTruth h0() { return {false, 0}; }
    static GroundTruth h1(SensorSet a) {
        if (a == 0) throw std::invalid_argument("GroundTruth::h1: affected set must be non-empty");
        return {true, a};
    }
};

struct TrialRecord {
    Verdict verdict;
    GroundTruth ground_truth;
    std::uint64_t seed;
    std::vector<long> per_sensor_messages;
    double mean_overshoot_observed;  // average eta per communication, 0 if none
    // Diagnostics for the two null-rule semantics, tracked on every trial
    // regardless of strategy; -1 if the rule had not fired by stopping.
    // The alarm rule waits for every sensor's first crossing of -A, the
    // max rule for a tick on which all sit below -A simultaneously, so
    // whenever both fire, t_null_alarm <= t_null_max.
    long t_null_alarm = -1;
    long t_null_max = -1;
};

struct ErrorEstimate {
    double rate;
    double ci_low;
    double ci_high;
    long n;
};

struct MeanEstimate {
    double mean;
    double ci_low;
    double ci_high;
};

// Inverse standard normal CDF (Acklam's rational approximation, ~1e-9
// absolute accuracy, ample for confidence levels).
inline double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("inverse_normal_cdf: p outside (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double pl = 0.02425;
    if (p < pl) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - pl) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

inline std::pair<double, double> wilson_ci(long successes, long n, double level) {
    if (n < 1 || successes < 0 || successes > n)
        throw std::invalid_argument("wilson_ci: need 0 <= successes <= n, n >= 1");
    const double z = inverse_normal_cdf(0.5 + 0.5 * level);
    const double p = static_cast<double>(successes) / static_cast<double>(n);
    const double z2n = z * z / static_cast<double>(n);
    const double denom = 1.0 + z2n;
    const double center = p + 0.5 * z2n;
    const double half =
        z * std::sqrt(p * (1.0 - p) / static_cast<double>(n) + 0.25 * z2n / static_cast<double>(n));
    double lo = (center - half) / denom;
    double hi = (center + half) / denom;
    return {std::max(0.0, lo), std::min(1.0, hi)};
}

// Theorem-style performance floors: the H0 floor scales with the weakest
// sensor, the H1 floor with the total information of the affected subset.
inline std::pair<double, double> theoretical_bounds(double alpha, double beta,
                                                    const std::vector<ObservationModel>& models,
                                                    SensorSet subset) {
    if (subset == 0) throw std::invalid_argument("theoretical_bounds: subset must be non-empty");
    double min_i0 = std::numeric_limits<double>::infinity();
    double i1_sum = 0.0;
    for (int id = 1; id <= static_cast<int>(models.size()); ++id) {
        const KlPair kl = models[id - 1].kl_numbers();
        min_i0 = std::min(min_i0, kl.i0);
        if (set_contains(subset, id)) i1_sum += kl.i1;
    }
    return {std::fabs(std::log(beta)) / min_i0, std::fabs(std::log(alpha)) / i1_sum};
}

// Everything a single trial needs, pre-resolved from an ExperimentConfig
// (or built directly in tests to pin thresholds by hand).
struct TrialSetup {
    int k;
    std::vector<ObservationModel> models;
    std::vector<double> deltas;
    StrategyKind strategy;
    Thresholds thresholds;
    long horizon;
};

inline TrialSetup make_setup(const ExperimentConfig& cfg) {
    const Thresholds thr = calibrate(cfg.alpha, cfg.beta, cfg.k);
    double worst = 0.0;
    for (SensorSet sub : cfg.subsets_to_test)
        worst = std::max(worst, theoretical_bounds(cfg.alpha, cfg.beta, cfg.models, sub).second);
    worst = std::max(worst,
                     theoretical_bounds(cfg.alpha, cfg.beta, cfg.models, full_set(cfg.k)).first);
    const long horizon = std::max(10L, static_cast<long>(std::ceil(cfg.horizon_multiplier * worst)));
    return TrialSetup{cfg.k, cfg.models, cfg.deltas, cfg.strategy, thr, horizon};
}

// One full simulated trial: steps all sensors and the fusion center per
// time tick until a rule fires or the horizon censors the trial.
// Deterministic given (setup, truth, seed); sensor k's stream depends only
// on (seed, k), so the same sensor sees the same noise across strategies.
inline TrialRecord run_trial(const TrialSetup& setup, const GroundTruth& truth,
                             std::uint64_t seed) {
    validate_strategy(setup.strategy);
    const int k = setup.k;
    const bool decentralized = is_decentralized(setup.strategy);
    const MessageKind comm_kind = std::holds_alternative<DecentralizedOneBit>(setup.strategy)
                                      ? MessageKind::one_bit
                                      : MessageKind::full_value;
    const bool positive_part = std::holds_alternative<CentralizedPositivePart>(setup.strategy);

    std::vector<RandomStream> streams;
    std::vector<SensorConfig> sensor_cfgs;
    std::vector<SensorState> states(k);
    streams.reserve(k);
    sensor_cfgs.reserve(k);
    for (int id = 1; id <= k; ++id) {
        streams.emplace_back(derive_seed(seed, id));
        sensor_cfgs.emplace_back(setup.models[id - 1], setup.deltas[id - 1],
                                 setup.thresholds.a);
    }

    FusionState fstate(k);
    std::vector<long> per_sensor_msgs(k, 0);
    long t_null_alarm = -1;
    long t_null_max = -1;

    const auto finish = [&](Verdict v) {
        long comm_total = 0;
        double overshoot_total = 0.0;
        for (const SensorState& st : states) {
            comm_total += st.n_comm;
            overshoot_total += st.overshoot_sum;
        }
        if (!decentralized) {
            // centralized schemes ship the exact statistic every tick
            v.messages_total = static_cast<long>(k) * v.stopping_time;
            std::fill(per_sensor_msgs.begin(), per_sensor_msgs.end(), v.stopping_time);
        }
        const double mean_overshoot =
            comm_total > 0 ? overshoot_total / static_cast<double>(comm_total) : 0.0;
        return TrialRecord{v,    truth,        seed, per_sensor_msgs, mean_overshoot,
                           t_null_alarm, t_null_max};
    };

    for (long t = 1; t <= setup.horizon; ++t) {
        for (int id = 1; id <= k; ++id) {
            const bool under_h1 = truth.is_h1 && set_contains(truth.affected, id);
            const Observation x = setup.models[id - 1].sample(under_h1, streams[id - 1]);
            const auto msgs = observe(states[id - 1], sensor_cfgs[id - 1], id, x, comm_kind);
            fstate.z_exact[id - 1] = states[id - 1].z;
            if (decentralized) {
                for (const UplinkMessage& m : msgs) ingest(fstate, m, setup.deltas[id - 1]);
                per_sensor_msgs[id - 1] += static_cast<long>(msgs.size());
            } else if (positive_part) {
                fstate.hat_z[id - 1] = std::max(states[id - 1].z, 0.0);
            }
        }
        if (t_null_alarm < 0 &&
            std::all_of(states.begin(), states.end(),
                        [](const SensorState& s) { return s.null_alarm_sent; }))
            t_null_alarm = t;
        if (t_null_max < 0 &&
            *std::max_element(fstate.z_exact.begin(), fstate.z_exact.end()) <=
                -setup.thresholds.a)
            t_null_max = t;
        fstate.t = t;
        if (auto v = check_stop(fstate, setup.thresholds, setup.strategy, k)) return finish(*v);
    }
    return finish(Verdict{Decision::censored, setup.horizon, fstate.messages_total});
}

struct CellSummary {
    GroundTruth truth;
    long n_trials;
    ErrorEstimate error;       // type-I under h0, type-II under h1
    MeanEstimate mean_stop;    // over non-censored trials
    long censored;
    double theoretical_bound;  // e0 floor under h0, e1 floor under h1
    double mean_messages;      // over all trials
    double mean_overshoot;     // over trials with at least one communication
};

struct ExperimentSummary {
    CellSummary h0_cell;
    std::vector<CellSummary> h1_cells;  // one per tested subset, config order

    const ErrorEstimate& type1_rate() const { return h0_cell.error; }
    long censored_total() const {
        long c = h0_cell.censored;
        for (const auto& cell : h1_cells) c += cell.censored;
        return c;
    }
};

namespace detail {

// Index-parallel map with deterministic, order-independent aggregation:
// results land in a preallocated slot per index.
template <class F>
inline void parallel_for(long n, F&& body) {
    unsigned hw = std::thread::hardware_concurrency();
    unsigned n_threads = std::min<unsigned>(std::max(1u, hw), 16u);
    if (n < 256) n_threads = 1;
    if (n_threads == 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned w = 0; w < n_threads; ++w) {
        pool.emplace_back([&, w] {
            for (long i = w; i < n; i += n_threads) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline CellSummary summarize_cell(const TrialSetup& setup, const GroundTruth& truth,
                                  const std::vector<TrialRecord>& records, double e_bound) {
    const long n = static_cast<long>(records.size());
    long errors = 0, censored = 0, stopped = 0;
    double stop_sum = 0.0, stop_sq = 0.0, msg_sum = 0.0;
    double overshoot_sum = 0.0;
    long overshoot_trials = 0;
    for (const TrialRecord& r : records) {
        const Decision d = r.verdict.decision;
        if (d == Decision::censored) {
            ++censored;
        } else {
            const bool wrong = truth.is_h1 ? d == Decision::accept_h0 : d == Decision::accept_h1;
            if (wrong) ++errors;
            ++stopped;
            stop_sum += static_cast<double>(r.verdict.stopping_time);
            stop_sq += static_cast<double>(r.verdict.stopping_time) *
                       static_cast<double>(r.verdict.stopping_time);
        }
        msg_sum += static_cast<double>(r.verdict.messages_total);
        if (r.mean_overshoot_observed > 0.0) {
            overshoot_sum += r.mean_overshoot_observed;
            ++overshoot_trials;
        }
    }
    const auto [lo, hi] = wilson_ci(errors, n, 0.95);
    MeanEstimate stop{std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN()};
    if (stopped > 0) {
        const double mean = stop_sum / static_cast<double>(stopped);
        double half = 0.0;
        if (stopped > 1) {
            const double var =
                std::max(0.0, (stop_sq - stop_sum * mean) / static_cast<double>(stopped - 1));
            half = 1.959963985 * std::sqrt(var / static_cast<double>(stopped));
        }
        stop = MeanEstimate{mean, mean - half, mean + half};
    }
    (void)setup;
    return CellSummary{truth,
                       n,
                       ErrorEstimate{static_cast<double>(errors) / static_cast<double>(n), lo, hi, n},
                       stop,
                       censored,
                       e_bound,
                       msg_sum / static_cast<double>(n),
                       overshoot_trials > 0 ? overshoot_sum / overshoot_trials : 0.0};
}

}  // namespace detail

inline CellSummary run_cell(const TrialSetup& setup, const GroundTruth& truth, long n_trials,
                            std::uint64_t base_seed, double e_bound) {
    std::vector<TrialRecord> records;
    records.resize(n_trials, TrialRecord{Verdict{Decision::censored, 0, 0}, truth, 0, {}, 0.0});
    detail::parallel_for(n_trials, [&](long i) {
        records[i] = run_trial(setup, truth, base_seed + static_cast<std::uint64_t>(i));
    });
    return detail::summarize_cell(setup, truth, records, e_bound);
}

// Runs n_trials under h0 and under each tested affected subset; trial i of
// a cell uses seed base_seed + i, so trials pair up across cells and
// strategies (common random numbers).
inline ExperimentSummary estimate_operating_characteristics(const ExperimentConfig& cfg) {
    if (cfg.n_trials < 100)
        throw std::invalid_argument("estimate_operating_characteristics: need n_trials >= 100");
    const TrialSetup setup = make_setup(cfg);

    const double e0 =
        theoretical_bounds(cfg.alpha, cfg.beta, cfg.models, full_set(cfg.k)).first;
    ExperimentSummary out{run_cell(setup, GroundTruth::h0(), cfg.n_trials, cfg.base_seed, e0), {}};
    for (SensorSet sub : cfg.subsets_to_test) {
        const double e1 = theoretical_bounds(cfg.alpha, cfg.beta, cfg.models, sub).second;
        out.h1_cells.push_back(
            run_cell(setup, GroundTruth::h1(sub), cfg.n_trials, cfg.base_seed, e1));
    }
    return out;
}

}  // namespace seqdet
