#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqdet/observation_model.hpp"
#include "seqdet/strategy.hpp"

namespace seqdet {

// Invalid or missing configuration input; carries the offending field name.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error("config field '" + field + "': " + what),
          field_(std::move(field)) {}
    const std::string& field() const { return field_; }

  private:
    std::string field_;
};

struct ExperimentConfig {
    int k = 0;
    std::vector<ObservationModel> models;
    double alpha = 0.0;
    double beta = 0.0;
    StrategyKind strategy = CentralizedPositivePart{};
    std::vector<double> deltas;       // length k; defaults to 1.0 per sensor
    std::vector<SensorSet> subsets_to_test;
    long n_trials = 0;
    std::uint64_t base_seed = 0;
    double horizon_multiplier = 50.0;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

inline double parse_real(const std::string& field, const std::string& s) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a real number, got '" + s + "'");
    }
}

inline long parse_int(const std::string& field, const std::string& s) {
    try {
        std::size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected an integer, got '" + s + "'");
    }
}

// "1-3-4" -> bitmask
inline SensorSet parse_subset(const std::string& field, const std::string& s, int k) {
    SensorSet out = 0;
    for (const auto& tok : split(s, '-')) {
        long id = parse_int(field, tok);
        if (id < 1 || id > k)
            throw ConfigError(field, "sensor id " + tok + " outside 1.." + std::to_string(k));
        out |= SensorSet{1} << (id - 1);
    }
    if (out == 0) throw ConfigError(field, "empty subset");
    return out;
}

// "gaussian_mean_shift(1.0)" or "bernoulli(0.3, 0.7)"
inline ObservationModel parse_model(const std::string& field, const std::string& s) {
    std::size_t open = s.find('(');
    std::size_t close = s.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw ConfigError(field, "expected kind(args), got '" + s + "'");
    const std::string kind = trim(s.substr(0, open));
    const auto args = split(s.substr(open + 1, close - open - 1), ',');
    try {
        if (kind == "gaussian_mean_shift" || kind == "gaussian") {
            if (args.size() != 1) throw ConfigError(field, "gaussian_mean_shift takes 1 argument");
            return ObservationModel::gaussian_mean_shift(parse_real(field, args[0]));
        }
        if (kind == "bernoulli") {
            if (args.size() != 2) throw ConfigError(field, "bernoulli takes 2 arguments");
            return ObservationModel::bernoulli(parse_real(field, args[0]),
                                               parse_real(field, args[1]));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, e.what());
    }
    throw ConfigError(field, "unknown model kind '" + kind + "'");
}

}  // namespace detail

// "positive_part", "full_value", "one_bit", "oracle_sprt(1-2)",
// "mixture" (uniform over all non-empty subsets) or "mixture(1, 2, 1-2)".
inline StrategyKind parse_strategy(const std::string& text, int k,
                                   const std::string& field = "strategy") {
    const std::string s = detail::trim(text);
    if (s == "positive_part") return CentralizedPositivePart{};
    if (s == "full_value") return DecentralizedFullValue{};
    if (s == "one_bit") return DecentralizedOneBit{};
    std::size_t open = s.find('(');
    const std::string head = open == std::string::npos ? s : detail::trim(s.substr(0, open));
    std::string args;
    if (open != std::string::npos) {
        std::size_t close = s.rfind(')');
        if (close == std::string::npos || close < open)
            throw ConfigError(field, "unbalanced parentheses in '" + s + "'");
        args = s.substr(open + 1, close - open - 1);
    }
    if (head == "oracle_sprt") {
        if (args.empty()) throw ConfigError(field, "oracle_sprt requires a subset, e.g. oracle_sprt(1-2)");
        return OracleSprt{detail::parse_subset(field, args, k)};
    }
    if (head == "mixture") {
        MixtureBruteForce m;
        if (args.empty()) {
            if (k > 20) throw ConfigError(field, "mixture over the full power set needs k <= 20");
            const SensorSet n = full_set(k);
            const double w = 1.0 / static_cast<double>(n);
            for (SensorSet sub = 1; sub <= n; ++sub) m.prior.emplace_back(sub, w);
        } else {
            const auto subs = detail::split(args, ',');
            const double w = 1.0 / static_cast<double>(subs.size());
            for (const auto& sub : subs)
                m.prior.emplace_back(detail::parse_subset(field, sub, k), w);
        }
        return m;
    }
    throw ConfigError(field, "unknown strategy '" + s + "'");
}

// Flat key = value document; '#' starts a comment; lists are
// comma-separated; subsets are dash-joined sensor ids. Grammar is
// documented in the README.
inline ExperimentConfig parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        if (kv.count(key)) throw ConfigError(key, "duplicate key");
        kv[key] = detail::trim(line.substr(eq + 1));
    }

    const auto require = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw ConfigError(key, "missing required field");
        return it->second;
    };

    ExperimentConfig cfg;
    cfg.k = static_cast<int>(detail::parse_int("k", require("k")));
    if (cfg.k < 1 || cfg.k > 64) throw ConfigError("k", "must lie in 1..64");

    cfg.alpha = detail::parse_real("alpha", require("alpha"));
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha", "must lie in (0,1)");
    cfg.beta = detail::parse_real("beta", require("beta"));
    if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) throw ConfigError("beta", "must lie in (0,1)");

    for (const auto& m : detail::split(require("models"), ','))
        cfg.models.push_back(detail::parse_model("models", m));
    if (static_cast<int>(cfg.models.size()) != cfg.k)
        throw ConfigError("models", "expected " + std::to_string(cfg.k) + " entries, got " +
                                        std::to_string(cfg.models.size()));

    cfg.strategy = parse_strategy(require("strategy"), cfg.k);

    if (auto it = kv.find("deltas"); it != kv.end()) {
        for (const auto& d : detail::split(it->second, ',')) {
            double v = detail::parse_real("deltas", d);
            if (!(v > 0.0)) throw ConfigError("deltas", "entries must be > 0");
            cfg.deltas.push_back(v);
        }
        if (static_cast<int>(cfg.deltas.size()) != cfg.k)
            throw ConfigError("deltas", "expected " + std::to_string(cfg.k) + " entries, got " +
                                            std::to_string(cfg.deltas.size()));
    } else if (is_decentralized(cfg.strategy)) {
        throw ConfigError("deltas", "required for decentralized strategies");
    } else {
        cfg.deltas.assign(cfg.k, 1.0);
    }

    if (auto it = kv.find("subsets_to_test"); it != kv.end()) {
        for (const auto& s : detail::split(it->second, ','))
            cfg.subsets_to_test.push_back(detail::parse_subset("subsets_to_test", s, cfg.k));
        if (cfg.subsets_to_test.empty()) throw ConfigError("subsets_to_test", "must list at least one subset");
    } else {
        // default: all singletons plus the full set
        for (int id = 1; id <= cfg.k; ++id)
            cfg.subsets_to_test.push_back(SensorSet{1} << (id - 1));
        if (cfg.k > 1) cfg.subsets_to_test.push_back(full_set(cfg.k));
    }

    cfg.n_trials = detail::parse_int("n_trials", require("n_trials"));
    if (cfg.n_trials < 1) throw ConfigError("n_trials", "must be positive");

    cfg.base_seed = static_cast<std::uint64_t>(detail::parse_int("base_seed", require("base_seed")));

    if (auto it = kv.find("horizon_multiplier"); it != kv.end()) {
        cfg.horizon_multiplier = detail::parse_real("horizon_multiplier", it->second);
        if (!(cfg.horizon_multiplier > 0.0))
            throw ConfigError("horizon_multiplier", "must be positive");
    }

    static const char* known[] = {"k",       "alpha",   "beta",      "models",
                                  "strategy", "deltas", "subsets_to_test",   "n_trials",
                                  "base_seed", "horizon_multiplier"};
    for (const auto& [key, _] : kv) {
        bool ok = false;
        for (const char* kn : known) ok = ok || key == kn;
        if (!ok) throw ConfigError(key, "unknown field");
    }
    return cfg;
}

}  // namespace seqdet
