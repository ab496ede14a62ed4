#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace seqdet {

// Subset of sensors as a bitmask; bit k-1 is sensor k (ids are 1-based).
using SensorSet = std::uint64_t;

inline SensorSet full_set(int k) {
    return k >= 64 ? ~SensorSet{0} : ((SensorSet{1} << k) - 1);
}

inline bool set_contains(SensorSet s, int sensor_id) {
    return (s >> (sensor_id - 1)) & 1u;
}

inline int set_size(SensorSet s) { return static_cast<int>(std::popcount(s)); }

// "1-3-4" style, sorted ids
inline std::string set_to_string(SensorSet s) {
    std::string out;
    for (int id = 1; id <= 64; ++id) {
        if (set_contains(s, id)) {
            if (!out.empty()) out += '-';
            out += std::to_string(id);
        }
    }
    return out;
}

struct CentralizedPositivePart {};     // hat Z^k = max(Z^k, 0)
struct DecentralizedFullValue {};      // hat Z^k = Z at last communication
struct DecentralizedOneBit {};         // hat Z^k = delta * message count

struct OracleSprt {
    SensorSet subset;  // the true affected subset, known to the oracle
};

struct MixtureBruteForce {
    // explicit support: (subset, weight), all weights > 0
    std::vector<std::pair<SensorSet, double>> prior;
};

using StrategyKind = std::variant<CentralizedPositivePart, DecentralizedFullValue,
                                  DecentralizedOneBit, OracleSprt, MixtureBruteForce>;

inline bool is_decentralized(const StrategyKind& s) {
    return std::holds_alternative<DecentralizedFullValue>(s) ||
           std::holds_alternative<DecentralizedOneBit>(s);
}

// The three variants that drive the (T_hat, T_check) fusion rules through
// per-sensor surrogate statistics.
inline bool is_hat_strategy(const StrategyKind& s) {
    return std::holds_alternative<CentralizedPositivePart>(s) || is_decentralized(s);
}

inline std::string strategy_name(const StrategyKind& s) {
    struct V {
        std::string operator()(CentralizedPositivePart) const { return "positive_part"; }
        std::string operator()(DecentralizedFullValue) const { return "full_value"; }
        std::string operator()(DecentralizedOneBit) const { return "one_bit"; }
        std::string operator()(const OracleSprt&) const { return "oracle_sprt"; }
        std::string operator()(const MixtureBruteForce&) const { return "mixture"; }
    };
    return std::visit(V{}, s);
}

inline void validate_strategy(const StrategyKind& s) {
    if (const auto* o = std::get_if<OracleSprt>(&s)) {
        if (o->subset == 0) throw std::invalid_argument("oracle_sprt: subset must be non-empty");
    } else if (const auto* m = std::get_if<MixtureBruteForce>(&s)) {
        if (m->prior.empty())
            throw std::invalid_argument("mixture: prior must have at least one entry");
        for (const auto& [sub, w] : m->prior) {
            if (sub == 0) throw std::invalid_argument("mixture: subsets must be non-empty");
            if (!(w > 0.0)) throw std::invalid_argument("mixture: weights must be positive");
        }
    }
}

}  // namespace seqdet
