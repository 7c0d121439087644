#ifndef JOBGA_FITNESS_HPP
#define JOBGA_FITNESS_HPP

// Weighted-sum fitness over makespan (RT) and total machine count (MC).
// Lower is better.
//
//   literal:    alpha_i = w_rt * P_MRT * RT_i        beta_i = w_mc * P_MMC * MC_i
//   normalized: alpha_i = w_rt * RT_i / P_MRT        beta_i = w_mc * MC_i / P_MMC
//
// where P_MRT and P_MMC are the largest RT and MC in the population. The
// normalized form maps each term to [0, w]; a zero maximum zeroes its term.

#include "jobga/error.hpp"

#include <algorithm>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace jobga {

enum class Scaling { normalized, literal };

inline std::string_view to_string(Scaling s) {
    return s == Scaling::literal ? "literal" : "normalized";
}

inline Scaling scaling_from_string(std::string_view s) {
    if (s == "normalized") return Scaling::normalized;
    if (s == "literal") return Scaling::literal;
    throw ContractViolation("unknown scaling '" + std::string(s) + "'");
}

struct FitnessWeights {
    double run_time = 1.0;
    double machine_count = 0.25;
    Scaling scaling = Scaling::normalized;
};

struct IndividualMetrics {
    double run_time = 0.0;      // makespan in seconds
    double machine_count = 0.0; // machines summed over types
};

// Population maxima that the scores are expressed against.
struct FitnessScale {
    double max_run_time = 0.0;
    double max_machine_count = 0.0;

    bool operator==(const FitnessScale&) const = default;
};

struct PopulationMetrics {
    std::vector<IndividualMetrics> individuals;
    FitnessScale maxima;

    static PopulationMetrics from(std::vector<IndividualMetrics> individuals) {
        PopulationMetrics m{std::move(individuals), {}};
        for (const auto& i : m.individuals) {
            m.maxima.max_run_time = std::max(m.maxima.max_run_time, i.run_time);
            m.maxima.max_machine_count = std::max(m.maxima.max_machine_count, i.machine_count);
        }
        return m;
    }
};

struct FitnessValue {
    double alpha = 0.0;
    double beta = 0.0;
    double total = 0.0;
};

inline void check_weights(const FitnessWeights& w) {
    expects(w.run_time >= 0.0 && w.machine_count >= 0.0, "fitness weights must be non-negative");
    expects(w.run_time + w.machine_count > 0.0, "at least one fitness weight must be positive");
}

inline FitnessValue score(const IndividualMetrics& m, const FitnessScale& scale, const FitnessWeights& w) {
    FitnessValue v;
    if (w.scaling == Scaling::literal) {
        v.alpha = w.run_time * scale.max_run_time * m.run_time;
        v.beta = w.machine_count * scale.max_machine_count * m.machine_count;
    } else {
        v.alpha = scale.max_run_time > 0.0 ? w.run_time * m.run_time / scale.max_run_time : 0.0;
        v.beta = scale.max_machine_count > 0.0 ? w.machine_count * m.machine_count / scale.max_machine_count : 0.0;
    }
    v.total = v.alpha + v.beta;
    return v;
}

inline std::vector<FitnessValue> fitness(const PopulationMetrics& metrics, const FitnessWeights& weights) {
    expects(!metrics.individuals.empty(), "fitness of an empty population");
    check_weights(weights);
    std::vector<FitnessValue> out;
    out.reserve(metrics.individuals.size());
    for (const auto& m : metrics.individuals) out.push_back(score(m, metrics.maxima, weights));
    return out;
}

} // namespace jobga

#endif // JOBGA_FITNESS_HPP
