#ifndef JOBGA_GA_CONFIG_HPP
#define JOBGA_GA_CONFIG_HPP

#include "jobga/error.hpp"
#include "jobga/fitness.hpp"
#include "jobga/model.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace jobga {

using Rng = std::mt19937_64;

enum class CrossoverKind { ox, pmx };
enum class InitKind { rejection, repair };

inline std::string_view to_string(CrossoverKind k) { return k == CrossoverKind::pmx ? "pmx" : "ox"; }
inline std::string_view to_string(InitKind k) { return k == InitKind::rejection ? "rejection" : "repair"; }

struct GaConfig {
    std::size_t population_size = 0; // 0 means twice the job count
    std::size_t max_generations = 200;
    std::size_t stagnation_limit = 50; // generations without improvement; 0 disables
    double crossover_rate = 0.9;
    double permutation_mutation_rate = 0.1;
    std::optional<double> bit_flip_rate; // unset: 1 / width, per segment
    std::size_t tournament_size = 3;
    std::size_t elite_count = 2; // capped at population_size - 1
    CrossoverKind crossover = CrossoverKind::ox;
    InitKind init = InitKind::repair;
    std::uint64_t rng_seed = 42;
    std::size_t workers = 1;

    // Freeze the machine-count half of every chromosome to this allocation.
    std::optional<MachineAllocation> pinned_allocation;
    // Normalization maxima for the run; unset means the generation-0 maxima.
    std::optional<FitnessScale> scale;
    // Put the repaired input order into the initial population.
    bool seed_original_order = true;
};

inline std::size_t population_size_for(const GaConfig& config, std::size_t job_count) {
    if (config.population_size != 0) return config.population_size;
    return std::max<std::size_t>(2, 2 * job_count);
}

inline std::size_t elite_count_for(const GaConfig& config, std::size_t population) {
    return std::min(config.elite_count, population - 1);
}

inline void check_config(const GaConfig& c) {
    auto rate = [](double r) { return r >= 0.0 && r <= 1.0; };
    expects(c.population_size == 0 || c.population_size >= 2, "population_size must be at least 2");
    expects(c.population_size == 0 || c.elite_count < c.population_size, "elite_count must be below population_size");
    expects(rate(c.crossover_rate), "crossover_rate must lie in [0, 1]");
    expects(rate(c.permutation_mutation_rate), "permutation_mutation_rate must lie in [0, 1]");
    expects(!c.bit_flip_rate || rate(*c.bit_flip_rate), "bit_flip_rate must lie in [0, 1]");
    expects(c.tournament_size >= 1, "tournament_size must be at least 1");
    expects(c.workers >= 1, "workers must be at least 1");
}

} // namespace jobga

#endif // JOBGA_GA_CONFIG_HPP
