#ifndef JOBGA_POPULATION_HPP
#define JOBGA_POPULATION_HPP

// Initial populations. Both initializers shuffle the input order; the
// rejection variant reshuffles until the list simulates without deadlock,
// the repair variant fixes each shuffle in place.

#include "jobga/ga_config.hpp"
#include "jobga/model.hpp"
#include "jobga/operators.hpp"
#include "jobga/simulator.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace jobga {

// Uniform count in [1, max_count] per type, or the pinned allocation.
inline std::vector<BitSegment> initial_machine_bits(const JobGraph& graph, const GaConfig& config, Rng& rng) {
    const auto& types = graph.machine_types();
    if (config.pinned_allocation) return encode_machine_counts(*config.pinned_allocation, types);
    MachineAllocation alloc;
    for (const auto& t : types) alloc.counts.push_back(std::uniform_int_distribution<std::uint32_t>(1, t.max_count)(rng));
    return encode_machine_counts(alloc, types);
}

inline std::vector<Chromosome> init_population_rejection(const JobGraph& graph, const GaConfig& config, Rng& rng) {
    expects(graph.acyclic(), "cannot build a population for a cyclic build");
    const auto size = population_size_for(config, graph.job_count());
    std::vector<Chromosome> population;
    population.reserve(size);
    const auto identity = graph.original_order();
    while (population.size() < size) {
        Chromosome c;
        do {
            c.priority = identity;
            std::shuffle(c.priority.begin(), c.priority.end(), rng);
        } while (!is_deadlock_free(graph, c.priority));
        c.machine_bits = initial_machine_bits(graph, config, rng);
        population.push_back(std::move(c));
    }
    return population;
}

inline std::vector<Chromosome> init_population_repair(const JobGraph& graph, const GaConfig& config, Rng& rng) {
    expects(graph.acyclic(), "cannot build a population for a cyclic build");
    const auto size = population_size_for(config, graph.job_count());
    std::vector<Chromosome> population;
    population.reserve(size);
    const auto identity = graph.original_order();
    while (population.size() < size) {
        Chromosome c;
        c.priority = identity;
        std::shuffle(c.priority.begin(), c.priority.end(), rng);
        repair_priority_list_in_place(graph, c.priority);
        c.machine_bits = initial_machine_bits(graph, config, rng);
        population.push_back(std::move(c));
    }
    return population;
}

inline std::vector<Chromosome> init_population(const JobGraph& graph, const GaConfig& config, Rng& rng) {
    return config.init == InitKind::rejection ? init_population_rejection(graph, config, rng)
                                              : init_population_repair(graph, config, rng);
}

} // namespace jobga

#endif // JOBGA_POPULATION_HPP
