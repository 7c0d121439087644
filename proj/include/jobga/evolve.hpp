#ifndef JOBGA_EVOLVE_HPP
#define JOBGA_EVOLVE_HPP

// Generational GA with tournament selection and elitist replacement.
//
// Fitness is expressed against one FitnessScale for the whole run (the
// generation-0 population maxima unless the caller supplies one), so a given
// (makespan, machines) pair always scores the same and the elites make the
// per-generation best fitness non-increasing.
//
// Only evaluation runs in parallel. Every random draw happens on the calling
// thread, and results land in per-index slots, so the output does not depend
// on the worker count.

#include "jobga/fitness.hpp"
#include "jobga/ga_config.hpp"
#include "jobga/model.hpp"
#include "jobga/operators.hpp"
#include "jobga/population.hpp"
#include "jobga/runtime_estimator.hpp"
#include "jobga/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <numeric>
#include <optional>
#include <span>
#include <thread>
#include <tuple>
#include <vector>

namespace jobga {

struct GenerationRecord {
    std::size_t generation = 0;
    double best_fitness = 0.0;
    double best_makespan = 0.0; // seconds
    std::uint32_t best_machines = 0;
    double elapsed = 0.0; // wall-clock seconds since the run started
};

struct EvolutionTrace {
    std::vector<GenerationRecord> generations;
};

struct EvolveResult {
    Chromosome best;
    ScheduleResult schedule;
    FitnessValue fitness;
    FitnessScale scale;
    EvolutionTrace trace;
    // Generation-0 fitness of the seeded input-order individual.
    std::optional<FitnessValue> seeded_fitness;
};

namespace detail {

template <class Fn>
void parallel_for(std::size_t begin, std::size_t end, std::size_t workers, Fn&& fn) {
    const auto count = end - begin;
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (auto i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            threads.emplace_back([&, w] {
                try {
                    for (auto i = begin + w; i < end; i += workers) fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace detail

inline MachineAllocation allocation_of(const Chromosome& c, const JobGraph& graph, const GaConfig& config) {
    if (config.pinned_allocation) return *config.pinned_allocation;
    return decode_machine_bits(c.machine_bits, graph.machine_types());
}

inline ScheduleResult schedule_of(const JobGraph& graph, std::span<const JobIndex> priority,
                                  const MachineAllocation& alloc, std::span<const Duration> run_times) {
    auto verdict = simulate(graph, priority, alloc, run_times);
    if (auto* deadlock = std::get_if<Deadlock>(&verdict))
        throw ContractViolation("priority list deadlocks with " + std::to_string(deadlock->unscheduled.size()) +
                                " job(s) unscheduled");
    return std::get<ScheduleResult>(std::move(verdict));
}

inline IndividualMetrics evaluate(const Chromosome& c, const JobGraph& graph, std::span<const Duration> run_times,
                                  const GaConfig& config) {
    auto alloc = allocation_of(c, graph, config);
    auto schedule = schedule_of(graph, c.priority, alloc, run_times);
    return {to_seconds(schedule.makespan), static_cast<double>(alloc.total())};
}

inline EvolveResult evolve(const JobGraph& graph, std::span<const Duration> run_times, const FitnessWeights& weights,
                           const GaConfig& config) {
    if (!graph.acyclic()) throw ValidationError(validate_build(graph.build()).summary());
    check_weights(weights);
    check_config(config);
    expects(run_times.size() == graph.job_count(), "missing run time for some job");
    const auto& types = graph.machine_types();
    if (config.pinned_allocation)
        expects(in_range(*config.pinned_allocation, types), "pinned allocation outside [1, max_count]");

    const auto started = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count(); };

    Rng rng(config.rng_seed);
    auto population = init_population(graph, config, rng);
    if (config.seed_original_order) {
        population[0].priority = repair_priority_list(graph, graph.original_order());
        population[0].machine_bits =
            encode_machine_counts(config.pinned_allocation.value_or(max_allocation(types)), types);
    }
    const auto size = population.size();
    const auto elites = elite_count_for(config, size);
    const auto jobs = graph.job_count();

    std::vector<IndividualMetrics> metrics(size);
    auto evaluate_range = [&](std::size_t from) {
        detail::parallel_for(from, size, config.workers,
                             [&](std::size_t i) { metrics[i] = evaluate(population[i], graph, run_times, config); });
    };
    evaluate_range(0);

    EvolveResult result;
    result.scale = config.scale.value_or(PopulationMetrics::from(metrics).maxima);

    std::vector<FitnessValue> scores(size);
    std::vector<double> totals(size);
    auto rescore = [&] {
        for (std::size_t i = 0; i < size; ++i) {
            scores[i] = score(metrics[i], result.scale, weights);
            totals[i] = scores[i].total;
        }
    };
    auto ranking = [&] {
        std::vector<std::size_t> order(size);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return totals[a] < totals[b]; });
        return order;
    };
    auto record = [&](std::size_t generation, std::size_t best) {
        result.trace.generations.push_back({generation, totals[best], metrics[best].run_time,
                                            static_cast<std::uint32_t>(metrics[best].machine_count), elapsed()});
    };

    rescore();
    if (config.seed_original_order) result.seeded_fitness = scores[0];
    auto order = ranking();
    result.best = population[order.front()];
    result.fitness = scores[order.front()];
    record(0, order.front());

    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::size_t stagnant = 0;
    for (std::size_t generation = 1; generation <= config.max_generations; ++generation) {
        if (config.stagnation_limit != 0 && stagnant >= config.stagnation_limit) break;

        std::vector<Chromosome> next;
        std::vector<IndividualMetrics> next_metrics;
        next.reserve(size);
        for (std::size_t e = 0; e < elites; ++e) {
            next.push_back(population[order[e]]);
            next_metrics.push_back(metrics[order[e]]);
        }
        while (next.size() < size) {
            auto [a, b] = select_parents(totals, config, rng);
            Chromosome first = population[a];
            Chromosome second = population[b];
            if (coin(rng) < config.crossover_rate) {
                if (jobs >= 2) {
                    auto piv = draw_pivots(jobs, rng);
                    if (config.crossover == CrossoverKind::ox) {
                        first.priority = ordered_crossover(population[a].priority, population[b].priority, piv);
                        second.priority = ordered_crossover(population[b].priority, population[a].priority, piv);
                    } else {
                        std::tie(first.priority, second.priority) =
                            pmx_crossover(population[a].priority, population[b].priority, piv);
                    }
                }
                if (!config.pinned_allocation) {
                    auto cuts = draw_cuts(population[a].machine_bits, rng);
                    first.machine_bits =
                        machine_segment_crossover(population[a].machine_bits, population[b].machine_bits, cuts);
                    second.machine_bits =
                        machine_segment_crossover(population[b].machine_bits, population[a].machine_bits, cuts);
                }
            }
            next.push_back(mutate(std::move(first), graph, config, rng));
            if (next.size() < size) next.push_back(mutate(std::move(second), graph, config, rng));
        }

        population = std::move(next);
        next_metrics.resize(size);
        metrics = std::move(next_metrics);
        evaluate_range(elites);
        rescore();
        order = ranking();

        const auto best = order.front();
        if (totals[best] < result.fitness.total) {
            result.best = population[best];
            result.fitness = scores[best];
            stagnant = 0;
        } else {
            ++stagnant;
        }
        record(generation, best);
    }

    result.schedule = schedule_of(graph, result.best.priority, allocation_of(result.best, graph, config), run_times);
    return result;
}

// Validates the build, estimates run times and evolves.
inline EvolveResult evolve(const Build& build, const RunHistory& history, const EstimatorConfig& estimator,
                           const FitnessWeights& weights, const GaConfig& config) {
    auto report = validate_build(build);
    if (!report.ok()) throw ValidationError(report.summary());
    JobGraph graph(build);
    auto run_times = estimate_all(build, history, estimator);
    return evolve(graph, run_times, weights, config);
}

} // namespace jobga

#endif // JOBGA_EVOLVE_HPP
