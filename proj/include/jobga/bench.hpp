#ifndef JOBGA_BENCH_HPP
#define JOBGA_BENCH_HPP

// GA-versus-input-order comparisons on build suites, run-to-run stability,
// search-cost accounting, and an exhaustive optimum for tiny builds.

#include "jobga/evolve.hpp"
#include "jobga/fitness.hpp"
#include "jobga/io.hpp"
#include "jobga/model.hpp"
#include "jobga/operators.hpp"
#include "jobga/runtime_estimator.hpp"
#include "jobga/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace jobga {

// Every machine type at max_count.
inline MachineAllocation baseline_allocation(const JobGraph& graph) {
    return max_allocation(graph.machine_types());
}

// The input order, repaired so that it cannot deadlock, simulated on `alloc`.
inline ScheduleResult baseline_evaluate(const JobGraph& graph, std::span<const Duration> run_times,
                                        const MachineAllocation& alloc) {
    if (!graph.acyclic()) throw ValidationError(validate_build(graph.build()).summary());
    auto order = repair_priority_list(graph, graph.original_order());
    return schedule_of(graph, order, alloc, run_times);
}

// ---------------------------------------------------------------------------
// exhaustive optimum

struct OracleLimits {
    std::size_t max_jobs = 8;
    std::size_t max_allocations = 10'000;
};

struct OracleResult {
    FitnessValue fitness;
    FitnessScale scale; // maxima over every candidate
    std::vector<JobIndex> priority;
    MachineAllocation allocation;
    Duration makespan{0};
    std::size_t candidates = 0;
};

// Simulates every permutation under every allocation. The scale is the
// maxima over all candidates, and the optimum is scored against it.
inline OracleResult brute_force_optimum(const JobGraph& graph, std::span<const Duration> run_times,
                                        const FitnessWeights& weights, const OracleLimits& limits = {}) {
    check_weights(weights);
    const auto& types = graph.machine_types();
    if (graph.job_count() > limits.max_jobs)
        throw ContractViolation("instance too large for exhaustive search: " + std::to_string(graph.job_count()) +
                                " jobs");
    std::size_t allocations = 1;
    for (const auto& t : types) {
        allocations *= t.max_count;
        if (allocations > limits.max_allocations)
            throw ContractViolation("instance too large for exhaustive search: too many allocations");
    }

    struct PerAllocation {
        MachineAllocation alloc;
        Duration best{std::numeric_limits<Duration::rep>::max()};
        std::vector<JobIndex> witness;
    };
    std::vector<PerAllocation> per_alloc;
    OracleResult result;
    Duration worst{0};

    MachineAllocation alloc{std::vector<std::uint32_t>(types.size(), 1)};
    for (;;) {
        PerAllocation entry;
        entry.alloc = alloc;
        auto perm = graph.original_order();
        do {
            auto verdict = simulate(graph, perm, alloc, run_times);
            if (auto* s = std::get_if<ScheduleResult>(&verdict)) {
                ++result.candidates;
                worst = std::max(worst, s->makespan);
                if (s->makespan < entry.best) {
                    entry.best = s->makespan;
                    entry.witness = perm;
                }
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (!entry.witness.empty() || graph.job_count() == 0) per_alloc.push_back(std::move(entry));

        std::size_t t = 0;
        for (; t < types.size(); ++t) {
            if (alloc.counts[t] < types[t].max_count) {
                ++alloc.counts[t];
                break;
            }
            alloc.counts[t] = 1;
        }
        if (t == types.size()) break;
    }
    expects(!per_alloc.empty(), "no deadlock-free candidate exists");

    result.scale = {to_seconds(worst), static_cast<double>(max_allocation(types).total())};
    bool first = true;
    for (const auto& entry : per_alloc) {
        auto value = score({to_seconds(entry.best), static_cast<double>(entry.alloc.total())}, result.scale, weights);
        if (first || value.total < result.fitness.total) {
            first = false;
            result.fitness = value;
            result.priority = entry.witness;
            result.allocation = entry.alloc;
            result.makespan = entry.best;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// suites and test cases

struct SuiteEntry {
    std::string id;
    Build build;
    RunHistory history;
};

// Default shape: three types with one or two machines each and sparse
// dependencies, so machine contention leaves room for a better order.
inline SyntheticParams default_suite_shape() {
    SyntheticParams shape;
    shape.edge_prob = 0.1;
    shape.types = 3;
    shape.max_count_lo = 1;
    shape.max_count_hi = 2;
    shape.run_time_lo = 10.0;
    shape.run_time_hi = 300.0;
    shape.seed = 7;
    return shape;
}

struct SuiteParams {
    std::size_t builds = 100;
    std::size_t min_jobs = 30;
    std::size_t max_jobs = 80;
    SyntheticParams shape = default_suite_shape(); // jobs and seed are drawn per build from shape.seed
};

inline std::vector<SuiteEntry> synthetic_suite(const SuiteParams& params) {
    expects(params.min_jobs >= 1 && params.min_jobs <= params.max_jobs, "job range must satisfy 1 <= min <= max");
    Rng rng(params.shape.seed);
    std::uniform_int_distribution<std::size_t> jobs(params.min_jobs, params.max_jobs);
    std::vector<SuiteEntry> suite;
    const auto width = std::to_string(params.builds == 0 ? 0 : params.builds - 1).size();
    for (std::size_t b = 0; b < params.builds; ++b) {
        auto shape = params.shape;
        shape.jobs = jobs(rng);
        shape.seed = rng();
        auto digits = std::to_string(b);
        suite.push_back({"build_" + std::string(width - digits.size(), '0') + digits,
                         generate_synthetic_build(shape), {}});
    }
    return suite;
}

struct BenchSettings {
    FitnessWeights weights;
    GaConfig ga;
    EstimatorConfig estimator;
    // Run the GA on the baseline allocation instead of searching counts.
    bool pin_allocation = false;
};

struct BuildOutcome {
    BenchmarkRow row;
    EvolveResult ga;
    ScheduleResult baseline;
};

inline BuildOutcome run_build(const SuiteEntry& entry, const BenchSettings& settings) {
    auto report = validate_build(entry.build);
    if (!report.ok()) throw ValidationError(entry.id + ": " + report.summary());
    JobGraph graph(entry.build);
    auto run_times = estimate_all(entry.build, entry.history, settings.estimator);
    auto base_alloc = baseline_allocation(graph);
    auto baseline = baseline_evaluate(graph, run_times, base_alloc);

    auto config = settings.ga;
    if (settings.pin_allocation) config.pinned_allocation = base_alloc;
    const auto started = std::chrono::steady_clock::now();
    auto ga = evolve(graph, run_times, settings.weights, config);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    BenchmarkRow row;
    row.build_id = entry.id;
    row.baseline_makespan_s = to_seconds(baseline.makespan);
    row.ga_makespan_s = to_seconds(ga.schedule.makespan);
    row.ga_machines = ga.schedule.allocation.total();
    row.baseline_machines = base_alloc.total();
    row.improvement_pct = improvement_pct(row.baseline_makespan_s, row.ga_makespan_s);
    row.search_wall_time_s = wall;
    row.seed = config.rng_seed;
    return {std::move(row), std::move(ga), std::move(baseline)};
}

// Baseline and GA on every build of the suite, rows in suite order.
inline std::vector<BenchmarkRow> run_test_case_one(std::span<const SuiteEntry> suite, const BenchSettings& settings) {
    std::vector<BenchmarkRow> rows;
    rows.reserve(suite.size());
    for (const auto& entry : suite) rows.push_back(run_build(entry, settings).row);
    return rows;
}

struct StabilityReport {
    std::vector<BenchmarkRow> rows; // one per seed
    double min_makespan_s = 0.0;
    double max_makespan_s = 0.0;
    double relative_spread = 0.0; // (max - min) / min
};

// The same build under n_seeds consecutive seeds starting at settings.ga.rng_seed.
inline StabilityReport run_test_case_two(const SuiteEntry& entry, std::size_t n_seeds, const BenchSettings& settings) {
    expects(n_seeds >= 1, "at least one seed is required");
    StabilityReport report;
    for (std::size_t k = 0; k < n_seeds; ++k) {
        auto s = settings;
        s.ga.rng_seed = settings.ga.rng_seed + k;
        report.rows.push_back(run_build(entry, s).row);
    }
    auto [lo, hi] = std::minmax_element(report.rows.begin(), report.rows.end(),
                                        [](const auto& a, const auto& b) { return a.ga_makespan_s < b.ga_makespan_s; });
    report.min_makespan_s = lo->ga_makespan_s;
    report.max_makespan_s = hi->ga_makespan_s;
    report.relative_spread =
        report.min_makespan_s > 0.0 ? (report.max_makespan_s - report.min_makespan_s) / report.min_makespan_s : 0.0;
    return report;
}

inline constexpr std::string_view search_cost_caveat =
    "combined_s adds simulated build seconds (ga_makespan_s) to real wall-clock seconds spent searching "
    "(search_wall_time_s); the two clocks differ and the wall-clock part depends on the host.";

struct SearchCostRow {
    BenchmarkRow row;
    double combined_s = 0.0;               // ga_makespan_s + search_wall_time_s
    double combined_improvement_pct = 0.0; // against baseline_makespan_s
};

struct SearchCostReport {
    std::vector<SearchCostRow> rows;
    std::string caveat{search_cost_caveat};
};

inline SearchCostReport run_test_case_three(std::span<const SuiteEntry> suite, const BenchSettings& settings) {
    SearchCostReport report;
    for (auto& row : run_test_case_one(suite, settings)) {
        SearchCostRow r;
        r.combined_s = row.ga_makespan_s + row.search_wall_time_s;
        r.combined_improvement_pct = improvement_pct(row.baseline_makespan_s, r.combined_s);
        r.row = std::move(row);
        report.rows.push_back(std::move(r));
    }
    return report;
}

inline constexpr std::string_view search_cost_csv_header =
    "build_id,baseline_makespan_s,ga_makespan_s,search_wall_time_s,combined_s,combined_improvement_pct";

inline std::string search_cost_to_csv(const SearchCostReport& report) {
    std::string out(search_cost_csv_header);
    out += '\n';
    for (const auto& r : report.rows) {
        out += r.row.build_id + ',' + format_number(r.row.baseline_makespan_s) + ',' +
               format_number(r.row.ga_makespan_s) + ',' + format_number(r.row.search_wall_time_s) + ',' +
               format_number(r.combined_s) + ',' + format_number(r.combined_improvement_pct) + '\n';
    }
    return out;
}

inline std::string stability_to_csv(const StabilityReport& report) {
    return "min_makespan_s,max_makespan_s,relative_spread\n" + format_number(report.min_makespan_s) + ',' +
           format_number(report.max_makespan_s) + ',' + format_number(report.relative_spread) + '\n';
}

} // namespace jobga

#endif // JOBGA_BENCH_HPP
