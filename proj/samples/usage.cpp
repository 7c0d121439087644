// Loads the sample build and history, searches a schedule and prints it.
//
//   ./sample_usage [build.json] [history.json]

#include "jobga/jobga.hpp"

#include <iostream>

int main(int argc, char** argv) {
    const std::string build_path = argc > 1 ? argv[1] : "samples/build.json";
    const std::string history_path = argc > 2 ? argv[2] : "samples/history.json";

    try {
        auto build = jobga::load_build_spec(jobga::read_text_file(build_path));
        auto history = jobga::load_history(jobga::read_text_file(history_path));

        jobga::JobGraph graph(build);
        auto run_times = jobga::estimate_all(build, history, {});

        auto baseline = jobga::baseline_evaluate(graph, run_times, jobga::baseline_allocation(graph));

        jobga::FitnessWeights weights; // run time 1, machines 0.25, normalized
        jobga::GaConfig config;
        config.rng_seed = 42;
        auto result = jobga::evolve(graph, run_times, weights, config);

        std::cout << "input order: " << jobga::to_seconds(baseline.makespan) << " s on "
                  << baseline.allocation.total() << " machines\n";
        std::cout << "GA:          " << jobga::to_seconds(result.schedule.makespan) << " s on "
                  << result.schedule.allocation.total() << " machines\n\n";
        for (auto j : result.best.priority) {
            const auto& a = result.schedule.assignments[j];
            std::cout << "  " << graph.name(j) << " -> " << graph.machine_types()[a.machine_type].name << '#'
                      << a.machine_index << "  [" << jobga::to_seconds(a.start) << ", " << jobga::to_seconds(a.end)
                      << ")\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
