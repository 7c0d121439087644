// jobga: command-line front end for the build scheduler.
//
// Exit codes: 0 success, 1 bad input (parse, validation, I/O, flags),
// 2 contract violation.

#include "jobga/jobga.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace jobga;

namespace {

struct Options {
    std::string build_path;
    std::string history_path;
    std::string out_dir = "jobga-out";
    std::string out_file;
    std::uint64_t seed = 42;

    FitnessWeights weights;
    std::string scaling = "normalized";
    GaConfig ga;
    std::string crossover = "ox";
    std::string init = "repair";
    EstimatorConfig estimator;

    std::string priority_path;
    std::string allocation;

    SyntheticParams synthetic;

    int bench_case = 1;
    SuiteParams suite;
    std::string suite_build_path;
    std::size_t n_seeds = 10;
    bool pin = false;
};

void add_build(CLI::App* cmd, Options& o) {
    cmd->add_option("--build", o.build_path, "Build spec (JSON)")->required()->check(CLI::ExistingFile);
}

void add_history(CLI::App* cmd, Options& o) {
    cmd->add_option("--history", o.history_path, "Run history (JSON: job -> samples in seconds)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--quantile", o.estimator.quantile_q, "Quantile of the history used as estimate")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--unknown-lo", o.estimator.unknown_lo, "Lower bound (s) for jobs without any data")
        ->capture_default_str();
    cmd->add_option("--unknown-hi", o.estimator.unknown_hi, "Upper bound (s) for jobs without any data")
        ->capture_default_str();
}

void add_seed(CLI::App* cmd, Options& o) {
    cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
}

void add_ga(CLI::App* cmd, Options& o) {
    cmd->add_option("--generations", o.ga.max_generations, "Maximum generations")->capture_default_str();
    cmd->add_option("--population", o.ga.population_size, "Population size (0: twice the job count)")
        ->capture_default_str();
    cmd->add_option("--stagnation", o.ga.stagnation_limit, "Stop after this many generations without improvement (0: off)")
        ->capture_default_str();
    cmd->add_option("--crossover-rate", o.ga.crossover_rate, "Crossover probability")->capture_default_str();
    cmd->add_option("--mutation-rate", o.ga.permutation_mutation_rate, "Swap mutation probability")
        ->capture_default_str();
    cmd->add_option("--tournament", o.ga.tournament_size, "Tournament size")->capture_default_str();
    cmd->add_option("--elites", o.ga.elite_count, "Elite count")->capture_default_str();
    cmd->add_option("--crossover", o.crossover, "Permutation crossover")
        ->capture_default_str()
        ->check(CLI::IsMember({"ox", "pmx"}));
    cmd->add_option("--init", o.init, "Population initializer")
        ->capture_default_str()
        ->check(CLI::IsMember({"rejection", "repair"}));
    cmd->add_option("--workers", o.ga.workers, "Threads used to evaluate fitness")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--w-rt", o.weights.run_time, "Run-time weight")->capture_default_str();
    cmd->add_option("--w-mc", o.weights.machine_count, "Machine-count weight")->capture_default_str();
    cmd->add_option("--scaling", o.scaling, "Run-time term scaling")
        ->capture_default_str()
        ->check(CLI::IsMember({"normalized", "literal"}));
}

void add_shape(CLI::App* cmd, SyntheticParams& p, bool with_jobs) {
    if (with_jobs) cmd->add_option("--jobs", p.jobs, "Job count")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--edge-prob", p.edge_prob, "Dependency probability")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--types", p.types, "Machine type count")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--max-count-lo", p.max_count_lo, "Smallest max_count")->capture_default_str();
    cmd->add_option("--max-count-hi", p.max_count_hi, "Largest max_count")->capture_default_str();
    cmd->add_option("--run-time-lo", p.run_time_lo, "Shortest declared run time (s)")->capture_default_str();
    cmd->add_option("--run-time-hi", p.run_time_hi, "Longest declared run time (s)")->capture_default_str();
}

void finish_ga(Options& o) {
    o.weights.scaling = scaling_from_string(o.scaling);
    o.ga.crossover = o.crossover == "pmx" ? CrossoverKind::pmx : CrossoverKind::ox;
    o.ga.init = o.init == "rejection" ? InitKind::rejection : InitKind::repair;
    o.ga.rng_seed = o.seed;
    o.estimator.rng_seed = o.seed;
}

RunHistory history_of(const Options& o) {
    return o.history_path.empty() ? RunHistory{} : load_history(read_text_file(o.history_path));
}

std::string allocation_text(const std::map<std::string, std::uint32_t>& alloc) {
    std::string out;
    for (const auto& [name, count] : alloc) {
        if (!out.empty()) out += ' ';
        out += name + '=' + std::to_string(count);
    }
    return out;
}

std::vector<std::string> read_priority(const std::string& path) {
    auto doc = detail::parse_json(read_text_file(path), "priority list");
    const auto& arr = detail::get_array(doc, "priority list");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < arr.size(); ++i)
        names.push_back(detail::get_string(arr[i], "priority list[" + std::to_string(i) + "]"));
    return names;
}

// "linux=2,windows=1"; types left out get their max_count.
MachineAllocation parse_allocation(const std::string& text, const JobGraph& graph) {
    auto alloc = max_allocation(graph.machine_types());
    if (text.empty()) return alloc;
    for (const auto& item : detail::split(text, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw ParseError("allocation: expected name=count, got '" + item + "'");
        auto name = item.substr(0, eq);
        const auto& types = graph.machine_types();
        auto it = std::find_if(types.begin(), types.end(), [&](const auto& t) { return t.name == name; });
        if (it == types.end()) throw ValidationError("allocation: unknown machine type '" + name + "'");
        auto count = detail::parse_unsigned(item.substr(eq + 1), "allocation." + name);
        if (count < 1 || count > it->max_count)
            throw ValidationError("allocation." + name + ": count must lie in [1, " + std::to_string(it->max_count) + "]");
        alloc.counts[static_cast<std::size_t>(it - types.begin())] = static_cast<std::uint32_t>(count);
    }
    return alloc;
}

int cmd_validate(const Options& o) {
    auto build = parse_build_spec(read_text_file(o.build_path));
    auto report = validate_build(build);
    if (!report.ok()) {
        std::cerr << report.summary() << '\n';
        return 1;
    }
    std::cout << "ok: " << build.jobs.size() << " jobs, " << build.machine_types.size() << " machine types\n";
    return 0;
}

int cmd_estimate(const Options& o) {
    auto build = load_build_spec(read_text_file(o.build_path));
    auto run_times = estimate_all(build, history_of(o), o.estimator);
    std::string out = "job,estimate_s\n";
    for (std::size_t j = 0; j < build.jobs.size(); ++j)
        out += build.jobs[j].name + ',' + format_number(to_seconds(run_times[j])) + '\n';
    if (o.out_file.empty())
        std::cout << out;
    else
        write_text_file(o.out_file, out);
    return 0;
}

int cmd_schedule(const Options& o) {
    auto build = load_build_spec(read_text_file(o.build_path));
    JobGraph graph(build);
    auto run_times = estimate_all(build, history_of(o), o.estimator);
    auto result = evolve(graph, run_times, o.weights, o.ga);

    ReportSet reports;
    reports.schedule = make_schedule_report(graph, result.schedule, result.fitness, o.weights, o.seed);
    reports.trace = result.trace;
    write_reports(reports, o.out_dir);

    std::cout << "seed: " << o.seed << '\n'
              << "makespan_s: " << format_number(to_seconds(result.schedule.makespan)) << '\n'
              << "allocation: " << allocation_text(to_named(result.schedule.allocation, graph.machine_types())) << '\n'
              << "fitness: " << format_number(result.fitness.total) << '\n'
              << "generations: " << result.trace.generations.size() - 1 << '\n'
              << "reports: " << o.out_dir << '\n';
    return 0;
}

int cmd_simulate(const Options& o) {
    auto build = load_build_spec(read_text_file(o.build_path));
    JobGraph graph(build);
    auto run_times = estimate_all(build, history_of(o), o.estimator);
    auto priority = o.priority_path.empty() ? graph.original_order() : graph.to_indices(read_priority(o.priority_path));
    auto alloc = parse_allocation(o.allocation, graph);
    auto verdict = simulate(graph, priority, alloc, run_times);
    if (auto* d = std::get_if<Deadlock>(&verdict)) {
        std::cerr << "deadlock: " << d->unscheduled.size() << " job(s) never start\n";
        return 1;
    }
    const auto& schedule = std::get<ScheduleResult>(verdict);
    // A population of one: the schedule is its own normalization maximum.
    auto metrics = PopulationMetrics::from(std::vector<IndividualMetrics>{
        {to_seconds(schedule.makespan), static_cast<double>(alloc.total())}});
    auto value = fitness(metrics, o.weights).front();

    ReportSet reports;
    reports.schedule = make_schedule_report(graph, schedule, value, o.weights, o.seed);
    write_reports(reports, o.out_dir);
    std::cout << "makespan_s: " << format_number(to_seconds(schedule.makespan)) << '\n'
              << "allocation: " << allocation_text(to_named(alloc, graph.machine_types())) << '\n'
              << "reports: " << o.out_dir << '\n';
    return 0;
}

int cmd_repair(const Options& o) {
    auto build = load_build_spec(read_text_file(o.build_path));
    JobGraph graph(build);
    auto priority = o.priority_path.empty() ? graph.original_order() : graph.to_indices(read_priority(o.priority_path));
    for (const auto& name : graph.to_names(repair_priority_list(graph, priority))) std::cout << name << '\n';
    return 0;
}

int cmd_gen(const Options& o) {
    auto params = o.synthetic;
    params.seed = o.seed;
    auto doc = generate_synthetic_document(params);
    if (o.out_file.empty())
        std::cout << doc;
    else
        write_text_file(o.out_file, doc);
    return 0;
}

int cmd_bench(const Options& o) {
    BenchSettings settings;
    settings.weights = o.weights;
    settings.ga = o.ga;
    settings.estimator = o.estimator;
    settings.pin_allocation = o.pin;

    auto suite_params = o.suite;
    suite_params.shape.seed = o.seed;
    std::vector<SuiteEntry> suite;
    if (!o.suite_build_path.empty()) {
        suite.push_back({fs::path(o.suite_build_path).stem().string(), load_build_spec(read_text_file(o.suite_build_path)),
                         history_of(o)});
    } else {
        suite = synthetic_suite(suite_params);
    }
    std::error_code ec;
    fs::create_directories(o.out_dir, ec);
    if (ec) throw IoError("cannot create '" + o.out_dir + "': " + ec.message());

    std::cout << "seed: " << o.seed << '\n';
    switch (o.bench_case) {
    case 1: {
        auto rows = run_test_case_one(suite, settings);
        ReportSet reports;
        reports.benchmark = rows;
        write_reports(reports, o.out_dir);
        std::vector<double> imp;
        for (const auto& r : rows) imp.push_back(r.improvement_pct);
        std::sort(imp.begin(), imp.end());
        if (!imp.empty()) {
            const auto m = imp.size() / 2;
            const double median = imp.size() % 2 ? imp[m] : (imp[m - 1] + imp[m]) / 2.0;
            std::cout << "builds: " << rows.size() << "\nmedian improvement_pct: " << format_number(median) << '\n';
        }
        break;
    }
    case 2: {
        if (suite.empty()) throw ValidationError("no build to run");
        auto report = run_test_case_two(suite.front(), o.n_seeds, settings);
        ReportSet reports;
        reports.benchmark = report.rows;
        write_reports(reports, o.out_dir);
        write_text_file(fs::path(o.out_dir) / "stability.csv", stability_to_csv(report));
        std::cout << "build: " << suite.front().id << "\nmin_makespan_s: " << format_number(report.min_makespan_s)
                  << "\nmax_makespan_s: " << format_number(report.max_makespan_s)
                  << "\nrelative_spread: " << format_number(report.relative_spread) << '\n';
        break;
    }
    case 3: {
        auto report = run_test_case_three(suite, settings);
        std::vector<BenchmarkRow> rows;
        for (const auto& r : report.rows) rows.push_back(r.row);
        ReportSet reports;
        reports.benchmark = rows;
        write_reports(reports, o.out_dir);
        write_text_file(fs::path(o.out_dir) / "search_cost.csv", search_cost_to_csv(report));
        std::cout << "builds: " << rows.size() << "\nnote: " << report.caveat << '\n';
        break;
    }
    default:
        throw ValidationError("--case must be 1, 2 or 3");
    }
    std::cout << "reports: " << o.out_dir << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Genetic-algorithm scheduler for CI build jobs"};
    app.require_subcommand(1);
    Options o;

    auto* validate = app.add_subcommand("validate", "Check a build spec for structural errors");
    add_build(validate, o);

    auto* estimate = app.add_subcommand("estimate", "Print the run-time estimate of every job");
    add_build(estimate, o);
    add_history(estimate, o);
    add_seed(estimate, o);
    estimate->add_option("--out", o.out_file, "Write CSV here instead of standard output");

    auto* schedule = app.add_subcommand("schedule", "Search a priority list and machine allocation");
    add_build(schedule, o);
    add_history(schedule, o);
    add_seed(schedule, o);
    add_ga(schedule, o);
    schedule->add_option("--out-dir", o.out_dir, "Directory for schedule.json and trace.csv")->capture_default_str();

    auto* simulate_cmd = app.add_subcommand("simulate", "Simulate one priority list on one allocation");
    add_build(simulate_cmd, o);
    add_history(simulate_cmd, o);
    add_seed(simulate_cmd, o);
    simulate_cmd->add_option("--priority", o.priority_path, "JSON array of job names (default: input order)")
        ->check(CLI::ExistingFile);
    simulate_cmd->add_option("--allocation", o.allocation, "name=count,... (default: max_count per type)");
    simulate_cmd->add_option("--w-rt", o.weights.run_time, "Run-time weight")->capture_default_str();
    simulate_cmd->add_option("--w-mc", o.weights.machine_count, "Machine-count weight")->capture_default_str();
    simulate_cmd->add_option("--scaling", o.scaling, "Run-time term scaling")
        ->capture_default_str()
        ->check(CLI::IsMember({"normalized", "literal"}));
    simulate_cmd->add_option("--out-dir", o.out_dir, "Directory for schedule.json")->capture_default_str();

    auto* repair = app.add_subcommand("repair", "Move every job behind its dependencies");
    add_build(repair, o);
    repair->add_option("--priority", o.priority_path, "JSON array of job names (default: input order)")
        ->check(CLI::ExistingFile);

    auto* gen = app.add_subcommand("gen", "Generate a synthetic build spec");
    add_shape(gen, o.synthetic, true);
    add_seed(gen, o);
    gen->add_option("--out", o.out_file, "Write the spec here instead of standard output");

    auto* bench = app.add_subcommand("bench", "Compare the GA with the input order on a build suite");
    bench->add_option("--case", o.bench_case, "1: suite comparison, 2: seed stability, 3: search cost")
        ->capture_default_str()
        ->check(CLI::IsMember({1, 2, 3}));
    bench->add_option("--builds", o.suite.builds, "Synthetic builds in the suite")->capture_default_str();
    bench->add_option("--min-jobs", o.suite.min_jobs, "Fewest jobs per build")->capture_default_str();
    bench->add_option("--max-jobs", o.suite.max_jobs, "Most jobs per build")->capture_default_str();
    add_shape(bench, o.suite.shape, false);
    bench->add_option("--suite-build", o.suite_build_path, "Use this build spec instead of a synthetic suite")
        ->check(CLI::ExistingFile);
    bench->add_option("--history", o.history_path, "Run history for --suite-build")->check(CLI::ExistingFile);
    bench->add_option("--quantile", o.estimator.quantile_q, "Quantile of the history used as estimate")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    bench->add_option("--seeds", o.n_seeds, "GA seeds for case 2")->capture_default_str()->check(CLI::PositiveNumber);
    bench->add_flag("--pin", o.pin, "Keep the baseline allocation and search the order only");
    add_seed(bench, o);
    add_ga(bench, o);
    bench->add_option("--out-dir", o.out_dir, "Directory for the CSV reports")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        finish_ga(o);
        if (*validate) return cmd_validate(o);
        if (*estimate) return cmd_estimate(o);
        if (*schedule) return cmd_schedule(o);
        if (*simulate_cmd) return cmd_simulate(o);
        if (*repair) return cmd_repair(o);
        if (*gen) return cmd_gen(o);
        if (*bench) return cmd_bench(o);
    } catch (const ContractViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
