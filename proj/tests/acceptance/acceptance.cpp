// Acceptance gate: runs every criterion at its stated size and tolerance and
// prints one PASS/FAIL line each. Exit status is non-zero if any fails.

#include "../unit/helpers.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace jobga;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass = false;
    std::string detail;
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto m = v.size() / 2;
    return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

std::string fmt(double x, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << x;
    return s.str();
}

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// ---------------------------------------------------------------------------
// 1. GA matches the exhaustive optimum on tiny builds

Verdict oracle_equivalence() {
    Rng rng(2024);
    std::size_t hits = 0, pairs = 0;
    for (int b = 0; b < 50; ++b) {
        SyntheticParams p;
        p.jobs = std::uniform_int_distribution<std::size_t>(2, 7)(rng);
        p.types = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
        p.edge_prob = 0.3;
        p.max_count_lo = 1;
        p.max_count_hi = 3;
        p.seed = rng();
        auto build = generate_synthetic_build(p);
        JobGraph g(build);
        auto rt = estimate_all(build, {}, {});
        FitnessWeights w; // normalized
        auto best = brute_force_optimum(g, rt, w);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            GaConfig c; // population 2n
            c.rng_seed = seed;
            c.max_generations = 500;
            c.scale = best.scale;
            auto r = evolve(g, rt, w, c);
            ++pairs;
            if (close_rel(r.fitness.total, best.fitness.total, 1e-9)) ++hits;
        }
    }
    const double rate = static_cast<double>(hits) / static_cast<double>(pairs);
    return {rate >= 0.95, std::to_string(hits) + "/" + std::to_string(pairs) + " pairs optimal (need >= 95%)"};
}

// ---------------------------------------------------------------------------
// 2. repair-based initialization is much faster than rejection

Verdict init_speed() {
    std::vector<double> rejection_s, repair_s;
    bool valid = true;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SyntheticParams p;
        p.jobs = 200;
        p.edge_prob = 0.02;
        p.seed = 1000 + seed;
        auto build = generate_synthetic_build(p);
        JobGraph g(build);
        GaConfig c;
        c.rng_seed = seed;

        Rng warm(seed);
        (void)init_population_repair(g, c, warm);

        Rng r1(seed);
        auto t0 = Clock::now();
        auto rejected = init_population_rejection(g, c, r1);
        auto t1 = Clock::now();
        Rng r2(seed);
        auto repaired = init_population_repair(g, c, r2);
        auto t2 = Clock::now();
        rejection_s.push_back(std::chrono::duration<double>(t1 - t0).count());
        repair_s.push_back(std::chrono::duration<double>(t2 - t1).count());
        for (const auto& x : repaired) valid = valid && is_deadlock_free(g, x.priority);
        for (const auto& x : rejected) valid = valid && is_deadlock_free(g, x.priority);
    }
    const double ratio = median(rejection_s) / median(repair_s);
    return {valid && ratio >= 5.0, "median rejection " + fmt(median(rejection_s) * 1e3) + " ms, repair " +
                                       fmt(median(repair_s) * 1e3) + " ms, ratio " + fmt(ratio) + " (need >= 5)" +
                                       (valid ? "" : ", invalid individual")};
}

// ---------------------------------------------------------------------------
// 3. suite comparison against the input order

Verdict suite_comparison() {
    SuiteParams sp; // 100 builds, 30-80 jobs, 3 types
    auto suite = synthetic_suite(sp);

    BenchSettings pinned;
    pinned.pin_allocation = true;
    std::size_t no_worse = 0;
    for (const auto& row : run_test_case_one(suite, pinned))
        if (row.ga_makespan_s <= row.baseline_makespan_s) ++no_worse;

    BenchSettings free_alloc;
    free_alloc.weights.machine_count = 0.0;
    std::vector<double> improvement;
    for (const auto& row : run_test_case_one(suite, free_alloc)) improvement.push_back(row.improvement_pct);
    const double med = median(improvement);

    return {no_worse == suite.size() && med >= 10.0,
            "pinned: " + std::to_string(no_worse) + "/" + std::to_string(suite.size()) +
                " no worse than baseline; free, w_MC=0: median improvement " + fmt(med) + "% (need >= 10%)"};
}

// ---------------------------------------------------------------------------
// 4. run-to-run stability

Verdict stability() {
    auto shape = default_suite_shape();
    shape.jobs = 50;
    shape.seed = 50;
    SuiteEntry entry{"stability", generate_synthetic_build(shape), {}};
    auto report = run_test_case_two(entry, 10, {});
    const bool ok = report.max_makespan_s <= 1.10 * report.min_makespan_s;
    return {ok, "makespans in [" + fmt(report.min_makespan_s, 6) + ", " + fmt(report.max_makespan_s, 6) +
                    "] s, spread " + fmt(100 * report.relative_spread) + "% (need <= 10%)"};
}

// ---------------------------------------------------------------------------
// 5. invariant suites

struct Check {
    std::string name;
    bool ok = true;
};

int run_cli(const std::string& args) {
    auto status = std::system((std::string(JOBGA_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Drops the last (elapsed_s) column of a trace CSV.
std::string strip_elapsed(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + '\n';
    return out;
}

Verdict invariants() {
    std::vector<Check> checks;
    std::mt19937_64 rng(55);
    auto random_build = [&](std::size_t max_jobs) {
        SyntheticParams p;
        p.jobs = 1 + rng() % max_jobs;
        p.edge_prob = std::uniform_real_distribution<double>(0.0, 0.4)(rng);
        p.types = 1 + rng() % 3;
        p.max_count_hi = 1 + static_cast<std::uint32_t>(rng() % 5);
        p.run_time_lo = 1;
        p.run_time_hi = 60;
        p.seed = rng();
        return generate_synthetic_build(p);
    };
    auto random_alloc = [&](const Build& b) {
        MachineAllocation a;
        for (const auto& t : b.machine_types) a.counts.push_back(1 + static_cast<std::uint32_t>(rng() % t.max_count));
        return a;
    };

    {
        Check c{"permutation closure over 10^4 operator applications"};
        auto build = random_build(40);
        while (build.jobs.size() < 10) build = random_build(40);
        JobGraph g(build);
        GaConfig config;
        config.permutation_mutation_rate = 1.0;
        Rng op_rng(1);
        auto base = init_population_repair(g, config, op_rng);
        for (int i = 0; i < 10'000 && c.ok; ++i) {
            const auto& a = base[rng() % base.size()];
            const auto& b = base[rng() % base.size()];
            std::vector<std::vector<JobIndex>> children;
            switch (i % 3) {
            case 0:
                children.push_back(ordered_crossover(std::span<const JobIndex>(a.priority),
                                                     std::span<const JobIndex>(b.priority), op_rng));
                break;
            case 1: {
                auto [x, y] = pmx_crossover(std::span<const JobIndex>(a.priority), std::span<const JobIndex>(b.priority),
                                            op_rng);
                children = {x, y};
                break;
            }
            default: {
                auto m = mutate(a, g, config, op_rng);
                c.ok = c.ok && is_deadlock_free(g, m.priority) &&
                       testkit::respects_dependencies(build, testkit::names(g, m.priority));
                children.push_back(m.priority);
            }
            }
            for (const auto& child : children) c.ok = c.ok && testkit::is_perm_of_iota(child, g.job_count());
            // feed the children back so later operators see unrepaired inputs too
            base[rng() % base.size()].priority = children.front();
        }
        checks.push_back(c);
    }
    {
        Check c{"feasibility of 10^3 random simulations"};
        Check lb{"makespan >= max(critical path, work / count) on 10^3 instances"};
        for (int i = 0; i < 1000; ++i) {
            auto b = random_build(30);
            JobGraph g(b);
            auto rt = testkit::declared(b);
            auto prio = g.original_order();
            std::shuffle(prio.begin(), prio.end(), rng);
            auto alloc = random_alloc(b);
            auto verdict = simulate(g, prio, alloc, rt);
            auto* s = std::get_if<ScheduleResult>(&verdict);
            if (!s) {
                c.ok = false;
                continue;
            }
            c.ok = c.ok && testkit::feasibility_errors(b, rt, *s).empty();
            lb.ok = lb.ok && s->makespan.count() >= testkit::critical_path_ms(b, rt) &&
                    s->makespan.count() >= testkit::work_bound_ms(b, rt, alloc);
        }
        checks.push_back(c);
        checks.push_back(lb);
    }
    {
        Check c{"identical jobs: makespan = ceil(n/m) * L for n <= 20, m <= 8"};
        for (std::uint32_t n = 1; n <= 20; ++n) {
            for (std::uint32_t m = 1; m <= 8; ++m) {
                std::vector<testkit::JobSpec> jobs;
                for (std::uint32_t i = 0; i < n; ++i) jobs.push_back({"j" + std::to_string(i), {}, "linux", 13});
                auto b = testkit::make_build(jobs, {{"linux", m}});
                JobGraph g(b);
                auto s = std::get<ScheduleResult>(simulate(g, g.original_order(), {{m}}, testkit::declared(b)));
                c.ok = c.ok && s.makespan.count() == static_cast<std::int64_t>((n + m - 1) / m) * 13'000;
            }
        }
        checks.push_back(c);
    }
    {
        Check c{"decode(encode(a)) = a"};
        for (int i = 0; i < 1000; ++i) {
            auto b = random_build(5);
            auto a = random_alloc(b);
            c.ok = c.ok && decode_machine_bits(encode_machine_counts(a, b.machine_types), b.machine_types) == a;
        }
        checks.push_back(c);
    }
    {
        Check c{"best fitness non-increasing on every trace"};
        for (int i = 0; i < 40; ++i) {
            auto b = random_build(40);
            JobGraph g(b);
            GaConfig config;
            config.rng_seed = rng();
            config.max_generations = 80;
            config.crossover = i % 2 ? CrossoverKind::pmx : CrossoverKind::ox;
            FitnessWeights w;
            w.scaling = i % 3 ? Scaling::normalized : Scaling::literal;
            auto r = evolve(g, testkit::declared(b), w, config);
            const auto& gens = r.trace.generations;
            for (std::size_t k = 1; k < gens.size(); ++k) c.ok = c.ok && gens[k].best_fitness <= gens[k - 1].best_fitness;
        }
        checks.push_back(c);
    }
    {
        Check c{"schedule --workers 1 and --workers 8 give identical outputs"};
        auto dir = fs::temp_directory_path() / "jobga_acceptance_workers";
        fs::remove_all(dir);
        fs::create_directories(dir);
        const auto spec = (dir / "build.json").string();
        c.ok = run_cli("gen --jobs 60 --edge-prob 0.08 --seed 31 --out " + spec) == 0;
        for (auto workers : {"1", "8"}) {
            c.ok = c.ok && run_cli("schedule --build " + spec + " --seed 7 --workers " + std::string(workers) +
                                   " --out-dir " + (dir / workers).string()) == 0;
        }
        c.ok = c.ok && !testkit::fs_read(dir / "1" / "schedule.json").empty() &&
               testkit::fs_read(dir / "1" / "schedule.json") == testkit::fs_read(dir / "8" / "schedule.json") &&
               strip_elapsed(testkit::fs_read(dir / "1" / "trace.csv")) ==
                   strip_elapsed(testkit::fs_read(dir / "8" / "trace.csv"));
        fs::remove_all(dir);
        checks.push_back(c);
    }

    bool all = true;
    std::string detail;
    for (const auto& c : checks) {
        all = all && c.ok;
        if (!c.ok) detail += (detail.empty() ? "failed: " : "; ") + c.name;
    }
    if (all) detail = std::to_string(checks.size()) + " invariant suites hold";
    return {all, detail};
}

// ---------------------------------------------------------------------------
// 6. fitness formula conformance

Verdict fitness_conformance() {
    struct Row {
        FitnessWeights w;
        std::vector<IndividualMetrics> m;
        std::vector<double> expected;
    };
    // hand-computed: literal alpha = w_rt * maxRT * RT, beta = w_mc * maxMC * MC
    const std::vector<Row> table{
        {{1.0, 0.0, Scaling::literal}, {{10, 1}, {20, 1}, {40, 1}}, {400, 800, 1600}},
        {{2.0, 0.5, Scaling::literal}, {{50, 6}, {25, 2}}, {5018, 2506}},
        {{0.3, 0.7, Scaling::literal}, {{12.5, 4}, {8, 3}}, {0.3 * 12.5 * 12.5 + 0.7 * 4 * 4, 0.3 * 12.5 * 8 + 0.7 * 4 * 3}},
        {{1.0, 0.0, Scaling::normalized}, {{10, 1}, {20, 1}, {40, 1}}, {0.25, 0.5, 1.0}},
    };
    bool table_ok = true;
    for (const auto& row : table) {
        auto f = fitness(PopulationMetrics::from(row.m), row.w);
        for (std::size_t i = 0; i < f.size(); ++i) table_ok = table_ok && close_rel(f[i].total, row.expected[i], 1e-12);
    }

    std::mt19937_64 rng(66);
    std::uniform_real_distribution<double> u(1.0, 5000.0);
    bool ranks_ok = true;
    for (int p = 0; p < 100; ++p) {
        std::vector<IndividualMetrics> m;
        const auto size = 2 + rng() % 60;
        for (std::size_t i = 0; i < size; ++i) m.push_back({std::round(u(rng) * 1000) / 1000, static_cast<double>(1 + rng() % 12)});
        auto pm = PopulationMetrics::from(m);
        auto ranking = [&](Scaling s) {
            auto f = fitness(pm, {1.0, 0.0, s});
            std::vector<std::size_t> idx(f.size());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return f[a].total < f[b].total; });
            return idx;
        };
        ranks_ok = ranks_ok && ranking(Scaling::literal) == ranking(Scaling::normalized);
    }
    return {table_ok && ranks_ok, std::string("hand table ") + (table_ok ? "matches" : "differs") +
                                      " at 1e-12; w_MC=0 rankings " + (ranks_ok ? "identical" : "differ") +
                                      " on 100 populations"};
}

// ---------------------------------------------------------------------------
// 7. search-cost report

Verdict search_cost_report() {
    SuiteParams sp;
    sp.builds = 10;
    auto report = run_test_case_three(synthetic_suite(sp), {});
    auto dir = fs::temp_directory_path() / "jobga_acceptance_cost";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_text_file(dir / "search_cost.csv", search_cost_to_csv(report));
    auto text = read_text_file(dir / "search_cost.csv");
    fs::remove_all(dir);

    bool ok = report.rows.size() == 10 && !report.caveat.empty();
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    ok = ok && line == search_cost_csv_header;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        std::vector<double> v;
        std::istringstream cells(line);
        std::string cell;
        std::getline(cells, cell, ',');
        while (std::getline(cells, cell, ',')) v.push_back(std::stod(cell));
        // baseline, ga, wall, combined, combined improvement
        ok = ok && v.size() == 5 && v[2] > 0.0 && close_rel(v[3], v[1] + v[2], 1e-9) &&
             close_rel(v[4], 100.0 * (v[0] - v[3]) / v[0], 1e-9);
    }
    for (const auto& r : report.rows)
        ok = ok && close_rel(r.row.improvement_pct,
                             100.0 * (r.row.baseline_makespan_s - r.row.ga_makespan_s) / r.row.baseline_makespan_s, 1e-9);
    ok = ok && rows == report.rows.size();
    return {ok, std::to_string(rows) + " rows with search_wall_time_s and combined comparison; arithmetic " +
                    (ok ? "consistent" : "inconsistent") + " at 1e-9"};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"1 oracle equivalence", oracle_equivalence},
        {"2 repair init speed", init_speed},
        {"3 suite vs input order", suite_comparison},
        {"4 seed stability", stability},
        {"5 invariant suites", invariants},
        {"6 fitness conformance", fitness_conformance},
        {"7 search-cost report", search_cost_report},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        const auto started = Clock::now();
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(Clock::now() - started).count();
        std::cout << (v.pass ? "PASS" : "FAIL") << "  [" << name << "] " << v.detail << " (" << fmt(secs, 3) << " s)"
                  << std::endl;
        if (!v.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
