#ifndef JOBGA_IO_HPP
#define JOBGA_IO_HPP

// Build specs, run histories and schedule reports as JSON; traces and
// benchmark rows as CSV; seeded synthetic builds.
//
// Durations are decimal seconds on disk and integer milliseconds in memory.

#include "jobga/error.hpp"
#include "jobga/evolve.hpp"
#include "jobga/fitness.hpp"
#include "jobga/model.hpp"
#include "jobga/runtime_estimator.hpp"
#include "jobga/simulator.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace jobga {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// files and numbers

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// Shortest text that parses back to the same double.
inline std::string format_number(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

namespace detail {

inline Json parse_json(std::string_view text, std::string_view what) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

inline const Json& field(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw ParseError(where + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + ": missing key '" + key + "'");
    return *it;
}

inline std::string get_string(const Json& v, const std::string& where) {
    if (!v.is_string()) throw ParseError(where + ": expected a string");
    return v.get<std::string>();
}

inline double get_number(const Json& v, const std::string& where) {
    if (!v.is_number()) throw ParseError(where + ": expected a number");
    return v.get<double>();
}

inline std::uint64_t get_unsigned(const Json& v, const std::string& where) {
    if (!v.is_number_unsigned()) throw ParseError(where + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

inline const Json& get_array(const Json& v, const std::string& where) {
    if (!v.is_array()) throw ParseError(where + ": expected an array");
    return v;
}

inline std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError(where + ": bad number '" + s + "'");
    return value;
}

inline std::uint64_t parse_unsigned(const std::string& s, const std::string& where) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError(where + ": bad integer '" + s + "'");
    return value;
}

} // namespace detail

// ---------------------------------------------------------------------------
// build specs

// Parses without validating the structure.
inline Build parse_build_spec(std::string_view text) {
    using namespace detail;
    auto doc = parse_json(text, "build spec");
    Build build;
    const auto& jobs = get_array(field(doc, "jobs", "build spec"), "jobs");
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto where = "jobs[" + std::to_string(i) + "]";
        const auto& j = jobs[i];
        Job job;
        job.name = get_string(field(j, "name", where), where + ".name");
        const auto& deps = get_array(field(j, "deps", where), where + ".deps");
        for (std::size_t d = 0; d < deps.size(); ++d)
            job.deps.push_back(get_string(deps[d], where + ".deps[" + std::to_string(d) + "]"));
        job.machine_type = get_string(field(j, "machine_type", where), where + ".machine_type");
        if (auto it = j.find("run_time"); it != j.end() && !it->is_null())
            job.declared_run_time = from_seconds(get_number(*it, where + ".run_time"));
        build.jobs.push_back(std::move(job));
    }
    const auto& types = get_array(field(doc, "machine_types", "build spec"), "machine_types");
    for (std::size_t i = 0; i < types.size(); ++i) {
        const auto where = "machine_types[" + std::to_string(i) + "]";
        MachineType type;
        type.name = get_string(field(types[i], "name", where), where + ".name");
        const auto& count = field(types[i], "max_count", where);
        if (!count.is_number_integer()) throw ParseError(where + ".max_count: expected an integer");
        auto value = count.get<std::int64_t>();
        if (value < 0 || value > 1'000'000) throw ValidationError(where + ".max_count: out of range");
        type.max_count = static_cast<std::uint32_t>(value);
        build.machine_types.push_back(std::move(type));
    }
    return build;
}

// Parses and validates; structural problems raise ValidationError.
inline Build load_build_spec(std::string_view text) {
    auto build = parse_build_spec(text);
    auto report = validate_build(build);
    if (!report.ok()) throw ValidationError(report.summary());
    return build;
}

inline std::string save_build_spec(const Build& build) {
    Json doc;
    doc["jobs"] = Json::array();
    for (const auto& job : build.jobs) {
        Json j;
        j["name"] = job.name;
        j["deps"] = job.deps;
        j["machine_type"] = job.machine_type;
        j["run_time"] = job.declared_run_time ? Json(to_seconds(*job.declared_run_time)) : Json(nullptr);
        doc["jobs"].push_back(std::move(j));
    }
    doc["machine_types"] = Json::array();
    for (const auto& t : build.machine_types) doc["machine_types"].push_back({{"name", t.name}, {"max_count", t.max_count}});
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// run histories

inline RunHistory load_history(std::string_view text) {
    RunHistory history;
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return history;
    auto doc = detail::parse_json(text, "history");
    if (!doc.is_object()) throw ParseError("history: expected an object of job name -> samples");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const auto where = "history." + it.key();
        const auto& arr = detail::get_array(it.value(), where);
        std::vector<double> samples;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            auto v = detail::get_number(arr[i], where + "[" + std::to_string(i) + "]");
            if (!(v > 0.0)) throw ValidationError(where + ": run time samples must be positive");
            samples.push_back(v);
        }
        history.samples[it.key()] = std::move(samples);
    }
    return history;
}

inline std::string save_history(const RunHistory& history) {
    Json doc = Json::object();
    for (const auto& [name, samples] : history.samples) doc[name] = samples;
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// schedule reports

struct ScheduleReport {
    struct Row {
        std::string job;
        std::string machine_type;
        std::uint32_t machine_index = 0;
        double start_s = 0.0;
        double end_s = 0.0;

        bool operator==(const Row&) const = default;
    };
    struct ConfigEcho {
        std::uint64_t seed = 0;
        double w_rt = 0.0;
        double w_mc = 0.0;
        Scaling scaling = Scaling::normalized;

        bool operator==(const ConfigEcho&) const = default;
    };

    std::vector<Row> assignments; // ordered by start time, then job input order
    double makespan_s = 0.0;
    std::map<std::string, std::uint32_t> allocation;
    FitnessValue fitness;
    ConfigEcho config;
};

inline ScheduleReport make_schedule_report(const JobGraph& graph, const ScheduleResult& schedule,
                                           const FitnessValue& fitness, const FitnessWeights& weights,
                                           std::uint64_t seed) {
    ScheduleReport report;
    std::vector<JobIndex> order(graph.job_count());
    std::iota(order.begin(), order.end(), JobIndex{0});
    std::stable_sort(order.begin(), order.end(), [&](JobIndex a, JobIndex b) {
        return schedule.assignments[a].start < schedule.assignments[b].start;
    });
    for (auto j : order) {
        const auto& a = schedule.assignments[j];
        report.assignments.push_back(
            {graph.name(j), graph.machine_types()[a.machine_type].name, a.machine_index, to_seconds(a.start),
             to_seconds(a.end)});
    }
    report.makespan_s = to_seconds(schedule.makespan);
    report.allocation = to_named(schedule.allocation, graph.machine_types());
    report.fitness = fitness;
    report.config = {seed, weights.run_time, weights.machine_count, weights.scaling};
    return report;
}

inline std::string save_schedule_report(const ScheduleReport& report) {
    Json doc;
    doc["assignments"] = Json::array();
    for (const auto& r : report.assignments) {
        doc["assignments"].push_back({{"job", r.job},
                                      {"machine_type", r.machine_type},
                                      {"machine_index", r.machine_index},
                                      {"start_s", r.start_s},
                                      {"end_s", r.end_s}});
    }
    doc["makespan_s"] = report.makespan_s;
    doc["allocation"] = Json::object();
    for (const auto& [name, count] : report.allocation) doc["allocation"][name] = count;
    doc["fitness"] = {{"alpha", report.fitness.alpha}, {"beta", report.fitness.beta}, {"total", report.fitness.total}};
    doc["config"] = {{"seed", report.config.seed},
                     {"w_rt", report.config.w_rt},
                     {"w_mc", report.config.w_mc},
                     {"scaling", std::string(to_string(report.config.scaling))}};
    return doc.dump(2) + "\n";
}

inline ScheduleReport load_schedule_report(std::string_view text) {
    using namespace detail;
    auto doc = parse_json(text, "schedule report");
    ScheduleReport report;
    const auto& rows = get_array(field(doc, "assignments", "report"), "assignments");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto where = "assignments[" + std::to_string(i) + "]";
        ScheduleReport::Row r;
        r.job = get_string(field(rows[i], "job", where), where + ".job");
        r.machine_type = get_string(field(rows[i], "machine_type", where), where + ".machine_type");
        r.machine_index = static_cast<std::uint32_t>(
            get_unsigned(field(rows[i], "machine_index", where), where + ".machine_index"));
        r.start_s = get_number(field(rows[i], "start_s", where), where + ".start_s");
        r.end_s = get_number(field(rows[i], "end_s", where), where + ".end_s");
        report.assignments.push_back(std::move(r));
    }
    report.makespan_s = get_number(field(doc, "makespan_s", "report"), "makespan_s");
    const auto& alloc = field(doc, "allocation", "report");
    if (!alloc.is_object()) throw ParseError("allocation: expected an object");
    for (auto it = alloc.begin(); it != alloc.end(); ++it)
        report.allocation[it.key()] = static_cast<std::uint32_t>(get_unsigned(it.value(), "allocation." + it.key()));
    const auto& fit = field(doc, "fitness", "report");
    report.fitness = {get_number(field(fit, "alpha", "fitness"), "fitness.alpha"),
                      get_number(field(fit, "beta", "fitness"), "fitness.beta"),
                      get_number(field(fit, "total", "fitness"), "fitness.total")};
    const auto& cfg = field(doc, "config", "report");
    report.config.seed = get_unsigned(field(cfg, "seed", "config"), "config.seed");
    report.config.w_rt = get_number(field(cfg, "w_rt", "config"), "config.w_rt");
    report.config.w_mc = get_number(field(cfg, "w_mc", "config"), "config.w_mc");
    try {
        report.config.scaling = scaling_from_string(get_string(field(cfg, "scaling", "config"), "config.scaling"));
    } catch (const ContractViolation& e) {
        throw ParseError(std::string("config.scaling: ") + e.what());
    }
    return report;
}

// Rebuilds the index-based schedule so it can be re-checked with
// schedule_violations.
inline ScheduleResult to_schedule_result(const ScheduleReport& report, const JobGraph& graph) {
    ScheduleResult result;
    result.allocation = from_named(report.allocation, graph.machine_types());
    result.assignments.resize(graph.job_count());
    std::vector<bool> seen(graph.job_count());
    std::map<std::string, TypeIndex> type_index;
    for (TypeIndex t = 0; t < graph.type_count(); ++t) type_index[graph.machine_types()[t].name] = t;
    for (const auto& r : report.assignments) {
        auto j = graph.index_of(r.job);
        if (seen[j]) throw ValidationError("report assigns job '" + r.job + "' twice");
        seen[j] = true;
        auto t = type_index.find(r.machine_type);
        if (t == type_index.end()) throw ValidationError("report names unknown machine type '" + r.machine_type + "'");
        result.assignments[j] = {t->second, r.machine_index, from_seconds(r.start_s), from_seconds(r.end_s)};
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw ValidationError("report does not assign every job");
    result.makespan = from_seconds(report.makespan_s);
    return result;
}

// ---------------------------------------------------------------------------
// CSV: traces and benchmark rows

inline constexpr std::string_view trace_csv_header = "generation,best_fitness,best_makespan,best_machines,elapsed_s";

inline std::string trace_to_csv(const EvolutionTrace& trace) {
    std::string out(trace_csv_header);
    out += '\n';
    for (const auto& g : trace.generations) {
        out += std::to_string(g.generation) + ',' + format_number(g.best_fitness) + ',' +
               format_number(g.best_makespan) + ',' + std::to_string(g.best_machines) + ',' +
               format_number(g.elapsed) + '\n';
    }
    return out;
}

struct BenchmarkRow {
    std::string build_id;
    double baseline_makespan_s = 0.0;
    double ga_makespan_s = 0.0;
    std::uint32_t ga_machines = 0;
    std::uint32_t baseline_machines = 0;
    double improvement_pct = 0.0;
    double search_wall_time_s = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const BenchmarkRow&) const = default;
};

inline double improvement_pct(double baseline, double ga) {
    return baseline > 0.0 ? 100.0 * (baseline - ga) / baseline : 0.0;
}

inline constexpr std::string_view benchmark_csv_header =
    "build_id,baseline_makespan_s,ga_makespan_s,ga_machines,baseline_machines,improvement_pct,search_wall_time_s,seed";

inline std::string benchmark_to_csv(std::span<const BenchmarkRow> rows) {
    std::string out(benchmark_csv_header);
    out += '\n';
    for (const auto& r : rows) {
        out += r.build_id + ',' + format_number(r.baseline_makespan_s) + ',' + format_number(r.ga_makespan_s) + ',' +
               std::to_string(r.ga_machines) + ',' + std::to_string(r.baseline_machines) + ',' +
               format_number(r.improvement_pct) + ',' + format_number(r.search_wall_time_s) + ',' +
               std::to_string(r.seed) + '\n';
    }
    return out;
}

inline std::vector<BenchmarkRow> benchmark_from_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != benchmark_csv_header) throw ParseError("benchmark csv: bad header");
    std::vector<BenchmarkRow> rows;
    for (std::size_t n = 2; std::getline(in, line); ++n) {
        if (line.empty()) continue;
        const auto where = "benchmark csv line " + std::to_string(n);
        auto cells = detail::split(line, ',');
        if (cells.size() != 8) throw ParseError(where + ": expected 8 columns");
        BenchmarkRow r;
        r.build_id = cells[0];
        r.baseline_makespan_s = detail::parse_double(cells[1], where);
        r.ga_makespan_s = detail::parse_double(cells[2], where);
        r.ga_machines = static_cast<std::uint32_t>(detail::parse_unsigned(cells[3], where));
        r.baseline_machines = static_cast<std::uint32_t>(detail::parse_unsigned(cells[4], where));
        r.improvement_pct = detail::parse_double(cells[5], where);
        r.search_wall_time_s = detail::parse_double(cells[6], where);
        r.seed = detail::parse_unsigned(cells[7], where);
        rows.push_back(std::move(r));
    }
    return rows;
}

// Writes whichever pieces are present into `dir` (created if needed):
// schedule.json, trace.csv, benchmark.csv. Returns the paths written.
struct ReportSet {
    std::optional<ScheduleReport> schedule;
    std::optional<EvolutionTrace> trace;
    std::optional<std::vector<BenchmarkRow>> benchmark;
};

inline std::vector<std::filesystem::path> write_reports(const ReportSet& reports, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
    std::vector<std::filesystem::path> written;
    auto emit = [&](const char* name, const std::string& content) {
        write_text_file(dir / name, content);
        written.push_back(dir / name);
    };
    if (reports.schedule) emit("schedule.json", save_schedule_report(*reports.schedule));
    if (reports.trace) emit("trace.csv", trace_to_csv(*reports.trace));
    if (reports.benchmark) emit("benchmark.csv", benchmark_to_csv(*reports.benchmark));
    return written;
}

// ---------------------------------------------------------------------------
// synthetic builds

struct SyntheticParams {
    std::size_t jobs = 20;
    double edge_prob = 0.1;
    std::size_t types = 3;
    std::uint32_t max_count_lo = 1; // per-type max_count drawn from [lo, hi]
    std::uint32_t max_count_hi = 3;
    double run_time_lo = 10.0; // seconds
    double run_time_hi = 300.0;
    std::uint64_t seed = 0;
};

inline std::string machine_type_name(std::size_t t) {
    static constexpr std::array<std::string_view, 3> known{"linux", "windows", "suse"};
    return t < known.size() ? std::string(known[t]) : "type" + std::to_string(t);
}

// Dependencies only point from earlier to later jobs of a hidden random
// order, so the graph is acyclic; the listed order is the index order.
inline Build generate_synthetic_build(const SyntheticParams& p) {
    expects(p.jobs >= 1, "a synthetic build needs at least one job");
    expects(p.edge_prob >= 0.0 && p.edge_prob <= 1.0, "edge probability must lie in [0, 1]");
    expects(p.types >= 1, "a synthetic build needs at least one machine type");
    expects(p.max_count_lo >= 1 && p.max_count_lo <= p.max_count_hi, "max_count range must satisfy 1 <= lo <= hi");
    expects(p.run_time_lo > 0.0 && p.run_time_lo <= p.run_time_hi, "run time range must satisfy 0 < lo <= hi");

    Rng rng(p.seed);
    Build build;
    for (std::size_t t = 0; t < p.types; ++t) {
        build.machine_types.push_back(
            {machine_type_name(t), std::uniform_int_distribution<std::uint32_t>(p.max_count_lo, p.max_count_hi)(rng)});
    }

    const auto width = std::to_string(p.jobs - 1).size();
    auto job_name = [&](std::size_t i) {
        auto digits = std::to_string(i);
        return "job_" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
    };

    std::vector<std::size_t> hidden(p.jobs);
    std::iota(hidden.begin(), hidden.end(), std::size_t{0});
    std::shuffle(hidden.begin(), hidden.end(), rng);

    std::vector<std::vector<std::size_t>> deps(p.jobs);
    std::bernoulli_distribution edge(p.edge_prob);
    for (std::size_t later = 1; later < p.jobs; ++later)
        for (std::size_t earlier = 0; earlier < later; ++earlier)
            if (edge(rng)) deps[hidden[later]].push_back(hidden[earlier]);

    std::uniform_int_distribution<std::size_t> type_pick(0, p.types - 1);
    std::uniform_int_distribution<std::int64_t> run_pick(std::max<std::int64_t>(1, from_seconds(p.run_time_lo).count()),
                                                         from_seconds(p.run_time_hi).count());
    for (std::size_t i = 0; i < p.jobs; ++i) {
        Job job;
        job.name = job_name(i);
        std::sort(deps[i].begin(), deps[i].end());
        for (auto d : deps[i]) job.deps.push_back(job_name(d));
        job.machine_type = build.machine_types[type_pick(rng)].name;
        job.declared_run_time = Duration{run_pick(rng)};
        build.jobs.push_back(std::move(job));
    }
    return build;
}

inline std::string generate_synthetic_document(const SyntheticParams& p) {
    return save_build_spec(generate_synthetic_build(p));
}

} // namespace jobga

#endif // JOBGA_IO_HPP
