#pragma once

// Builders and independent oracles shared by the unit tests. Nothing here
// calls into the library's algorithms; the oracles are written from scratch.

#include "jobga/jobga.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace testkit {

using namespace jobga;

struct JobSpec {
    std::string name;
    std::vector<std::string> deps;
    std::string type = "linux";
    double run_time_s = 1.0;
};

inline Build make_build(const std::vector<JobSpec>& jobs, std::vector<MachineType> types = {{"linux", 1}}) {
    Build b;
    for (const auto& j : jobs) b.jobs.push_back({j.name, j.deps, j.type, from_seconds(j.run_time_s)});
    b.machine_types = std::move(types);
    return b;
}

inline std::vector<Duration> declared(const Build& b) {
    std::vector<Duration> out;
    for (const auto& j : b.jobs) out.push_back(*j.declared_run_time);
    return out;
}

inline std::vector<JobIndex> indices(const JobGraph& g, std::initializer_list<const char*> names) {
    std::vector<JobIndex> out;
    for (auto n : names) out.push_back(g.index_of(n));
    return out;
}

inline std::vector<std::string> names(const JobGraph& g, std::span<const JobIndex> order) {
    std::vector<std::string> out;
    for (auto j : order) out.push_back(g.name(j));
    return out;
}

// Random dependency lists over n jobs named j0..j{n-1}; may contain cycles.
inline Build random_graph(std::size_t n, double p, std::mt19937_64& rng, bool acyclic) {
    std::vector<JobSpec> jobs(n);
    std::vector<std::size_t> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[i] = i;
    std::shuffle(rank.begin(), rank.end(), rng);
    std::bernoulli_distribution edge(p);
    for (std::size_t i = 0; i < n; ++i) {
        jobs[i].name = "j" + std::to_string(i);
        for (std::size_t d = 0; d < n; ++d) {
            if (d == i || !edge(rng)) continue;
            if (acyclic && rank[d] >= rank[i]) continue;
            jobs[i].deps.push_back("j" + std::to_string(d));
        }
    }
    return make_build(jobs);
}

// Three-colour DFS cycle detection.
inline bool dfs_has_cycle(const Build& b) {
    std::map<std::string, std::size_t> id;
    for (std::size_t i = 0; i < b.jobs.size(); ++i) id[b.jobs[i].name] = i;
    std::vector<int> colour(b.jobs.size(), 0);
    std::function<bool(std::size_t)> visit = [&](std::size_t v) {
        colour[v] = 1;
        for (const auto& d : b.jobs[v].deps) {
            auto u = id.at(d);
            if (colour[u] == 1) return true;
            if (colour[u] == 0 && visit(u)) return true;
        }
        colour[v] = 2;
        return false;
    };
    for (std::size_t v = 0; v < b.jobs.size(); ++v)
        if (colour[v] == 0 && visit(v)) return true;
    return false;
}

// True when every job appears after all of its dependencies.
inline bool respects_dependencies(const Build& b, const std::vector<std::string>& order) {
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (const auto& j : b.jobs)
        for (const auto& d : j.deps)
            if (pos.at(d) > pos.at(j.name)) return false;
    return true;
}

// Longest dependency chain, in milliseconds, by memoised recursion.
inline std::int64_t critical_path_ms(const Build& b, std::span<const Duration> rt) {
    std::map<std::string, std::size_t> id;
    for (std::size_t i = 0; i < b.jobs.size(); ++i) id[b.jobs[i].name] = i;
    std::vector<std::int64_t> memo(b.jobs.size(), -1);
    std::function<std::int64_t(std::size_t)> finish = [&](std::size_t v) {
        if (memo[v] >= 0) return memo[v];
        std::int64_t start = 0;
        for (const auto& d : b.jobs[v].deps) start = std::max(start, finish(id.at(d)));
        return memo[v] = start + rt[v].count();
    };
    std::int64_t best = 0;
    for (std::size_t v = 0; v < b.jobs.size(); ++v) best = std::max(best, finish(v));
    return best;
}

// max over types of ceil(total work / machines), in milliseconds.
inline std::int64_t work_bound_ms(const Build& b, std::span<const Duration> rt, const MachineAllocation& alloc) {
    std::int64_t best = 0;
    for (std::size_t t = 0; t < b.machine_types.size(); ++t) {
        std::int64_t work = 0;
        for (std::size_t j = 0; j < b.jobs.size(); ++j)
            if (b.jobs[j].machine_type == b.machine_types[t].name) work += rt[j].count();
        best = std::max(best, (work + alloc.counts[t] - 1) / alloc.counts[t]);
    }
    return best;
}

// Independent schedule check: types, machine indices, durations,
// precedence, per-machine non-overlap and the makespan.
inline std::vector<std::string> feasibility_errors(const Build& b, std::span<const Duration> rt,
                                                   const ScheduleResult& s) {
    std::vector<std::string> errors;
    std::map<std::string, std::size_t> id;
    for (std::size_t i = 0; i < b.jobs.size(); ++i) id[b.jobs[i].name] = i;
    if (s.assignments.size() != b.jobs.size()) return {"assignment count"};
    std::map<std::pair<std::size_t, std::uint32_t>, std::vector<std::pair<std::int64_t, std::int64_t>>> busy;
    std::int64_t last = 0;
    for (std::size_t j = 0; j < b.jobs.size(); ++j) {
        const auto& a = s.assignments[j];
        const auto& job = b.jobs[j];
        if (b.machine_types[a.machine_type].name != job.machine_type) errors.push_back(job.name + ": wrong type");
        if (a.machine_index >= s.allocation.counts[a.machine_type]) errors.push_back(job.name + ": bad machine");
        if (a.end - a.start != rt[j]) errors.push_back(job.name + ": wrong duration");
        if (a.start.count() < 0) errors.push_back(job.name + ": negative start");
        for (const auto& d : job.deps)
            if (s.assignments[id.at(d)].end > a.start) errors.push_back(job.name + ": starts before " + d);
        busy[{a.machine_type, a.machine_index}].push_back({a.start.count(), a.end.count()});
        last = std::max(last, a.end.count());
    }
    for (auto& [machine, spans] : busy) {
        std::sort(spans.begin(), spans.end());
        for (std::size_t i = 1; i < spans.size(); ++i)
            if (spans[i].first < spans[i - 1].second) errors.push_back("overlap on a machine");
    }
    if (last != s.makespan.count()) errors.push_back("makespan mismatch");
    return errors;
}

inline std::string fs_read(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline bool is_perm_of_iota(std::vector<JobIndex> v, std::size_t n) {
    if (v.size() != n) return false;
    std::sort(v.begin(), v.end());
    for (std::size_t i = 0; i < n; ++i)
        if (v[i] != i) return false;
    return true;
}

} // namespace testkit
