#ifndef JOBGA_SIMULATOR_HPP
#define JOBGA_SIMULATOR_HPP

// Event-driven list scheduling of a priority list on typed machine pools.
//
// Repeat until nothing is pending:
//   1. scan the pending list front to back and start every job whose
//      dependencies have completed and whose machine type has a free
//      machine (lowest free index of that type);
//   2. if nothing is running at this point the remaining jobs can never
//      start: report a deadlock;
//   3. advance time to the earliest completion and complete every job
//      ending at that instant together, releasing machines.
//
// A second scan inside one instant cannot start anything the first scan
// skipped (readiness and free machines only change on completions), so one
// scan per instant is the whole "fill machines" loop.

#include "jobga/model.hpp"

#include <algorithm>
#include <span>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

namespace jobga {

struct Assignment {
    TypeIndex machine_type = 0;
    std::uint32_t machine_index = 0;
    Duration start{0};
    Duration end{0};

    bool operator==(const Assignment&) const = default;
};

struct ScheduleResult {
    std::vector<Assignment> assignments; // indexed by JobIndex
    Duration makespan{0};
    MachineAllocation allocation;

    bool operator==(const ScheduleResult&) const = default;
};

struct Deadlock {
    std::vector<JobIndex> unscheduled; // in priority order, never empty
};

using SimVerdict = std::variant<ScheduleResult, Deadlock>;

inline SimVerdict simulate(const JobGraph& graph,
                           std::span<const JobIndex> priority,
                           const MachineAllocation& alloc,
                           std::span<const Duration> run_times) {
    const auto n = graph.job_count();
    const auto& types = graph.machine_types();
    expects(graph.is_permutation(priority), "priority list must be a permutation of the build's jobs");
    expects(in_range(alloc, types), "allocation must give every machine type a count in [1, max_count]");
    expects(run_times.size() == n, "missing run time for some job");
    for (auto rt : run_times) expects(rt.count() > 0, "run times must be positive");

    std::vector<std::uint32_t> slot_offset(types.size() + 1, 0);
    for (std::size_t t = 0; t < types.size(); ++t) slot_offset[t + 1] = slot_offset[t] + alloc.counts[t];
    std::vector<char> busy(slot_offset.back(), 0);
    std::vector<std::uint32_t> free_count(alloc.counts);

    std::vector<std::uint32_t> waiting(n);
    for (JobIndex j = 0; j < n; ++j) waiting[j] = static_cast<std::uint32_t>(graph.deps(j).size());

    struct Running {
        Duration end;
        JobIndex job;
        std::uint32_t slot;
    };
    std::vector<Running> running;
    running.reserve(slot_offset.back());

    ScheduleResult result;
    result.assignments.resize(n);
    result.allocation = alloc;

    std::vector<JobIndex> pending(priority.begin(), priority.end());
    Duration now{0};
    for (;;) {
        std::size_t kept = 0;
        for (auto job : pending) {
            auto type = graph.type_of(job);
            if (waiting[job] != 0 || free_count[type] == 0) {
                pending[kept++] = job;
                continue;
            }
            auto slot = slot_offset[type];
            while (busy[slot]) ++slot;
            busy[slot] = 1;
            --free_count[type];
            auto end = now + run_times[job];
            result.assignments[job] = {type, slot - slot_offset[type], now, end};
            running.push_back({end, job, slot});
        }
        pending.resize(kept);

        if (running.empty()) {
            if (pending.empty()) break;
            return Deadlock{std::move(pending)};
        }

        auto next = std::min_element(running.begin(), running.end(),
                                     [](const Running& a, const Running& b) { return a.end < b.end; })
                        ->end;
        now = next;
        for (std::size_t r = 0; r < running.size();) {
            if (running[r].end != next) {
                ++r;
                continue;
            }
            auto done = running[r];
            busy[done.slot] = 0;
            ++free_count[graph.type_of(done.job)];
            for (auto dependent : graph.dependents(done.job)) --waiting[dependent];
            running[r] = running.back();
            running.pop_back();
        }
    }
    result.makespan = now;
    return result;
}

// True iff the list drains when every job takes one time unit on a single
// machine per type.
inline bool is_deadlock_free(const JobGraph& graph, std::span<const JobIndex> priority) {
    MachineAllocation single{std::vector<std::uint32_t>(graph.type_count(), 1)};
    std::vector<Duration> unit(graph.job_count(), Duration{1});
    return std::holds_alternative<ScheduleResult>(simulate(graph, priority, single, unit));
}

// Checks a schedule against the structural invariants; returns one message
// per violation (empty when the schedule is feasible).
inline std::vector<std::string> schedule_violations(const JobGraph& graph,
                                                    std::span<const Duration> run_times,
                                                    const ScheduleResult& schedule) {
    std::vector<std::string> out;
    const auto n = graph.job_count();
    if (schedule.assignments.size() != n) {
        out.push_back("schedule does not assign every job exactly once");
        return out;
    }
    if (!in_range(schedule.allocation, graph.machine_types())) out.push_back("allocation out of range");

    Duration latest{0};
    for (JobIndex j = 0; j < n; ++j) {
        const auto& a = schedule.assignments[j];
        latest = std::max(latest, a.end);
        if (a.machine_type != graph.type_of(j)) out.push_back(graph.name(j) + ": wrong machine type");
        if (a.machine_type < schedule.allocation.counts.size() &&
            a.machine_index >= schedule.allocation.counts[a.machine_type])
            out.push_back(graph.name(j) + ": machine index beyond allocation");
        if (a.start.count() < 0) out.push_back(graph.name(j) + ": negative start");
        if (j < run_times.size() && a.end != a.start + run_times[j])
            out.push_back(graph.name(j) + ": end != start + run time");
        for (auto d : graph.deps(j))
            if (a.start < schedule.assignments[d].end)
                out.push_back(graph.name(j) + ": starts before dependency " + graph.name(d) + " ends");
    }
    if (latest != schedule.makespan) out.push_back("makespan is not the latest end time");

    std::vector<JobIndex> order(n);
    for (JobIndex j = 0; j < n; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](JobIndex a, JobIndex b) {
        const auto& x = schedule.assignments[a];
        const auto& y = schedule.assignments[b];
        return std::tie(x.machine_type, x.machine_index, x.start) < std::tie(y.machine_type, y.machine_index, y.start);
    });
    for (std::size_t k = 1; k < order.size(); ++k) {
        const auto& prev = schedule.assignments[order[k - 1]];
        const auto& cur = schedule.assignments[order[k]];
        if (prev.machine_type == cur.machine_type && prev.machine_index == cur.machine_index && cur.start < prev.end)
            out.push_back(graph.name(order[k - 1]) + " and " + graph.name(order[k]) + " overlap on one machine");
    }
    return out;
}

} // namespace jobga

#endif // JOBGA_SIMULATOR_HPP
