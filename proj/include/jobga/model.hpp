#ifndef JOBGA_MODEL_HPP
#define JOBGA_MODEL_HPP

// Domain model: jobs, machine types, builds, chromosomes and structural checks.

#include "jobga/error.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace jobga {

using Duration = std::chrono::milliseconds;
using JobIndex = std::uint32_t;
using TypeIndex = std::uint32_t;

inline double to_seconds(Duration d) {
    return static_cast<double>(d.count()) / 1000.0;
}

inline Duration from_seconds(double seconds) {
    return Duration{std::llround(seconds * 1000.0)};
}

struct Job {
    std::string name;
    std::vector<std::string> deps;
    std::string machine_type;
    std::optional<Duration> declared_run_time;

    bool operator==(const Job&) const = default;
};

struct MachineType {
    std::string name;
    std::uint32_t max_count = 1;

    bool operator==(const MachineType&) const = default;
};

// Job order is the user's original priority list.
struct Build {
    std::vector<Job> jobs;
    std::vector<MachineType> machine_types;

    bool operator==(const Build&) const = default;
};

// Allocated machine count per type, aligned with Build::machine_types.
struct MachineAllocation {
    std::vector<std::uint32_t> counts;

    std::uint32_t total() const {
        std::uint32_t sum = 0;
        for (auto c : counts) sum += c;
        return sum;
    }

    bool operator==(const MachineAllocation&) const = default;
};

// One bit segment per machine type, most significant bit first.
using BitSegment = std::vector<bool>;

struct Chromosome {
    std::vector<JobIndex> priority;
    std::vector<BitSegment> machine_bits;

    bool operator==(const Chromosome&) const = default;
};

// ---------------------------------------------------------------------------
// validation

struct ValidationIssue {
    enum class Kind {
        empty_name,
        duplicate_job,
        duplicate_machine_type,
        self_dependency,
        duplicate_dependency,
        unresolved_dependency,
        unresolved_machine_type,
        bad_max_count,
        bad_run_time,
        cycle,
    };

    Kind kind;
    std::string message;
    // Jobs involved. For cycles this is the cycle in execution order;
    // for unresolved references it holds the missing name.
    std::vector<std::string> names;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const { return issues.empty(); }

    bool has(ValidationIssue::Kind kind) const {
        return std::any_of(issues.begin(), issues.end(),
                           [kind](const auto& i) { return i.kind == kind; });
    }

    std::string summary() const {
        std::ostringstream out;
        for (std::size_t i = 0; i < issues.size(); ++i) {
            if (i) out << '\n';
            out << issues[i].message;
        }
        return out.str();
    }
};

namespace detail {

// Finds one cycle among `stuck` nodes (each of which has at least one stuck
// dependency) by walking dependency edges until a node repeats.
inline std::vector<std::size_t> extract_cycle(const std::vector<std::vector<std::size_t>>& deps,
                                              const std::vector<bool>& stuck,
                                              std::size_t start) {
    std::vector<std::size_t> path;
    std::vector<std::ptrdiff_t> seen_at(deps.size(), -1);
    std::size_t node = start;
    while (seen_at[node] < 0) {
        seen_at[node] = static_cast<std::ptrdiff_t>(path.size());
        path.push_back(node);
        auto next = std::find_if(deps[node].begin(), deps[node].end(),
                                 [&](std::size_t d) { return stuck[d]; });
        node = *next;
    }
    std::vector<std::size_t> cycle(path.begin() + seen_at[node], path.end());
    // walked along dependency edges; report in execution order
    std::reverse(cycle.begin(), cycle.end());
    return cycle;
}

} // namespace detail

inline ValidationReport validate_build(const Build& build) {
    using Kind = ValidationIssue::Kind;
    ValidationReport report;
    auto add = [&](Kind kind, std::string message, std::vector<std::string> names = {}) {
        report.issues.push_back({kind, std::move(message), std::move(names)});
    };

    std::unordered_set<std::string> type_names;
    for (const auto& type : build.machine_types) {
        if (type.name.empty()) add(Kind::empty_name, "machine type with empty name");
        if (!type_names.insert(type.name).second)
            add(Kind::duplicate_machine_type, "duplicate machine type '" + type.name + "'", {type.name});
        if (type.max_count < 1)
            add(Kind::bad_max_count, "machine type '" + type.name + "' has max_count < 1", {type.name});
    }

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < build.jobs.size(); ++i) {
        const auto& job = build.jobs[i];
        if (job.name.empty()) add(Kind::empty_name, "job #" + std::to_string(i) + " has an empty name");
        if (!index.emplace(job.name, i).second)
            add(Kind::duplicate_job, "duplicate job name '" + job.name + "'", {job.name});
    }

    std::vector<std::vector<std::size_t>> deps(build.jobs.size());
    for (std::size_t i = 0; i < build.jobs.size(); ++i) {
        const auto& job = build.jobs[i];
        if (!type_names.contains(job.machine_type))
            add(Kind::unresolved_machine_type,
                "job '" + job.name + "' references undeclared machine type '" + job.machine_type + "'",
                {job.machine_type});
        if (job.declared_run_time && job.declared_run_time->count() <= 0)
            add(Kind::bad_run_time, "job '" + job.name + "' has a non-positive run time", {job.name});

        std::unordered_set<std::string> seen;
        for (const auto& dep : job.deps) {
            if (!seen.insert(dep).second) {
                add(Kind::duplicate_dependency, "job '" + job.name + "' lists dependency '" + dep + "' twice",
                    {job.name, dep});
                continue;
            }
            if (dep == job.name) {
                add(Kind::self_dependency, "job '" + job.name + "' depends on itself", {job.name});
                continue;
            }
            auto it = index.find(dep);
            if (it == index.end()) {
                add(Kind::unresolved_dependency,
                    "job '" + job.name + "' depends on undeclared job '" + dep + "'", {dep});
                continue;
            }
            deps[i].push_back(it->second);
        }
    }

    // Kahn's algorithm over the resolved edges
    std::vector<std::size_t> remaining(build.jobs.size());
    std::vector<std::vector<std::size_t>> dependents(build.jobs.size());
    for (std::size_t i = 0; i < deps.size(); ++i) {
        remaining[i] = deps[i].size();
        for (auto d : deps[i]) dependents[d].push_back(i);
    }
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < remaining.size(); ++i)
        if (remaining[i] == 0) ready.push_back(i);
    std::size_t visited = 0;
    while (!ready.empty()) {
        auto node = ready.back();
        ready.pop_back();
        ++visited;
        for (auto next : dependents[node])
            if (--remaining[next] == 0) ready.push_back(next);
    }
    if (visited != build.jobs.size()) {
        std::vector<bool> stuck(build.jobs.size());
        std::size_t start = 0;
        for (std::size_t i = remaining.size(); i-- > 0;) {
            stuck[i] = remaining[i] > 0;
            if (stuck[i]) start = i;
        }
        std::vector<std::string> names;
        std::string joined;
        for (auto i : detail::extract_cycle(deps, stuck, start)) {
            names.push_back(build.jobs[i].name);
            joined += (joined.empty() ? "" : " -> ") + build.jobs[i].name;
        }
        auto message = "dependency cycle: " + joined + " -> " + names.front();
        add(Kind::cycle, std::move(message), std::move(names));
    }
    return report;
}

// ---------------------------------------------------------------------------
// resolved job graph

// Index-based view of a build with all references resolved. Construction
// fails on any structural error other than a dependency cycle, so that the
// simulator can still be asked about cyclic builds.
class JobGraph {
public:
    explicit JobGraph(Build build) : build_(std::move(build)) {
        auto report = validate_build(build_);
        for (const auto& issue : report.issues) {
            if (issue.kind != ValidationIssue::Kind::cycle) throw ValidationError(report.summary());
        }
        acyclic_ = report.ok();

        std::unordered_map<std::string, TypeIndex> type_index;
        for (TypeIndex t = 0; t < build_.machine_types.size(); ++t)
            type_index.emplace(build_.machine_types[t].name, t);
        for (JobIndex j = 0; j < build_.jobs.size(); ++j) index_.emplace(build_.jobs[j].name, j);

        // adjacency in compressed rows: edges of job j live in [offset[j], offset[j+1])
        const auto n = build_.jobs.size();
        type_of_.resize(n);
        dep_offset_.assign(n + 1, 0);
        dependent_offset_.assign(n + 1, 0);
        for (JobIndex j = 0; j < n; ++j) {
            const auto& job = build_.jobs[j];
            type_of_[j] = type_index.at(job.machine_type);
            dep_offset_[j + 1] = dep_offset_[j] + static_cast<std::uint32_t>(job.deps.size());
            for (const auto& dep : job.deps) ++dependent_offset_[index_.at(dep) + 1];
        }
        for (std::size_t j = 0; j < n; ++j) dependent_offset_[j + 1] += dependent_offset_[j];
        deps_.resize(dep_offset_[n]);
        dependents_.resize(dependent_offset_[n]);
        auto fill = dependent_offset_;
        for (JobIndex j = 0; j < n; ++j) {
            auto out = dep_offset_[j];
            for (const auto& dep : build_.jobs[j].deps) {
                auto d = index_.at(dep);
                deps_[out++] = d;
                dependents_[fill[d]++] = j;
            }
        }
        if (acyclic_) topological_order_ = kahn_order();
    }

    const Build& build() const { return build_; }
    std::size_t job_count() const { return build_.jobs.size(); }
    std::size_t type_count() const { return build_.machine_types.size(); }
    bool acyclic() const { return acyclic_; }

    const Job& job(JobIndex j) const { return build_.jobs[j]; }
    const std::string& name(JobIndex j) const { return build_.jobs[j].name; }
    TypeIndex type_of(JobIndex j) const { return type_of_[j]; }
    std::span<const JobIndex> deps(JobIndex j) const {
        return std::span<const JobIndex>(deps_).subspan(dep_offset_[j], dep_offset_[j + 1] - dep_offset_[j]);
    }
    std::span<const JobIndex> dependents(JobIndex j) const {
        return std::span<const JobIndex>(dependents_)
            .subspan(dependent_offset_[j], dependent_offset_[j + 1] - dependent_offset_[j]);
    }
    const std::vector<MachineType>& machine_types() const { return build_.machine_types; }

    std::optional<JobIndex> find(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    JobIndex index_of(const std::string& name) const {
        auto j = find(name);
        if (!j) throw ValidationError("unknown job '" + name + "'");
        return *j;
    }

    // Names -> indices; the list must be a permutation of the build's jobs.
    std::vector<JobIndex> to_indices(std::span<const std::string> names) const {
        std::vector<JobIndex> out;
        out.reserve(names.size());
        for (const auto& n : names) out.push_back(index_of(n));
        if (!is_permutation(out)) throw ValidationError("priority list is not a permutation of the build's jobs");
        return out;
    }

    std::vector<std::string> to_names(std::span<const JobIndex> priority) const {
        std::vector<std::string> out;
        out.reserve(priority.size());
        for (auto j : priority) out.push_back(name(j));
        return out;
    }

    bool is_permutation(std::span<const JobIndex> priority) const {
        if (priority.size() != job_count()) return false;
        std::vector<bool> seen(job_count());
        for (auto j : priority) {
            if (j >= job_count() || seen[j]) return false;
            seen[j] = true;
        }
        return true;
    }

    // Dependencies before dependents; among jobs that become ready together,
    // input order. Empty for cyclic builds.
    std::span<const JobIndex> topological_order() const { return topological_order_; }

    // Input order, i.e. the user's original priority list.
    std::vector<JobIndex> original_order() const {
        std::vector<JobIndex> out(job_count());
        for (JobIndex j = 0; j < out.size(); ++j) out[j] = j;
        return out;
    }

private:
    std::vector<JobIndex> kahn_order() const {
        std::vector<std::uint32_t> waiting(job_count());
        std::vector<JobIndex> order;
        order.reserve(job_count());
        for (JobIndex j = 0; j < job_count(); ++j) {
            waiting[j] = static_cast<std::uint32_t>(deps(j).size());
            if (waiting[j] == 0) order.push_back(j);
        }
        for (std::size_t head = 0; head < order.size(); ++head)
            for (auto next : dependents(order[head]))
                if (--waiting[next] == 0) order.push_back(next);
        return order;
    }

    Build build_;
    bool acyclic_ = false;
    std::unordered_map<std::string, JobIndex> index_;
    std::vector<TypeIndex> type_of_;
    std::vector<std::uint32_t> dep_offset_;
    std::vector<JobIndex> deps_;
    std::vector<std::uint32_t> dependent_offset_;
    std::vector<JobIndex> dependents_;
    std::vector<JobIndex> topological_order_;
};

// ---------------------------------------------------------------------------
// machine count encoding

// Smallest width that can represent every count in [0, max_count].
inline std::size_t segment_width(std::uint32_t max_count) {
    return static_cast<std::size_t>(std::bit_width(max_count));
}

inline std::uint32_t segment_value(const BitSegment& bits) {
    std::uint32_t value = 0;
    for (bool b : bits) value = (value << 1) | (b ? 1u : 0u);
    return value;
}

inline std::string to_string(const BitSegment& bits) {
    std::string s;
    for (bool b : bits) s += b ? '1' : '0';
    return s;
}

inline BitSegment bits_from_string(std::string_view s) {
    BitSegment bits;
    for (char c : s) {
        expects(c == '0' || c == '1', "bit string may only contain '0' and '1'");
        bits.push_back(c == '1');
    }
    return bits;
}

// Unsigned value of each segment, clamped into [1, max_count].
inline MachineAllocation decode_machine_bits(const std::vector<BitSegment>& bits,
                                             std::span<const MachineType> types) {
    expects(bits.size() == types.size(), "one bit segment per machine type expected");
    MachineAllocation alloc;
    alloc.counts.reserve(types.size());
    for (std::size_t t = 0; t < types.size(); ++t) {
        expects(bits[t].size() == segment_width(types[t].max_count),
                "segment width mismatch for machine type '" + types[t].name + "'");
        alloc.counts.push_back(std::clamp<std::uint32_t>(segment_value(bits[t]), 1, types[t].max_count));
    }
    return alloc;
}

inline MachineAllocation decode_machine_bits(const Chromosome& chromosome, std::span<const MachineType> types) {
    return decode_machine_bits(chromosome.machine_bits, types);
}

inline std::vector<BitSegment> encode_machine_counts(const MachineAllocation& alloc,
                                                     std::span<const MachineType> types) {
    expects(alloc.counts.size() == types.size(), "allocation must cover every machine type");
    std::vector<BitSegment> bits(types.size());
    for (std::size_t t = 0; t < types.size(); ++t) {
        auto count = alloc.counts[t];
        expects(count >= 1 && count <= types[t].max_count,
                "count " + std::to_string(count) + " out of range for machine type '" + types[t].name + "'");
        auto width = segment_width(types[t].max_count);
        bits[t].resize(width);
        for (std::size_t b = 0; b < width; ++b) bits[t][width - 1 - b] = (count >> b) & 1u;
    }
    return bits;
}

inline bool in_range(const MachineAllocation& alloc, std::span<const MachineType> types) {
    if (alloc.counts.size() != types.size()) return false;
    for (std::size_t t = 0; t < types.size(); ++t)
        if (alloc.counts[t] < 1 || alloc.counts[t] > types[t].max_count) return false;
    return true;
}

// Every type at its upper bound.
inline MachineAllocation max_allocation(std::span<const MachineType> types) {
    MachineAllocation alloc;
    for (const auto& t : types) alloc.counts.push_back(t.max_count);
    return alloc;
}

inline std::map<std::string, std::uint32_t> to_named(const MachineAllocation& alloc,
                                                     std::span<const MachineType> types) {
    std::map<std::string, std::uint32_t> out;
    for (std::size_t t = 0; t < types.size() && t < alloc.counts.size(); ++t) out[types[t].name] = alloc.counts[t];
    return out;
}

inline MachineAllocation from_named(const std::map<std::string, std::uint32_t>& named,
                                    std::span<const MachineType> types) {
    MachineAllocation alloc;
    for (const auto& t : types) {
        auto it = named.find(t.name);
        if (it == named.end()) throw ValidationError("allocation is missing machine type '" + t.name + "'");
        alloc.counts.push_back(it->second);
    }
    if (named.size() != types.size()) throw ValidationError("allocation names an undeclared machine type");
    if (!in_range(alloc, types)) throw ValidationError("allocation count outside [1, max_count]");
    return alloc;
}

} // namespace jobga

#endif // JOBGA_MODEL_HPP
