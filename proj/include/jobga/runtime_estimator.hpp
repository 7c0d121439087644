#ifndef JOBGA_RUNTIME_ESTIMATOR_HPP
#define JOBGA_RUNTIME_ESTIMATOR_HPP

#include "jobga/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace jobga {

// Historical run times in seconds, keyed by job name.
struct RunHistory {
    std::map<std::string, std::vector<double>> samples;

    bool operator==(const RunHistory&) const = default;
};

struct EstimatorConfig {
    double quantile_q = 0.75;
    // Draw range in seconds for jobs with neither a declared run time nor history.
    double unknown_lo = 60.0;
    double unknown_hi = 600.0;
    std::uint64_t rng_seed = 0;
};

// Linear-interpolation quantile: rank h = q (n - 1) on the sorted samples.
inline double quantile(std::span<const double> samples, double q) {
    expects(!samples.empty(), "quantile of an empty sample set");
    expects(q >= 0.0 && q <= 1.0, "quantile level must lie in [0, 1]");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

// Seed of the private random stream for one job name.
inline std::uint64_t job_stream_seed(std::uint64_t seed, std::string_view job_name) {
    return detail::splitmix64(detail::splitmix64(seed) ^ detail::fnv1a(job_name));
}

inline Duration estimate_one(const Job& job, const RunHistory& history, const EstimatorConfig& config) {
    if (job.declared_run_time) return *job.declared_run_time;
    if (auto it = history.samples.find(job.name); it != history.samples.end() && !it->second.empty()) {
        return std::max(Duration{1}, from_seconds(quantile(it->second, config.quantile_q)));
    }
    std::mt19937_64 stream(job_stream_seed(config.rng_seed, job.name));
    const auto lo = std::max<std::int64_t>(1, from_seconds(config.unknown_lo).count());
    const auto hi = std::max(lo, from_seconds(config.unknown_hi).count());
    std::uniform_int_distribution<std::int64_t> draw(lo, hi);
    return Duration{draw(stream)};
}

// Run time per job, aligned with build.jobs. Declared run times win, then the
// history quantile, then a draw from the job's own seeded stream.
inline std::vector<Duration> estimate_all(const Build& build, const RunHistory& history,
                                          const EstimatorConfig& config) {
    expects(config.quantile_q >= 0.0 && config.quantile_q <= 1.0, "quantile level must lie in [0, 1]");
    expects(config.unknown_lo > 0.0 && config.unknown_lo <= config.unknown_hi,
            "unknown run-time range must satisfy 0 < lo <= hi");
    std::vector<Duration> out;
    out.reserve(build.jobs.size());
    for (const auto& job : build.jobs) out.push_back(estimate_one(job, history, config));
    return out;
}

} // namespace jobga

#endif // JOBGA_RUNTIME_ESTIMATOR_HPP
