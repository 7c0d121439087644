#ifndef JOBGA_OPERATORS_HPP
#define JOBGA_OPERATORS_HPP

// Variation and selection operators.
//
// Permutation crossovers are templated on the gene type so they can be used
// on job indices as well as on plain integer permutations. Genes must be
// non-negative integers (they index a presence table).
//
//  * ordered (OX):   child[i..j] = p1[i..j]; the other slots are filled from
//                    position j+1 onward (wrapping) with p2's genes, scanned
//                    from j+1 onward (wrapping), skipping those already used.
//  * partially mapped (PMX):
//                    child1 = p1 with [i..j] taken from p2; a clashing gene
//                    outside the segment follows the p2[k] -> p1[k] mapping
//                    until it leaves the segment. child2 is symmetric.

#include "jobga/ga_config.hpp"
#include "jobga/model.hpp"

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace jobga {

using Pivots = std::pair<std::size_t, std::size_t>;

inline Pivots draw_pivots(std::size_t n, Rng& rng) {
    expects(n >= 1, "cannot draw pivots on an empty permutation");
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    auto a = pick(rng);
    auto b = pick(rng);
    return std::minmax(a, b);
}

namespace detail {

template <std::integral T>
std::vector<char> presence_table(std::span<const T> genes) {
    T top = 0;
    for (auto g : genes) top = std::max(top, g);
    return std::vector<char>(static_cast<std::size_t>(top) + 1, 0);
}

template <std::integral T>
void check_crossover_args(std::span<const T> p1, std::span<const T> p2, Pivots piv) {
    expects(p1.size() == p2.size(), "parents must have equal length");
    expects(piv.first <= piv.second && piv.second < p1.size(), "pivots must satisfy 0 <= i <= j < n");
}

} // namespace detail

template <std::integral T>
std::vector<T> ordered_crossover(std::span<const T> p1, std::span<const T> p2, Pivots piv) {
    detail::check_crossover_args(p1, p2, piv);
    const auto n = p1.size();
    const auto [i, j] = piv;
    std::vector<T> child(n);
    auto used = detail::presence_table(p1);
    for (auto k = i; k <= j; ++k) {
        child[k] = p1[k];
        used[static_cast<std::size_t>(p1[k])] = 1;
    }
    std::size_t write = (j + 1) % n;
    for (std::size_t s = 0; s < n; ++s) {
        auto gene = p2[(j + 1 + s) % n];
        if (used[static_cast<std::size_t>(gene)]) continue;
        used[static_cast<std::size_t>(gene)] = 1;
        child[write] = gene;
        write = (write + 1) % n;
    }
    return child;
}

template <std::integral T>
std::vector<T> ordered_crossover(std::span<const T> p1, std::span<const T> p2, Rng& rng) {
    return ordered_crossover(p1, p2, draw_pivots(p1.size(), rng));
}

template <std::integral T>
std::pair<std::vector<T>, std::vector<T>> pmx_crossover(std::span<const T> p1, std::span<const T> p2, Pivots piv) {
    detail::check_crossover_args(p1, p2, piv);
    const auto [i, j] = piv;

    // base with its [i..j] replaced by donor[i..j]
    auto make_child = [&](std::span<const T> base, std::span<const T> donor) {
        constexpr std::size_t none = static_cast<std::size_t>(-1);
        std::vector<std::size_t> donor_pos(detail::presence_table(donor).size(), none);
        for (auto k = i; k <= j; ++k) donor_pos[static_cast<std::size_t>(donor[k])] = k;

        std::vector<T> child(base.begin(), base.end());
        for (std::size_t k = 0; k < base.size(); ++k) {
            if (k >= i && k <= j) {
                child[k] = donor[k];
                continue;
            }
            T gene = base[k];
            while (static_cast<std::size_t>(gene) < donor_pos.size() && donor_pos[static_cast<std::size_t>(gene)] != none)
                gene = base[donor_pos[static_cast<std::size_t>(gene)]];
            child[k] = gene;
        }
        return child;
    };
    return {make_child(p1, p2), make_child(p2, p1)};
}

template <std::integral T>
std::pair<std::vector<T>, std::vector<T>> pmx_crossover(std::span<const T> p1, std::span<const T> p2, Rng& rng) {
    return pmx_crossover(p1, p2, draw_pivots(p1.size(), rng));
}

template <std::integral T>
std::vector<T> ordered_crossover(const std::vector<T>& p1, const std::vector<T>& p2, Pivots piv) {
    return ordered_crossover(std::span<const T>(p1), std::span<const T>(p2), piv);
}

template <std::integral T>
std::pair<std::vector<T>, std::vector<T>> pmx_crossover(const std::vector<T>& p1, const std::vector<T>& p2,
                                                        Pivots piv) {
    return pmx_crossover(std::span<const T>(p1), std::span<const T>(p2), piv);
}

// Per machine type, one-point crossover of that type's segment only:
// child = first[0, cut) + second[cut, width). cut = 0 copies `second`.
inline std::vector<BitSegment> machine_segment_crossover(const std::vector<BitSegment>& first,
                                                         const std::vector<BitSegment>& second,
                                                         std::span<const std::size_t> cuts) {
    expects(first.size() == second.size() && cuts.size() == first.size(), "machine segment layout mismatch");
    std::vector<BitSegment> child(first.size());
    for (std::size_t t = 0; t < first.size(); ++t) {
        expects(first[t].size() == second[t].size(), "machine segment layout mismatch");
        expects(cuts[t] <= first[t].size(), "cut point beyond segment width");
        child[t] = second[t];
        std::copy(first[t].begin(), first[t].begin() + static_cast<std::ptrdiff_t>(cuts[t]), child[t].begin());
    }
    return child;
}

inline std::vector<std::size_t> draw_cuts(const std::vector<BitSegment>& layout, Rng& rng) {
    std::vector<std::size_t> cuts;
    cuts.reserve(layout.size());
    for (const auto& seg : layout) cuts.push_back(std::uniform_int_distribution<std::size_t>(0, seg.size())(rng));
    return cuts;
}

inline std::vector<BitSegment> machine_segment_crossover(const std::vector<BitSegment>& first,
                                                         const std::vector<BitSegment>& second, Rng& rng) {
    return machine_segment_crossover(first, second, draw_cuts(first, rng));
}

namespace detail {

// Doubly linked job list whose nodes carry increasing integer labels, so
// "is a before b" is one comparison and moving a node is O(1). Labels are
// spread out again when an insertion finds no room between two neighbours.
class LabelledList {
public:
    explicit LabelledList(std::span<const JobIndex> order)
        : head_(static_cast<JobIndex>(order.size())), nodes_(order.size() + 1) {
        JobIndex last = head_;
        std::uint64_t next_label = gap;
        for (auto j : order) {
            nodes_[last].next = j;
            nodes_[j].prev = last;
            nodes_[j].label = next_label;
            next_label += gap;
            last = j;
        }
        nodes_[last].next = head_;
        nodes_[head_].prev = last;
        nodes_[head_].label = 0;
    }

    std::uint64_t label(JobIndex j) const { return nodes_[j].label; }

    void move_after(JobIndex node, JobIndex anchor) {
        auto& n = nodes_[node];
        nodes_[n.prev].next = n.next;
        nodes_[n.next].prev = n.prev;
        if (!has_room_after(anchor)) relabel();
        auto& a = nodes_[anchor];
        const auto after = a.next;
        n.label = after == head_ ? a.label + gap : a.label + (nodes_[after].label - a.label) / 2;
        n.prev = anchor;
        n.next = after;
        a.next = node;
        nodes_[after].prev = node;
    }

    void copy_to(std::span<JobIndex> out) const {
        std::size_t k = 0;
        for (auto j = nodes_[head_].next; j != head_; j = nodes_[j].next) out[k++] = j;
    }

private:
    static constexpr std::uint64_t gap = std::uint64_t{1} << 32;

    struct Node {
        JobIndex prev = 0;
        JobIndex next = 0;
        std::uint64_t label = 0;
    };

    bool has_room_after(JobIndex anchor) const {
        const auto& a = nodes_[anchor];
        if (a.next == head_) return a.label <= std::numeric_limits<std::uint64_t>::max() - gap;
        return nodes_[a.next].label - a.label >= 2;
    }

    // A detached node is not reachable from head_ and keeps its stale label
    // until it is re-inserted.
    void relabel() {
        std::uint64_t next_label = gap;
        for (auto j = nodes_[head_].next; j != head_; j = nodes_[j].next, next_label += gap) nodes_[j].label = next_label;
    }

    JobIndex head_; // sentinel
    std::vector<Node> nodes_;
};

} // namespace detail

// Moves every job that precedes one of its dependencies to just after the
// last of them, until no job precedes a dependency. Jobs are visited in the
// build's topological order: when a job is visited its dependencies have
// already been placed and never move again (only the visited job moves), so
// a single sweep reaches the fixpoint.
// In-place form; `list` must already be a permutation of the build's jobs.
inline void repair_priority_list_in_place(const JobGraph& graph, std::vector<JobIndex>& list) {
    expects(graph.acyclic(), "cannot repair a priority list for a cyclic build");
    detail::LabelledList order(list);
    for (auto job : graph.topological_order()) {
        auto deps = graph.deps(job);
        if (deps.empty()) continue;
        auto last_dep = deps.front();
        for (auto d : deps.subspan(1))
            if (order.label(d) > order.label(last_dep)) last_dep = d;
        if (order.label(job) < order.label(last_dep)) order.move_after(job, last_dep);
    }
    order.copy_to(list);
}

inline std::vector<JobIndex> repair_priority_list(const JobGraph& graph, std::span<const JobIndex> priority) {
    expects(graph.is_permutation(priority), "priority list must be a permutation of the build's jobs");
    std::vector<JobIndex> list(priority.begin(), priority.end());
    repair_priority_list_in_place(graph, list);
    return list;
}

inline double bit_flip_rate_for(const GaConfig& config, std::size_t width) {
    if (config.bit_flip_rate) return *config.bit_flip_rate;
    return width == 0 ? 0.0 : 1.0 / static_cast<double>(width);
}

// Swap mutation followed by repair, then independent bit flips. Bit flips are
// skipped when the allocation is pinned.
inline Chromosome mutate(Chromosome chromosome, const JobGraph& graph, const GaConfig& config, Rng& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const auto n = chromosome.priority.size();
    if (n >= 2 && coin(rng) < config.permutation_mutation_rate) {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        auto a = pick(rng);
        auto b = pick(rng);
        while (b == a) b = pick(rng);
        std::swap(chromosome.priority[a], chromosome.priority[b]);
        repair_priority_list_in_place(graph, chromosome.priority);
    }
    if (!config.pinned_allocation) {
        for (auto& segment : chromosome.machine_bits) {
            const double rate = bit_flip_rate_for(config, segment.size());
            for (std::size_t b = 0; b < segment.size(); ++b)
                if (coin(rng) < rate) segment[b] = !segment[b];
        }
    }
    return chromosome;
}

// Tournament without replacement over `tournament_size` contestants drawn in
// random order; the lowest fitness wins and the earliest drawn wins ties.
inline std::size_t tournament(std::span<const double> fitness, std::size_t size, Rng& rng) {
    expects(!fitness.empty(), "tournament over an empty population");
    const auto n = fitness.size();
    const auto k = std::min(size, n);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::size_t best = 0;
    for (std::size_t draw = 0; draw < k; ++draw) {
        auto pick = std::uniform_int_distribution<std::size_t>(draw, n - 1)(rng);
        std::swap(idx[draw], idx[pick]);
        if (draw == 0 || fitness[idx[draw]] < fitness[best]) best = idx[draw];
    }
    return best;
}

inline std::pair<std::size_t, std::size_t> select_parents(std::span<const double> fitness, const GaConfig& config,
                                                          Rng& rng) {
    auto a = tournament(fitness, config.tournament_size, rng);
    auto b = tournament(fitness, config.tournament_size, rng);
    return {a, b};
}

} // namespace jobga

#endif // JOBGA_OPERATORS_HPP
