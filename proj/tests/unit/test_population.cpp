#include "helpers.hpp"

#include <gtest/gtest.h>

using namespace jobga;
using testkit::make_build;

namespace {

Build chain3() {
    return make_build({{"A", {}}, {"B", {"A"}}, {"C", {"B"}}}, {{"linux", 3}});
}

void expect_valid(const JobGraph& g, const std::vector<Chromosome>& pop, const GaConfig& c) {
    for (const auto& x : pop) {
        EXPECT_TRUE(testkit::is_perm_of_iota(x.priority, g.job_count()));
        EXPECT_TRUE(is_deadlock_free(g, x.priority));
        auto alloc = decode_machine_bits(x.machine_bits, g.machine_types());
        EXPECT_TRUE(in_range(alloc, g.machine_types()));
        if (c.pinned_allocation) {
            EXPECT_EQ(alloc, *c.pinned_allocation);
        }
    }
}

} // namespace

TEST(PopulationSize, DefaultsToTwiceTheJobs) {
    GaConfig c;
    EXPECT_EQ(population_size_for(c, 7), 14u);
    EXPECT_EQ(population_size_for(c, 0), 2u);
    c.population_size = 5;
    EXPECT_EQ(population_size_for(c, 7), 5u);
    EXPECT_EQ(elite_count_for(c, 2), 1u);
}

TEST(InitRejection, ChainPopulationDrains) {
    JobGraph g(chain3());
    GaConfig c;
    c.population_size = 6;
    Rng rng(1);
    auto pop = init_population_rejection(g, c, rng);
    ASSERT_EQ(pop.size(), 6u);
    expect_valid(g, pop, c);
}

TEST(InitRejection, IndependentJobsTakeTheFirstShuffle) {
    JobGraph g(make_build({{"a", {}}, {"b", {}}, {"c", {}}, {"d", {}}}, {{"linux", 2}}));
    GaConfig c;
    Rng r1(5), r2(5);
    auto pop = init_population_rejection(g, c, r1);
    // replay the draws: one shuffle, then one count per type
    for (const auto& x : pop) {
        auto expected = g.original_order();
        std::shuffle(expected.begin(), expected.end(), r2);
        EXPECT_EQ(x.priority, expected);
        std::uniform_int_distribution<std::uint32_t>(1, 2)(r2);
    }
}

TEST(InitRejection, IsSeeded) {
    JobGraph g(chain3());
    GaConfig c;
    Rng r1(3), r2(3);
    EXPECT_EQ(init_population_rejection(g, c, r1), init_population_rejection(g, c, r2));
}

TEST(InitRepair, LargeRandomDagIsValid) {
    SyntheticParams p;
    p.jobs = 200;
    p.edge_prob = 0.02;
    p.seed = 4;
    auto b = generate_synthetic_build(p);
    JobGraph g(b);
    GaConfig c;
    Rng rng(4);
    auto pop = init_population_repair(g, c, rng);
    ASSERT_EQ(pop.size(), 400u);
    expect_valid(g, pop, c);
    for (const auto& x : pop) EXPECT_TRUE(testkit::respects_dependencies(b, testkit::names(g, x.priority)));
}

TEST(InitRepair, IsSeeded) {
    SyntheticParams p;
    p.jobs = 50;
    auto b = generate_synthetic_build(p);
    JobGraph g(b);
    GaConfig c;
    Rng r1(8), r2(8);
    EXPECT_EQ(init_population_repair(g, c, r1), init_population_repair(g, c, r2));
}

TEST(InitRepair, IndependentJobsGiveRawShuffles) {
    JobGraph g(make_build({{"a", {}}, {"b", {}}, {"c", {}}, {"d", {}}, {"e", {}}}, {{"linux", 1}}));
    GaConfig c;
    Rng r1(6), r2(6);
    auto pop = init_population_repair(g, c, r1);
    for (const auto& x : pop) {
        auto expected = g.original_order();
        std::shuffle(expected.begin(), expected.end(), r2);
        EXPECT_EQ(x.priority, expected);
        std::uniform_int_distribution<std::uint32_t>(1, 1)(r2);
    }
}

TEST(InitPopulation, PinnedAllocationIsUsed) {
    auto b = make_build({{"A", {}}, {"B", {}, "win"}}, {{"linux", 3}, {"win", 2}});
    JobGraph g(b);
    GaConfig c;
    c.pinned_allocation = MachineAllocation{{2, 1}};
    for (auto kind : {InitKind::rejection, InitKind::repair}) {
        c.init = kind;
        Rng rng(2);
        expect_valid(g, init_population(g, c, rng), c);
    }
}

TEST(InitPopulation, RejectsCyclicBuilds) {
    JobGraph g(make_build({{"A", {"B"}}, {"B", {"A"}}}));
    GaConfig c;
    Rng rng(1);
    EXPECT_THROW(init_population_rejection(g, c, rng), ContractViolation);
    EXPECT_THROW(init_population_repair(g, c, rng), ContractViolation);
}
