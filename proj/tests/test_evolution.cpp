#include <gtest/gtest.h>

#include <algorithm>
#include <memory>

#include "dynlab/dgp/evolution.hpp"
#include "dynlab/dgp/sexpr.hpp"
#include "dynlab/errors.hpp"

using namespace dynlab;
using namespace dynlab::dgp;

namespace {

FitnessSetup small_setup(double horizon = 10.0) {
    FitnessSetup s;
    s.env = std::make_shared<const StochasticDoubleIntegrator>();
    s.returns = ReturnConfig{0.0, horizon};
    return s;
}

GpConfig small_config() {
    GpConfig c;
    c.n_islands = 2;
    c.pop_size = 12;
    c.n_generations = 4;
    c.rollouts_per_eval = 2;
    c.migration_interval = 2;
    c.migration_count = 2;
    return c;
}

Individual with_fitness(double f, std::uint64_t id, const char* text = "z1\nz2\nz1\n") {
    Individual ind = parse_individual(text);
    ind.fitness = f;
    ind.id = id;
    return ind;
}

} // namespace

TEST(IndividualSystem, NullAgentIsUncontrolled) {
    const FitnessSetup setup = small_setup();
    const ClosedLoop loop = individual_to_system(null_individual(AgentShape{}), setup.env);
    EXPECT_EQ(loop.dynamics.dim_state, 4u);
    EXPECT_EQ(loop.dynamics.dim_noise, 1u);
    EXPECT_EQ(loop.x0, (StateVector{0.0, 0.0, 2.0, 0.0}));
    const StateVector d = loop.dynamics.eval_drift(std::vector<double>{0.0, 0.0, 1.0, 2.0});
    EXPECT_EQ(d, (StateVector{0.0, 0.0, 2.0, -1.0}));
}

TEST(IndividualSystem, TreesDriveStateAndControl) {
    const Individual ind =
        parse_individual("(mul -1.15 y1)\n(sub (mul -6.14 z2) (mul 2.07 y1))\n(add (mul 2 z1) (mul 6 z2))\n");
    const ClosedLoop loop = individual_to_system(ind, small_setup().env);
    const std::vector<double> x{0.5, -0.25, 2.0, 1.0};
    const StateVector d = loop.dynamics.eval_drift(x);
    const double u = 2 * 0.5 + 6 * -0.25;
    EXPECT_DOUBLE_EQ(d[0], -1.15 * 2.0);
    EXPECT_DOUBLE_EQ(d[1], -6.14 * -0.25 - 2.07 * 2.0);
    EXPECT_DOUBLE_EQ(d[2], 1.0);
    EXPECT_DOUBLE_EQ(d[3], -0.5 * 1.0 + u);
    std::vector<double> uu(1);
    EXPECT_DOUBLE_EQ(loop.tap.fn(x, uu), -0.9 * 4.0 - 0.1 * u * u);
    EXPECT_DOUBLE_EQ(uu[0], u);
    const ClosedLoop squashed = individual_to_system(ind, small_setup().env, true);
    EXPECT_DOUBLE_EQ(squashed.dynamics.eval_drift(x)[3], -0.5 + std::tanh(u));
}

TEST(IndividualSystem, RejectsOutOfRangeVariables) {
    const auto env = small_setup().env;
    EXPECT_THROW(individual_to_system(parse_individual("(add y3 z1)\nz1\nz1\n"), env), DimensionMismatch);
}

TEST(Fitness, CachesValueAndSeedSet) {
    const FitnessSetup setup = small_setup();
    Individual a = null_individual(AgentShape{}), b = a;
    const auto seeds = generation_seeds(3, 0, 3);
    const double f = evaluate_fitness(a, setup, seeds);
    EXPECT_EQ(a.fitness, f);
    EXPECT_EQ(a.seed_set_id, seed_set_id(seeds));
    EXPECT_EQ(evaluate_fitness(b, setup, seeds), f);
    EXPECT_LT(f, 0.0);
    EXPECT_NE(seed_set_id(generation_seeds(3, 1, 3)), seed_set_id(seeds));
    EXPECT_EQ(generation_seeds(3, 1, 3), generation_seeds(3, 1, 3));
}

TEST(Fitness, DivergenceScoresThePenalty) {
    FitnessSetup setup = small_setup(50.0);
    Individual runaway = parse_individual("(add 1 (mul z1 z1))\n0\n(mul z1 z1)\n");
    EXPECT_EQ(evaluate_fitness(runaway, setup, generation_seeds(0, 0, 2)), setup.penalty);
}

TEST(Selection, OrderingAndTournaments) {
    const Individual hi = with_fitness(-1.0, 5), lo = with_fitness(-2.0, 1);
    const Individual small_tie = with_fitness(-1.0, 9), big_tie = with_fitness(-1.0, 2, "(add z1 z2)\nz2\nz1\n");
    EXPECT_TRUE(better(hi, lo));
    EXPECT_FALSE(better(lo, hi));
    EXPECT_TRUE(better(small_tie, big_tie));
    EXPECT_TRUE(better(hi, small_tie));
    Individual unscored = hi;
    unscored.fitness.reset();
    EXPECT_TRUE(better(lo, unscored));

    std::vector<Individual> pop{lo, hi, with_fitness(-3.0, 7)};
    std::mt19937_64 rng(1);
    EXPECT_EQ(tournament(pop, 3, rng).id, 5u);
    int picked_worst = 0;
    for (int i = 0; i < 300; ++i) picked_worst += tournament(pop, 1, rng).id == 7 ? 1 : 0;
    EXPECT_GT(picked_worst, 60);
    EXPECT_LT(picked_worst, 140);
}

TEST(Islands, RateMultipliers) {
    GpConfig base;
    base.n_islands = 3;
    EXPECT_DOUBLE_EQ(island_config(base, 0).p_crossover, 0.35);
    EXPECT_DOUBLE_EQ(island_config(base, 1).p_mutate_subtree, 0.15);
    EXPECT_DOUBLE_EQ(island_config(base, 2).p_crossover, 1.0);
    EXPECT_DOUBLE_EQ(island_config(base, 2).p_mutate_point, 0.15);
    base.n_islands = 1;
    EXPECT_DOUBLE_EQ(island_config(base, 0).p_crossover, 0.7);
}

TEST(Islands, RingMigrationReplacesTheWorst) {
    GpConfig c;
    c.pop_size = 3;
    c.migration_count = 1;
    std::vector<std::vector<Individual>> islands{
        {with_fitness(-1, 1), with_fitness(-5, 2), with_fitness(-3, 3)},
        {with_fitness(-2, 4), with_fitness(-9, 5), with_fitness(-4, 6)},
        {with_fitness(-7, 7), with_fitness(-6, 8), with_fitness(-8, 9)}};
    migrate(islands, c);
    EXPECT_EQ(islands[1][1].id, 1u);
    EXPECT_EQ(islands[2][2].id, 4u);
    EXPECT_EQ(islands[0][1].id, 8u);
    EXPECT_EQ(islands[0][0].id, 1u);

    auto before = islands;
    c.migration_count = 0;
    migrate(islands, c);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(islands[i][j].id, before[i][j].id);
}

TEST(Generation, FullElitismKeepsThePopulation) {
    GpConfig c;
    c.pop_size = 4;
    c.tournament_size = 2;
    c.elitism_count = 4;
    std::vector<Individual> pop{with_fitness(-1, 1), with_fitness(-2, 2), with_fitness(-3, 3), with_fitness(-4, 4)};
    std::mt19937_64 rng(2);
    const auto next = evolve_generation(pop, c, AgentShape{}, small_setup(), generation_seeds(0, 1, 1), rng, {1, 0});
    ASSERT_EQ(next.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(next[i].id, pop[i].id);
        EXPECT_EQ(next[i].fitness, pop[i].fitness);
    }
}

TEST(Generation, ElitesKeepCachedFitnessAndOffspringAreScored) {
    GpConfig c = small_config();
    c.elitism_count = 2;
    const FitnessSetup setup = small_setup();
    std::mt19937_64 init(3);
    std::vector<Individual> pop;
    for (std::size_t i = 0; i < c.pop_size; ++i) {
        pop.push_back(random_individual(c, AgentShape{}, init));
        pop.back().id = lineage_id({0, 0}, i);
    }
    for (auto& ind : pop) evaluate_fitness(ind, setup, generation_seeds(0, 0, 2));
    std::mt19937_64 rng(4);
    const auto next = evolve_generation(pop, c, AgentShape{}, setup, generation_seeds(0, 1, 2), rng, {1, 0});
    ASSERT_EQ(next.size(), c.pop_size);
    std::vector<Individual> ranked = pop;
    std::sort(ranked.begin(), ranked.end(), better);
    EXPECT_EQ(next[0].id, ranked[0].id);
    EXPECT_EQ(next[0].fitness, ranked[0].fitness);
    EXPECT_EQ(next[1].id, ranked[1].id);
    for (std::size_t i = 2; i < next.size(); ++i) {
        EXPECT_TRUE(next[i].fitness.has_value());
        EXPECT_EQ(next[i].id, lineage_id({1, 0}, i));
        EXPECT_EQ(next[i].seed_set_id, seed_set_id(generation_seeds(0, 1, 2)));
    }
}

TEST(Evolution, ZeroGenerationsReportsTheInitialPopulation) {
    GpConfig c = small_config();
    c.n_generations = 0;
    const EvolutionReport r = run_dgp(c, AgentShape{}, small_setup(), 1);
    EXPECT_EQ(r.stats.size(), c.n_islands);
    EXPECT_EQ(r.best_per_generation.size(), 1u);
    EXPECT_EQ(r.final_islands.size(), c.n_islands);
    EXPECT_EQ(r.final_best.fitness, r.max_fitness(0));
}

TEST(Evolution, DeterministicAcrossThreadCounts) {
    const GpConfig c = small_config();
    const EvolutionReport a = run_dgp(c, AgentShape{}, small_setup(), 9, 1);
    const EvolutionReport b = run_dgp(c, AgentShape{}, small_setup(), 9, 3);
    ASSERT_EQ(a.stats.size(), b.stats.size());
    for (std::size_t i = 0; i < a.stats.size(); ++i) {
        EXPECT_EQ(a.stats[i].best_fitness, b.stats[i].best_fitness);
        EXPECT_EQ(a.stats[i].mean_fitness, b.stats[i].mean_fitness);
    }
    EXPECT_EQ(serialize_individual(a.final_best), serialize_individual(b.final_best));
    const EvolutionReport other = run_dgp(c, AgentShape{}, small_setup(), 10, 1);
    EXPECT_NE(serialize_individual(other.final_best) + std::to_string(other.stats[0].mean_fitness),
              serialize_individual(a.final_best) + std::to_string(a.stats[0].mean_fitness));
}

TEST(Evolution, MaxFitnessNeverDrops) {
    GpConfig c = small_config();
    c.n_generations = 8;
    const EvolutionReport r = run_dgp(c, AgentShape{}, small_setup(), 4);
    for (std::size_t g = 1; g <= c.n_generations; ++g) EXPECT_GE(r.max_fitness(g), r.max_fitness(g - 1));
    EXPECT_EQ(r.final_best.fitness, r.max_fitness(c.n_generations));
}

TEST(Evolution, IsolatedIslandsDoNotInteract) {
    auto foreign = [](const EvolutionReport& r) {
        std::size_t n = 0;
        for (std::size_t i = 0; i < r.final_islands.size(); ++i)
            for (const Individual& ind : r.final_islands[i]) n += ((ind.id >> 24) & 0xffff) != i ? 1 : 0;
        return n;
    };
    GpConfig c = small_config();
    c.migration_count = 0;
    const EvolutionReport a = run_dgp(c, AgentShape{}, small_setup(), 6);
    const EvolutionReport b = run_dgp(c, AgentShape{}, small_setup(), 6);
    EXPECT_EQ(foreign(a), 0u);
    for (std::size_t i = 0; i < a.stats.size(); ++i) {
        EXPECT_EQ(a.stats[i].island, b.stats[i].island);
        EXPECT_EQ(a.stats[i].best_fitness, b.stats[i].best_fitness);
    }
    c.migration_count = 2;
    c.migration_interval = 1;
    c.elitism_count = 3;
    EXPECT_GT(foreign(run_dgp(c, AgentShape{}, small_setup(), 6)), 0u);
}
