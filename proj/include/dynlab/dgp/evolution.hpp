#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "dynlab/dgp/individual.hpp"
#include "dynlab/environment.hpp"
#include "dynlab/noise.hpp"
#include "dynlab/rollout.hpp"
#include "dynlab/sde.hpp"

namespace dynlab::dgp {

/// Everything needed to score an individual against an environment.
struct FitnessSetup {
    std::shared_ptr<const Environment> env;
    SolverConfig solver{};
    ReturnConfig returns{0.0, 50.0};
    double penalty = -1e6;
    bool tanh_readout = false;
};

/// Evolved agent coupled to an environment: x = (z, s), z0 = 0.
/// Drift-only agent dz_i = f_i(z, y) dt; control u = g(z), raw unless
/// `tanh_readout`. Throws DimensionMismatch if a tree references a variable
/// outside the agent/observation dims or the environment has more than one
/// control.
ClosedLoop individual_to_system(const Individual& ind, std::shared_ptr<const Environment> env,
                                 bool tanh_readout = false);

RolloutRecord rollout_individual(const Individual& ind, const FitnessSetup& setup, SeedKey seed);

/// Identifier for a set of evaluation seeds (order-sensitive).
std::uint64_t seed_set_id(std::span<const SeedKey> seeds);

/// Mean return over one rollout per seed; a diverging rollout counts as
/// setup.penalty. Caches the value and the seed-set id on `ind`.
double evaluate_fitness(Individual& ind, const FitnessSetup& setup, std::span<const SeedKey> seeds);

/// Evaluation seeds shared by every individual of a generation.
std::vector<SeedKey> generation_seeds(std::uint64_t master_seed, std::size_t generation, std::size_t count);

/// Ordering used for elitism and tournaments: higher fitness, then fewer
/// nodes, then lower lineage id.
bool better(const Individual& a, const Individual& b);

/// Tournament without replacement among `tournament_size` members.
const Individual& tournament(std::span<const Individual> population, std::size_t tournament_size,
                             std::mt19937_64& rng);

/// Operator rates for island i: p_crossover and every mutation probability
/// scaled by 0.5 + i/(n-1), clamped to [0, 1]; a single island keeps the base rates.
GpConfig island_config(const GpConfig& base, std::size_t island);

/// Position of an individual in the run, used to derive lineage ids.
struct Lineage {
    std::size_t generation = 0;
    std::size_t island = 0;
};

std::uint64_t lineage_id(Lineage where, std::size_t index);

/// One generation on one island. Elites keep their cached fitness; every
/// other slot is filled by tournament selection, crossover (with probability
/// p_crossover) and mutation, then evaluated on `seeds`.
std::vector<Individual> evolve_generation(std::span<const Individual> population, const GpConfig& config,
                                          const AgentShape& shape, const FitnessSetup& setup,
                                          std::span<const SeedKey> seeds, std::mt19937_64& rng, Lineage where,
                                          std::size_t threads = 1);

/// Ring migration: island i sends copies of its migration_count best to
/// island i+1, replacing that island's worst. All emigrants are chosen
/// before any island is modified.
void migrate(std::vector<std::vector<Individual>>& islands, const GpConfig& config);

struct IslandStats {
    std::size_t generation = 0;
    std::size_t island = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
};

struct EvolutionReport {
    std::vector<IslandStats> stats;            // generation-major, island-minor
    std::vector<Individual> best_per_generation; // index = generation
    Individual final_best;
    std::vector<std::vector<Individual>> final_islands;

    double max_fitness(std::size_t generation) const;
};

/// Full island-model run; a pure function of its arguments.
EvolutionReport run_dgp(const GpConfig& config, const AgentShape& shape, const FitnessSetup& setup,
                        std::uint64_t master_seed, std::size_t threads = 1);

} // namespace dynlab::dgp
