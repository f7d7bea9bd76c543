#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "dynlab/dgp/expr.hpp"

namespace dynlab::dgp {

struct GpConfig {
    std::size_t n_islands = 10;
    std::size_t pop_size = 100;
    std::size_t n_generations = 50;
    std::size_t tournament_size = 5;
    double p_crossover = 0.7;
    double p_mutate_subtree = 0.15;
    double p_mutate_point = 0.1;
    double p_mutate_const = 0.05;
    double const_jitter_std = 0.5;
    std::size_t elitism_count = 1;
    std::size_t migration_interval = 10;
    std::size_t migration_count = 2;
    std::array<double, 2> const_init_range{-5.0, 5.0};
    TreeLimits limits{};
    std::size_t init_depth = 4; // ramped half-and-half draws depths in [1, init_depth]
    std::size_t rollouts_per_eval = 4;
    double penalty_fitness = -1e6;
    bool tanh_readout = false;

    void validate() const;
};

/// Multitree agent: one state equation per internal variable plus a readout.
struct Individual {
    std::vector<ExprTree> state_trees; // f_1 .. f_k over (z, y)
    ExprTree readout_tree;             // g over z only
    std::optional<double> fitness;
    std::uint64_t seed_set_id = 0; // identifies the eval seeds behind `fitness`
    std::uint64_t id = 0;

    std::size_t dim_state() const noexcept { return state_trees.size(); }
    std::size_t tree_count() const noexcept { return state_trees.size() + 1; }
    ExprTree& slot(std::size_t i) { return i < state_trees.size() ? state_trees[i] : readout_tree; }
    const ExprTree& slot(std::size_t i) const {
        return i < state_trees.size() ? state_trees[i] : readout_tree;
    }
    std::size_t node_count() const;

    /// Same trees (fitness and lineage ignored).
    bool same_genome(const Individual& other) const;
};

/// Agent shape: k internal states, m observations.
struct AgentShape {
    std::size_t dim_state = 2;
    std::size_t dim_obs = 2;

    TerminalSet terminals_for(std::size_t slot) const {
        return slot < dim_state ? TerminalSet{dim_state, dim_obs} : TerminalSet{dim_state, 0};
    }
};

/// Every tree within limits and using only its slot's terminals.
bool is_valid(const Individual& ind, const AgentShape& shape, const TreeLimits& limits);

/// All trees Const(0): inert agent with zero control.
Individual null_individual(const AgentShape& shape);

enum class GrowMethod { Grow, Full };

/// Ramped half-and-half: depth uniform in [1, depth_budget], grow or full
/// with equal probability. Trees over the node cap are redrawn with `grow`.
ExprTree random_tree(const GpConfig& config, const TerminalSet& terms, std::mt19937_64& rng,
                     std::size_t depth_budget);
ExprTree random_tree(const GpConfig& config, const TerminalSet& terms, std::mt19937_64& rng,
                     std::size_t depth, GrowMethod method);

Individual random_individual(const GpConfig& config, const AgentShape& shape, std::mt19937_64& rng);

/// Swaps uniformly chosen subtrees within one uniformly chosen tree slot.
/// If either child would break the limits, both parents come back unchanged.
/// Offspring carry no fitness.
std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b, const GpConfig& config,
                                            std::mt19937_64& rng);

/// At most one of subtree replacement, point mutation or constant jitter,
/// chosen with the configured probabilities. A result over the limits is
/// discarded (the input is returned). Fitness is cleared only when the genome
/// changes.
Individual mutate(const Individual& a, const GpConfig& config, const AgentShape& shape, std::mt19937_64& rng);

} // namespace dynlab::dgp
