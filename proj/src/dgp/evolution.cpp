#include "dynlab/dgp/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dynlab/errors.hpp"
#include "dynlab/parallel.hpp"

namespace dynlab::dgp {

ClosedLoop individual_to_system(const Individual& ind, std::shared_ptr<const Environment> env,
                                 bool tanh_readout) {
    if (!env) throw std::invalid_argument("individual_to_system: null environment");
    const std::size_t k = ind.dim_state();
    const std::size_t m = env->dim_obs();
    if (k == 0) throw DimensionMismatch("individual has no state trees");
    if (env->dim_ctrl() != 1) throw DimensionMismatch("evolved agents drive a single control");
    const AgentShape shape{k, m};
    for (std::size_t s = 0; s < ind.tree_count(); ++s)
        if (!ind.slot(s).uses_only(shape.terminals_for(s)))
            throw DimensionMismatch("tree " + std::to_string(s + 1) + " references a variable outside the agent dims");

    InputSystem agent;
    agent.dim_state = k;
    agent.dim_noise = 0;
    agent.dim_input = m;
    agent.drift = [trees = ind.state_trees](std::span<const double> z, std::span<const double> y,
                                            std::span<double> dz) {
        for (std::size_t i = 0; i < trees.size(); ++i) dz[i] = trees[i].eval(z, y);
    };

    auto control_of = [g = ind.readout_tree, tanh_readout](std::span<const double> z) {
        const double u = g.eval(z, {});
        return tanh_readout ? std::tanh(u) : u;
    };

    ClosedLoop out;
    out.dynamics = couple(
        std::move(agent), environment_system(env),
        [env](std::span<const double> s, std::span<double> y) { env->observe(s, y); },
        [control_of](std::span<const double> z, std::span<double> u) { u[0] = control_of(z); });
    out.x0.assign(k, 0.0);
    const StateVector s0 = env->initial_state();
    out.x0.insert(out.x0.end(), s0.begin(), s0.end());
    out.tap.dim_ctrl = 1;
    out.tap.fn = [env, control_of, k](std::span<const double> x, std::span<double> u) {
        u[0] = control_of(x.first(k));
        return env->reward(x.subspan(k), u);
    };
    return out;
}

RolloutRecord rollout_individual(const Individual& ind, const FitnessSetup& setup, SeedKey seed) {
    return rollout(individual_to_system(ind, setup.env, setup.tanh_readout), setup.solver, setup.returns, seed,
                   DivergencePolicy{setup.penalty});
}

std::uint64_t seed_set_id(std::span<const SeedKey> seeds) {
    std::uint64_t h = mix64(seeds.size());
    for (const SeedKey& k : seeds) h = mix64(h ^ mix64(k.master_seed) ^ mix64(k.stream_id + 0x51ed));
    return h;
}

double evaluate_fitness(Individual& ind, const FitnessSetup& setup, std::span<const SeedKey> seeds) {
    if (seeds.empty()) throw std::invalid_argument("evaluate_fitness needs at least one seed");
    double total = 0.0;
    for (const SeedKey& seed : seeds) {
        const RolloutRecord rec = rollout_individual(ind, setup, seed);
        total += std::isfinite(rec.return_) ? rec.return_ : setup.penalty;
    }
    double fitness = total / static_cast<double>(seeds.size());
    if (!std::isfinite(fitness) || fitness < setup.penalty) fitness = setup.penalty;
    ind.fitness = fitness;
    ind.seed_set_id = seed_set_id(seeds);
    return fitness;
}

std::vector<SeedKey> generation_seeds(std::uint64_t master_seed, std::size_t generation, std::size_t count) {
    const SeedKey base = SeedKey{master_seed, 0x5eedULL}.child(generation);
    std::vector<SeedKey> seeds;
    seeds.reserve(count);
    for (std::size_t r = 0; r < count; ++r) seeds.push_back(base.child(r));
    return seeds;
}

bool better(const Individual& a, const Individual& b) {
    const double fa = a.fitness.value_or(-std::numeric_limits<double>::infinity());
    const double fb = b.fitness.value_or(-std::numeric_limits<double>::infinity());
    if (fa != fb) return fa > fb;
    const std::size_t na = a.node_count(), nb = b.node_count();
    if (na != nb) return na < nb;
    return a.id < b.id;
}

const Individual& tournament(std::span<const Individual> population, std::size_t tournament_size,
                             std::mt19937_64& rng) {
    const std::size_t n = population.size();
    if (n == 0) throw std::invalid_argument("tournament on an empty population");
    const std::size_t t = std::min(tournament_size, n);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::size_t best = n;
    for (std::size_t j = 0; j < t; ++j) {
        const std::size_t pick = std::uniform_int_distribution<std::size_t>(j, n - 1)(rng);
        std::swap(idx[j], idx[pick]);
        if (best == n || better(population[idx[j]], population[best])) best = idx[j];
    }
    return population[best];
}

GpConfig island_config(const GpConfig& base, std::size_t island) {
    GpConfig c = base;
    const double scale =
        base.n_islands > 1 ? 0.5 + static_cast<double>(island) / static_cast<double>(base.n_islands - 1) : 1.0;
    auto scaled = [scale](double p) { return std::clamp(p * scale, 0.0, 1.0); };
    c.p_crossover = scaled(base.p_crossover);
    c.p_mutate_subtree = scaled(base.p_mutate_subtree);
    c.p_mutate_point = scaled(base.p_mutate_point);
    c.p_mutate_const = scaled(base.p_mutate_const);
    return c;
}

std::uint64_t lineage_id(Lineage where, std::size_t index) {
    return (static_cast<std::uint64_t>(where.generation) << 40) | (static_cast<std::uint64_t>(where.island) << 24) |
           static_cast<std::uint64_t>(index);
}

namespace {

std::vector<std::size_t> ranked(std::span<const Individual> pop) {
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return better(pop[a], pop[b]); });
    return order;
}

void evaluate_range(std::vector<Individual>& pop, std::size_t first, const FitnessSetup& setup,
                    std::span<const SeedKey> seeds, std::size_t threads) {
    parallel_for(pop.size() - first, threads,
                 [&](std::size_t i) { evaluate_fitness(pop[first + i], setup, seeds); });
}

} // namespace

std::vector<Individual> evolve_generation(std::span<const Individual> population, const GpConfig& config,
                                          const AgentShape& shape, const FitnessSetup& setup,
                                          std::span<const SeedKey> seeds, std::mt19937_64& rng, Lineage where,
                                          std::size_t threads) {
    if (population.size() != config.pop_size)
        throw std::invalid_argument("population size does not match pop_size");
    if (config.elitism_count >= config.pop_size) return {population.begin(), population.end()};

    const std::vector<std::size_t> order = ranked(population);
    std::vector<Individual> next;
    next.reserve(config.pop_size);
    for (std::size_t e = 0; e < config.elitism_count; ++e) next.push_back(population[order[e]]);

    std::uniform_real_distribution<double> coin(0.0, 1.0);
    while (next.size() < config.pop_size) {
        const Individual& p1 = tournament(population, config.tournament_size, rng);
        const Individual& p2 = tournament(population, config.tournament_size, rng);
        auto children = coin(rng) < config.p_crossover ? crossover(p1, p2, config, rng)
                                                       : std::pair<Individual, Individual>{p1, p2};
        for (Individual* child : {&children.first, &children.second}) {
            if (next.size() >= config.pop_size) break;
            Individual c = mutate(*child, config, shape, rng);
            c.fitness.reset();
            c.id = lineage_id(where, next.size());
            next.push_back(std::move(c));
        }
    }
    evaluate_range(next, config.elitism_count, setup, seeds, threads);
    return next;
}

void migrate(std::vector<std::vector<Individual>>& islands, const GpConfig& config) {
    const std::size_t n = islands.size();
    if (n < 2 || config.migration_count == 0) return;
    std::vector<std::vector<Individual>> emigrants(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<std::size_t> order = ranked(islands[i]);
        const std::size_t count = std::min(config.migration_count, order.size());
        for (std::size_t j = 0; j < count; ++j) emigrants[i].push_back(islands[i][order[j]]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto& dest = islands[(i + 1) % n];
        const std::vector<std::size_t> order = ranked(dest);
        const auto& incoming = emigrants[i];
        for (std::size_t j = 0; j < incoming.size() && j < order.size(); ++j)
            dest[order[order.size() - 1 - j]] = incoming[j];
    }
}

double EvolutionReport::max_fitness(std::size_t generation) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const IslandStats& s : stats)
        if (s.generation == generation) best = std::max(best, s.best_fitness);
    return best;
}

namespace {

void record(EvolutionReport& report, const std::vector<std::vector<Individual>>& islands, std::size_t generation) {
    const Individual* overall = nullptr;
    for (std::size_t i = 0; i < islands.size(); ++i) {
        const auto& pop = islands[i];
        const Individual* best = &pop.front();
        double sum = 0.0;
        for (const Individual& ind : pop) {
            if (better(ind, *best)) best = &ind;
            sum += ind.fitness.value_or(0.0);
        }
        report.stats.push_back({generation, i, best->fitness.value_or(0.0), sum / static_cast<double>(pop.size())});
        if (!overall || better(*best, *overall)) overall = best;
    }
    report.best_per_generation.push_back(*overall);
}

} // namespace

EvolutionReport run_dgp(const GpConfig& config, const AgentShape& shape, const FitnessSetup& setup,
                        std::uint64_t master_seed, std::size_t threads) {
    config.validate();
    const std::size_t n_islands = config.n_islands;
    std::vector<std::vector<Individual>> islands(n_islands);
    for (std::size_t i = 0; i < n_islands; ++i) {
        std::mt19937_64 rng = make_engine(SeedKey{master_seed, 0x1417ULL}.child(i));
        islands[i].reserve(config.pop_size);
        for (std::size_t j = 0; j < config.pop_size; ++j) {
            Individual ind = random_individual(config, shape, rng);
            ind.id = lineage_id({0, i}, j);
            islands[i].push_back(std::move(ind));
        }
    }

    const auto seeds0 = generation_seeds(master_seed, 0, config.rollouts_per_eval);
    parallel_for(n_islands * config.pop_size, threads, [&](std::size_t t) {
        evaluate_fitness(islands[t / config.pop_size][t % config.pop_size], setup, seeds0);
    });

    EvolutionReport report;
    record(report, islands, 0);
    for (std::size_t g = 1; g <= config.n_generations; ++g) {
        const auto seeds = generation_seeds(master_seed, g, config.rollouts_per_eval);
        for (std::size_t i = 0; i < n_islands; ++i) {
            std::mt19937_64 rng = make_engine(SeedKey{master_seed, 0x0e70ULL}.child(g).child(i));
            islands[i] = evolve_generation(islands[i], island_config(config, i), shape, setup, seeds, rng,
                                           {g, i}, threads);
        }
        if (g % config.migration_interval == 0) migrate(islands, config);
        record(report, islands, g);
    }
    report.final_best = report.best_per_generation.back();
    report.final_islands = std::move(islands);
    return report;
}

} // namespace dynlab::dgp
