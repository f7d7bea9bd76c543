#include "dynlab/dgp/individual.hpp"

#include <algorithm>
#include <stdexcept>

namespace dynlab::dgp {

void GpConfig::validate() const {
    auto prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
    };
    prob(p_crossover, "p_crossover");
    prob(p_mutate_subtree, "p_mutate_subtree");
    prob(p_mutate_point, "p_mutate_point");
    prob(p_mutate_const, "p_mutate_const");
    if (n_islands < 1 || pop_size < 1 || tournament_size < 1 || rollouts_per_eval < 1)
        throw std::invalid_argument("island count, population, tournament and rollout sizes must be >= 1");
    if (tournament_size > pop_size) throw std::invalid_argument("tournament_size exceeds pop_size");
    if (elitism_count > pop_size) throw std::invalid_argument("elitism_count exceeds pop_size");
    if (migration_count >= pop_size && n_islands > 1 && migration_count > 0)
        throw std::invalid_argument("migration_count must be smaller than pop_size");
    if (migration_interval < 1) throw std::invalid_argument("migration_interval must be >= 1");
    if (!(const_init_range[0] <= const_init_range[1])) throw std::invalid_argument("const_init_range is empty");
    if (!(const_jitter_std >= 0.0)) throw std::invalid_argument("const_jitter_std must be non-negative");
    if (limits.max_depth < 1 || limits.max_nodes < 1) throw std::invalid_argument("tree limits must be >= 1");
    if (init_depth < 1) throw std::invalid_argument("init_depth must be >= 1");
}

std::size_t Individual::node_count() const {
    std::size_t n = readout_tree.size();
    for (const auto& t : state_trees) n += t.size();
    return n;
}

bool Individual::same_genome(const Individual& other) const {
    return state_trees == other.state_trees && readout_tree == other.readout_tree;
}

bool is_valid(const Individual& ind, const AgentShape& shape, const TreeLimits& limits) {
    if (ind.state_trees.size() != shape.dim_state) return false;
    for (std::size_t s = 0; s < ind.tree_count(); ++s) {
        const ExprTree& t = ind.slot(s);
        if (!t.within(limits) || !t.uses_only(shape.terminals_for(s))) return false;
    }
    return true;
}

Individual null_individual(const AgentShape& shape) {
    Individual ind;
    ind.state_trees.assign(shape.dim_state, ExprTree());
    ind.readout_tree = ExprTree();
    return ind;
}

namespace {

double uniform01(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

Node random_leaf(const GpConfig& config, const TerminalSet& terms, std::mt19937_64& rng) {
    const std::size_t n_vars = terms.n_z + terms.n_y;
    if (n_vars == 0 || uniform01(rng) < 0.5) {
        const auto [lo, hi] = config.const_init_range;
        return Node::constant(lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng));
    }
    const std::size_t v = uniform_index(rng, n_vars);
    return v < terms.n_z ? Node::z(static_cast<std::uint32_t>(v))
                         : Node::y(static_cast<std::uint32_t>(v - terms.n_z));
}

NodeKind random_function(std::mt19937_64& rng) {
    static constexpr NodeKind kinds[] = {NodeKind::Add, NodeKind::Sub, NodeKind::Mul};
    return kinds[uniform_index(rng, 3)];
}

void build(const GpConfig& config, const TerminalSet& terms, std::mt19937_64& rng, std::size_t depth,
           GrowMethod method, bool root, std::vector<Node>& out) {
    bool leaf = depth <= 1;
    if (!leaf && method == GrowMethod::Grow && !root) leaf = uniform01(rng) < 0.5;
    if (leaf) {
        out.push_back(random_leaf(config, terms, rng));
        return;
    }
    out.push_back({random_function(rng), 0, 0.0});
    build(config, terms, rng, depth - 1, method, false, out);
    build(config, terms, rng, depth - 1, method, false, out);
}

} // namespace

ExprTree random_tree(const GpConfig& config, const TerminalSet& terms, std::mt19937_64& rng, std::size_t depth,
                     GrowMethod method) {
    std::vector<Node> nodes;
    build(config, terms, rng, std::max<std::size_t>(depth, 1), method, true, nodes);
    return ExprTree(std::move(nodes));
}

ExprTree random_tree(const GpConfig& config, const TerminalSet& terms, std::mt19937_64& rng,
                     std::size_t depth_budget) {
    const std::size_t budget = std::clamp<std::size_t>(depth_budget, 1, config.limits.max_depth);
    const std::size_t depth = 1 + uniform_index(rng, budget);
    GrowMethod method = uniform01(rng) < 0.5 ? GrowMethod::Grow : GrowMethod::Full;
    for (int attempt = 0; attempt < 16; ++attempt) {
        ExprTree t = random_tree(config, terms, rng, depth, method);
        if (t.within(config.limits)) return t;
        method = GrowMethod::Grow;
    }
    return ExprTree::leaf(random_leaf(config, terms, rng));
}

Individual random_individual(const GpConfig& config, const AgentShape& shape, std::mt19937_64& rng) {
    Individual ind;
    ind.state_trees.reserve(shape.dim_state);
    for (std::size_t s = 0; s < shape.dim_state; ++s)
        ind.state_trees.push_back(random_tree(config, shape.terminals_for(s), rng, config.init_depth));
    ind.readout_tree = random_tree(config, shape.terminals_for(shape.dim_state), rng, config.init_depth);
    return ind;
}

std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b, const GpConfig& config,
                                            std::mt19937_64& rng) {
    if (a.tree_count() != b.tree_count()) throw std::invalid_argument("crossover parents differ in tree count");
    const std::size_t s = uniform_index(rng, a.tree_count());
    const ExprTree& ta = a.slot(s);
    const ExprTree& tb = b.slot(s);
    const std::size_t pa = uniform_index(rng, ta.size());
    const std::size_t pb = uniform_index(rng, tb.size());

    ExprTree ca = ta.replace_subtree(pa, tb.subtree(pb));
    ExprTree cb = tb.replace_subtree(pb, ta.subtree(pa));
    Individual x = a, y = b;
    if (ca.within(config.limits) && cb.within(config.limits)) {
        x.slot(s) = std::move(ca);
        y.slot(s) = std::move(cb);
    }
    x.fitness.reset();
    y.fitness.reset();
    return {std::move(x), std::move(y)};
}

Individual mutate(const Individual& a, const GpConfig& config, const AgentShape& shape, std::mt19937_64& rng) {
    const double u = uniform01(rng);
    const double t_subtree = config.p_mutate_subtree;
    const double t_point = t_subtree + config.p_mutate_point;
    const double t_const = t_point + config.p_mutate_const;
    if (u >= t_const) return a;

    Individual out = a;
    if (u < t_point) {
        const std::size_t s = uniform_index(rng, a.tree_count());
        const ExprTree& tree = a.slot(s);
        const TerminalSet terms = shape.terminals_for(s);
        const std::size_t pos = uniform_index(rng, tree.size());
        ExprTree changed;
        if (u < t_subtree) {
            const std::size_t level = tree.level_of(pos);
            const std::size_t room = config.limits.max_depth + 1 - level;
            const ExprTree repl = random_tree(config, terms, rng, std::min(config.init_depth, room));
            changed = tree.replace_subtree(pos, repl);
            if (!changed.within(config.limits)) return a;
        } else {
            const Node& old = tree.node(pos);
            Node next = old;
            if (is_binary(old.kind)) {
                while (next.kind == old.kind) next.kind = random_function(rng);
            } else {
                for (int attempt = 0; attempt < 8 && next == old; ++attempt) next = random_leaf(config, terms, rng);
            }
            changed = tree.with_node(pos, next);
        }
        out.slot(s) = std::move(changed);
    } else {
        std::vector<std::pair<std::size_t, std::size_t>> consts;
        for (std::size_t s = 0; s < a.tree_count(); ++s) {
            const auto nodes = a.slot(s).nodes();
            for (std::size_t i = 0; i < nodes.size(); ++i)
                if (nodes[i].kind == NodeKind::Const) consts.emplace_back(s, i);
        }
        if (consts.empty()) return a;
        const auto [s, pos] = consts[uniform_index(rng, consts.size())];
        Node n = a.slot(s).node(pos);
        n.value += std::normal_distribution<double>(0.0, config.const_jitter_std)(rng);
        out.slot(s) = a.slot(s).with_node(pos, n);
    }
    if (!out.same_genome(a)) out.fitness.reset();
    return out;
}

} // namespace dynlab::dgp
