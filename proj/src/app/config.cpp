#include "dynlab/app/config.hpp"

#include <array>
#include <fstream>
#include <set>
#include <stdexcept>

#include "dynlab/errors.hpp"

namespace dynlab::app {

using nlohmann::json;

namespace {

class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw ConfigError("'" + name_ + "' must be an object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    const json& sub(const char* key) {
        seen_.insert(key);
        return j_.at(key);
    }

    std::string path(const char* key) const { return name_.empty() ? key : name_ + "." + key; }

    void get(const char* key, double& out) {
        if (!take(key)) return;
        const json& v = j_.at(key);
        if (!v.is_number()) fail(key, "a number");
        out = v.get<double>();
    }

    void get(const char* key, std::size_t& out) {
        if (!take(key)) return;
        const json& v = j_.at(key);
        if (!v.is_number_unsigned()) fail(key, "a non-negative integer");
        out = v.get<std::size_t>();
    }

    void get(const char* key, bool& out) {
        if (!take(key)) return;
        const json& v = j_.at(key);
        if (!v.is_boolean()) fail(key, "a boolean");
        out = v.get<bool>();
    }

    void get(const char* key, std::string& out) {
        if (!take(key)) return;
        const json& v = j_.at(key);
        if (!v.is_string()) fail(key, "a string");
        out = v.get<std::string>();
    }

    void get(const char* key, std::array<double, 2>& out) {
        if (!take(key)) return;
        const json& v = j_.at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) fail(key, "a pair of numbers");
        out = {v[0].get<double>(), v[1].get<double>()};
    }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) throw ConfigError("unknown key '" + path(key.c_str()) + "'");
    }

private:
    bool take(const char* key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    [[noreturn]] void fail(const char* key, const char* expected) const {
        throw ConfigError("'" + path(key) + "' must be " + expected);
    }

    const json& j_;
    std::string name_;
    std::set<std::string, std::less<>> seen_;
};

void read_returns(Section& s, ReturnConfig& rc) {
    s.get("horizon", rc.horizon);
    s.get("discount_rate", rc.discount_rate);
}

const char* method_name(SolverMethod m) {
    return m == SolverMethod::EulerMaruyama ? "euler_maruyama" : "heun";
}

template <typename Fn>
void section(Section& top, const char* key, Fn&& fn) {
    if (!top.has(key)) return;
    Section s(top.sub(key), key);
    fn(s);
    s.finish();
}

} // namespace

void ExperimentConfig::validate() const {
    auto check = [](auto&& fn, const char* where) {
        try {
            fn();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string(where) + ": " + e.what());
        }
    };
    check([&] { solver.validate(); }, "solver");
    check([&] { sdi.validate(); }, "sdi");
    check([&] { weights.validate(); }, "sdi.reward_weights");
    check([&] { oua.validate(); }, "oua");
    check([&] { gp.validate(); }, "gp");
    check([&] { simulate.returns.validate(); }, "simulate");
    check([&] { learn.returns.validate(); }, "learn");
    check([&] { evolve.returns.validate(); }, "evolve");
    check([&] { eval_expr.returns.validate(); }, "eval_expr");
    if (ctrnn_dims.neurons == 0) throw ConfigError("ctrnn.neurons must be at least 1");
    if (!(kappa >= 0.0)) throw ConfigError("ctrnn.kappa must be non-negative");
    if (learn.n_seeds == 0) throw ConfigError("learn.n_seeds must be at least 1");
    if (eval_expr.rollouts == 0) throw ConfigError("eval_expr.rollouts must be at least 1");
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    try {
        Section top(j, "");
        top.get("master_seed", c.master_seed);
        top.get("output_dir", c.output_dir);
        std::string command; // written by manifests, informational only
        top.get("command", command);

        section(top, "solver", [&](Section& s) {
            std::string method = method_name(c.solver.method);
            s.get("method", method);
            if (method == "heun") c.solver.method = SolverMethod::HeunStochastic;
            else if (method == "euler_maruyama") c.solver.method = SolverMethod::EulerMaruyama;
            else throw ConfigError("solver.method must be \"heun\" or \"euler_maruyama\"");
            s.get("dt", c.solver.dt);
            s.get("record_stride", c.solver.record_stride);
        });
        section(top, "sdi", [&](Section& s) {
            s.get("gamma", c.sdi.gamma);
            s.get("epsilon", c.sdi.epsilon);
            s.get("s0", c.sdi.s0);
            std::array<double, 2> w{c.weights.w_pos, c.weights.w_ctrl};
            s.get("reward_weights", w);
            c.weights = {w[0], w[1]};
        });
        section(top, "ctrnn", [&](Section& s) {
            s.get("neurons", c.ctrnn_dims.neurons);
            s.get("kappa", c.kappa);
        });
        section(top, "oua", [&](Section& s) {
            s.get("lambda", c.oua.lambda);
            s.get("sigma", c.oua.sigma);
            s.get("eta", c.oua.eta);
            s.get("rho", c.oua.rho);
            s.get("freeze_tau", c.oua.freeze_tau);
            s.get("tau_min", c.oua.tau_min);
        });
        section(top, "gp", [&](Section& s) {
            dgp::GpConfig& g = c.gp;
            s.get("n_islands", g.n_islands);
            s.get("pop_size", g.pop_size);
            s.get("n_generations", g.n_generations);
            s.get("tournament_size", g.tournament_size);
            s.get("p_crossover", g.p_crossover);
            s.get("p_mutate_subtree", g.p_mutate_subtree);
            s.get("p_mutate_point", g.p_mutate_point);
            s.get("p_mutate_const", g.p_mutate_const);
            s.get("const_jitter_std", g.const_jitter_std);
            s.get("elitism_count", g.elitism_count);
            s.get("migration_interval", g.migration_interval);
            s.get("migration_count", g.migration_count);
            s.get("const_init_range", g.const_init_range);
            s.get("max_depth", g.limits.max_depth);
            s.get("max_nodes", g.limits.max_nodes);
            s.get("init_depth", g.init_depth);
            s.get("rollouts_per_eval", g.rollouts_per_eval);
            s.get("penalty_fitness", g.penalty_fitness);
            s.get("tanh_readout", g.tanh_readout);
        });
        section(top, "simulate", [&](Section& s) { read_returns(s, c.simulate.returns); });
        section(top, "learn", [&](Section& s) {
            read_returns(s, c.learn.returns);
            s.get("n_seeds", c.learn.n_seeds);
            s.get("learning", c.learn.learning);
        });
        section(top, "evolve", [&](Section& s) { read_returns(s, c.evolve.returns); });
        section(top, "eval_expr", [&](Section& s) {
            read_returns(s, c.eval_expr.returns);
            s.get("individual", c.eval_expr.individual);
            s.get("rollouts", c.eval_expr.rollouts);
            s.get("n_env", c.eval_expr.n_env);
        });
        top.finish();
    } catch (const json::exception& e) {
        throw ConfigError(e.what());
    }
    c.validate();
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    auto returns = [](const ReturnConfig& rc) {
        return json{{"horizon", rc.horizon}, {"discount_rate", rc.discount_rate}};
    };
    const dgp::GpConfig& g = c.gp;
    json j;
    j["master_seed"] = c.master_seed;
    j["output_dir"] = c.output_dir;
    j["solver"] = {{"method", method_name(c.solver.method)},
                   {"dt", c.solver.dt},
                   {"record_stride", c.solver.record_stride}};
    j["sdi"] = {{"gamma", c.sdi.gamma},
                {"epsilon", c.sdi.epsilon},
                {"s0", c.sdi.s0},
                {"reward_weights", {c.weights.w_pos, c.weights.w_ctrl}}};
    j["ctrnn"] = {{"neurons", c.ctrnn_dims.neurons}, {"kappa", c.kappa}};
    j["oua"] = {{"lambda", c.oua.lambda}, {"sigma", c.oua.sigma},         {"eta", c.oua.eta},
                {"rho", c.oua.rho},       {"freeze_tau", c.oua.freeze_tau}, {"tau_min", c.oua.tau_min}};
    j["gp"] = {{"n_islands", g.n_islands},
               {"pop_size", g.pop_size},
               {"n_generations", g.n_generations},
               {"tournament_size", g.tournament_size},
               {"p_crossover", g.p_crossover},
               {"p_mutate_subtree", g.p_mutate_subtree},
               {"p_mutate_point", g.p_mutate_point},
               {"p_mutate_const", g.p_mutate_const},
               {"const_jitter_std", g.const_jitter_std},
               {"elitism_count", g.elitism_count},
               {"migration_interval", g.migration_interval},
               {"migration_count", g.migration_count},
               {"const_init_range", g.const_init_range},
               {"max_depth", g.limits.max_depth},
               {"max_nodes", g.limits.max_nodes},
               {"init_depth", g.init_depth},
               {"rollouts_per_eval", g.rollouts_per_eval},
               {"penalty_fitness", g.penalty_fitness},
               {"tanh_readout", g.tanh_readout}};
    j["simulate"] = returns(c.simulate.returns);
    j["learn"] = returns(c.learn.returns);
    j["learn"]["n_seeds"] = c.learn.n_seeds;
    j["learn"]["learning"] = c.learn.learning;
    j["evolve"] = returns(c.evolve.returns);
    j["eval_expr"] = returns(c.eval_expr.returns);
    j["eval_expr"]["individual"] = c.eval_expr.individual;
    j["eval_expr"]["rollouts"] = c.eval_expr.rollouts;
    j["eval_expr"]["n_env"] = c.eval_expr.n_env;
    return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

} // namespace dynlab::app
