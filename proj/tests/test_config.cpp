#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "dynlab/app/commands.hpp"
#include "dynlab/app/config.hpp"
#include "dynlab/errors.hpp"

using namespace dynlab;
using namespace dynlab::app;
using nlohmann::json;

TEST(Config, EmptyObjectGivesDefaults) {
    const ExperimentConfig c = config_from_json(json::object());
    EXPECT_EQ(c.master_seed, 0u);
    EXPECT_EQ(c.solver.method, SolverMethod::HeunStochastic);
    EXPECT_DOUBLE_EQ(c.solver.dt, 0.1);
    EXPECT_DOUBLE_EQ(c.sdi.gamma, 0.5);
    EXPECT_DOUBLE_EQ(c.sdi.epsilon, 0.1);
    EXPECT_DOUBLE_EQ(c.sdi.s0[0], 2.0);
    EXPECT_DOUBLE_EQ(c.weights.w_pos, 0.9);
    EXPECT_DOUBLE_EQ(c.weights.w_ctrl, 0.1);
    EXPECT_EQ(c.ctrnn_dims.neurons, 2u);
    EXPECT_DOUBLE_EQ(c.kappa, 0.01);
    EXPECT_DOUBLE_EQ(c.oua.lambda, 2.0);
    EXPECT_DOUBLE_EQ(c.oua.sigma, 0.1);
    EXPECT_DOUBLE_EQ(c.oua.eta, 5.0);
    EXPECT_DOUBLE_EQ(c.oua.rho, 2.0);
    EXPECT_EQ(c.gp.n_islands, 10u);
    EXPECT_EQ(c.gp.pop_size, 100u);
    EXPECT_EQ(c.gp.n_generations, 50u);
    EXPECT_DOUBLE_EQ(c.learn.returns.horizon, 1000.0);
    EXPECT_DOUBLE_EQ(c.evolve.returns.horizon, 50.0);
}

TEST(Config, ReadsNestedSections) {
    const json j = json::parse(R"({
        "master_seed": 12, "command": "learn",
        "solver": {"method": "euler_maruyama", "dt": 0.05, "record_stride": 2},
        "sdi": {"gamma": 0.25, "reward_weights": [0.5, 0.5]},
        "oua": {"eta": 0.0, "freeze_tau": true},
        "gp": {"n_islands": 4, "pop_size": 50, "max_nodes": 40, "tanh_readout": true},
        "learn": {"n_seeds": 3, "learning": false}
    })");
    const ExperimentConfig c = config_from_json(j);
    EXPECT_EQ(c.master_seed, 12u);
    EXPECT_EQ(c.solver.method, SolverMethod::EulerMaruyama);
    EXPECT_DOUBLE_EQ(c.solver.dt, 0.05);
    EXPECT_EQ(c.solver.record_stride, 2u);
    EXPECT_DOUBLE_EQ(c.sdi.gamma, 0.25);
    EXPECT_DOUBLE_EQ(c.weights.w_ctrl, 0.5);
    EXPECT_DOUBLE_EQ(c.oua.eta, 0.0);
    EXPECT_TRUE(c.oua.freeze_tau);
    EXPECT_EQ(c.gp.n_islands, 4u);
    EXPECT_EQ(c.gp.limits.max_nodes, 40u);
    EXPECT_TRUE(c.gp.tanh_readout);
    EXPECT_EQ(c.learn.n_seeds, 3u);
    EXPECT_FALSE(c.learn.learning);
}

TEST(Config, RejectsUnknownKeys) {
    try {
        config_from_json(json::parse(R"({"gp": {"bogus": 1}})"));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("gp.bogus"), std::string::npos);
    }
    EXPECT_THROW(config_from_json(json::parse(R"({"colour": "red"})")), ConfigError);
}

TEST(Config, RejectsWrongTypes) {
    EXPECT_THROW(config_from_json(json::parse(R"({"master_seed": -1})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"master_seed": 1.5})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"solver": {"dt": "small"}})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"solver": {"method": "rk4"}})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"sdi": {"s0": [1]}})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"gp": 3})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"learn": {"learning": 1}})")), ConfigError);
}

TEST(Config, RejectsInvalidValues) {
    EXPECT_THROW(config_from_json(json::parse(R"({"solver": {"dt": 0}})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"sdi": {"epsilon": -1}})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"ctrnn": {"neurons": 0}})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"learn": {"n_seeds": 0}})")), ConfigError);
}

TEST(Config, JsonRoundTrip) {
    ExperimentConfig c;
    c.master_seed = 99;
    c.solver.method = SolverMethod::EulerMaruyama;
    c.sdi.s0 = {1.0, -0.5};
    c.gp.const_init_range = {-2.0, 3.0};
    c.eval_expr.individual = "a.sexpr";
    c.eval_expr.n_env = 7;
    json j = config_to_json(c);
    j["command"] = "evolve";
    const ExperimentConfig back = config_from_json(j);
    EXPECT_EQ(config_to_json(back), config_to_json(c));
}

TEST(Config, LoadConfigErrors) {
    EXPECT_THROW(load_config("/nonexistent/dynlab.json"), ConfigError);
    const auto path = std::filesystem::temp_directory_path() / "dynlab_bad_config.json";
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    EXPECT_THROW(load_config(path), ConfigError);
    std::filesystem::remove(path);
}

TEST(Config, RunDirectoryAndOutRoot) {
    EXPECT_EQ(run_directory("out", "learn", 3), std::filesystem::path("out") / "learn-seed3");
    ExperimentConfig c;
    c.output_dir = "from_config";
    EXPECT_EQ(resolve_out_root(std::string("flag"), c), std::filesystem::path("flag"));
    EXPECT_EQ(resolve_out_root(std::nullopt, c), std::filesystem::path("from_config"));
}
