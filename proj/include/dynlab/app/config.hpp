#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "dynlab/ctrnn.hpp"
#include "dynlab/dgp/individual.hpp"
#include "dynlab/environment.hpp"
#include "dynlab/oua.hpp"
#include "dynlab/rollout.hpp"
#include "dynlab/sde.hpp"

namespace dynlab::app {

struct SimulateSection {
    ReturnConfig returns{0.0, 1000.0};
};

struct LearnSection {
    ReturnConfig returns{0.0, 1000.0};
    std::size_t n_seeds = 10; // seeds master_seed, master_seed + 1, ...
    bool learning = true;
};

struct EvolveSection {
    ReturnConfig returns{0.0, 50.0};
};

struct EvalExprSection {
    ReturnConfig returns{0.0, 50.0};
    std::string individual; // path to an s-expression file
    std::size_t rollouts = 20;
    std::size_t n_env = 0; // > 0 also scores both agents over sampled environments
};

/// Resolved configuration for every command. Missing keys take the defaults
/// below; unknown keys are rejected.
struct ExperimentConfig {
    std::uint64_t master_seed = 0;
    std::string output_dir; // empty: DYNLAB_OUT, then "runs"
    SolverConfig solver{};
    SdiParams sdi{};
    RewardWeights weights{};
    CtrnnDims ctrnn_dims{};
    double kappa = 0.01;
    OuaHyper oua{};
    dgp::GpConfig gp{};
    SimulateSection simulate{};
    LearnSection learn{};
    EvolveSection evolve{};
    EvalExprSection eval_expr{};

    void validate() const;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);

ExperimentConfig load_config(const std::filesystem::path& path);

} // namespace dynlab::app
