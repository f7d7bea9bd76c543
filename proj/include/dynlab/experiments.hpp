#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "dynlab/ctrnn.hpp"
#include "dynlab/dgp/individual.hpp"
#include "dynlab/environment.hpp"
#include "dynlab/noise.hpp"
#include "dynlab/oua.hpp"
#include "dynlab/rollout.hpp"
#include "dynlab/sde.hpp"

namespace dynlab {

/// CTRNN controller driving an environment: x = (alpha, s), alpha0 = 0.
ClosedLoop ctrnn_closed_loop(const CtrnnParams& params, std::shared_ptr<const Environment> env);

// Averaging returns over environments.

/// Return of one episode of a fixed agent in the given environment.
using EpisodeFn = std::function<double(std::shared_ptr<const Environment> env, SeedKey seed)>;

EpisodeFn ctrnn_episode(CtrnnParams params, SolverConfig solver, ReturnConfig returns,
                        DivergencePolicy policy = {});
EpisodeFn individual_episode(dgp::Individual ind, SolverConfig solver, ReturnConfig returns, double penalty,
                             bool tanh_readout = false);

struct EnvironmentScore {
    SdiParams params;
    std::vector<double> returns; // one per rollout
    double mean = 0.0;
};

struct IntelligenceReport {
    double score = 0.0; // mean over environments of the per-environment mean return
    std::vector<EnvironmentScore> per_env;
};

/// Monte-Carlo estimate of the expected return over sampled environments.
/// Environment e is drawn from `dist` with its own stream; rollout r in it
/// uses seed (master, e, r), so two agents scored with the same master seed
/// face the same environments and the same noise.
IntelligenceReport evaluate_intelligence(const EpisodeFn& episode, const SdiDistribution& dist, std::size_t n_env,
                                         std::size_t rollouts_per_env, std::uint64_t master_seed,
                                         std::size_t threads = 1);

// Learning versus no learning.

struct LearningSetup {
    CtrnnDims dims{};
    double kappa = 0.01;
    SdiParams sdi{};
    RewardWeights weights{};
    OuaHyper hyper{};
    SolverConfig solver{};
    ReturnConfig returns{0.0, 1000.0};

    void validate() const;
};

/// Hyper-parameters with learning switched off (eta = sigma = 0).
OuaHyper without_learning(OuaHyper h);

struct ArmResult {
    double return_ = 0.0; // -inf when the run diverged
    double final_abs_s1 = 0.0; // mean |s1| over the last 20% of the horizon
    bool diverged = false;
    double diverged_at = 0.0;
    std::size_t tau_clamped_steps = 0;
};

struct SeedComparison {
    std::uint64_t seed = 0;
    ArmResult learning;
    ArmResult baseline;
};

/// Recorded run of one arm with the learning-rule quantities at every step.
struct LearningTrace {
    LearningLayout layout;
    RolloutRecord record;
    std::vector<double> nu;
    std::vector<double> delta;

    double position(std::size_t i) const { return record.trajectory.states[i][0]; }
    double velocity(std::size_t i) const { return record.trajectory.states[i][1]; }
    std::span<const double> alpha(std::size_t i) const;
    std::span<const double> theta(std::size_t i) const;
    std::span<const double> mu(std::size_t i) const;
};

struct ComparisonReport {
    std::vector<SeedComparison> seeds;
    LearningTrace learning_trace; // first seed
    LearningTrace baseline_trace; // first seed

    std::size_t learning_wins() const;
    std::size_t diverged_runs() const;
    double median_return(bool learning) const;
    double median_final_abs_s1(bool learning) const;
};

/// Paired runs per seed: both arms share the environment and neuron noise
/// streams and start from the same zero-initialised network. The baseline
/// arm runs with eta = sigma = 0. With `learning_on` false, or eta = 0, the
/// learning arm is the baseline too. Divergence is recorded, not thrown.
ComparisonReport compare_learning(const LearningSetup& setup, std::span<const std::uint64_t> seeds,
                                  bool learning_on = true, std::size_t threads = 1);

/// Mean |s1| over recorded times t >= 0.8 T.
double final_window_abs_position(const Trajectory& traj, double horizon);

} // namespace dynlab
