#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynlab/noise.hpp"
#include "dynlab/sde.hpp"

namespace dynlab {

/// Return functional: exponentially discounted cumulative reward over [0, T].
struct ReturnConfig {
    double discount_rate = 0.0; // not the OU rate of the learning rule
    double horizon = 1000.0;

    void validate() const;
};

/// Left-rectangle quadrature  sum_i exp(-discount t_i) r_i (t_{i+1} - t_i)
/// over the recorded grid; the reward at the final point closes the horizon
/// and carries no weight.
double compute_return(std::span<const double> rewards, std::span<const double> times,
                      const ReturnConfig& rc);

/// Computes the control(s) and instantaneous reward at a joint state.
/// Writes the controls into `u` and returns r.
struct RewardTap {
    std::size_t dim_ctrl = 1;
    std::function<double(std::span<const double> x, std::span<double> u)> fn;
};

/// Agent and environment coupled into one system, with the initial joint
/// state and the control/reward readout.
struct ClosedLoop {
    SystemDynamics dynamics;
    StateVector x0;
    RewardTap tap;
};

struct RolloutRecord {
    Trajectory trajectory;
    std::vector<std::vector<double>> controls;
    std::vector<double> rewards;
    double return_ = 0.0;
    SeedKey seed;
    bool diverged = false;
    double diverged_at = 0.0;
    std::string env_description;
    std::uint64_t agent_hash = 0;
};

/// What to do when the joint state becomes non-finite.
struct DivergencePolicy {
    /// When set, the record is truncated at the last finite state and its
    /// return is this value; otherwise NonFiniteState propagates.
    std::optional<double> penalty;
};

/// Integrates `joint` from x0 over [0, rc.horizon] (sim.t_end is overridden
/// by the horizon), taps controls and rewards at every recorded state and
/// computes the return.
RolloutRecord rollout(const SystemDynamics& joint, const StateVector& x0, const SolverConfig& sim,
                      const ReturnConfig& rc, const RewardTap& tap, SeedKey seed,
                      DivergencePolicy policy = {});

RolloutRecord rollout(const ClosedLoop& loop, const SolverConfig& sim, const ReturnConfig& rc, SeedKey seed,
                      DivergencePolicy policy = {});

} // namespace dynlab
