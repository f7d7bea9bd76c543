#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "dynlab/linalg.hpp"
#include "dynlab/noise.hpp"

namespace dynlab {

using StateVector = std::vector<double>;

bool all_finite(std::span<const double> v);

/// Autonomous Ito SDE  dx = drift(x) dt + diffusion(x) dW  over a flat state.
///
/// `drift` writes dim_state values into its output span. `diffusion` receives a
/// zeroed dim_state x dim_noise matrix and sets its non-zero entries.
struct SystemDynamics {
    using DriftFn = std::function<void(std::span<const double> x, std::span<double> dx)>;
    using DiffusionFn = std::function<void(std::span<const double> x, Matrix& g)>;

    std::size_t dim_state = 0;
    std::size_t dim_noise = 0;
    DriftFn drift;
    DiffusionFn diffusion;

    StateVector eval_drift(std::span<const double> x) const;
    Matrix eval_diffusion(std::span<const double> x) const;
};

/// Subsystem driven by an external input (observation for an agent, control
/// for an environment). Combined into a SystemDynamics by couple().
struct InputSystem {
    using DriftFn = std::function<void(std::span<const double> x, std::span<const double> input,
                                       std::span<double> dx)>;
    using DiffusionFn = std::function<void(std::span<const double> x, Matrix& g)>;

    std::size_t dim_state = 0;
    std::size_t dim_noise = 0;
    std::size_t dim_input = 0;
    DriftFn drift;
    DiffusionFn diffusion;
};

/// Map from one subsystem's state to the other's input.
using OutputMap = std::function<void(std::span<const double> state, std::span<double> out)>;

/// Joint system over x = (z, s): the agent (state z, input y = observe(s)) and
/// the environment (state s, input u = control(z)) are evaluated against the
/// same instantaneous state. Noise channels are ordered agent first.
SystemDynamics couple(InputSystem agent, InputSystem env, OutputMap observe, OutputMap control);

enum class SolverMethod { EulerMaruyama, HeunStochastic };

struct SolverConfig {
    SolverMethod method = SolverMethod::HeunStochastic;
    double dt = 0.1;
    double t_end = 1.0;
    std::size_t record_stride = 1;

    /// floor(t_end / dt), tolerant to representation error in the ratio.
    std::size_t num_steps() const;
    void validate() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector> states;

    std::size_t size() const noexcept { return times.size(); }
};

/// x + drift(x) dt + diffusion(x) dW
StateVector step_euler_maruyama(const SystemDynamics& system, std::span<const double> x, double dt,
                                std::span<const double> dW);

/// Drift-Heun predictor/corrector with Euler diffusion:
///   x~ = x + f(x) dt + g(x) dW
///   x' = x + (f(x) + f(x~)) dt / 2 + g(x) dW
StateVector step_heun(const SystemDynamics& system, std::span<const double> x, double dt,
                      std::span<const double> dW);

/// Outcome of an integration that may stop early on a non-finite state.
struct IntegrationResult {
    Trajectory trajectory; // recorded points up to the last finite step
    bool diverged = false;
    std::size_t failed_step = 0;
    double failed_time = 0.0;
};

/// Like integrate(), but stops at the first non-finite step and reports it
/// instead of throwing.
IntegrationResult integrate_until_failure(const SystemDynamics& system, const StateVector& x0,
                                          const SolverConfig& config, NoiseStream noise);

/// Fixed-step integration from x0 over [0, t_end]. Records step 0 and every
/// record_stride-th step thereafter. Throws NonFiniteState naming the first
/// step whose result is not finite.
Trajectory integrate(const SystemDynamics& system, const StateVector& x0, const SolverConfig& config,
                     NoiseStream noise);

/// CSV with header `t,x0,x1,...` and 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

} // namespace dynlab
