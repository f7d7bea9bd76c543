#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <random>
#include <span>

#include "dynlab/linalg.hpp"
#include "dynlab/sde.hpp"

namespace dynlab {

/// Controlled environment: state equation, observation map and reward.
class Environment {
public:
    virtual ~Environment() = default;

    virtual std::size_t dim_state() const = 0;
    virtual std::size_t dim_obs() const = 0;
    virtual std::size_t dim_ctrl() const = 0;
    virtual std::size_t dim_noise() const = 0;

    virtual void drift(std::span<const double> s, std::span<const double> u, std::span<double> ds) const = 0;
    /// g is dim_state x dim_noise and zeroed by the caller.
    virtual void diffusion(std::span<const double> s, Matrix& g) const = 0;
    virtual void observe(std::span<const double> s, std::span<double> y) const = 0;
    virtual double reward(std::span<const double> s, std::span<const double> u) const = 0;

    virtual StateVector initial_state() const = 0;
};

/// Environment viewed as an SDE subsystem driven by the control input; the
/// returned functions share ownership of `env`.
InputSystem environment_system(std::shared_ptr<const Environment> env);

struct SdiParams {
    double gamma = 0.5;
    double epsilon = 0.1;
    std::array<double, 2> s0{2.0, 0.0};

    void validate() const;
};

struct RewardWeights {
    double w_pos = 0.9;
    double w_ctrl = 0.1;

    void validate() const;
};

/// (s2, -gamma s2 + u)
std::array<double, 2> sdi_drift(std::array<double, 2> s, double u, const SdiParams& p);
/// Column (0, epsilon): noise enters the velocity equation only.
Matrix sdi_diffusion(const SdiParams& p);
/// -w_pos s1^2 - w_ctrl u^2
double quadratic_reward(double position, double u, const RewardWeights& w = {});

/// Stochastic double integrator with full observability (y = s).
class StochasticDoubleIntegrator final : public Environment {
public:
    explicit StochasticDoubleIntegrator(SdiParams params = {}, RewardWeights weights = {});

    std::size_t dim_state() const override { return 2; }
    std::size_t dim_obs() const override { return 2; }
    std::size_t dim_ctrl() const override { return 1; }
    std::size_t dim_noise() const override { return 1; }

    void drift(std::span<const double> s, std::span<const double> u, std::span<double> ds) const override;
    void diffusion(std::span<const double> s, Matrix& g) const override;
    void observe(std::span<const double> s, std::span<double> y) const override;
    double reward(std::span<const double> s, std::span<const double> u) const override;
    StateVector initial_state() const override { return {params_.s0[0], params_.s0[1]}; }

    const SdiParams& params() const noexcept { return params_; }
    const RewardWeights& weights() const noexcept { return weights_; }

private:
    SdiParams params_;
    RewardWeights weights_;
};

/// Sampling distribution over SDI environments, used for averaging returns
/// across environments. Bounds are inclusive uniform ranges.
struct SdiDistribution {
    std::array<double, 2> gamma_range{0.25, 1.0};
    std::array<double, 2> epsilon_range{0.05, 0.2};
    std::array<double, 2> position_range{-2.0, 2.0};
    std::array<double, 2> velocity_range{-2.0, 2.0};
    RewardWeights weights{};

    /// All mass on a single environment.
    static SdiDistribution point_mass(const SdiParams& p, RewardWeights w = {});

    StochasticDoubleIntegrator sample(std::mt19937_64& rng) const;
};

} // namespace dynlab
