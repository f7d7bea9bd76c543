#include "dynlab/environment.hpp"

#include <cmath>
#include <stdexcept>

namespace dynlab {

InputSystem environment_system(std::shared_ptr<const Environment> env) {
    if (!env) throw std::invalid_argument("environment_system: null environment");
    InputSystem sys;
    sys.dim_state = env->dim_state();
    sys.dim_noise = env->dim_noise();
    sys.dim_input = env->dim_ctrl();
    sys.drift = [env](std::span<const double> s, std::span<const double> u, std::span<double> ds) {
        env->drift(s, u, ds);
    };
    sys.diffusion = [env](std::span<const double> s, Matrix& g) { env->diffusion(s, g); };
    return sys;
}

void SdiParams::validate() const {
    if (!(gamma >= 0.0)) throw std::invalid_argument("sdi gamma must be non-negative");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("sdi epsilon must be non-negative");
    if (!std::isfinite(s0[0]) || !std::isfinite(s0[1])) throw std::invalid_argument("sdi s0 must be finite");
}

void RewardWeights::validate() const {
    if (!(w_pos >= 0.0) || !(w_ctrl >= 0.0)) throw std::invalid_argument("reward weights must be non-negative");
}

std::array<double, 2> sdi_drift(std::array<double, 2> s, double u, const SdiParams& p) {
    return {s[1], -p.gamma * s[1] + u};
}

Matrix sdi_diffusion(const SdiParams& p) {
    Matrix g(2, 1);
    g(1, 0) = p.epsilon;
    return g;
}

double quadratic_reward(double position, double u, const RewardWeights& w) {
    return -w.w_pos * position * position - w.w_ctrl * u * u;
}

StochasticDoubleIntegrator::StochasticDoubleIntegrator(SdiParams params, RewardWeights weights)
    : params_(params), weights_(weights) {
    params_.validate();
    weights_.validate();
}

void StochasticDoubleIntegrator::drift(std::span<const double> s, std::span<const double> u,
                                       std::span<double> ds) const {
    ds[0] = s[1];
    ds[1] = -params_.gamma * s[1] + u[0];
}

void StochasticDoubleIntegrator::diffusion(std::span<const double>, Matrix& g) const {
    g(1, 0) = params_.epsilon;
}

void StochasticDoubleIntegrator::observe(std::span<const double> s, std::span<double> y) const {
    y[0] = s[0];
    y[1] = s[1];
}

double StochasticDoubleIntegrator::reward(std::span<const double> s, std::span<const double> u) const {
    return quadratic_reward(s[0], u[0], weights_);
}

SdiDistribution SdiDistribution::point_mass(const SdiParams& p, RewardWeights w) {
    SdiDistribution d;
    d.gamma_range = {p.gamma, p.gamma};
    d.epsilon_range = {p.epsilon, p.epsilon};
    d.position_range = {p.s0[0], p.s0[0]};
    d.velocity_range = {p.s0[1], p.s0[1]};
    d.weights = w;
    return d;
}

namespace {

double draw(std::mt19937_64& rng, std::array<double, 2> range) {
    if (range[0] == range[1]) return range[0];
    return std::uniform_real_distribution<double>(range[0], range[1])(rng);
}

} // namespace

StochasticDoubleIntegrator SdiDistribution::sample(std::mt19937_64& rng) const {
    SdiParams p;
    p.gamma = draw(rng, gamma_range);
    p.epsilon = draw(rng, epsilon_range);
    p.s0[0] = draw(rng, position_range);
    p.s0[1] = draw(rng, velocity_range);
    return StochasticDoubleIntegrator(p, weights);
}

} // namespace dynlab
