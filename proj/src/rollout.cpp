#include "dynlab/rollout.hpp"

#include <cmath>
#include <stdexcept>

#include "dynlab/errors.hpp"

namespace dynlab {

void ReturnConfig::validate() const {
    if (!(discount_rate >= 0.0)) throw std::invalid_argument("discount_rate must be non-negative");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon must be positive");
}

double compute_return(std::span<const double> rewards, std::span<const double> times,
                      const ReturnConfig& rc) {
    if (rewards.size() != times.size()) throw DimensionMismatch("rewards and times differ in length");
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        const double weight = rc.discount_rate == 0.0 ? 1.0 : std::exp(-rc.discount_rate * times[i]);
        total += weight * rewards[i] * (times[i + 1] - times[i]);
    }
    return total;
}

RolloutRecord rollout(const SystemDynamics& joint, const StateVector& x0, const SolverConfig& sim,
                      const ReturnConfig& rc, const RewardTap& tap, SeedKey seed, DivergencePolicy policy) {
    rc.validate();
    SolverConfig run = sim;
    run.t_end = rc.horizon;

    RolloutRecord rec;
    rec.seed = seed;
    IntegrationResult res = integrate_until_failure(joint, x0, run, NoiseStream(seed, joint.dim_noise));
    if (res.diverged && !policy.penalty) throw NonFiniteState(res.failed_step, res.failed_time);

    rec.trajectory = std::move(res.trajectory);
    const std::size_t n = rec.trajectory.size();
    rec.controls.reserve(n);
    rec.rewards.reserve(n);
    std::vector<double> u(tap.dim_ctrl);
    for (const StateVector& x : rec.trajectory.states) {
        rec.rewards.push_back(tap.fn(x, u));
        rec.controls.push_back(u);
    }
    if (res.diverged) {
        rec.diverged = true;
        rec.diverged_at = res.failed_time;
        rec.return_ = *policy.penalty;
    } else {
        rec.return_ = compute_return(rec.rewards, rec.trajectory.times, rc);
    }
    return rec;
}

RolloutRecord rollout(const ClosedLoop& loop, const SolverConfig& sim, const ReturnConfig& rc, SeedKey seed,
                      DivergencePolicy policy) {
    return rollout(loop.dynamics, loop.x0, sim, rc, loop.tap, seed, policy);
}

} // namespace dynlab
