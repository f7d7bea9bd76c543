#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "dynlab/errors.hpp"
#include "dynlab/experiments.hpp"
#include "dynlab/rollout.hpp"

using namespace dynlab;

namespace {

std::vector<double> grid(double t_end, double dt) {
    std::vector<double> t;
    const auto n = static_cast<std::size_t>(std::llround(t_end / dt));
    for (std::size_t i = 0; i <= n; ++i) t.push_back(static_cast<double>(i) * dt);
    return t;
}

ClosedLoop null_loop(SdiParams p, double kappa = 0.01) {
    return ctrnn_closed_loop(init_params(CtrnnDims{}, kappa),
                             std::make_shared<const StochasticDoubleIntegrator>(p));
}

} // namespace

TEST(Return, ZeroRewards) {
    const auto t = grid(10.0, 0.1);
    EXPECT_EQ(compute_return(std::vector<double>(t.size(), 0.0), t, ReturnConfig{0.0, 10.0}), 0.0);
}

TEST(Return, ConstantRewardIsRiemannSum) {
    const auto t = grid(10.0, 0.1);
    const double j = compute_return(std::vector<double>(t.size(), -1.0), t, ReturnConfig{0.0, 10.0});
    EXPECT_NEAR(j, -10.0, 0.1);
}

TEST(Return, DiscountedUnitRewardApproachesOne) {
    const auto t = grid(60.0, 0.01);
    const double j = compute_return(std::vector<double>(t.size(), 1.0), t, ReturnConfig{1.0, 60.0});
    EXPECT_NEAR(j, 1.0, 0.02);
}

TEST(Return, IsLinearAndBoundedUnderDiscounting) {
    const auto t = grid(30.0, 0.1);
    std::vector<double> a(t.size()), b(t.size()), sum(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        a[i] = std::sin(0.3 * t[i]);
        b[i] = -std::cos(1.1 * t[i]);
        sum[i] = 2.0 * a[i] + b[i];
    }
    const ReturnConfig rc{0.5, 30.0};
    EXPECT_NEAR(compute_return(sum, t, rc), 2.0 * compute_return(a, t, rc) + compute_return(b, t, rc), 1e-12);
    EXPECT_LE(std::abs(compute_return(a, t, rc)), 1.0 / 0.5 + 0.1);
}

TEST(Return, LengthMismatchThrows) {
    EXPECT_THROW(compute_return(std::vector<double>(3), std::vector<double>(4), ReturnConfig{}), DimensionMismatch);
    EXPECT_THROW((ReturnConfig{-1.0, 10.0}.validate()), std::invalid_argument);
    EXPECT_THROW((ReturnConfig{0.0, 0.0}.validate()), std::invalid_argument);
}

TEST(Rollout, NullAgentFollowsUncontrolledParticle) {
    const double gamma = 0.5;
    const ClosedLoop loop = null_loop(SdiParams{gamma, 0.0, {2.0, 1.0}});
    SolverConfig sim;
    const RolloutRecord rec = rollout(loop, sim, ReturnConfig{0.0, 10.0}, SeedKey{1, 0});
    ASSERT_EQ(rec.trajectory.size(), 101u);
    for (std::size_t i = 0; i < rec.trajectory.size(); ++i) {
        const double t = rec.trajectory.times[i];
        const double s1 = 2.0 + (1.0 - std::exp(-gamma * t)) / gamma;
        EXPECT_NEAR(rec.rewards[i], -0.9 * s1 * s1, 2e-3) << "t " << t;
        EXPECT_EQ(rec.controls[i][0], 0.0);
    }
}

TEST(Rollout, DeterministicInSeedAndNonPositiveOnSdi) {
    const ClosedLoop loop = null_loop(SdiParams{});
    const ReturnConfig rc{0.0, 50.0};
    const RolloutRecord a = rollout(loop, SolverConfig{}, rc, SeedKey{4, 2});
    const RolloutRecord b = rollout(loop, SolverConfig{}, rc, SeedKey{4, 2});
    const RolloutRecord c = rollout(loop, SolverConfig{}, rc, SeedKey{5, 2});
    EXPECT_EQ(a.trajectory.states, b.trajectory.states);
    EXPECT_EQ(a.rewards, b.rewards);
    EXPECT_EQ(a.return_, b.return_);
    EXPECT_NE(a.return_, c.return_);
    EXPECT_LE(a.return_, 0.0);
    EXPECT_EQ(a.return_, compute_return(a.rewards, a.trajectory.times, rc));
    EXPECT_EQ(a.rewards.size(), a.trajectory.size());
}

TEST(Rollout, HorizonOverridesSolverEnd) {
    SolverConfig sim;
    sim.t_end = 3.0;
    const RolloutRecord rec = rollout(null_loop(SdiParams{}), sim, ReturnConfig{0.0, 7.0}, SeedKey{});
    EXPECT_NEAR(rec.trajectory.times.back(), 7.0, 1e-12);
}

TEST(Rollout, DivergenceThrowsOrIsPenalised) {
    SystemDynamics blowup;
    blowup.dim_state = 1;
    blowup.dim_noise = 1;
    blowup.drift = [](std::span<const double> x, std::span<double> dx) { dx[0] = x[0] * x[0]; };
    blowup.diffusion = [](std::span<const double>, Matrix&) {};
    RewardTap tap;
    tap.fn = [](std::span<const double> x, std::span<double> u) {
        u[0] = 0.0;
        return -x[0];
    };
    const ReturnConfig rc{0.0, 10.0};
    EXPECT_THROW(rollout(blowup, {1.0}, SolverConfig{}, rc, tap, SeedKey{}), NonFiniteState);
    const RolloutRecord rec = rollout(blowup, {1.0}, SolverConfig{}, rc, tap, SeedKey{}, DivergencePolicy{-1e6});
    EXPECT_TRUE(rec.diverged);
    EXPECT_EQ(rec.return_, -1e6);
    EXPECT_GT(rec.diverged_at, 0.0);
    EXPECT_LT(rec.trajectory.times.back(), 10.0);
}
