#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "dynlab/environment.hpp"
#include "dynlab/errors.hpp"
#include "dynlab/sde.hpp"

using namespace dynlab;

namespace {

SystemDynamics linear_decay(double rate = 1.0) {
    SystemDynamics s;
    s.dim_state = 1;
    s.dim_noise = 1;
    s.drift = [rate](std::span<const double> x, std::span<double> dx) { dx[0] = -rate * x[0]; };
    s.diffusion = [](std::span<const double>, Matrix&) {};
    return s;
}

double decay_error(SolverMethod m, double dt) {
    SolverConfig c;
    c.method = m;
    c.dt = dt;
    c.t_end = 1.0;
    const Trajectory tr = integrate(linear_decay(), {1.0}, c, NoiseStream(SeedKey{0, 0}, 1));
    return std::abs(tr.states.back()[0] - std::exp(-1.0));
}

} // namespace

TEST(Sde, ZeroDynamicsIsIdentity) {
    SystemDynamics s;
    s.dim_state = 2;
    s.dim_noise = 2;
    s.drift = [](std::span<const double>, std::span<double> dx) { dx[0] = dx[1] = 0.0; };
    s.diffusion = [](std::span<const double>, Matrix&) {};
    const std::vector<double> dw{0.3, -0.2};
    EXPECT_EQ(step_euler_maruyama(s, std::vector<double>{1, 2}, 0.1, dw), (StateVector{1, 2}));
    EXPECT_EQ(step_heun(s, std::vector<double>{1, 2}, 0.1, dw), (StateVector{1, 2}));
}

TEST(Sde, EulerStepOfSdiDrift) {
    const SdiParams p;
    const auto d = sdi_drift({1.0, 2.0}, 0.0, p);
    EXPECT_DOUBLE_EQ(d[0], 2.0);
    EXPECT_DOUBLE_EQ(d[1], -1.0);

    SystemDynamics s;
    s.dim_state = 2;
    s.dim_noise = 1;
    s.drift = [&](std::span<const double> x, std::span<double> dx) {
        const auto f = sdi_drift({x[0], x[1]}, 0.0, p);
        dx[0] = f[0];
        dx[1] = f[1];
    };
    s.diffusion = [](std::span<const double>, Matrix& g) { g(1, 0) = 0.1; };
    const StateVector next = step_euler_maruyama(s, std::vector<double>{1, 2}, 0.1, std::vector<double>{0.0});
    EXPECT_NEAR(next[0], 1.2, 1e-15);
    EXPECT_NEAR(next[1], 1.9, 1e-15);
}

TEST(Sde, SingleStepsOfLinearDecay) {
    const std::vector<double> dw{0.0};
    EXPECT_NEAR(step_euler_maruyama(linear_decay(), std::vector<double>{1.0}, 0.1, dw)[0], 0.9, 1e-15);
    EXPECT_NEAR(step_heun(linear_decay(), std::vector<double>{1.0}, 0.1, dw)[0], 0.905, 1e-15);
}

TEST(Sde, HeunAddsTheSameNoiseOnceWithConstantDiffusion) {
    SystemDynamics s = linear_decay(0.0);
    s.diffusion = [](std::span<const double>, Matrix& g) { g(0, 0) = 2.0; };
    const std::vector<double> dw{0.25};
    EXPECT_DOUBLE_EQ(step_heun(s, std::vector<double>{1.0}, 0.1, dw)[0], 1.5);
    EXPECT_DOUBLE_EQ(step_euler_maruyama(s, std::vector<double>{1.0}, 0.1, dw)[0], 1.5);
}

TEST(Sde, ConvergenceOrders) {
    for (double dt : {0.1, 0.05, 0.025}) {
        const double e1 = decay_error(SolverMethod::EulerMaruyama, dt);
        const double e2 = decay_error(SolverMethod::EulerMaruyama, dt / 2);
        EXPECT_NEAR(e1 / e2, 2.0, 0.15) << "dt " << dt;
        const double h1 = decay_error(SolverMethod::HeunStochastic, dt);
        const double h2 = decay_error(SolverMethod::HeunStochastic, dt / 2);
        EXPECT_NEAR(h1 / h2, 4.0, 0.3) << "dt " << dt;
    }
}

TEST(Sde, RecordsStrideAndFinalStep) {
    SolverConfig c;
    c.dt = 0.1;
    c.t_end = 1.0;
    c.record_stride = 3;
    const Trajectory tr = integrate(linear_decay(), {1.0}, c, NoiseStream(SeedKey{0, 0}, 1));
    ASSERT_EQ(tr.size(), 4u); // steps 0, 3, 6, 9
    EXPECT_DOUBLE_EQ(tr.times[1], 0.30000000000000004);
    EXPECT_EQ(c.num_steps(), 10u);
    c.record_stride = 1;
    EXPECT_EQ(integrate(linear_decay(), {1.0}, c, NoiseStream(SeedKey{0, 0}, 1)).size(), 11u);
}

TEST(Sde, NonFiniteStateNamesTheStep) {
    SystemDynamics s = linear_decay(-1e200);
    SolverConfig c;
    c.method = SolverMethod::EulerMaruyama;
    c.t_end = 5.0;
    try {
        integrate(s, {1.0}, c, NoiseStream(SeedKey{0, 0}, 1));
        FAIL() << "expected NonFiniteState";
    } catch (const NonFiniteState& e) {
        EXPECT_EQ(e.step(), 2u);
        EXPECT_NEAR(e.time(), 0.2, 1e-12);
    }
    const IntegrationResult r = integrate_until_failure(s, {1.0}, c, NoiseStream(SeedKey{0, 0}, 1));
    EXPECT_TRUE(r.diverged);
    EXPECT_EQ(r.failed_step, 2u);
    EXPECT_EQ(r.trajectory.size(), 2u);
}

TEST(Sde, RejectsBadConfig) {
    SolverConfig c;
    c.dt = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.dt = 0.1;
    c.record_stride = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    EXPECT_THROW(integrate(linear_decay(), {1.0, 2.0}, SolverConfig{}, NoiseStream(SeedKey{}, 1)),
                 DimensionMismatch);
}

TEST(Sde, CoupleOrdersAgentFirst) {
    InputSystem agent;
    agent.dim_state = 1;
    agent.dim_noise = 1;
    agent.dim_input = 1;
    agent.drift = [](std::span<const double> z, std::span<const double> y, std::span<double> dz) {
        dz[0] = y[0] - z[0];
    };
    agent.diffusion = [](std::span<const double>, Matrix& g) { g(0, 0) = 0.5; };
    InputSystem env;
    env.dim_state = 1;
    env.dim_noise = 1;
    env.dim_input = 1;
    env.drift = [](std::span<const double> s, std::span<const double> u, std::span<double> ds) { ds[0] = u[0] * s[0]; };
    env.diffusion = [](std::span<const double>, Matrix& g) { g(0, 0) = 0.25; };
    const SystemDynamics joint = couple(
        agent, env, [](std::span<const double> s, std::span<double> y) { y[0] = 3 * s[0]; },
        [](std::span<const double> z, std::span<double> u) { u[0] = z[0] + 1; });
    EXPECT_EQ(joint.dim_state, 2u);
    EXPECT_EQ(joint.dim_noise, 2u);
    const StateVector d = joint.eval_drift(std::vector<double>{2.0, 5.0});
    EXPECT_DOUBLE_EQ(d[0], 15.0 - 2.0);
    EXPECT_DOUBLE_EQ(d[1], 3.0 * 5.0);
    const Matrix g = joint.eval_diffusion(std::vector<double>{2.0, 5.0});
    EXPECT_DOUBLE_EQ(g(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(g(1, 1), 0.25);
    EXPECT_DOUBLE_EQ(g(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(g(1, 0), 0.0);
}

TEST(Sde, TrajectoryCsvHeader) {
    Trajectory tr;
    tr.times = {0.0};
    tr.states = {{1.0, 0.1}};
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    EXPECT_EQ(os.str(), "t,x0,x1\n0,1,0.10000000000000001\n");
}
