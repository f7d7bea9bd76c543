#include "dynlab/sde.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "dynlab/csv.hpp"
#include "dynlab/errors.hpp"

namespace dynlab {

bool all_finite(std::span<const double> v) {
    for (double e : v)
        if (!std::isfinite(e)) return false;
    return true;
}

StateVector SystemDynamics::eval_drift(std::span<const double> x) const {
    if (x.size() != dim_state) throw DimensionMismatch("state length does not match dim_state");
    StateVector dx(dim_state);
    drift(x, dx);
    return dx;
}

Matrix SystemDynamics::eval_diffusion(std::span<const double> x) const {
    if (x.size() != dim_state) throw DimensionMismatch("state length does not match dim_state");
    Matrix g(dim_state, dim_noise);
    diffusion(x, g);
    return g;
}

SystemDynamics couple(InputSystem agent, InputSystem env, OutputMap observe, OutputMap control) {
    if (!agent.drift || !env.drift || !observe || !control)
        throw std::invalid_argument("couple: missing subsystem function");
    const std::size_t dz = agent.dim_state;
    const std::size_t ds = env.dim_state;
    const std::size_t nz = agent.dim_noise;
    const std::size_t ns = env.dim_noise;
    const std::size_t dim_obs = agent.dim_input;
    const std::size_t dim_ctrl = env.dim_input;
    if (dz + ds == 0) throw DimensionMismatch("couple: empty joint state");

    SystemDynamics joint;
    joint.dim_state = dz + ds;
    joint.dim_noise = nz + ns;
    joint.drift = [=](std::span<const double> x, std::span<double> dx) {
        const auto z = x.first(dz);
        const auto s = x.subspan(dz, ds);
        std::vector<double> y(dim_obs), u(dim_ctrl);
        observe(s, y);
        control(z, u);
        agent.drift(z, y, dx.first(dz));
        env.drift(s, u, dx.subspan(dz, ds));
    };
    joint.diffusion = [=](std::span<const double> x, Matrix& g) {
        if (nz > 0 && agent.diffusion) {
            Matrix gz(dz, nz);
            agent.diffusion(x.first(dz), gz);
            for (std::size_t r = 0; r < dz; ++r)
                for (std::size_t c = 0; c < nz; ++c) g(r, c) = gz(r, c);
        }
        if (ns > 0 && env.diffusion) {
            Matrix gs(ds, ns);
            env.diffusion(x.subspan(dz, ds), gs);
            for (std::size_t r = 0; r < ds; ++r)
                for (std::size_t c = 0; c < ns; ++c) g(dz + r, nz + c) = gs(r, c);
        }
    };
    return joint;
}

std::size_t SolverConfig::num_steps() const {
    const double ratio = t_end / dt;
    return static_cast<std::size_t>(std::floor(ratio * (1.0 + 1e-12)));
}

void SolverConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("solver dt must be positive");
    if (!(t_end >= dt) || !std::isfinite(t_end))
        throw std::invalid_argument("solver t_end must be at least dt");
    if (record_stride == 0) throw std::invalid_argument("record_stride must be positive");
}

namespace {

// Reusable buffers for one integration; avoids per-step allocation.
class Stepper {
public:
    Stepper(const SystemDynamics& system, SolverMethod method)
        : sys_(system),
          method_(method),
          f0_(system.dim_state),
          f1_(system.dim_state),
          noise_term_(system.dim_state),
          predictor_(system.dim_state),
          g_(system.dim_state, system.dim_noise) {}

    // Writes the next state into out; returns false if it is not finite.
    bool step(std::span<const double> x, double dt, std::span<const double> dW, std::span<double> out) {
        const std::size_t d = sys_.dim_state;
        sys_.drift(x, f0_);
        if (sys_.dim_noise > 0) {
            g_.set_zero();
            sys_.diffusion(x, g_);
            multiply(g_, dW, noise_term_);
        }
        if (method_ == SolverMethod::EulerMaruyama) {
            for (std::size_t i = 0; i < d; ++i) out[i] = x[i] + f0_[i] * dt + noise_term_[i];
            return all_finite(out);
        }
        for (std::size_t i = 0; i < d; ++i) predictor_[i] = x[i] + f0_[i] * dt + noise_term_[i];
        if (!all_finite(predictor_)) return false;
        sys_.drift(predictor_, f1_);
        for (std::size_t i = 0; i < d; ++i)
            out[i] = x[i] + 0.5 * (f0_[i] + f1_[i]) * dt + noise_term_[i];
        return all_finite(out);
    }

private:
    const SystemDynamics& sys_;
    SolverMethod method_;
    std::vector<double> f0_, f1_, noise_term_, predictor_;
    Matrix g_;
};

StateVector single_step(const SystemDynamics& system, SolverMethod method, std::span<const double> x,
                        double dt, std::span<const double> dW) {
    if (x.size() != system.dim_state) throw DimensionMismatch("state length does not match dim_state");
    if (dW.size() != system.dim_noise) throw DimensionMismatch("dW length does not match dim_noise");
    if (!all_finite(x)) throw NonFiniteState(0, 0.0);
    Stepper stepper(system, method);
    StateVector out(system.dim_state);
    if (!stepper.step(x, dt, dW, out)) throw NonFiniteState(1, dt);
    return out;
}

} // namespace

StateVector step_euler_maruyama(const SystemDynamics& system, std::span<const double> x, double dt,
                                std::span<const double> dW) {
    return single_step(system, SolverMethod::EulerMaruyama, x, dt, dW);
}

StateVector step_heun(const SystemDynamics& system, std::span<const double> x, double dt,
                      std::span<const double> dW) {
    return single_step(system, SolverMethod::HeunStochastic, x, dt, dW);
}

IntegrationResult integrate_until_failure(const SystemDynamics& system, const StateVector& x0,
                                          const SolverConfig& config, NoiseStream noise) {
    config.validate();
    if (x0.size() != system.dim_state) throw DimensionMismatch("x0 length does not match dim_state");
    if (noise.dim() != system.dim_noise) throw DimensionMismatch("noise dim does not match dim_noise");
    if (!all_finite(x0)) throw NonFiniteState(0, 0.0);

    const std::size_t n = config.num_steps();
    const std::size_t stride = config.record_stride;
    IntegrationResult result;
    Trajectory& traj = result.trajectory;
    traj.times.reserve(n / stride + 1);
    traj.states.reserve(n / stride + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(x0);

    Stepper stepper(system, config.method);
    StateVector x = x0, next(system.dim_state), dW(system.dim_noise);
    for (std::size_t k = 1; k <= n; ++k) {
        if (system.dim_noise > 0) noise.increments(config.dt, dW);
        const double t = static_cast<double>(k) * config.dt;
        if (!stepper.step(x, config.dt, dW, next)) {
            result.diverged = true;
            result.failed_step = k;
            result.failed_time = t;
            return result;
        }
        x.swap(next);
        if (k % stride == 0) {
            traj.times.push_back(t);
            traj.states.push_back(x);
        }
    }
    return result;
}

Trajectory integrate(const SystemDynamics& system, const StateVector& x0, const SolverConfig& config,
                     NoiseStream noise) {
    IntegrationResult r = integrate_until_failure(system, x0, config, std::move(noise));
    if (r.diverged) throw NonFiniteState(r.failed_step, r.failed_time);
    return std::move(r.trajectory);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    CsvWriter csv(os);
    const std::size_t d = traj.states.empty() ? 0 : traj.states.front().size();
    std::vector<std::string> cols{"t"};
    for (std::size_t i = 0; i < d; ++i) cols.push_back("x" + std::to_string(i));
    csv.header(cols);
    std::vector<double> row(d + 1);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        row[0] = traj.times[i];
        std::copy(traj.states[i].begin(), traj.states[i].end(), row.begin() + 1);
        csv.row(row);
    }
}

} // namespace dynlab
