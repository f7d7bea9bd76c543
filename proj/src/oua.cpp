#include "dynlab/oua.hpp"

#include <cmath>
#include <stdexcept>

#include "dynlab/errors.hpp"

namespace dynlab {

void OuaHyper::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("oua lambda must be positive");
    if (!(rho > 0.0)) throw std::invalid_argument("oua rho must be positive");
    if (!(sigma >= 0.0)) throw std::invalid_argument("oua sigma must be non-negative");
    if (!(eta >= 0.0)) throw std::invalid_argument("oua eta must be non-negative");
    if (!(tau_min >= 0.0)) throw std::invalid_argument("oua tau_min must be non-negative");
    if (adapt_sigma) throw std::invalid_argument("adaptive exploration noise is not supported");
}

OuaState OuaState::start_at(std::vector<double> theta0) {
    OuaState st;
    st.mu = theta0;
    st.theta = std::move(theta0);
    st.nu = 0.0;
    return st;
}

ThetaDynamics theta_dynamics(std::span<const double> theta, std::span<const double> mu, const OuaHyper& h) {
    if (theta.size() != mu.size()) throw DimensionMismatch("theta and mu lengths differ");
    ThetaDynamics out;
    out.drift.resize(theta.size());
    out.diffusion.assign(theta.size(), h.sigma);
    for (std::size_t i = 0; i < theta.size(); ++i) out.drift[i] = h.lambda * (mu[i] - theta[i]);
    return out;
}

std::vector<double> mu_dynamics(std::span<const double> theta, std::span<const double> mu, double delta,
                                const OuaHyper& h) {
    if (theta.size() != mu.size()) throw DimensionMismatch("theta and mu lengths differ");
    std::vector<double> out(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) out[i] = h.eta * delta * (theta[i] - mu[i]);
    return out;
}

LearningSystem::LearningSystem(CtrnnDims dims, double kappa, std::shared_ptr<const Environment> env,
                               OuaHyper hyper)
    : kappa_(kappa), env_(std::move(env)), hyper_(hyper) {
    if (!env_) throw std::invalid_argument("learning system needs an environment");
    hyper_.validate();
    if (dims.observations != env_->dim_obs() || dims.controls != env_->dim_ctrl())
        throw DimensionMismatch("CTRNN input/output dims do not match the environment");
    if (dims.neurons == 0) throw DimensionMismatch("CTRNN needs at least one neuron");
    layout_.env_dim = env_->dim_state();
    layout_.dims = dims;
    layout_.n_params = dims.param_count();

    system_.dim_state = layout_.dim();
    system_.dim_noise = env_->dim_noise() + dims.neurons + layout_.n_params;
    system_.drift = [this](std::span<const double> x, std::span<double> dx) { drift(x, dx); };
    system_.diffusion = [this](std::span<const double> x, Matrix& g) {
        if (env_->dim_noise() > 0) {
            Matrix ge(layout_.env_dim, env_->dim_noise());
            env_->diffusion(x.first(layout_.env_dim), ge);
            for (std::size_t r = 0; r < ge.rows; ++r)
                for (std::size_t c = 0; c < ge.cols; ++c) g(r, c) = ge(r, c);
        }
        diffusion(g);
    };
}

StateVector LearningSystem::initial_state(const CtrnnParams& theta0) const {
    if (theta0.dims() != layout_.dims) throw DimensionMismatch("theta0 dims do not match the learning system");
    StateVector x(layout_.dim(), 0.0);
    const StateVector s0 = env_->initial_state();
    std::copy(s0.begin(), s0.end(), x.begin());
    const std::vector<double> flat = flatten_params(theta0);
    std::copy(flat.begin(), flat.end(), x.begin() + static_cast<std::ptrdiff_t>(layout_.theta_offset()));
    std::copy(flat.begin(), flat.end(), x.begin() + static_cast<std::ptrdiff_t>(layout_.mu_offset()));
    return x;
}

CtrnnParams LearningSystem::network_at(std::span<const double> x, bool* tau_clamped) const {
    return unflatten_params(x.subspan(layout_.theta_offset(), layout_.n_params), layout_.dims, kappa_,
                            hyper_.tau_min, tau_clamped);
}

LearningTap LearningSystem::tap(std::span<const double> x) const {
    LearningTap t;
    const CtrnnParams p = network_at(x, &t.tau_clamped);
    t.u = readout(x.subspan(layout_.alpha_offset(), layout_.dims.neurons), p);
    t.r = env_->reward(x.first(layout_.env_dim), t.u);
    t.delta = rpe(t.r, x[layout_.nu_index()]);
    return t;
}

void LearningSystem::drift(std::span<const double> x, std::span<double> dx) const {
    const std::size_t ds = layout_.env_dim;
    const std::size_t k = layout_.dims.neurons;
    const std::size_t n = layout_.n_params;
    const auto s = x.first(ds);
    const auto alpha = x.subspan(layout_.alpha_offset(), k);
    const auto theta = x.subspan(layout_.theta_offset(), n);
    const auto mu = x.subspan(layout_.mu_offset(), n);
    const double nu = x[layout_.nu_index()];

    const CtrnnParams p = network_at(x);
    std::vector<double> u(layout_.dims.controls), y(layout_.dims.observations);
    readout(alpha, p, u);
    env_->observe(s, y);
    const double r = env_->reward(s, u);
    const double delta = rpe(r, nu);

    env_->drift(s, u, dx.first(ds));
    ctrnn_drift(alpha, y, p, dx.subspan(layout_.alpha_offset(), k));
    const std::size_t frozen = hyper_.freeze_tau ? k : 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool hold = i < frozen;
        dx[layout_.theta_offset() + i] = hold ? 0.0 : hyper_.lambda * (mu[i] - theta[i]);
        dx[layout_.mu_offset() + i] = hold ? 0.0 : hyper_.eta * delta * (theta[i] - mu[i]);
    }
    dx[layout_.nu_index()] = nu_dynamics(r, nu, hyper_);
}

void LearningSystem::diffusion(Matrix& g) const {
    const std::size_t k = layout_.dims.neurons;
    const std::size_t noise0 = env_->dim_noise();
    for (std::size_t i = 0; i < k; ++i) g(layout_.alpha_offset() + i, noise0 + i) = kappa_;
    const std::size_t frozen = hyper_.freeze_tau ? k : 0;
    for (std::size_t i = frozen; i < layout_.n_params; ++i)
        g(layout_.theta_offset() + i, noise0 + k + i) = hyper_.sigma;
}

} // namespace dynlab
