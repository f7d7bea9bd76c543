#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "dynlab/ctrnn.hpp"
#include "dynlab/environment.hpp"
#include "dynlab/sde.hpp"

namespace dynlab {

/// Ornstein-Uhlenbeck adaptation hyper-parameters.
struct OuaHyper {
    double lambda = 2.0; // OU reversion rate of theta towards mu
    double sigma = 0.1;  // exploration noise scale
    double eta = 5.0;    // mean-adaptation rate
    double rho = 2.0;    // reward-filter rate

    /// Hold the time constants at their initial values (no drift, no noise).
    bool freeze_tau = false;
    /// Time constants are floored here when theta is mapped back to a network.
    double tau_min = 0.05;
    /// Reserved for adaptive exploration noise; must stay false.
    bool adapt_sigma = false;

    /// lambda, rho > 0; sigma, eta >= 0 (zero disables exploration/adaptation).
    void validate() const;
};

/// Learning variables (theta, mu, nu).
struct OuaState {
    std::vector<double> theta;
    std::vector<double> mu;
    double nu = 0.0;

    /// mu0 = theta0, nu0 = 0.
    static OuaState start_at(std::vector<double> theta0);
};

/// Reward-prediction error r - nu.
inline double rpe(double r, double nu) { return r - nu; }

struct ThetaDynamics {
    std::vector<double> drift;     // lambda (mu - theta)
    std::vector<double> diffusion; // diagonal, sigma per parameter
};

ThetaDynamics theta_dynamics(std::span<const double> theta, std::span<const double> mu, const OuaHyper& h);

/// eta delta (theta - mu)
std::vector<double> mu_dynamics(std::span<const double> theta, std::span<const double> mu, double delta,
                                const OuaHyper& h);

/// rho (r - nu)
inline double nu_dynamics(double r, double nu, const OuaHyper& h) { return h.rho * (r - nu); }

/// Index layout of the joint state x = (s, alpha, theta, mu, nu).
struct LearningLayout {
    std::size_t env_dim = 0;
    CtrnnDims dims;
    std::size_t n_params = 0;

    std::size_t alpha_offset() const { return env_dim; }
    std::size_t theta_offset() const { return env_dim + dims.neurons; }
    std::size_t mu_offset() const { return theta_offset() + n_params; }
    std::size_t nu_index() const { return mu_offset() + n_params; }
    std::size_t dim() const { return nu_index() + 1; }
};

/// Quantities the learning system computes internally at a joint state.
struct LearningTap {
    std::vector<double> u;
    double r = 0.0;
    double delta = 0.0;
    bool tau_clamped = false;
};

/// Agent-environment system augmented with OUA learning variables. Noise
/// channels: environment, then one per neuron (kappa), then one per
/// parameter (sigma). mu and nu are noiseless.
class LearningSystem {
public:
    LearningSystem(CtrnnDims dims, double kappa, std::shared_ptr<const Environment> env, OuaHyper hyper);
    LearningSystem(const LearningSystem&) = delete;
    LearningSystem& operator=(const LearningSystem&) = delete;

    const SystemDynamics& dynamics() const noexcept { return system_; }
    const LearningLayout& layout() const noexcept { return layout_; }
    const OuaHyper& hyper() const noexcept { return hyper_; }

    /// (s0, alpha0 = 0, theta0, mu0 = theta0, nu0 = 0)
    StateVector initial_state(const CtrnnParams& theta0) const;

    CtrnnParams network_at(std::span<const double> x, bool* tau_clamped = nullptr) const;
    LearningTap tap(std::span<const double> x) const;

private:
    void drift(std::span<const double> x, std::span<double> dx) const;
    void diffusion(Matrix& g) const;

    LearningLayout layout_;
    double kappa_;
    std::shared_ptr<const Environment> env_;
    OuaHyper hyper_;
    SystemDynamics system_;
};

} // namespace dynlab
